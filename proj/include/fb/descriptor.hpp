#pragma once

#include "fb/equivariant.hpp"

#include "json.hpp"

namespace fb {

enum class BundleKind { TStructure, FBundle, Equivariant };

const char *kind_name(BundleKind k);

// A parsed bundle descriptor; f is set for F-bundles and equivariant pairs
// (the k-bundle), e only for equivariant pairs.
struct Descriptor {
    BundleKind kind = BundleKind::TStructure;
    TStruct t;
    FBund f;
    EquivFBund e;

    static Descriptor of(const TStruct &t);
    static Descriptor of(const FBund &f);
    static Descriptor of(const EquivFBund &e);
};

nlohmann::json to_json(const Descriptor &d);
nlohmann::json params_json(const ParamSpec &p);
nlohmann::json order_json(const TruncOrder &o);
nlohmann::json matrix_json(const SeriesMatrix &m);
nlohmann::json scalar_matrix_json(const ScalarMatrix &m);

nlohmann::json vec_json(const Vec &v);
nlohmann::json flatness_json(const FlatnessReport &r);
nlohmann::json conditions_json(const ConditionReport &r);
// mu_v matrix, determinant, localizations and the maximality verdict.
nlohmann::json certificate_json(const UnfoldResult &r);

// Throws ParseError (JSON syntax, malformed series strings located in the
// text) or Error for structurally invalid descriptors.
Descriptor parse_descriptor(const std::string &text);

// Canonical form: sorted keys, two-space indent, trailing newline.
std::string dump_json(const nlohmann::json &j);
std::string export_descriptor(const Descriptor &d);

// Re-truncates every series to the given order; caps can only be lowered.
Descriptor with_order(const Descriptor &d, const TruncOrder &o);

} // namespace fb
