#pragma once

#include "fb/unfolding.hpp"

#include <optional>

namespace fb {

// A k-linear F-bundle over t_{i,k} (|k| <= lambda_cap) paired with the
// R-linear structure over t_i whose lift is its underlying connection.
struct EquivFBund {
    FBund k_bundle;
    TStruct r_tstruct;
    int lambda_cap = 0;
};

// Matrix of t_{i,k} is lambda^k times A_i with t_j -> sum_k lambda^k t_{j,k}.
TStruct lift_T_structure(const TStruct &t, int lambda_cap);

// Checks that k_bundle lifts r_tstruct. An explicit alpha (P(0) = Id) is a
// gauge applied to k_bundle first. Throws LiftMismatch.
EquivFBund assemble_equivariant(const FBund &k_bundle, const TStruct &r_tstruct, int lambda_cap,
                                const std::optional<SeriesMatrix> &alpha = std::nullopt);

// Keeps the variables with |k| <= lambda_cap.
EquivFBund truncate_lambda(const EquivFBund &e, int lambda_cap);

struct EquivUnfoldResult {
    EquivFBund bundle;
    UnfoldResult r;     // the R-linear maximal unfolding
    FBund k_framed;     // the k-bundle in the lifted good basis
    SeriesMatrix k_good_basis;
};

EquivUnfoldResult equivariant_maximal_unfold(const EquivFBund &e, const Vec &v, const UnfoldOptions &opt = {});

} // namespace fb
