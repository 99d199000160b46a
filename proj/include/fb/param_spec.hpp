#pragma once

#include "fb/scalar.hpp"

#include <string>
#include <vector>

namespace fb {

enum class Flavor { Polynomial, PowerSeriesLocal };

const char *flavor_name(Flavor f);
Flavor parse_flavor(const std::string &s);

// Describes the coefficient ring: k = Frac(Q[base]) and R = k[equiv] or
// k[[equiv]], optionally localized at finitely many polynomials in equiv.
struct ParamSpec {
    std::vector<std::string> base_params;
    std::vector<std::string> equiv_params;
    Flavor flavor = Flavor::Polynomial;
    std::vector<Scalar> localized_at;

    // Throws Invalid on duplicate/overlapping symbols or bad localizations.
    void validate() const;
    uint32_t base_mask() const;
    uint32_t equiv_mask() const;
    uint32_t declared_mask() const { return base_mask() | equiv_mask(); }

    friend bool operator==(const ParamSpec &a, const ParamSpec &b);
};

// Part of p that is not invertible in the localized ring, as a monic
// polynomial (1 when p is a unit). p must be a nonzero polynomial in the
// declared symbols.
Poly non_unit_part(const Poly &p, const ParamSpec &spec);

bool in_ring(const Scalar &s, const ParamSpec &spec);
// Throws NotInRing if s is not an element of the ring.
bool is_unit(const Scalar &s, const ParamSpec &spec);
// True when every coefficient lies in R without any localization.
bool in_base_ring(const Scalar &s, const ParamSpec &spec);

} // namespace fb
