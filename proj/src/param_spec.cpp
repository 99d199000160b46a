#include "fb/param_spec.hpp"

#include "fb/errors.hpp"

#include <map>
#include <set>

namespace fb {

const char *flavor_name(Flavor f) { return f == Flavor::Polynomial ? "Polynomial" : "PowerSeriesLocal"; }

Flavor parse_flavor(const std::string &s)
{
    if (s == "Polynomial") return Flavor::Polynomial;
    if (s == "PowerSeriesLocal") return Flavor::PowerSeriesLocal;
    throw Error(ErrorKind::Invalid, "unknown flavor '" + s + "'");
}

namespace {

uint32_t mask_of(const std::vector<std::string> &names)
{
    uint32_t m = 0;
    for (auto &n : names) m |= 1u << intern_symbol(n);
    return m;
}

// Coefficients of p as a polynomial in the symbols of mask.
std::vector<Poly> coefficients_over(const Poly &p, uint32_t mask)
{
    std::map<Mono, PolyBuilder> parts;
    for (auto &t : p.terms()) {
        Mono outer, inner;
        for (int i = 0; i < kMaxParams; ++i) (mask >> i & 1 ? outer : inner).e[i] = t.m.e[i];
        parts[outer].add(inner, t.c);
    }
    std::vector<Poly> out;
    for (auto &[m, b] : parts) out.push_back(b.build());
    return out;
}

// Removes the factor free of the masked symbols (a unit of k).
Poly strip_field_content(const Poly &p, uint32_t mask)
{
    if (!(p.support() & mask)) return Poly(1);
    Poly g;
    for (auto &c : coefficients_over(p, mask)) {
        g = g.is_zero() ? c.monic() : poly_gcd(g, c);
        if (g.is_constant()) break;
    }
    if (g.is_constant()) return p.monic_by_name();
    return divide_exact(p, g)->monic_by_name();
}

Poly lambda_constant_term(const Poly &p, uint32_t mask)
{
    PolyBuilder b;
    for (auto &t : p.terms()) {
        bool free = true;
        for (int i = 0; i < kMaxParams; ++i)
            if ((mask >> i & 1) && t.m.e[i]) free = false;
        if (free) b.add(t.m, t.c);
    }
    return b.build();
}

// Non-unit part of p in R itself (no localizations).
Poly bare_non_unit(const Poly &p, const ParamSpec &spec)
{
    uint32_t lam = spec.equiv_mask();
    Poly q = strip_field_content(p, lam);
    if (q.is_constant()) return Poly(1);
    if (spec.flavor == Flavor::Polynomial) return q;
    if (!lambda_constant_term(q, lam).is_zero()) return Poly(1);
    Mono m = q.min_exponents();
    for (int i = 0; i < kMaxParams; ++i)
        if (!(lam >> i & 1)) m.e[i] = 0;
    Poly rest = q.divided_by_mono(m);
    if (!lambda_constant_term(rest, lam).is_zero()) return Poly::monomial(m);
    return q;
}

} // namespace

void ParamSpec::validate() const
{
    std::set<std::string> seen;
    for (auto *list : {&base_params, &equiv_params})
        for (auto &n : *list) {
            if (!seen.insert(n).second) throw Error(ErrorKind::Invalid, "duplicate parameter symbol '" + n + "'");
        }
    uint32_t lam = equiv_mask();
    for (auto &l : localized_at) {
        if (l.is_zero()) throw Error(ErrorKind::Invalid, "localization at zero");
        if (!l.is_polynomial() || (l.support() & ~lam))
            throw Error(ErrorKind::Invalid, "localization " + l.to_string() + " is not a polynomial in equivariant parameters");
    }
}

uint32_t ParamSpec::base_mask() const { return mask_of(base_params); }
uint32_t ParamSpec::equiv_mask() const { return mask_of(equiv_params); }

bool operator==(const ParamSpec &a, const ParamSpec &b)
{
    return a.base_params == b.base_params && a.equiv_params == b.equiv_params && a.flavor == b.flavor &&
           a.localized_at == b.localized_at;
}

Poly non_unit_part(const Poly &p, const ParamSpec &spec)
{
    if (p.is_zero()) throw Error(ErrorKind::DivisionByZero, "zero has no unit decomposition");
    Poly d = bare_non_unit(p, spec);
    for (auto &l : spec.localized_at) {
        Poly lp = bare_non_unit(l.num(), spec);
        if (lp.is_constant()) continue;
        while (!d.is_constant()) {
            Poly g = poly_gcd(d, lp);
            if (g.is_constant()) break;
            d = bare_non_unit(*divide_exact(d, g), spec);
        }
    }
    return d;
}

bool in_ring(const Scalar &s, const ParamSpec &spec)
{
    if (s.support() & ~spec.declared_mask()) return false;
    return non_unit_part(s.den(), spec).is_constant();
}

bool in_base_ring(const Scalar &s, const ParamSpec &spec)
{
    if (s.support() & ~spec.declared_mask()) return false;
    return bare_non_unit(s.den(), spec).is_constant();
}

bool is_unit(const Scalar &s, const ParamSpec &spec)
{
    if (!in_ring(s, spec)) throw Error(ErrorKind::NotInRing, s.to_string() + " is not in the coefficient ring");
    if (s.is_zero()) return false;
    return non_unit_part(s.num(), spec).is_constant();
}

} // namespace fb
