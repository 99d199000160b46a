#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fb {

using Rational = mpq_class;

constexpr int kMaxParams = 16;

// Process-wide table of parameter symbols. Monomials index into it.
int intern_symbol(const std::string &name);
std::optional<int> find_symbol(const std::string &name);
std::string symbol_name(int id);
int symbol_count();
// Rank of a symbol in name order; used wherever canonical output must not
// depend on interning order.
int symbol_rank(int id);

struct Mono {
    std::array<uint16_t, kMaxParams> e{};

    bool is_one() const
    {
        for (auto x : e)
            if (x) return false;
        return true;
    }
    int total_degree() const
    {
        int d = 0;
        for (auto x : e) d += x;
        return d;
    }
    bool divides(const Mono &o) const
    {
        for (int i = 0; i < kMaxParams; ++i)
            if (e[i] > o.e[i]) return false;
        return true;
    }
    friend bool operator==(const Mono &a, const Mono &b) { return a.e == b.e; }
    friend bool operator!=(const Mono &a, const Mono &b) { return !(a == b); }
    // Lex order with symbol id 0 most significant.
    friend bool operator<(const Mono &a, const Mono &b)
    {
        for (int i = 0; i < kMaxParams; ++i)
            if (a.e[i] != b.e[i]) return a.e[i] < b.e[i];
        return false;
    }
    static Mono var(int id, int exp = 1);
};

Mono operator*(const Mono &a, const Mono &b);
Mono operator/(const Mono &a, const Mono &b); // requires b | a
Mono mono_gcd(const Mono &a, const Mono &b);
// Lex comparison in symbol-name order.
int compare_by_name(const Mono &a, const Mono &b);

struct Term {
    Mono m;
    Rational c;
};

// Sparse multivariate polynomial over Q. Terms sorted by descending Mono,
// never holding a zero coefficient.
class Poly {
  public:
    Poly() = default;
    Poly(long c);
    Poly(const Rational &c);
    static Poly monomial(const Mono &m, const Rational &c = 1);
    static Poly var(int id) { return monomial(Mono::var(id)); }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].m.is_one()); }
    bool is_one() const { return terms_.size() == 1 && terms_[0].m.is_one() && terms_[0].c == 1; }
    bool is_monomial() const { return terms_.size() == 1; }
    Rational constant_value() const; // coefficient of the unit monomial
    const std::vector<Term> &terms() const { return terms_; }
    size_t size() const { return terms_.size(); }

    const Term &lead() const { return terms_.front(); }
    // Leading term w.r.t. name order.
    const Term &lead_by_name() const;

    int degree_in(int var) const;
    int total_degree() const;
    // Bitmask of symbols that occur.
    uint32_t support() const;
    Mono min_exponents() const; // monomial content

    // Coefficients w.r.t. var: result[d] = coefficient of var^d.
    std::vector<Poly> coeffs_in(int var) const;
    Poly lead_coeff_in(int var) const;

    Poly operator-() const;
    Poly &operator+=(const Poly &o);
    Poly &operator-=(const Poly &o);
    Poly &operator*=(const Poly &o) { return *this = *this * o; }
    friend Poly operator+(Poly a, const Poly &b) { return a += b; }
    friend Poly operator-(Poly a, const Poly &b) { return a -= b; }
    friend Poly operator*(const Poly &a, const Poly &b);
    Poly scaled(const Rational &c) const;
    Poly times_mono(const Mono &m) const;
    Poly divided_by_mono(const Mono &m) const; // requires m | every term

    friend bool operator==(const Poly &a, const Poly &b);
    friend bool operator!=(const Poly &a, const Poly &b) { return !(a == b); }

    // Exact quotient when b divides a.
    friend std::optional<Poly> divide_exact(const Poly &a, const Poly &b);
    Poly monic() const;
    Poly monic_by_name() const;

    Poly pow(unsigned k) const;
    // Degree operator sum_{v in mask} v d/dv.
    Poly euler(uint32_t mask) const;
    Poly diff(int var) const;
    Poly substitute(const std::function<std::optional<Poly>(int)> &images) const;

    std::string to_string() const;

  private:
    friend class PolyBuilder;
    std::vector<Term> terms_;
};

Poly poly_gcd(const Poly &a, const Poly &b);

// Accumulates terms in arbitrary order, then canonicalizes.
class PolyBuilder {
  public:
    void add(const Mono &m, const Rational &c) { terms_.push_back({m, c}); }
    Poly build();

  private:
    std::vector<Term> terms_;
};

} // namespace fb
