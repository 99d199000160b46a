#pragma once

#include "fb/poly.hpp"

#include <string>

namespace fb {

// Reduced rational function over Q in the parameter symbols. The
// denominator is monic (leading coefficient 1 in name order) and coprime to
// the numerator; zero is 0/1.
class Scalar {
  public:
    Scalar() : den_(1) {}
    Scalar(long c) : num_(c), den_(1) {}
    Scalar(const Rational &c) : num_(c), den_(1) {}
    Scalar(const Poly &p) : num_(p), den_(1) {}
    static Scalar fraction(const Poly &num, const Poly &den);
    static Scalar symbol(const std::string &name) { return Scalar(Poly::var(intern_symbol(name))); }

    const Poly &num() const { return num_; }
    const Poly &den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_polynomial() const { return den_.is_one(); }
    bool is_constant() const { return num_.is_constant() && den_.is_one(); }
    uint32_t support() const { return num_.support() | den_.support(); }

    Scalar operator-() const;
    Scalar &operator+=(const Scalar &o);
    Scalar &operator-=(const Scalar &o);
    Scalar &operator*=(const Scalar &o);
    Scalar &operator/=(const Scalar &o);
    friend Scalar operator+(Scalar a, const Scalar &b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar &b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar &b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar &b) { return a /= b; }
    friend bool operator==(const Scalar &a, const Scalar &b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator!=(const Scalar &a, const Scalar &b) { return !(a == b); }

    Scalar inverse() const;
    Scalar pow(int k) const;
    // sum over the symbols in mask of v d/dv.
    Scalar euler(uint32_t mask) const;
    Scalar diff(int var) const;
    // Replace symbols by scalars; symbols without image are kept.
    Scalar substitute(const std::function<std::optional<Scalar>(int)> &images) const;

    std::string to_string() const;

  private:
    Poly num_, den_;
};

enum class ScalarOp { Add, Sub, Mul, Div };
Scalar scalar_arith(const Scalar &a, const Scalar &b, ScalarOp op);

// Literal grammar: integers, symbols, + - * / ^ and parentheses.
Scalar parse_scalar(const std::string &text);

} // namespace fb
