#include "fb/scalar.hpp"

#include "fb/errors.hpp"
#include "fb/expr.hpp"

namespace fb {

Scalar Scalar::fraction(const Poly &num, const Poly &den)
{
    if (den.is_zero()) throw Error(ErrorKind::DivisionByZero, "zero denominator");
    Scalar s;
    if (num.is_zero()) return s;
    if (den.is_constant()) {
        s.num_ = num.scaled(1 / den.constant_value());
        s.den_ = Poly(1);
        return s;
    }
    Poly g = poly_gcd(num, den);
    Poly n = g.is_constant() ? num : *divide_exact(num, g);
    Poly d = g.is_constant() ? den : *divide_exact(den, g);
    Rational lc = d.lead_by_name().c;
    s.num_ = n.scaled(1 / lc);
    s.den_ = d.scaled(1 / lc);
    if (s.den_.is_constant()) s.den_ = Poly(1);
    return s;
}

Scalar Scalar::operator-() const
{
    Scalar r = *this;
    r.num_ = -r.num_;
    return r;
}

Scalar &Scalar::operator+=(const Scalar &o)
{
    if (o.is_zero()) return *this;
    if (is_zero()) return *this = o;
    if (den_.is_one() && o.den_.is_one()) {
        num_ += o.num_;
        return *this;
    }
    if (den_ == o.den_) return *this = fraction(num_ + o.num_, den_);
    // Henrici: only the common factor of the denominators can cancel.
    Poly g = poly_gcd(den_, o.den_);
    if (g.is_constant()) {
        Poly n = num_ * o.den_ + o.num_ * den_;
        Poly d = den_ * o.den_;
        Rational lc = d.lead_by_name().c;
        num_ = n.scaled(1 / lc);
        den_ = d.scaled(1 / lc);
        if (num_.is_zero()) den_ = Poly(1);
        return *this;
    }
    Poly b1 = *divide_exact(den_, g), d1 = *divide_exact(o.den_, g);
    Poly t = num_ * d1 + o.num_ * b1;
    if (t.is_zero()) return *this = Scalar();
    Poly g2 = poly_gcd(t, g);
    Poly n = g2.is_constant() ? t : *divide_exact(t, g2);
    Poly d = (g2.is_constant() ? den_ : *divide_exact(den_, g2)) * d1;
    Rational lc = d.lead_by_name().c;
    num_ = n.scaled(1 / lc);
    den_ = d.scaled(1 / lc);
    if (den_.is_constant()) den_ = Poly(1);
    return *this;
}

Scalar &Scalar::operator-=(const Scalar &o) { return *this += -o; }

Scalar &Scalar::operator*=(const Scalar &o)
{
    if (is_zero() || o.is_zero()) return *this = Scalar();
    if (den_.is_one() && o.den_.is_one()) {
        num_ = num_ * o.num_;
        return *this;
    }
    // Cross-cancel before multiplying to keep intermediate sizes down.
    Poly g1 = poly_gcd(num_, o.den_), g2 = poly_gcd(o.num_, den_);
    Poly n1 = g1.is_constant() ? num_ : *divide_exact(num_, g1);
    Poly d2 = g1.is_constant() ? o.den_ : *divide_exact(o.den_, g1);
    Poly n2 = g2.is_constant() ? o.num_ : *divide_exact(o.num_, g2);
    Poly d1 = g2.is_constant() ? den_ : *divide_exact(den_, g2);
    Poly n = n1 * n2, d = d1 * d2;
    Rational lc = d.lead_by_name().c;
    num_ = n.scaled(1 / lc);
    den_ = d.scaled(1 / lc);
    if (den_.is_constant()) den_ = Poly(1);
    return *this;
}

Scalar Scalar::inverse() const
{
    if (is_zero()) throw Error(ErrorKind::DivisionByZero, "inverse of zero");
    Scalar s;
    Rational lc = num_.lead_by_name().c;
    s.num_ = den_.scaled(1 / lc);
    s.den_ = num_.scaled(1 / lc);
    if (s.den_.is_constant()) s.den_ = Poly(1);
    return s;
}

Scalar &Scalar::operator/=(const Scalar &o)
{
    if (o.is_zero()) throw Error(ErrorKind::DivisionByZero, "division by zero scalar");
    return *this *= o.inverse();
}

Scalar Scalar::pow(int k) const
{
    if (k < 0) return inverse().pow(-k);
    Scalar s;
    s.num_ = num_.pow(k);
    s.den_ = den_.pow(k);
    return s;
}

Scalar Scalar::euler(uint32_t mask) const
{
    if (den_.is_one()) return Scalar(num_.euler(mask));
    return fraction(num_.euler(mask) * den_ - num_ * den_.euler(mask), den_ * den_);
}

Scalar Scalar::diff(int var) const
{
    if (den_.is_one()) return Scalar(num_.diff(var));
    return fraction(num_.diff(var) * den_ - num_ * den_.diff(var), den_ * den_);
}

Scalar Scalar::substitute(const std::function<std::optional<Scalar>(int)> &images) const
{
    auto eval = [&](const Poly &p) {
        Scalar out;
        for (auto &t : p.terms()) {
            Mono kept;
            Scalar f(t.c);
            for (int i = 0; i < kMaxParams; ++i) {
                if (!t.m.e[i]) continue;
                if (auto img = images(i))
                    f *= img->pow(t.m.e[i]);
                else
                    kept.e[i] = t.m.e[i];
            }
            out += f * Scalar(Poly::monomial(kept));
        }
        return out;
    };
    return eval(num_) / eval(den_);
}

std::string Scalar::to_string() const
{
    if (den_.is_one()) return num_.to_string();
    std::string n = num_.to_string(), d = den_.to_string();
    if (!num_.is_monomial()) n = "(" + n + ")";
    if (!den_.is_monomial() || d.find('*') != std::string::npos) d = "(" + d + ")";
    return n + "/" + d;
}

Scalar scalar_arith(const Scalar &a, const Scalar &b, ScalarOp op)
{
    switch (op) {
    case ScalarOp::Add: return a + b;
    case ScalarOp::Sub: return a - b;
    case ScalarOp::Mul: return a * b;
    case ScalarOp::Div: return a / b;
    }
    return Scalar();
}

Scalar parse_scalar(const std::string &text)
{
    struct Ops {
        Scalar constant(const Rational &c) { return Scalar(c); }
        Scalar symbol(const std::string &name, int, int) { return Scalar::symbol(name); }
        Scalar add(const Scalar &a, const Scalar &b) { return a + b; }
        Scalar sub(const Scalar &a, const Scalar &b) { return a - b; }
        Scalar mul(const Scalar &a, const Scalar &b) { return a * b; }
        Scalar div(const Scalar &a, const Scalar &b, int line, int col)
        {
            if (b.is_zero()) throw ParseError("division by zero", line, col);
            return a / b;
        }
        Scalar neg(const Scalar &a) { return -a; }
        Scalar pow(const Scalar &a, int k, int line, int col)
        {
            if (k < 0 && a.is_zero()) throw ParseError("negative power of zero", line, col);
            return a.pow(k);
        }
    } ops;
    return parse_expression<Scalar>(text, ops);
}

} // namespace fb
