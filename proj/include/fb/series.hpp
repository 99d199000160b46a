#pragma once

#include "fb/param_spec.hpp"
#include "fb/scalar_matrix.hpp"

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fb {

constexpr int kMaxSeriesVars = 32;

// Finite quotient in which series arithmetic is exact: total t-degree at most
// t_degree_cap, u-exponents in [u_min, u_max].
struct TruncOrder {
    int t_degree_cap = 4;
    int u_min = -2;
    int u_max = 6;

    void validate() const;
    friend bool operator==(const TruncOrder &a, const TruncOrder &b) = default;
};

// Componentwise loosest floor and tightest ceilings.
TruncOrder meet(const TruncOrder &a, const TruncOrder &b);

// Ordered, immutable list of series variable names, shared by pointer.
class VarList {
  public:
    VarList();
    explicit VarList(std::vector<std::string> names);

    int size() const { return (int)names_->size(); }
    const std::string &name(int i) const { return (*names_)[i]; }
    const std::vector<std::string> &names() const { return *names_; }
    std::optional<int> index_of(const std::string &name) const;
    int require(const std::string &name) const; // throws UnknownVariable

    friend bool operator==(const VarList &a, const VarList &b)
    {
        return a.names_ == b.names_ || *a.names_ == *b.names_;
    }
    friend bool operator!=(const VarList &a, const VarList &b) { return !(a == b); }

  private:
    std::shared_ptr<const std::vector<std::string>> names_;
};

VarList concat(const VarList &a, const std::vector<std::string> &extra);

// Exponent key: t-exponents, total t-degree and u-exponent. Ordered by total
// degree, then lex descending in t, then u ascending.
struct SKey {
    std::array<uint8_t, kMaxSeriesVars> e{};
    int deg = 0;
    int u = 0;

    static SKey of_u(int u)
    {
        SKey k;
        k.u = u;
        return k;
    }
    static SKey of_var(int var, int exp = 1, int u = 0);
    SKey operator*(const SKey &o) const;
    bool is_const() const { return deg == 0 && u == 0; }

    friend bool operator==(const SKey &a, const SKey &b) { return a.u == b.u && a.e == b.e; }
    friend bool operator<(const SKey &a, const SKey &b)
    {
        if (a.deg != b.deg) return a.deg < b.deg;
        if (a.e != b.e) return b.e < a.e;
        return a.u < b.u;
    }
};

// Truncated series in the variables of a VarList and a bounded Laurent range
// in u. C is Scalar or ScalarMatrix; matrices carry their shape so that zero
// coefficients are well-formed.
template <class C>
class Series {
  public:
    Series() = default;
    Series(VarList vars, TruncOrder ord, int rows = 1, int cols = 1);
    static Series constant(VarList vars, TruncOrder ord, const C &c);

    const VarList &vars() const { return vars_; }
    const TruncOrder &order() const { return ord_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const std::map<SKey, C> &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    C zero_coeff() const;
    C coeff(const SKey &k) const;
    // Terms beyond the caps are dropped; below u_min they throw.
    void add_term(const SKey &k, const C &c);

    Series operator-() const;
    Series &operator+=(const Series &o);
    Series &operator-=(const Series &o);
    friend Series operator+(Series a, const Series &b) { return a += b; }
    friend Series operator-(Series a, const Series &b) { return a -= b; }
    Series scaled(const Scalar &c) const;
    Series times_u(int k) const;
    Series map_coeffs(const std::function<C(const C &)> &f) const;

    // d/d(var); the result's t-cap drops by one.
    Series diff(int var) const;
    Series diff(const std::string &name) const;
    Series diff_u() const;
    // Euler operator of the equivariant parameters applied to coefficients.
    Series euler_params(uint32_t mask) const;

    Series part_t_degree(int d) const;
    Series at_t0() const { return part_t_degree(0); }
    Series truncated_t(int cap) const;
    Series with_order(const TruncOrder &ord) const;
    // Coefficient of u^k, as a u-free series.
    Series u_coeff(int k) const;
    int min_u() const;
    int max_u() const;

    // Keep only terms in the variables of sub (others set to zero).
    Series restrict_to(const VarList &sub) const;
    Series embed(const VarList &super) const;
    Series rename(const VarList &same_size) const;
    // Replace variable i by images[i] (u-free, no constant term); the result
    // lives over target with this series' order.
    Series substitute(const std::vector<Series<Scalar>> &images, const VarList &target) const;

    friend bool operator==(const Series &a, const Series &b)
    {
        return a.vars_ == b.vars_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Series &a, const Series &b) { return !(a == b); }

  private:
    template <class>
    friend class Series;
    VarList vars_;
    TruncOrder ord_;
    int rows_ = 1, cols_ = 1;
    std::map<SKey, C> terms_;
};

extern template class Series<Scalar>;
extern template class Series<ScalarMatrix>;

using SeriesScalar = Series<Scalar>;
using SeriesMatrix = Series<ScalarMatrix>;

SeriesScalar operator*(const SeriesScalar &a, const SeriesScalar &b);
SeriesMatrix operator*(const SeriesMatrix &a, const SeriesMatrix &b);
SeriesMatrix operator*(const SeriesScalar &a, const SeriesMatrix &b);
SeriesMatrix operator*(const ScalarMatrix &a, const SeriesMatrix &b);
SeriesMatrix operator*(const SeriesMatrix &a, const ScalarMatrix &b);
SeriesMatrix commutator(const SeriesMatrix &a, const SeriesMatrix &b);

SeriesScalar series_var(const VarList &vars, const TruncOrder &ord, const std::string &name);
SeriesScalar series_u_power(const VarList &vars, const TruncOrder &ord, int k);
SeriesScalar series_inverse(const SeriesScalar &a);
// exp(x) for a u-free series without constant term.
SeriesScalar series_exp(const SeriesScalar &x);

SeriesMatrix series_identity(const VarList &vars, const TruncOrder &ord, int n);
SeriesMatrix series_constant(const VarList &vars, const TruncOrder &ord, const ScalarMatrix &m);
SeriesScalar entry(const SeriesMatrix &m, int i, int j);
SeriesMatrix from_entries(const std::vector<std::vector<SeriesScalar>> &grid);
SeriesMatrix transpose(const SeriesMatrix &m);
// Requires u-exponents >= 0 and an invertible constant coefficient.
SeriesMatrix series_inverse(const SeriesMatrix &m);
// Value at t = 0, u = 0.
ScalarMatrix constant_term(const SeriesMatrix &m);
// Applies m to a column of series.
std::vector<SeriesScalar> apply(const SeriesMatrix &m, const std::vector<SeriesScalar> &v);
SeriesMatrix column_matrix(const std::vector<SeriesScalar> &v);

// "t1^2*u^-1"; empty for the constant key.
std::string monomial_string(const SKey &k, const VarList &vars);
// Canonical text form in the literal grammar extended by the series
// variables and u (negative u-powers written u^-k).
std::string to_string(const SeriesScalar &s);
// Parses text over vars; any other symbol is a parameter. Division is only
// by t,u-free scalars; negative powers only of single u-terms.
SeriesScalar parse_series(const std::string &text, const VarList &vars, const TruncOrder &ord);

// Equivariant change of variables t_i -> sum_{|k| <= cap} lambda^k t_{i,k}.
std::vector<std::vector<int>> multi_indices(int n, int cap);
std::string lifted_name(const std::string &base, const std::vector<int> &k);
VarList lifted_vars(const VarList &vars, int n, int cap);
SeriesScalar substitute_psi_lambda(const SeriesScalar &a, const ParamSpec &spec, int cap);
SeriesMatrix substitute_psi_lambda(const SeriesMatrix &a, const ParamSpec &spec, int cap);

// Worker count from FB_NUM_THREADS (default: hardware concurrency).
int num_threads();

} // namespace fb
