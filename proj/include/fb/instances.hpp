#pragma once

#include "fb/equivariant.hpp"

#include <array>
#include <map>

namespace fb {

// t-order 4, u-window [-2, 6].
TruncOrder default_order(int t_order = 4);

// Rank 3 over t1, t2 with A_1 = Id, A_2 = [[0,0,1],[l1,0,0],[0,l2,0]] and
// U(0, u) = 0; localize_at is a subset of {"l1", "l2"}.
FBund make_example_3_10(const std::vector<std::string> &localize_at = {}, const TruncOrder &o = default_order());
// The same structure lifted to t_{i,k} with the u-direction extended from 0.
EquivFBund make_example_3_10_equivariant(const std::vector<std::string> &localize_at, const TruncOrder &o,
                                         int lambda_cap);
// Columns v, Bv, B^2 v for v = (alpha, beta, gamma).
ScalarMatrix example_3_10_evaluation_matrix();

// Equivariant quantum cohomology of the projective line: basis {1, s},
// s * s = l s + q.
struct QHP1 {
    Scalar lambda = Scalar::symbol("l");
    Scalar q = Scalar::symbol("q");

    Vec mul(const Vec &a, const Vec &b) const;
    // Matrix of multiplication by a (columns: images of 1 and s).
    ScalarMatrix mul_matrix(const Vec &a) const;
};

// Grading data: Gr = u d/du + E + E_lambda + mu with
// E = shift d/dt_{1,0} + sum (1 - ell_j - |k|) t_{j,k} d/dt_{j,k}.
struct Grading {
    std::vector<int> ell; // per R-variable
    ScalarMatrix mu;
    Scalar shift = Scalar(2);
};

Grading p1_grading(int n_vars);

// E applied to the coefficients' base dependence (one t-degree is lost).
SeriesMatrix euler_field(const SeriesMatrix &a, const Grading &g, const VarList &r_vars, int n_equiv, int lambda_cap);

// k-bundle over the lift with U = u mu - sum E^{j,k} A_{j,k} and weight 1.
FBund graded_lift(const TStruct &r, const Grading &g, int lambda_cap);

struct GradingReport {
    bool ok = true;
    int checked = 0;
    std::vector<std::string> failures;
};

// E(A) + E_lambda(A) + [mu, A] = (ell_j + |k|) A for every lifted direction.
GradingReport check_grading(const EquivFBund &e, const Grading &g);

struct P1AModel {
    EquivFBund small; // variable tau1
    EquivFBund big;   // variables tau1 (divisor), tau2 (identity)
};

P1AModel make_p1_a_model(const TruncOrder &o = default_order(), int lambda_cap = 2);

// Brieskorn lattice of W = z + q e^y / z (+ y2) with basis [Omega], [z Omega]
// and reduction [z^{m+1} Omega] = (lambda - u m)[z^m Omega] + q e^y [z^{m-1} Omega].
// kappa is the dy-coefficient of the equivariant term, adding -kappa lambda
// to the y-direction; sign replaces lambda by -lambda.
struct BrieskornP1 {
    VarList vars;
    TruncOrder order;
    Scalar lambda;
    int kappa = 0;
    int window = 0;
    SeriesScalar qe; // q e^y

    using Class = std::array<SeriesScalar, 2>;
    // Normal form of [z^m Omega]; throws ReductionWindowExceeded for |m| > window.
    Class reduce(int m) const;
    // The rule holds on every window triple of normal forms.
    bool confluent() const;
    TStruct r_tstruct(const ParamSpec &spec) const;

  private:
    mutable std::map<int, Class> table_;
};

BrieskornP1 make_brieskorn_p1(const TruncOrder &o, bool unfolded, int kappa = 0, int sign = 1);
EquivFBund make_p1_b_model(const TruncOrder &o = default_order(), int lambda_cap = 2, int kappa = 0, int sign = 1);
// Adds y2 with W + y2.
EquivFBund unfold_p1_b_model(const TruncOrder &o = default_order(), int lambda_cap = 2, int kappa = 0,
                             int sign = 1);

struct MirrorReport {
    bool found = false;
    int sign = 1;
    int kappa = 0;
    ScalarMatrix g; // columns: images of [Omega], [z Omega] in the basis {1, s}
    std::vector<std::string> attempts;
    std::string obstruction;
};

// Searches kappa in {0, 1, -1, 2, -2} and lambda -> +-lambda for a constant g
// with g[Omega] = g_omega intertwining the small A- and B-model k-bundles.
MirrorReport verify_small_mirror_p1(const TruncOrder &o = default_order(), int lambda_cap = 2,
                                    const Vec &g_omega = {Scalar(1), Scalar(0)}, bool lambda_zero = false);

// Multiplication by W + y2 on the Brieskorn lattice at lambda = 0.
SeriesMatrix p1_w_action_nonequivariant(const TruncOrder &o);

// Sets every equivariant parameter to zero.
FBund at_lambda_zero(const FBund &b);

} // namespace fb
