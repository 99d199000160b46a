#include "doctest.h"

#include "fb/errors.hpp"
#include "fb/instances.hpp"

using namespace fb;

namespace {

const TruncOrder O = default_order();

Scalar S(const std::string &s) { return parse_scalar(s); }

ScalarMatrix M(const std::vector<std::vector<std::string>> &rows)
{
    ScalarMatrix m((int)rows.size(), (int)rows[0].size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m((int)i, (int)j) = S(rows[i][j]);
    return m;
}

} // namespace

TEST_CASE("rank-3 cyclic example data")
{
    FBund b = make_example_3_10();
    CHECK(check_flatness(b).flat);
    Residues r = residues(b);
    CHECK(r.mu[0] == ScalarMatrix::identity(3));
    CHECK(r.mu[1] * r.mu[1] == M({{"0", "l2", "0"}, {"0", "0", "l1"}, {"l1*l2", "0", "0"}}));
    CHECK(mat_det(example_3_10_evaluation_matrix()) ==
          S("l1^2*l2*alpha^3 + l2^2*beta^3 + l1*gamma^3 - 3*l1*l2*alpha*beta*gamma"));
    ConditionReport c3 = check_conditions(b, unit_vector(3, 2));
    REQUIRE(c3.needed_localizations.size() == 1);
    CHECK(c3.needed_localizations[0] == S("l1"));
    ConditionReport c2 = check_conditions(b, unit_vector(3, 1));
    REQUIRE(c2.needed_localizations.size() == 1);
    CHECK(c2.needed_localizations[0] == S("l2^2"));
    CHECK(check_conditions(make_example_3_10({"l1"}), unit_vector(3, 2)).gc);
    CHECK(check_conditions(make_example_3_10({"l2"}), unit_vector(3, 1)).gc);
    CHECK_THROWS_AS(make_example_3_10({"q"}), Error);
}

TEST_CASE("quantum cohomology of the projective line")
{
    QHP1 qh;
    Vec one{S("1"), S("0")}, s{S("0"), S("1")};
    CHECK(qh.mul(s, s) == Vec{S("q"), S("l")});
    CHECK(qh.mul(qh.mul(s, s), s) == qh.mul(s, qh.mul(s, s)));
    CHECK(qh.mul(one, s) == s);
    Vec h{S("l"), S("1")};
    // (s + l) * 1 = s + l and (s + l) * s = q + 2 l s.
    CHECK(qh.mul(h, one) == Vec{S("l"), S("1")});
    CHECK(qh.mul(h, s) == Vec{S("q"), S("2*l")});
    // Associativity on symbolic elements.
    Vec a{S("a0"), S("a1")}, b{S("b0"), S("b1")}, c{S("c0"), S("c1")};
    CHECK(qh.mul(qh.mul(a, b), c) == qh.mul(a, qh.mul(b, c)));
}

TEST_CASE("A-model construction")
{
    P1AModel m = make_p1_a_model(O, 2);
    CHECK(constant_term(m.small.r_tstruct.A[0]) == M({{"l", "q"}, {"1", "2*l"}}));
    CHECK(check_flatness(m.small.k_bundle).flat);
    CHECK(check_flatness(m.big.k_bundle).flat);
    CHECK(check_flatness(m.big.r_tstruct).flat);
    // The big model at tau2 = 0 is the small one.
    CHECK(restrict_to(m.big.r_tstruct, m.small.r_tstruct.vars).A == m.small.r_tstruct.A);
    CHECK(m.big.r_tstruct.A[1] == series_identity(m.big.r_tstruct.vars, O, 2));
    // Divisor axiom: d/dtau1 of the H-matrix is the q-part.
    SeriesMatrix d = m.small.r_tstruct.A[0].diff(0);
    CHECK(constant_term(d) == M({{"0", "q"}, {"0", "0"}}));
}

TEST_CASE("grading compatibility")
{
    P1AModel m = make_p1_a_model(O, 2);
    GradingReport a = check_grading(m.small, p1_grading(1));
    CHECK(a.ok);
    CHECK(a.checked == 3);
    CHECK(check_grading(m.big, p1_grading(2)).ok);
    CHECK(check_grading(make_p1_b_model(O, 2), p1_grading(1)).ok);
    CHECK(check_grading(unfold_p1_b_model(O, 2), p1_grading(2)).ok);
    // A wrong grading is caught.
    Grading bad = p1_grading(1);
    bad.shift = Scalar(1);
    CHECK_FALSE(check_grading(m.small, bad).ok);
}

TEST_CASE("Brieskorn reduction")
{
    BrieskornP1 b = make_brieskorn_p1(O, false);
    VarList v = b.vars;
    SeriesScalar zero(v, O), one = SeriesScalar::constant(v, O, Scalar(1));
    SeriesScalar lam = SeriesScalar::constant(v, O, S("l"));
    // m = 0: [z Omega] = l [Omega] + q e^y [z^-1 Omega].
    BrieskornP1::Class zm1 = b.reduce(-1);
    CHECK(lam + b.qe * zm1[0] == zero);
    CHECK(b.qe * zm1[1] == one);
    // [z^2 Omega] = (l - u)[z Omega] + q e^y [Omega].
    BrieskornP1::Class z2 = b.reduce(2);
    CHECK(z2[0] == b.qe);
    CHECK(z2[1] == lam - series_u_power(v, O, 1));
    CHECK(b.confluent());
    CHECK(b.window == 6);
    CHECK_THROWS_AS(b.reduce(7), Error);
    try {
        (void)b.reduce(-7);
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::ReductionWindowExceeded);
    }
}

TEST_CASE("B-model connection")
{
    EquivFBund e = make_p1_b_model(O, 2);
    const SeriesMatrix &A = e.r_tstruct.A[0];
    VarList v = e.r_tstruct.vars;
    // nabla_y [Omega] = u^-1([z Omega] - l [Omega]); nabla_y [z Omega] has q e^y on [Omega].
    CHECK(entry(A, 0, 0) == SeriesScalar::constant(v, O, S("-l")));
    CHECK(entry(A, 1, 0) == SeriesScalar::constant(v, O, S("1")));
    CHECK(entry(A, 0, 1) == series_exp(series_var(v, O, "y")).scaled(S("q")));
    CHECK(check_flatness(e.k_bundle).flat);
    CHECK(entry(make_p1_b_model(O, 2, 1).r_tstruct.A[0], 1, 1) == SeriesScalar::constant(v, O, S("-l")));
}

TEST_CASE("unfolded B-model")
{
    EquivFBund e = unfold_p1_b_model(O, 2);
    CHECK(check_flatness(e.k_bundle).flat);
    MaximalCertificate c = check_maximal(e.r_tstruct, unit_vector(2, 0));
    CHECK(c.maximal);
    CHECK(c.det == S("-1"));
    EquivFBund small = make_p1_b_model(O, 2);
    CHECK(restrict_to(e.r_tstruct, small.r_tstruct.vars).A == small.r_tstruct.A);
    CHECK(restrict_to(e.k_bundle, small.k_bundle.t.vars).U == small.k_bundle.U);

    // At lambda = 0 the u-direction is u d/du - u^-1 (W + y2) on the lattice.
    FBund z = at_lambda_zero(e.k_bundle);
    VarList k0({"y_0", "y2_0"}), r({"y", "y2"});
    SeriesMatrix U0 = z.U.restrict_to(k0).rename(r);
    CHECK(U0 == -p1_w_action_nonequivariant(O));
    CHECK(entry(U0, 1, 1) == series_u_power(r, O, 1) - series_var(r, O, "y2"));
}

TEST_CASE("small mirror")
{
    MirrorReport rep = verify_small_mirror_p1(O, 2);
    REQUIRE(rep.found);
    CHECK(rep.kappa == 1);
    CHECK(rep.sign == -1);
    CHECK(rep.g == M({{"1", "-l"}, {"0", "1"}}));
    CHECK(rep.attempts.size() == 4);

    MirrorReport zero = verify_small_mirror_p1(O, 2, {S("1"), S("0")}, true);
    REQUIRE(zero.found);
    CHECK(zero.g == ScalarMatrix::identity(2));

    MirrorReport forced = verify_small_mirror_p1(O, 2, {S("0"), S("1")});
    CHECK_FALSE(forced.found);
    CHECK(forced.attempts.size() == 10);
    CHECK_FALSE(forced.obstruction.empty());
}

TEST_CASE("rank-3 cyclic example u-direction")
{
    FBund b = make_example_3_10();
    VarList v = b.t.vars;
    CHECK(b.U == -(series_var(v, O, "t1") * b.t.A[0] + series_var(v, O, "t2") * b.t.A[1]));
    CHECK(b.U.at_t0().is_zero());
}
