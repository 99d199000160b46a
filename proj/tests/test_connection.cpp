#include "doctest.h"

#include "fb/connection.hpp"
#include "fb/errors.hpp"

using namespace fb;

namespace {

const TruncOrder O{3, -2, 4};

Scalar S(const std::string &s) { return parse_scalar(s); }

ScalarMatrix M(const std::vector<std::vector<std::string>> &rows)
{
    ScalarMatrix m((int)rows.size(), (int)rows[0].size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m((int)i, (int)j) = S(rows[i][j]);
    return m;
}

ParamSpec lambda_ring(std::vector<Scalar> loc = {})
{
    ParamSpec p;
    p.base_params = {"a", "b", "c"};
    p.equiv_params = {"l1", "l2"};
    p.flavor = Flavor::PowerSeriesLocal;
    p.localized_at = std::move(loc);
    return p;
}

TStruct constant_tstruct(const ParamSpec &spec, const std::vector<std::string> &names,
                         const std::vector<ScalarMatrix> &mats)
{
    VarList v(names);
    TStruct t{spec, v, mats[0].rows(), {}, O};
    for (auto &m : mats) t.A.push_back(series_constant(v, O, m));
    return t;
}

const ScalarMatrix B310 = M({{"0", "0", "1"}, {"l1", "0", "0"}, {"0", "l2", "0"}});

TStruct ex310(std::vector<Scalar> loc = {})
{
    return constant_tstruct(lambda_ring(std::move(loc)), {"t1", "t2"}, {ScalarMatrix::identity(3), B310});
}

} // namespace

TEST_CASE("flatness of constant connections")
{
    ParamSpec p;
    CHECK(check_flatness(constant_tstruct(p, {"t1", "t2"}, {ScalarMatrix::identity(2), M({{"1", "0"}, {"0", "2"}})}))
              .flat);
    CHECK(check_flatness(ex310()).flat);
    FlatnessReport r = check_flatness(constant_tstruct(p, {"t1", "t2"}, {M({{"0", "1"}, {"0", "0"}}), M({{"0", "0"}, {"1", "0"}})}));
    CHECK_FALSE(r.flat);
    REQUIRE(r.residuals.size() == 1);
    CHECK(r.residuals[0].directions == "t1,t2");
    CHECK(r.residuals[0].monomial == "1");
    CHECK(r.residuals[0].value == M({{"1", "0"}, {"0", "-1"}}));
}

TEST_CASE("flatness of an F-bundle with the linear u-direction")
{
    // Commuting constants with U = -sum t_i T^i satisfy the u-direction identity.
    TStruct t = ex310();
    SeriesMatrix U = -(series_var(t.vars, O, "t1") * t.A[0] + series_var(t.vars, O, "t2") * t.A[1]);
    FBund b{t, U, 0};
    CHECK(check_flatness(b).flat);
    FBund bad{t, SeriesMatrix(t.vars, O, 3, 3), 0};
    FlatnessReport r = check_flatness(bad);
    CHECK_FALSE(r.flat);
    CHECK(r.residuals[0].directions == "u,t1");
    CHECK(r.residuals[0].monomial == "u");
}

TEST_CASE("residues")
{
    TStruct t = ex310();
    Residues r = residues(FBund{t, SeriesMatrix(t.vars, O, 3, 3), 0});
    CHECK(r.mu[0] == ScalarMatrix::identity(3));
    CHECK(r.mu[1] == B310);
    CHECK(r.K.is_zero());
    CHECK(B310 * B310 == M({{"0", "l2", "0"}, {"0", "0", "l1"}, {"l1*l2", "0", "0"}}));
    VarList v({"t1"});
    TStruct z{ParamSpec{}, v, 2, {series_var(v, O, "t1") * series_constant(v, O, M({{"1", "2"}, {"3", "4"}}))}, O};
    CHECK(residues(z).mu[0].is_zero());
}

TEST_CASE("evaluation matrix and its determinant")
{
    TStruct t = constant_tstruct(lambda_ring(), {"t1", "t2", "t3"}, {ScalarMatrix::identity(3), B310, B310 * B310});
    Vec v{S("a"), S("b"), S("c")};
    ScalarMatrix mv = mu_v_matrix(t, v);
    CHECK(mv == M({{"a", "c", "l2*b"}, {"b", "l1*a", "l1*c"}, {"c", "l2*b", "l1*l2*a"}}));
    CHECK(mat_det(mv) == S("l1^2*l2*a^3 + l2^2*b^3 + l1*c^3 - 3*l1*l2*a*b*c"));
    CHECK(mu_v_matrix(t, Vec(3)).is_zero());
    CHECK_THROWS_AS(mu_v_matrix(t, Vec(2)), Error);
}

TEST_CASE("generation conditions for the three-dimensional example")
{
    TStruct t = ex310();
    ConditionReport e3 = check_conditions(t, unit_vector(3, 2));
    CHECK(e3.ic);
    CHECK(e3.gc_prime);
    CHECK_FALSE(e3.gc);
    CHECK(e3.needed_localizations == std::vector<Scalar>{S("l1")});
    CHECK((e3.best_det == S("l1") || e3.best_det == S("-l1")));
    CHECK(e3.coker_free == Tri::Unknown);

    ConditionReport e2 = check_conditions(t, unit_vector(3, 1));
    CHECK_FALSE(e2.gc);
    CHECK(e2.needed_localizations == std::vector<Scalar>{S("l2^2")});

    ConditionReport e1 = check_conditions(t, unit_vector(3, 0));
    CHECK((e1.best_det == S("l1^2*l2") || e1.best_det == S("-l1^2*l2")));

    ConditionReport z = check_conditions(t, Vec(3));
    CHECK_FALSE(z.ic);
    CHECK_FALSE(z.gc);
    CHECK_FALSE(z.gc_prime);

    ConditionReport loc = check_conditions(ex310({S("l1")}), unit_vector(3, 2));
    CHECK(loc.gc);
    CHECK(loc.coker_free == Tri::True);
    CHECK(loc.needed_localizations.empty());
}

TEST_CASE("F-bundle mode adds the residue endomorphism")
{
    // A single nilpotent direction does not generate; K supplies the rest.
    ParamSpec p;
    VarList v({"t1"});
    TStruct t{p, v, 2, {SeriesMatrix(v, O, 2, 2)}, O};
    FBund b{t, series_constant(v, O, M({{"0", "0"}, {"1", "0"}})), 0};
    CHECK_FALSE(check_conditions(b, unit_vector(2, 0), Mode::TStructure).gc_prime);
    CHECK(check_conditions(b, unit_vector(2, 0), Mode::FBundle).gc);
}

TEST_CASE("maximality certificates")
{
    ParamSpec p;
    p.base_params = {"q"};
    p.equiv_params = {"l"};
    TStruct big = constant_tstruct(p, {"t1", "t2"}, {M({{"l", "q"}, {"1", "2*l"}}), ScalarMatrix::identity(2)});
    MaximalCertificate c = check_maximal(big, unit_vector(2, 0));
    CHECK(c.maximal);
    CHECK(c.det == Scalar(-1));
    CHECK_FALSE(check_maximal(restrict_to(big, VarList({"t1"})), unit_vector(2, 0)).maximal);
    CHECK_FALSE(check_maximal(ex310(), unit_vector(3, 2)).maximal);

    // Maximal implies the generation conditions.
    ConditionReport r = check_conditions(big, unit_vector(2, 0));
    CHECK(r.ic);
    CHECK(r.gc);
}

TEST_CASE("gauge covariance of residues and conditions")
{
    ScalarMatrix P = M({{"1", "1", "0"}, {"0", "1", "0"}, {"2", "0", "1"}});
    ScalarMatrix Pi = mat_inverse(P);
    TStruct t = ex310();
    TStruct g = constant_tstruct(t.spec, {"t1", "t2"}, {ScalarMatrix::identity(3), Pi * B310 * P});
    CHECK(residues(g).mu[1] == Pi * residues(t).mu[1] * P);
    for (int i = 0; i < 3; ++i) {
        Vec v = unit_vector(3, i);
        ConditionReport a = check_conditions(t, v), b = check_conditions(g, Pi.apply(v));
        CHECK(a.ic == b.ic);
        CHECK(a.gc == b.gc);
        CHECK(a.gc_prime == b.gc_prime);
        CHECK(check_flatness(g).flat);
    }
}

TEST_CASE("vector parsing")
{
    CHECK(parse_vector("e3", 3) == unit_vector(3, 2));
    CHECK(parse_vector("1", 2) == unit_vector(2, 0));
    CHECK(parse_vector("l1, 0, 2", 3) == Vec{S("l1"), S("0"), S("2")});
    CHECK_THROWS_AS(parse_vector("e4", 3), Error);
    CHECK_THROWS_AS(parse_vector("1,2", 3), Error);
}
