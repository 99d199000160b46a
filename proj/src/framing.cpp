#include "fb/framing.hpp"

#include "fb/errors.hpp"

namespace fb {

Gauge Gauge::of(const SeriesMatrix &P) { return {P, series_inverse(P)}; }

Gauge Gauge::identity(const VarList &vars, const TruncOrder &ord, int n)
{
    TruncOrder o = ord;
    o.t_degree_cap += 1;
    SeriesMatrix id = series_identity(vars, o, n);
    return {id, id};
}

namespace {

// The derivative of P costs one t-degree, so the result is exact up to the
// smaller of the bundle's cap and P's cap minus one.
TruncOrder gauged_order(const TruncOrder &o, const Gauge &g)
{
    return {std::min(o.t_degree_cap, g.P.order().t_degree_cap - 1), o.u_min, o.u_max};
}

} // namespace

TStruct apply_gauge(const TStruct &t, const Gauge &g)
{
    TStruct r = t;
    r.order = gauged_order(t.order, g);
    for (int i = 0; i < t.vars.size(); ++i)
        r.A[i] = ((g.P_inv * g.P.diff(i)).times_u(1) + g.P_inv * t.A[i] * g.P).with_order(r.order);
    return r;
}

FBund apply_gauge(const FBund &b, const Gauge &g)
{
    FBund r{apply_gauge(b.t, g), {}, b.lambda_weight};
    r.U = (g.P_inv * g.P.diff_u()).times_u(2) + g.P_inv * b.U * g.P;
    if (b.lambda_weight)
        r.U += (g.P_inv * g.P.euler_params(b.t.spec.equiv_mask())).times_u(1).scaled(Scalar(b.lambda_weight));
    r.U = r.U.with_order(r.t.order);
    return r;
}

bool is_framed(const TStruct &t)
{
    for (auto &a : t.A)
        if (!a.is_zero() && a.max_u() > 0) return false;
    return true;
}

bool is_F_framed(const FBund &b) { return is_framed(b.t) && (b.U.is_zero() || b.U.max_u() <= 1); }

Framing compute_framing(const TStruct &t)
{
    // P is computed one t-degree beyond the cap (P^(d) only needs A up to
    // degree d - 1) so that gauging by it is exact at the cap. Each step
    // divides by u once, so P^(d) is exact up to u-degree W - d.
    const int D = t.order.t_degree_cap + 1, n = t.rank;
    TruncOrder wide{D, 0, t.order.u_max + D + 1};
    std::vector<SeriesMatrix> A, A0;
    for (auto &a : t.A) {
        A.push_back(a.with_order(wide));
        A0.push_back(A.back().u_coeff(0));
    }
    std::vector<SeriesScalar> tv;
    for (int i = 0; i < t.vars.size(); ++i) tv.push_back(series_var(t.vars, wide, t.vars.name(i)));

    SeriesMatrix P = series_identity(t.vars, wide, n);
    auto framed_matrices = [&] {
        SeriesMatrix P0 = P.u_coeff(0);
        SeriesMatrix P0i = series_inverse(P0);
        std::vector<SeriesMatrix> B;
        for (auto &a : A0) B.push_back(P0i * a * P0);
        return B;
    };
    for (int d = 1; d <= D; ++d) {
        std::vector<SeriesMatrix> B = framed_matrices();
        SeriesMatrix step(t.vars, wide, n, n);
        for (int i = 0; i < t.vars.size(); ++i) {
            SeriesMatrix r = (P * B[i] - A[i] * P).part_t_degree(d - 1);
            if (!r.u_coeff(0).is_zero()) throw Error(ErrorKind::Invalid, "framing recursion lost exactness");
            step += tv[i] * r.times_u(-1);
        }
        P += step.part_t_degree(d).scaled(Scalar(Rational(1, d)));
    }
    Framing f;
    f.gauge = Gauge::of(P.with_order({D, t.order.u_min, t.order.u_max}));
    f.framed = t;
    std::vector<SeriesMatrix> B = framed_matrices();
    for (int i = 0; i < t.vars.size(); ++i) f.framed.A[i] = B[i].with_order(t.order);
    return f;
}

SeriesMatrix extend_good_basis(const TStruct &t, const ScalarMatrix &fiber_basis)
{
    if (fiber_basis.rows() != t.rank || fiber_basis.cols() != t.rank)
        throw Error(ErrorKind::DimensionMismatch, "fiber basis must be square of the bundle rank");
    Scalar d = mat_det(fiber_basis);
    if (d.is_zero() || !safe_is_unit(d, t.spec))
        throw Error(ErrorKind::SingularFiberBasis, "fiber basis determinant " + d.to_string() + " is not a unit");
    return compute_framing(t).gauge.P * fiber_basis;
}

FBund extend_u_direction(const TStruct &framed, const SeriesMatrix &U0, int lambda_weight)
{
    if (!is_framed(framed)) throw Error(ErrorKind::NotFramed, "extend_u_direction needs u-free connection matrices");
    for (auto &[k, c] : U0.terms())
        if (k.deg) throw Error(ErrorKind::Invalid, "initial u-direction must not depend on the base variables");
    const int D = framed.order.t_degree_cap;
    const uint32_t mask = framed.spec.equiv_mask();
    const VarList &vars = framed.vars;
    SeriesMatrix U = U0.with_order(framed.order);
    std::vector<SeriesMatrix> F;
    for (auto &a : framed.A) {
        SeriesMatrix f = -a;
        if (lambda_weight) f += a.euler_params(mask).scaled(Scalar(lambda_weight));
        F.push_back(f);
    }
    for (int d = 1; d <= D; ++d) {
        SeriesMatrix step(vars, framed.order, framed.rank, framed.rank);
        for (int i = 0; i < vars.size(); ++i) {
            SeriesMatrix br = commutator(U, framed.A[i]).part_t_degree(d - 1);
            SeriesMatrix low = br.u_coeff(0);
            if (!low.is_zero())
                throw Error(ErrorKind::ULaurentUnderflow,
                            "[U, A_" + vars.name(i) + "] has a u^0 term at t-degree " + std::to_string(d - 1) +
                                "; the initial condition does not extend");
            SeriesMatrix dU = F[i].part_t_degree(d - 1) + br.times_u(-1);
            step += series_var(vars, framed.order, vars.name(i)) * dU;
        }
        U += step.part_t_degree(d).scaled(Scalar(Rational(1, d)));
    }
    return {framed, U, lambda_weight};
}

bool is_F_framing(const FBund &b, const Gauge &g) { return is_F_framed(apply_gauge(b, g)); }

} // namespace fb
