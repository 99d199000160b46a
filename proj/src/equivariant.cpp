#include "fb/equivariant.hpp"

#include "fb/errors.hpp"

namespace fb {

namespace {

Scalar lambda_power(const ParamSpec &spec, const std::vector<int> &k)
{
    Scalar s(1);
    for (size_t a = 0; a < k.size(); ++a) s *= Scalar::symbol(spec.equiv_params[a]).pow(k[a]);
    return s;
}

SeriesMatrix lift_matrix(const SeriesMatrix &m, const ParamSpec &spec, int cap, const TruncOrder &o)
{
    return substitute_psi_lambda(m, spec, cap).with_order(o);
}

std::string first_difference(const SeriesMatrix &a, const SeriesMatrix &b)
{
    SeriesMatrix d = a - b;
    auto &[k, c] = *d.terms().begin();
    std::string mono = monomial_string(k, a.vars());
    return "at " + (mono.empty() ? std::string("1") : mono) + ": " + a.coeff(k).to_string() + " vs " +
           b.coeff(k).to_string();
}

} // namespace

TStruct lift_T_structure(const TStruct &t, int lambda_cap)
{
    t.validate();
    if (lambda_cap < 0) throw Error(ErrorKind::Invalid, "lambda cap must be >= 0");
    const int ne = (int)t.spec.equiv_params.size();
    auto ks = multi_indices(ne, lambda_cap);
    TStruct r{t.spec, lifted_vars(t.vars, ne, lambda_cap), t.rank, {}, t.order};
    for (int i = 0; i < t.vars.size(); ++i) {
        SeriesMatrix At = lift_matrix(t.A[i], t.spec, lambda_cap, t.order);
        for (auto &k : ks) r.A.push_back(At.scaled(lambda_power(t.spec, k)));
    }
    return r;
}

EquivFBund assemble_equivariant(const FBund &k_bundle, const TStruct &r_tstruct, int lambda_cap,
                                const std::optional<SeriesMatrix> &alpha)
{
    FBund k = k_bundle;
    if (alpha) {
        if (!(constant_term(*alpha) == ScalarMatrix::identity(k.t.rank)))
            throw Error(ErrorKind::LiftMismatch, "alpha must restrict to the identity at the origin");
        k = apply_gauge(k, Gauge::of(*alpha));
    }
    if (k.t.rank != r_tstruct.rank)
        throw Error(ErrorKind::LiftMismatch, "rank " + std::to_string(k.t.rank) + " vs " +
                                                 std::to_string(r_tstruct.rank));
    TStruct lift = lift_T_structure(r_tstruct, lambda_cap);
    if (k.t.vars != lift.vars) throw Error(ErrorKind::LiftMismatch, "variables differ from the lifted variables");
    for (int i = 0; i < lift.vars.size(); ++i) {
        SeriesMatrix a = k.t.A[i].with_order(lift.order), b = lift.A[i];
        if (a != b) throw Error(ErrorKind::LiftMismatch, "direction " + lift.vars.name(i) + " " + first_difference(a, b));
    }
    return {k, r_tstruct, lambda_cap};
}

EquivFBund truncate_lambda(const EquivFBund &e, int lambda_cap)
{
    if (lambda_cap > e.lambda_cap) throw Error(ErrorKind::Invalid, "cannot raise the lambda cap by truncation");
    VarList sub = lifted_vars(e.r_tstruct.vars, (int)e.r_tstruct.spec.equiv_params.size(), lambda_cap);
    return {restrict_to(e.k_bundle, sub), e.r_tstruct, lambda_cap};
}

EquivUnfoldResult equivariant_maximal_unfold(const EquivFBund &e, const Vec &v, const UnfoldOptions &opt)
{
    const int L = e.lambda_cap;
    const ParamSpec &spec = e.r_tstruct.spec;
    const TruncOrder o = e.r_tstruct.order;
    const int w = e.k_bundle.lambda_weight;
    EquivUnfoldResult out;
    out.r = maximal_unfold(e.r_tstruct, v, opt);
    const UnfoldResult &r = out.r;

    // Initial u-direction in the lifted good basis: P(0,u) = Id, so only the
    // constant fiber basis C acts.
    const ScalarMatrix &C = r.fiber_basis;
    VarList kv = e.k_bundle.t.vars;
    SeriesMatrix U00 = e.k_bundle.U.at_t0();
    SeriesMatrix Cs = series_constant(kv, e.k_bundle.t.order, C);
    SeriesMatrix Cis = series_constant(kv, e.k_bundle.t.order, mat_inverse(C));
    SeriesMatrix U0 = Cis * U00 * Cs;
    if (w) U0 += (Cis * Cs.euler_params(spec.equiv_mask())).times_u(1).scaled(Scalar(w));

    TStruct lifted = lift_T_structure(r.framed.t, L);
    U0 = U0.embed(lifted.vars);
    out.k_framed = extend_u_direction(lifted, U0, w);

    TruncOrder o1 = o;
    o1.t_degree_cap += 1;
    SeriesMatrix G = lift_matrix(r.good_basis, spec, L, o1);
    out.k_good_basis = G;
    FBund k = apply_gauge(out.k_framed, Gauge{series_inverse(G), G});
    out.bundle = assemble_equivariant(k, r.bundle.t, L);

    FBund back = restrict_to(k, kv);
    if (!(back.t.A == e.k_bundle.t.A) || back.U != e.k_bundle.U.with_order(back.U.order()))
        throw Error(ErrorKind::Invalid, "internal: equivariant unfolding does not restrict to its input");
    return out;
}

} // namespace fb
