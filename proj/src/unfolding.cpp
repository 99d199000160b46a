#include "fb/unfolding.hpp"

#include "fb/errors.hpp"

#include <set>

namespace fb {

namespace {

// Coefficient of s^m (s = variable js) as an s-free series.
template <class C>
Series<C> s_coeff(const Series<C> &x, int js, int m)
{
    Series<C> r(x.vars(), x.order(), x.rows(), x.cols());
    for (auto &[k, c] : x.terms())
        if (k.e[js] == m) {
            SKey n = k;
            n.e[js] = 0;
            n.deg -= m;
            r.add_term(n, c);
        }
    return r;
}

// x * s^m, dropping what exceeds the cap.
SeriesMatrix times_s(const SeriesMatrix &x, int js, int m)
{
    SeriesMatrix r(x.vars(), x.order(), x.rows(), x.cols());
    SKey sk = SKey::of_var(js, m);
    for (auto &[k, c] : x.terms()) r.add_term(k * sk, c);
    return r;
}

// Rows: [X, G] for each generator, then X e_1; columns: entries of X.
ScalarMatrix commutant_operator(const std::vector<ScalarMatrix> &gens, int n)
{
    const int nn = n * n;
    ScalarMatrix L((int)gens.size() * nn + n, nn);
    for (size_t g = 0; g < gens.size(); ++g) {
        const ScalarMatrix &G = gens[g];
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                int row = (int)g * nn + a * n + b;
                for (int c = 0; c < n; ++c) {
                    L(row, a * n + c) += G(c, b);
                    L(row, c * n + b) -= G(a, c);
                }
            }
    }
    for (int a = 0; a < n; ++a) L((int)gens.size() * nn + a, a * n) = Scalar(1);
    return L;
}

// Adds one variable s to a framed bundle in good-basis coordinates, building
// S, T^i and (with_u) U order by order in s so that [S, T^i] = 0,
// [S, U_-2] = 0, S e_1 = target, d_s T^i = d_i S and
// d_s U = -S + u^-1 [U, S] + w E_lambda(S).
FBund unfold_one(const FBund &b, bool with_u, const std::string &sname, const std::vector<SeriesScalar> &target)
{
    const TStruct &t = b.t;
    const int n = t.rank, D = t.order.t_degree_cap, d = t.vars.size();
    const TruncOrder o = t.order;
    const uint32_t mask = t.spec.equiv_mask();
    VarList nv = concat(t.vars, {sname});
    const int js = d;

    std::vector<SeriesMatrix> T, T0;
    for (auto &a : t.A) T.push_back(a.with_order(o).embed(nv));
    T0 = T;
    SeriesMatrix U = with_u ? b.U.with_order(o).embed(nv) : SeriesMatrix(nv, o, n, n);
    SeriesMatrix Um2 = U.u_coeff(0);
    SeriesMatrix S(nv, o, n, n);

    std::vector<ScalarMatrix> gens;
    for (auto &a : T0) gens.push_back(constant_term(a));
    if (with_u) gens.push_back(constant_term(Um2));
    ScalarMatrix L = commutant_operator(gens, n);
    if (mat_rank(L) < n * n)
        throw Error(ErrorKind::GCFailed, "the residue algebra does not generate the fiber from e1; S is not unique");

    std::vector<SeriesScalar> tgt_full;
    for (auto &x : target) tgt_full.push_back(x.with_order(o));

    for (int m = 0; m < D; ++m) {
        std::vector<SeriesMatrix> C;
        for (int i = 0; i < d; ++i) C.push_back(s_coeff(commutator(S, T[i]), js, m));
        SeriesMatrix CU = with_u ? s_coeff(commutator(S, Um2), js, m) : SeriesMatrix(nv, o, n, n);
        std::vector<SeriesScalar> tgt;
        for (auto &x : tgt_full) tgt.push_back(s_coeff(x, js, m));

        SeriesMatrix X(nv, o, n, n);
        for (int e = 0; e <= D - m; ++e) {
            std::vector<SeriesMatrix> R;
            for (int i = 0; i < d; ++i) R.push_back((C[i] + commutator(X, T0[i])).part_t_degree(e));
            if (with_u) R.push_back((CU + commutator(X, Um2)).part_t_degree(e));
            std::vector<SeriesScalar> tg;
            for (auto &x : tgt) tg.push_back(x.part_t_degree(e));
            std::set<SKey> keys;
            for (auto &r : R)
                for (auto &[k, c] : r.terms()) keys.insert(k);
            for (auto &x : tg)
                for (auto &[k, c] : x.terms()) keys.insert(k);
            if (keys.empty()) continue;
            std::vector<SKey> kv(keys.begin(), keys.end());
            ScalarMatrix B(L.rows(), (int)kv.size());
            for (size_t col = 0; col < kv.size(); ++col) {
                for (size_t g = 0; g < R.size(); ++g) {
                    ScalarMatrix r = R[g].coeff(kv[col]);
                    for (int a = 0; a < n; ++a)
                        for (int bb = 0; bb < n; ++bb) B((int)g * n * n + a * n + bb, (int)col) = -r(a, bb);
                }
                for (int a = 0; a < n; ++a) B((int)R.size() * n * n + a, (int)col) = tg[a].coeff(kv[col]);
            }
            SolveResult sol = mat_solve_full(L, B);
            if (!sol.solvable)
                throw Error(ErrorKind::GCFailed, "no commuting S with the prescribed value on e1 at s-order " +
                                                     std::to_string(m) + ", t-degree " + std::to_string(e));
            for (size_t col = 0; col < kv.size(); ++col) {
                ScalarMatrix x(n, n);
                for (int a = 0; a < n; ++a)
                    for (int bb = 0; bb < n; ++bb) x(a, bb) = sol.solution(a * n + bb, (int)col);
                X.add_term(kv[col], x);
            }
        }
        S += times_s(X, js, m);
        Scalar inv(Rational(1, m + 1));
        for (int i = 0; i < d; ++i) T[i] += times_s(X.diff(i).with_order(o).scaled(inv), js, m + 1);
        if (with_u) {
            SeriesMatrix Y = s_coeff(commutator(U, S), js, m);
            if (!Y.u_coeff(0).is_zero())
                throw Error(ErrorKind::ULaurentUnderflow, "[U, S] has a u^0 term at s-order " + std::to_string(m));
            SeriesMatrix dU = -X + Y.times_u(-1);
            if (b.lambda_weight) dU += X.euler_params(mask).scaled(Scalar(b.lambda_weight));
            U += times_s(dU.scaled(inv), js, m + 1);
            Um2 = U.u_coeff(0);
        }
    }
    FBund r;
    r.t = TStruct{t.spec, nv, n, T, o};
    r.t.A.push_back(S);
    r.U = U;
    r.lambda_weight = b.lambda_weight;
    return r;
}

std::vector<std::string> added_names(const VarList &vars, int count, const std::vector<std::string> &given)
{
    if (!given.empty()) {
        if ((int)given.size() != count)
            throw Error(ErrorKind::DimensionMismatch, "need " + std::to_string(count) + " names for added variables");
        return given;
    }
    std::vector<std::string> out;
    for (int i = 1; (int)out.size() < count; ++i) {
        std::string s = "s" + std::to_string(i);
        if (!vars.index_of(s)) out.push_back(s);
    }
    return out;
}

FBund as_fbund(const TStruct &t)
{
    return {t, SeriesMatrix(t.vars, t.order, t.rank, t.rank), 0};
}

// Runs the sequential one-variable unfoldings of a framed bundle in good
// coordinates; f lives over the final variable list.
FBund unfold_sequence(const FBund &good, bool with_u, const std::vector<std::string> &names,
                      const std::vector<SeriesScalar> &f)
{
    FBund cur = good;
    for (const std::string &s : names) {
        VarList nv = concat(cur.t.vars, {s});
        std::vector<SeriesScalar> target;
        for (auto &fi : f) target.push_back(fi.diff(s).with_order(good.t.order).restrict_to(nv));
        cur = unfold_one(cur, with_u, s, target);
    }
    return cur;
}

void fill_certificate(UnfoldResult &r)
{
    r.certificate = r.has_u ? check_conditions(r.bundle, r.v) : check_conditions(r.bundle.t, r.v);
    r.maximal = check_maximal(r.bundle.t, r.v);
}

bool same_bundle(const FBund &a, const FBund &b)
{
    return a.t.vars == b.t.vars && a.t.rank == b.t.rank && a.t.A == b.t.A && a.U == b.U &&
           a.lambda_weight == b.lambda_weight;
}

UnfoldResult with_f_impl(const FBund &b, bool has_u, const std::vector<std::string> &new_vars,
                         const std::vector<SeriesScalar> &f)
{
    b.t.validate();
    if (!is_framed(b.t)) throw Error(ErrorKind::NotFramed, "unfold_with_f needs a framed bundle");
    const int n = b.t.rank;
    if ((int)f.size() != n) throw Error(ErrorKind::DimensionMismatch, "f needs one series per basis vector");
    VarList nv = concat(b.t.vars, new_vars);
    for (auto &fi : f) {
        if (fi.vars() != nv) throw Error(ErrorKind::DimensionMismatch, "f must live over the enlarged variables");
        if (!fi.restrict_to(b.t.vars).is_zero()) throw Error(ErrorKind::Invalid, "f must vanish on the original base");
    }
    UnfoldResult r;
    r.has_u = has_u;
    r.original = b;
    r.added = new_vars;
    r.v = unit_vector(n, 0);
    r.fiber_basis = ScalarMatrix::identity(n);
    r.f = f;
    r.framed = unfold_sequence(b, has_u, new_vars, f);
    r.bundle = r.framed;
    TruncOrder o1 = b.t.order;
    o1.t_degree_cap += 1;
    r.good_basis = series_identity(nv, o1, n);
    fill_certificate(r);
    return r;
}

UnfoldResult maximal_impl(const FBund &b, bool has_u, const Vec &v, const UnfoldOptions &opt)
{
    const TStruct &t = b.t;
    t.validate();
    const int n = t.rank, d = t.vars.size();
    const ParamSpec &spec = t.spec;

    Framing fr = compute_framing(t);
    FBund framed = has_u ? apply_gauge(b, fr.gauge) : as_fbund(fr.framed);
    framed.t = fr.framed;

    ConditionReport rep = has_u ? check_conditions(framed, v) : check_conditions(framed.t, v);
    if (!rep.ic || !rep.gc_prime)
        throw Error(ErrorKind::ConditionsNotMet, std::string("ic=") + (rep.ic ? "true" : "false") +
                                                     ", gc'=" + (rep.gc_prime ? "true" : "false") + " for v = " +
                                                     vec_string(v));
    const int ell = n - d;
    std::vector<Vec> ncols;
    for (int j = 0; j < d; ++j) ncols.push_back(rep.mu_matrix.column(j));

    std::vector<Vec> comps;
    if (!opt.forced_complements.empty()) {
        if ((int)opt.forced_complements.size() != ell)
            throw Error(ErrorKind::DimensionMismatch, "need " + std::to_string(ell) + " complement vectors");
        std::vector<Vec> all = ncols;
        all.insert(all.end(), opt.forced_complements.begin(), opt.forced_complements.end());
        Scalar det = mat_det(ScalarMatrix::from_columns(all));
        if (!safe_is_unit(det, spec))
            throw Error(ErrorKind::NoUnitComplement,
                        "forced complement gives determinant " + det.to_string() +
                            (det.is_zero() ? "" : "; needs localization at " + non_unit_factor(det, spec).to_string()));
        comps = opt.forced_complements;
    } else {
        std::vector<Vec> cands = ncols;
        cands.insert(cands.end(), rep.orbit.begin(), rep.orbit.end());
        MinorSearch ms = search_minor(cands, d, n, spec);
        if (!ms.found_unit) {
            std::string msg = "no complement from the orbit of " + vec_string(v) + " gives a unit determinant";
            if (!ms.det.is_zero())
                msg += "; best determinant " + ms.det.to_string() + " needs localization at " +
                       non_unit_factor(ms.det, spec).to_string();
            throw Error(ErrorKind::NoUnitComplement, msg);
        }
        for (size_t i = d; i < ms.subset.size(); ++i) comps.push_back(cands[ms.subset[i]]);
    }

    // Fiber basis with first column v, completed by standard or orbit vectors.
    std::vector<Vec> basis_cands{v};
    for (int i = 0; i < n; ++i) basis_cands.push_back(unit_vector(n, i));
    basis_cands.insert(basis_cands.end(), rep.orbit.begin(), rep.orbit.end());
    MinorSearch bs = search_minor(basis_cands, 1, n, spec);
    if (!bs.found_unit)
        throw Error(ErrorKind::SingularFiberBasis, vec_string(v) + " does not extend to a basis over the ring");
    std::vector<Vec> ccols;
    for (int i : bs.subset) ccols.push_back(basis_cands[i]);
    ScalarMatrix C = ScalarMatrix::from_columns(ccols);
    ScalarMatrix Ci = mat_inverse(C);

    TruncOrder o1 = t.order;
    o1.t_degree_cap += 1;
    FBund good = apply_gauge(framed, Gauge::of(series_constant(t.vars, o1, C)));
    if (!has_u) good.U = SeriesMatrix(t.vars, t.order, n, n);

    std::vector<std::string> names = added_names(t.vars, ell, opt.names);
    VarList nv = concat(t.vars, names);
    std::vector<SeriesScalar> f(n, SeriesScalar(nv, o1));
    for (int k = 0; k < ell; ++k) {
        Vec c = Ci.apply(comps[k]);
        SeriesScalar sk = series_var(nv, o1, names[k]);
        for (int i = 0; i < n; ++i) f[i] += sk.scaled(c[i]);
    }

    UnfoldResult r;
    r.has_u = has_u;
    r.original = b;
    r.added = names;
    r.v = v;
    r.fiber_basis = C;
    r.f = f;
    r.framed = unfold_sequence(good, has_u, names, f);
    SeriesMatrix G = (fr.gauge.P * C).embed(nv);
    r.good_basis = G;
    r.bundle = apply_gauge(r.framed, Gauge{series_inverse(G), G});
    if (!has_u) r.bundle.U = SeriesMatrix(nv, t.order, n, n);
    FBund back = has_u ? restrict_to(r.bundle, t.vars) : as_fbund(restrict_to(r.bundle.t, t.vars));
    if (!same_bundle(back, has_u ? b : as_fbund(t)))
        throw Error(ErrorKind::Invalid, "internal: unfolding does not restrict to its input");
    fill_certificate(r);
    if (!r.maximal.maximal) throw Error(ErrorKind::Invalid, "internal: unfolding is not maximal: " + r.maximal.reason);
    return r;
}

std::string first_term(const SeriesMatrix &m)
{
    auto &[k, c] = *m.terms().begin();
    std::string mono = monomial_string(k, m.vars());
    return "at " + (mono.empty() ? std::string("1") : mono) + ": " + c.to_string();
}

} // namespace

UnfoldResult unfold_with_f(const FBund &b, const std::vector<std::string> &new_vars,
                           const std::vector<SeriesScalar> &f)
{
    return with_f_impl(b, true, new_vars, f);
}

UnfoldResult unfold_with_f(const TStruct &t, const std::vector<std::string> &new_vars,
                           const std::vector<SeriesScalar> &f)
{
    return with_f_impl(as_fbund(t), false, new_vars, f);
}

UnfoldResult maximal_unfold(const FBund &b, const Vec &v, const UnfoldOptions &opt)
{
    return maximal_impl(b, true, v, opt);
}

UnfoldResult maximal_unfold(const TStruct &t, const Vec &v, const UnfoldOptions &opt)
{
    return maximal_impl(as_fbund(t), false, v, opt);
}

SeriesMatrix framed_potential(const TStruct &fr)
{
    const int n = fr.rank;
    TruncOrder o = fr.order;
    SeriesMatrix pot(fr.vars, o, n, n);
    for (int d = 1; d <= o.t_degree_cap; ++d) {
        SeriesMatrix step(fr.vars, o, n, n);
        for (int j = 0; j < fr.vars.size(); ++j)
            step += series_var(fr.vars, o, fr.vars.name(j)) * fr.A[j].part_t_degree(d - 1);
        pot += step.scaled(Scalar(Rational(1, d)));
    }
    return pot;
}

UnfoldIso compare_unfoldings(const UnfoldResult &u1, const UnfoldResult &u2)
{
    auto fail = [](const std::string &why) { throw Error(ErrorKind::NotComparable, why); };
    if (u1.v != u2.v) fail("cyclic vectors differ: " + vec_string(u1.v) + " vs " + vec_string(u2.v));
    if (u1.fiber_basis != u2.fiber_basis) fail("the upstream good bases differ");
    if (u1.has_u != u2.has_u || !same_bundle(u1.original, u2.original)) fail("the original bundles differ");
    if (u1.added.size() != u2.added.size()) fail("different numbers of added variables");
    if (!u1.maximal.maximal || !u2.maximal.maximal) fail("both unfoldings must be maximal");

    const TStruct &F1 = u1.framed.t, &F2 = u2.framed.t;
    const int n = F1.rank, D = F1.order.t_degree_cap;
    const VarList &x1 = F1.vars, &x2 = F2.vars;

    SeriesMatrix P1 = framed_potential(F1), P2 = framed_potential(F2);
    std::vector<SeriesScalar> psi1, psi2;
    for (int i = 0; i < n; ++i) {
        psi1.push_back(entry(P1, i, 0));
        psi2.push_back(entry(P2, i, 0));
    }
    ScalarMatrix J2 = mu_v_matrix(F2, unit_vector(n, 0));
    ScalarMatrix J2i = mat_inverse(J2);
    auto lin = [&](const ScalarMatrix &m, const std::vector<SeriesScalar> &v) {
        std::vector<SeriesScalar> out;
        for (int i = 0; i < n; ++i) {
            SeriesScalar s(v[0].vars(), v[0].order());
            for (int j = 0; j < n; ++j) s += v[j].scaled(m(i, j));
            out.push_back(s);
        }
        return out;
    };
    // Fixed point for psi2(f) = psi1: f = J2^-1 (psi1 - (psi2(f) - J2 f)).
    std::vector<SeriesScalar> f = lin(J2i, psi1);
    for (int it = 0; it < D; ++it) {
        std::vector<SeriesScalar> comp, jf = lin(J2, f);
        for (int i = 0; i < n; ++i) comp.push_back(psi2[i].substitute(f, x1));
        std::vector<SeriesScalar> rhs;
        for (int i = 0; i < n; ++i) rhs.push_back(psi1[i] - (comp[i] - jf[i]));
        f = lin(J2i, rhs);
    }
    for (int i = 0; i < n; ++i)
        for (auto &[k, c] : f[i].terms())
            if (!in_ring(c, F1.spec))
                throw Error(ErrorKind::Invalid, "intertwiner coefficient " + c.to_string() +
                                                    " is not in the ring; this contradicts uniqueness");

    // Verify A1_j = sum_l (d_j f_l) A2_l(f) and U1 = U2(f) in good bases.
    TruncOrder vo = F1.order;
    vo.t_degree_cap = D - 1;
    std::vector<SeriesMatrix> A2f;
    for (int l = 0; l < x2.size(); ++l) A2f.push_back(F2.A[l].substitute(f, x1));
    for (int j = 0; j < x1.size(); ++j) {
        SeriesMatrix rhs(x1, F1.order, n, n);
        for (int l = 0; l < x2.size(); ++l) rhs += f[l].diff(j) * A2f[l];
        SeriesMatrix diff = (F1.A[j] - rhs).with_order(vo);
        if (!diff.is_zero())
            throw Error(ErrorKind::NotIsomorphic, "direction " + x1.name(j) + " " + first_term(diff));
    }
    if (u1.has_u) {
        SeriesMatrix diff = u1.framed.U - u2.framed.U.substitute(f, x1);
        if (!diff.is_zero()) throw Error(ErrorKind::NotIsomorphic, "u-direction " + first_term(diff));
    }

    UnfoldIso iso;
    iso.source = x1;
    iso.target = x2;
    iso.base_map = f;
    iso.bundle_map = (u2.good_basis.substitute(f, x1) * series_inverse(u1.good_basis)).with_order(F1.order);
    iso.verified_cap = D - 1;
    return iso;
}

} // namespace fb
