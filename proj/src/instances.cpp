#include "fb/instances.hpp"

#include "fb/errors.hpp"

namespace fb {

TruncOrder default_order(int t_order) { return {t_order, -2, 6}; }

namespace {

Scalar sym(const std::string &s) { return Scalar::symbol(s); }

ParamSpec lambda12_spec(const std::vector<std::string> &localize_at)
{
    ParamSpec p;
    p.equiv_params = {"l1", "l2"};
    p.flavor = Flavor::PowerSeriesLocal;
    for (auto &s : localize_at) {
        if (s != "l1" && s != "l2") throw Error(ErrorKind::Invalid, "can only localize at l1 or l2, not " + s);
        p.localized_at.push_back(sym(s));
    }
    return p;
}

ParamSpec p1_spec()
{
    ParamSpec p;
    p.base_params = {"q"};
    p.equiv_params = {"l"};
    return p;
}

ScalarMatrix example_b()
{
    ScalarMatrix B(3, 3);
    B(0, 2) = Scalar(1);
    B(1, 0) = sym("l1");
    B(2, 1) = sym("l2");
    return B;
}

Scalar set_symbol(const Scalar &c, const std::string &name, const Scalar &value)
{
    int id = intern_symbol(name);
    return c.substitute([&](int s) -> std::optional<Scalar> {
        if (s == id) return value;
        return std::nullopt;
    });
}

// Entry c(q) of degree at most one in q becomes c(0) + (c - c(0)) e^t.
SeriesMatrix divisor_series(const ScalarMatrix &m, const VarList &vars, const TruncOrder &o, const std::string &var)
{
    SeriesScalar et = series_exp(series_var(vars, o, var));
    std::vector<std::vector<SeriesScalar>> grid(m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            Scalar c0 = set_symbol(m(i, j), "q", Scalar(0));
            grid[i].push_back(SeriesScalar::constant(vars, o, c0) + et.scaled(m(i, j) - c0));
        }
    return from_entries(grid);
}

std::string first_difference(const SeriesMatrix &a, const SeriesMatrix &b)
{
    SeriesMatrix d = a - b;
    if (d.is_zero()) return "";
    auto &[k, c] = *d.terms().begin();
    std::string mono = monomial_string(k, a.vars());
    return "at " + (mono.empty() ? std::string("1") : mono) + ": " + a.coeff(k).to_string() + " vs " +
           b.coeff(k).to_string();
}

int abs_k(const std::vector<int> &k)
{
    int s = 0;
    for (int x : k) s += x;
    return s;
}

} // namespace

FBund make_example_3_10(const std::vector<std::string> &localize_at, const TruncOrder &o)
{
    VarList v({"t1", "t2"});
    TStruct t{lambda12_spec(localize_at), v, 3, {series_identity(v, o, 3), series_constant(v, o, example_b())}, o};
    t.validate();
    // U vanishes at the origin; flatness then forces U = -t1 A_1 - t2 A_2.
    return extend_u_direction(t, SeriesMatrix(v, o, 3, 3));
}

EquivFBund make_example_3_10_equivariant(const std::vector<std::string> &localize_at, const TruncOrder &o,
                                         int lambda_cap)
{
    FBund b = make_example_3_10(localize_at, o);
    TStruct lift = lift_T_structure(b.t, lambda_cap);
    FBund k = extend_u_direction(lift, SeriesMatrix(lift.vars, o, 3, 3));
    return assemble_equivariant(k, b.t, lambda_cap);
}

ScalarMatrix example_3_10_evaluation_matrix()
{
    Vec v{sym("alpha"), sym("beta"), sym("gamma")};
    ScalarMatrix B = example_b();
    Vec bv = B.apply(v);
    return ScalarMatrix::from_columns({v, bv, B.apply(bv)});
}

Vec QHP1::mul(const Vec &a, const Vec &b) const
{
    if (a.size() != 2 || b.size() != 2) throw Error(ErrorKind::DimensionMismatch, "elements have two coordinates");
    return {a[0] * b[0] + a[1] * b[1] * q, a[0] * b[1] + a[1] * b[0] + a[1] * b[1] * lambda};
}

ScalarMatrix QHP1::mul_matrix(const Vec &a) const
{
    return ScalarMatrix::from_columns({mul(a, {Scalar(1), Scalar(0)}), mul(a, {Scalar(0), Scalar(1)})});
}

Grading p1_grading(int n_vars)
{
    Grading g;
    g.ell.assign(n_vars, 0);
    g.ell[0] = 1;
    g.mu = ScalarMatrix(2, 2);
    g.mu(1, 1) = Scalar(1);
    return g;
}

SeriesMatrix euler_field(const SeriesMatrix &a, const Grading &g, const VarList &r_vars, int n_equiv, int lambda_cap)
{
    auto ks = multi_indices(n_equiv, lambda_cap);
    const VarList &kv = a.vars();
    TruncOrder o = a.order();
    o.t_degree_cap = std::max(0, o.t_degree_cap - 1);
    SeriesMatrix r(kv, o, a.rows(), a.cols());
    for (int j = 0; j < r_vars.size(); ++j)
        for (size_t kk = 0; kk < ks.size(); ++kk) {
            int idx = j * (int)ks.size() + (int)kk;
            SeriesMatrix d = a.diff(idx);
            Scalar c(1 - g.ell[j] - abs_k(ks[kk]));
            if (!c.is_zero()) r += series_var(kv, o, kv.name(idx)) * d.scaled(c);
            if (j == 0 && kk == 0) r += d.scaled(g.shift);
        }
    return r;
}

FBund graded_lift(const TStruct &r, const Grading &g, int lambda_cap)
{
    TStruct lift = lift_T_structure(r, lambda_cap);
    const int ne = (int)r.spec.equiv_params.size();
    auto ks = multi_indices(ne, lambda_cap);
    const TruncOrder &o = r.order;
    SeriesMatrix U = series_constant(lift.vars, o, g.mu).times_u(1);
    for (int j = 0; j < r.vars.size(); ++j)
        for (size_t kk = 0; kk < ks.size(); ++kk) {
            int idx = j * (int)ks.size() + (int)kk;
            SeriesScalar E = series_var(lift.vars, o, lift.vars.name(idx)).scaled(Scalar(1 - g.ell[j] - abs_k(ks[kk])));
            if (j == 0 && kk == 0) E += SeriesScalar::constant(lift.vars, o, g.shift);
            U -= E * lift.A[idx];
        }
    return {lift, U, 1};
}

GradingReport check_grading(const EquivFBund &e, const Grading &g)
{
    GradingReport rep;
    const TStruct &k = e.k_bundle.t;
    const int ne = (int)e.r_tstruct.spec.equiv_params.size();
    auto ks = multi_indices(ne, e.lambda_cap);
    const uint32_t mask = k.spec.equiv_mask();
    TruncOrder lower = k.order;
    lower.t_degree_cap -= 1;
    SeriesMatrix mu = series_constant(k.vars, k.order, g.mu);
    for (int j = 0; j < e.r_tstruct.vars.size(); ++j)
        for (size_t kk = 0; kk < ks.size(); ++kk) {
            int idx = j * (int)ks.size() + (int)kk;
            const SeriesMatrix &A = k.A[idx];
            SeriesMatrix res = euler_field(A, g, e.r_tstruct.vars, ne, e.lambda_cap) + A.euler_params(mask) +
                               commutator(mu, A) - A.scaled(Scalar(g.ell[j] + abs_k(ks[kk])));
            res = res.with_order(lower);
            ++rep.checked;
            if (!res.is_zero()) {
                rep.ok = false;
                rep.failures.push_back(k.vars.name(idx) + " " +
                                       first_difference(res, SeriesMatrix(k.vars, lower, k.rank, k.rank)));
            }
        }
    return rep;
}

P1AModel make_p1_a_model(const TruncOrder &o, int lambda_cap)
{
    QHP1 qh;
    ScalarMatrix M = qh.mul_matrix({qh.lambda, Scalar(1)}); // (s + l) *
    ParamSpec spec = p1_spec();

    VarList v1({"tau1"});
    TStruct small{spec, v1, 2, {divisor_series(M, v1, o, "tau1")}, o};
    VarList v2({"tau1", "tau2"});
    TStruct big{spec, v2, 2, {divisor_series(M, v2, o, "tau1"), series_identity(v2, o, 2)}, o};

    P1AModel m;
    m.small = assemble_equivariant(graded_lift(small, p1_grading(1), lambda_cap), small, lambda_cap);
    m.big = assemble_equivariant(graded_lift(big, p1_grading(2), lambda_cap), big, lambda_cap);
    return m;
}

BrieskornP1::Class BrieskornP1::reduce(int m) const
{
    if (m > window || m < -window)
        throw Error(ErrorKind::ReductionWindowExceeded,
                    "z^" + std::to_string(m) + " is outside the window [" + std::to_string(-window) + ", " +
                        std::to_string(window) + "]");
    if (table_.empty()) {
        SeriesScalar zero(vars, order), one = SeriesScalar::constant(vars, order, Scalar(1));
        table_[0] = {one, zero};
        table_[1] = {zero, one};
    }
    if (auto it = table_.find(m); it != table_.end()) return it->second;
    auto factor = [&](int j) { // lambda - u j
        return SeriesScalar::constant(vars, order, lambda) - series_u_power(vars, order, 1).scaled(Scalar(j));
    };
    Class r;
    if (m >= 2) {
        Class a = reduce(m - 1), b = reduce(m - 2);
        SeriesScalar f = factor(m - 1);
        for (int i = 0; i < 2; ++i) r[i] = f * a[i] + qe * b[i];
    } else {
        Class a = reduce(m + 2), b = reduce(m + 1);
        SeriesScalar f = factor(m + 1), qi = series_inverse(qe);
        for (int i = 0; i < 2; ++i) r[i] = qi * (a[i] - f * b[i]);
    }
    table_[m] = r;
    return r;
}

bool BrieskornP1::confluent() const
{
    // Run the rule forward from the pair (z^-1, z^0) and backward from
    // (z^1, z^2); both must reproduce the normal forms across the window.
    auto factor = [&](int j) {
        return SeriesScalar::constant(vars, order, lambda) - series_u_power(vars, order, 1).scaled(Scalar(j));
    };
    SeriesScalar qi = series_inverse(qe);
    Class prev = reduce(-1), cur = reduce(0);
    for (int m = 0; m + 1 <= window; ++m) {
        Class next;
        for (int i = 0; i < 2; ++i) next[i] = factor(m) * cur[i] + qe * prev[i];
        if (next != reduce(m + 1)) return false;
        prev = cur;
        cur = next;
    }
    Class hi = reduce(2), lo = reduce(1);
    for (int m = 0; m - 1 >= -window; --m) {
        Class below;
        for (int i = 0; i < 2; ++i) below[i] = qi * (hi[i] - factor(m + 1) * lo[i]);
        if (below != reduce(m)) return false;
        hi = lo;
        lo = below;
    }
    return true;
}

TStruct BrieskornP1::r_tstruct(const ParamSpec &spec) const
{
    // nabla_y [z^m Omega] = u^-1 [(dW/dy - kappa lambda) z^m Omega] with
    // dW/dy = q e^y / z; along y2 the derivative of W is 1.
    TStruct t{spec, vars, 2, {}, order};
    std::vector<std::vector<SeriesScalar>> grid(2, std::vector<SeriesScalar>(2, SeriesScalar(vars, order)));
    for (int m = 0; m < 2; ++m) {
        Class c = reduce(m - 1);
        for (int i = 0; i < 2; ++i) grid[i][m] = qe * c[i];
        grid[m][m] -= SeriesScalar::constant(vars, order, lambda * Scalar(kappa));
    }
    t.A.push_back(from_entries(grid));
    if (vars.size() > 1) t.A.push_back(series_identity(vars, order, 2));
    if (!is_framed(t)) throw Error(ErrorKind::Invalid, "internal: Brieskorn connection depends on u");
    return t;
}

BrieskornP1 make_brieskorn_p1(const TruncOrder &o, bool unfolded, int kappa, int sign)
{
    if (sign != 1 && sign != -1) throw Error(ErrorKind::Invalid, "sign must be +1 or -1");
    BrieskornP1 b;
    b.vars = unfolded ? VarList({"y", "y2"}) : VarList({"y"});
    b.order = o;
    b.lambda = sym("l") * Scalar(sign);
    b.kappa = kappa;
    b.window = o.t_degree_cap + 2;
    b.qe = series_exp(series_var(b.vars, o, "y")).scaled(sym("q"));
    return b;
}

EquivFBund make_p1_b_model(const TruncOrder &o, int lambda_cap, int kappa, int sign)
{
    TStruct r = make_brieskorn_p1(o, false, kappa, sign).r_tstruct(p1_spec());
    return assemble_equivariant(graded_lift(r, p1_grading(1), lambda_cap), r, lambda_cap);
}

EquivFBund unfold_p1_b_model(const TruncOrder &o, int lambda_cap, int kappa, int sign)
{
    TStruct r = make_brieskorn_p1(o, true, kappa, sign).r_tstruct(p1_spec());
    EquivFBund e = assemble_equivariant(graded_lift(r, p1_grading(2), lambda_cap), r, lambda_cap);
    MaximalCertificate c = check_maximal(r, unit_vector(2, 0));
    if (!c.maximal) throw Error(ErrorKind::Invalid, "internal: unfolded B-model is not maximal: " + c.reason);
    return e;
}

FBund at_lambda_zero(const FBund &b)
{
    std::vector<int> ids;
    for (auto &s : b.t.spec.equiv_params) ids.push_back(intern_symbol(s));
    auto zero = [&](const ScalarMatrix &m) {
        return m.map([&](const Scalar &c) {
            return c.substitute([&](int s) -> std::optional<Scalar> {
                for (int id : ids)
                    if (id == s) return Scalar(0);
                return std::nullopt;
            });
        });
    };
    FBund r = b;
    for (auto &a : r.t.A) a = a.map_coeffs(zero);
    r.U = r.U.map_coeffs(zero);
    return r;
}

SeriesMatrix p1_w_action_nonequivariant(const TruncOrder &o)
{
    BrieskornP1 b = make_brieskorn_p1(o, true);
    b.lambda = Scalar(0);
    SeriesScalar y2 = series_var(b.vars, o, "y2");
    std::vector<std::vector<SeriesScalar>> grid(2, std::vector<SeriesScalar>(2, SeriesScalar(b.vars, o)));
    for (int m = 0; m < 2; ++m) {
        BrieskornP1::Class up = b.reduce(m + 1), down = b.reduce(m - 1);
        for (int i = 0; i < 2; ++i) grid[i][m] = up[i] + b.qe * down[i];
        grid[m][m] += y2;
    }
    return from_entries(grid);
}

namespace {

// Attempts one convention: solves the order-zero intertwining equations for
// the free column of g, then verifies the full gauge.
bool try_mirror(const FBund &A, const FBund &B, const Vec &g_omega, ScalarMatrix &g, std::string &why)
{
    const int n = 2;
    auto eval = [&](const Scalar &x, const Scalar &y) {
        ScalarMatrix G(n, n);
        G(0, 0) = g_omega[0];
        G(1, 0) = g_omega[1];
        G(0, 1) = x;
        G(1, 1) = y;
        std::vector<ScalarMatrix> eqs;
        for (size_t i = 0; i < A.t.A.size(); ++i) {
            ScalarMatrix a = constant_term(A.t.A[i]), b = constant_term(B.t.A[i]);
            eqs.push_back(a * G - G * b);
        }
        ScalarMatrix ua = constant_term(A.U), ub = constant_term(B.U);
        eqs.push_back(ua * G - G * ub);
        Vec out;
        for (auto &e : eqs)
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) out.push_back(e(r, c));
        return out;
    };
    Vec c0 = eval(Scalar(0), Scalar(0)), cx = eval(Scalar(1), Scalar(0)), cy = eval(Scalar(0), Scalar(1));
    ScalarMatrix L((int)c0.size(), 2), rhs((int)c0.size(), 1);
    for (size_t r = 0; r < c0.size(); ++r) {
        L((int)r, 0) = cx[r] - c0[r];
        L((int)r, 1) = cy[r] - c0[r];
        rhs((int)r, 0) = -c0[r];
    }
    SolveResult s = mat_solve_full(L, rhs);
    if (!s.solvable) {
        why = "no constant g at order zero";
        return false;
    }
    g = ScalarMatrix(n, n);
    g(0, 0) = g_omega[0];
    g(1, 0) = g_omega[1];
    g(0, 1) = s.solution(0, 0);
    g(1, 1) = s.solution(1, 0);
    Scalar det = mat_det(g);
    if (det.is_zero() || !safe_is_unit(det, A.t.spec)) {
        why = "g has determinant " + det.to_string() + ", not a unit";
        return false;
    }
    TruncOrder o1 = A.t.order;
    o1.t_degree_cap += 1;
    FBund moved = apply_gauge(A, Gauge::of(series_constant(A.t.vars, o1, g)));
    for (size_t i = 0; i < moved.t.A.size(); ++i)
        if (moved.t.A[i] != B.t.A[i]) {
            why = "direction " + A.t.vars.name((int)i) + " " + first_difference(moved.t.A[i], B.t.A[i]);
            return false;
        }
    if (moved.U != B.U) {
        why = "u-direction " + first_difference(moved.U, B.U);
        return false;
    }
    return true;
}

} // namespace

MirrorReport verify_small_mirror_p1(const TruncOrder &o, int lambda_cap, const Vec &g_omega, bool lambda_zero)
{
    MirrorReport rep;
    FBund A = make_p1_a_model(o, lambda_cap).small.k_bundle;
    if (lambda_zero) A = at_lambda_zero(A);
    for (int kappa : {0, 1, -1, 2, -2})
        for (int sign : {1, -1}) {
            FBund B = make_p1_b_model(o, lambda_cap, kappa, sign).k_bundle;
            if (lambda_zero) B = at_lambda_zero(B);
            // Identify y_k with tau1_k.
            for (auto &a : B.t.A) a = a.rename(A.t.vars);
            B.U = B.U.rename(A.t.vars);
            B.t.vars = A.t.vars;
            ScalarMatrix g;
            std::string why;
            std::string tag = "kappa=" + std::to_string(kappa) + " sign=" + (sign > 0 ? "+" : "-");
            if (try_mirror(A, B, g_omega, g, why)) {
                rep.found = true;
                rep.kappa = kappa;
                rep.sign = sign;
                rep.g = g;
                rep.attempts.push_back(tag + ": intertwiner found");
                return rep;
            }
            rep.attempts.push_back(tag + ": " + why);
        }
    rep.obstruction = "no convention admits a constant intertwiner with g[Omega] = (" + g_omega[0].to_string() +
                      ", " + g_omega[1].to_string() + ")";
    return rep;
}

} // namespace fb
