#include "fb/connection.hpp"

#include "fb/errors.hpp"

#include <regex>
#include <sstream>

namespace fb {

namespace {

void check_matrix(const SeriesMatrix &m, const TStruct &t, const std::string &what)
{
    if (m.rows() != t.rank || m.cols() != t.rank)
        throw Error(ErrorKind::DimensionMismatch, what + " is not " + std::to_string(t.rank) + "x" +
                                                      std::to_string(t.rank));
    if (m.vars() != t.vars) throw Error(ErrorKind::DimensionMismatch, what + " has a different variable list");
    if (!m.is_zero() && m.min_u() < 0) throw Error(ErrorKind::Invalid, what + " has negative u-powers");
}

void record(FlatnessReport &rep, const std::string &dirs, const SeriesMatrix &r)
{
    ++rep.checked;
    if (r.is_zero()) return;
    rep.flat = false;
    auto &[k, c] = *r.terms().begin();
    std::string mono = monomial_string(k, r.vars());
    rep.residuals.push_back({dirs, mono.empty() ? "1" : mono, c});
}

TruncOrder lowered(const TruncOrder &o) { return {std::max(o.t_degree_cap - 1, 0), o.u_min, o.u_max}; }

} // namespace

void TStruct::validate() const
{
    spec.validate();
    order.validate();
    if (rank <= 0) throw Error(ErrorKind::Invalid, "rank must be positive");
    if ((int)A.size() != vars.size())
        throw Error(ErrorKind::DimensionMismatch, "one connection matrix per variable is required");
    for (int i = 0; i < vars.size(); ++i) check_matrix(A[i], *this, "connection matrix for " + vars.name(i));
}

void FBund::validate() const
{
    t.validate();
    check_matrix(U, t, "u-direction matrix");
}

FlatnessReport check_flatness(const TStruct &t)
{
    FlatnessReport rep;
    for (int i = 0; i < t.vars.size(); ++i)
        for (int j = i + 1; j < t.vars.size(); ++j) {
            SeriesMatrix r = (t.A[j].diff(i) - t.A[i].diff(j)).times_u(1) + commutator(t.A[i], t.A[j]);
            record(rep, t.vars.name(i) + "," + t.vars.name(j), r.with_order(lowered(t.order)));
        }
    return rep;
}

FlatnessReport check_flatness(const FBund &b)
{
    FlatnessReport rep = check_flatness(b.t);
    uint32_t mask = b.t.spec.equiv_mask();
    for (int i = 0; i < b.t.vars.size(); ++i) {
        const SeriesMatrix &A = b.t.A[i];
        SeriesMatrix r = b.U.diff(i).times_u(1) + A.times_u(1) - A.diff_u().times_u(2) + commutator(A, b.U);
        if (b.lambda_weight) r -= A.euler_params(mask).times_u(1).scaled(Scalar(b.lambda_weight));
        record(rep, "u," + b.t.vars.name(i), r.with_order(lowered(b.t.order)));
    }
    return rep;
}

Residues residues(const TStruct &t)
{
    Residues r;
    for (auto &a : t.A) r.mu.push_back(a.coeff(SKey{}));
    r.K = ScalarMatrix(t.rank, t.rank);
    return r;
}

Residues residues(const FBund &b)
{
    Residues r = residues(b.t);
    r.K = b.U.coeff(SKey{});
    return r;
}

ScalarMatrix mu_v_matrix(const TStruct &t, const Vec &v)
{
    if ((int)v.size() != t.rank) throw Error(ErrorKind::DimensionMismatch, "fiber vector has the wrong length");
    Residues r = residues(t);
    std::vector<Vec> cols;
    for (auto &m : r.mu) cols.push_back(m.apply(v));
    if (cols.empty()) return ScalarMatrix(t.rank, 0);
    return ScalarMatrix::from_columns(cols);
}

const char *tri_name(Tri t)
{
    switch (t) {
    case Tri::False: return "false";
    case Tri::True: return "true";
    default: return "unknown";
    }
}

bool safe_is_unit(const Scalar &s, const ParamSpec &spec)
{
    try {
        return is_unit(s, spec);
    } catch (const Error &) {
        return false;
    }
}

Scalar non_unit_factor(const Scalar &s, const ParamSpec &spec)
{
    if (s.is_zero()) return Scalar();
    try {
        return Scalar(non_unit_part(s.num(), spec));
    } catch (const Error &) {
        return Scalar(s.num().monic());
    }
}

namespace {

bool is_zero_vec(const Vec &v)
{
    for (auto &x : v)
        if (!x.is_zero()) return false;
    return true;
}

constexpr size_t kOrbitCap = 64;
constexpr long kSubsetCap = 5000;

long binomial(long m, long k)
{
    long r = 1;
    for (long i = 1; i <= k; ++i) {
        r = r * (m - k + i) / i;
        if (r > kSubsetCap) return kSubsetCap + 1;
    }
    return r;
}

bool next_combination(std::vector<int> &c, int m)
{
    int k = (int)c.size();
    for (int i = k - 1; i >= 0; --i)
        if (c[i] < m - k + i) {
            ++c[i];
            for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    return false;
}

} // namespace

MinorSearch search_minor(const std::vector<Vec> &cands, int fixed, int n, const ParamSpec &spec)
{
    MinorSearch best;
    int best_score = -1;
    int m = (int)cands.size();
    int k = n - fixed;
    if (k < 0 || m - fixed < k) return best;
    auto evaluate = [&](const std::vector<int> &pick) {
        std::vector<Vec> cols;
        for (int i = 0; i < fixed; ++i) cols.push_back(cands[i]);
        for (int i : pick) cols.push_back(cands[i]);
        Scalar d = n ? mat_det(ScalarMatrix::from_columns(cols)) : Scalar(1);
        if (d.is_zero()) return false;
        std::vector<int> full;
        for (int i = 0; i < fixed; ++i) full.push_back(i);
        full.insert(full.end(), pick.begin(), pick.end());
        if (safe_is_unit(d, spec)) {
            best = {true, full, d};
            return true;
        }
        int score = non_unit_factor(d, spec).num().total_degree();
        if (best_score < 0 || score < best_score) {
            best_score = score;
            best = {false, full, d};
        }
        return false;
    };
    if (binomial(m - fixed, k) <= kSubsetCap) {
        std::vector<int> rel(k), pick(k);
        for (int i = 0; i < k; ++i) rel[i] = i;
        do {
            for (int i = 0; i < k; ++i) pick[i] = rel[i] + fixed;
            if (evaluate(pick)) return best;
        } while (next_combination(rel, m - fixed));
        return best;
    }
    // Too many subsets: greedy rank-increasing augmentation in order.
    std::vector<Vec> cols;
    for (int i = 0; i < fixed; ++i) cols.push_back(cands[i]);
    std::vector<int> chosen;
    for (int i = fixed; i < m && (int)chosen.size() < k; ++i) {
        cols.push_back(cands[i]);
        if (mat_rank(ScalarMatrix::from_columns(cols)) == (int)cols.size())
            chosen.push_back(i);
        else
            cols.pop_back();
    }
    if ((int)chosen.size() == k) evaluate(chosen);
    return best;
}

namespace {

ConditionReport conditions(const ParamSpec &spec, int n, const std::vector<ScalarMatrix> &mu,
                           const ScalarMatrix *K, const Vec &v)
{
    if ((int)v.size() != n) throw Error(ErrorKind::DimensionMismatch, "fiber vector has the wrong length");
    ConditionReport rep;
    std::vector<Vec> cols;
    for (auto &m : mu) cols.push_back(m.apply(v));
    rep.mu_matrix = cols.empty() ? ScalarMatrix(n, 0) : ScalarMatrix::from_columns(cols);
    rep.ic = cols.empty() || mat_rank(rep.mu_matrix) == (int)cols.size();

    std::vector<ScalarMatrix> gens;
    auto add_gen = [&](const ScalarMatrix &g) {
        if (g.is_zero() || g == ScalarMatrix::identity(n)) return;
        for (auto &h : gens)
            if (h == g) return;
        gens.push_back(g);
    };
    for (auto &m : mu) add_gen(m);
    if (K) add_gen(*K);

    if (!is_zero_vec(v)) {
        rep.orbit.push_back(v);
        std::vector<Vec> frontier{v};
        for (int depth = 1; depth <= n && !frontier.empty(); ++depth) {
            std::vector<Vec> next;
            for (auto &w : frontier)
                for (auto &g : gens) {
                    Vec x = g.apply(w);
                    if (is_zero_vec(x)) continue;
                    bool seen = false;
                    for (auto &o : rep.orbit)
                        if (o == x) seen = true;
                    if (seen) continue;
                    if (rep.orbit.size() >= kOrbitCap) {
                        rep.orbit_truncated = true;
                        continue;
                    }
                    rep.orbit.push_back(x);
                    next.push_back(x);
                }
            frontier = std::move(next);
        }
    }
    std::vector<Vec> basis;
    for (auto &x : rep.orbit) {
        basis.push_back(x);
        if (mat_rank(ScalarMatrix::from_columns(basis)) < (int)basis.size()) basis.pop_back();
        if ((int)basis.size() == n) break;
    }
    rep.orbit_basis = basis;
    rep.gc_prime = (int)basis.size() == n;

    if (rep.gc_prime) {
        MinorSearch ms = search_minor(rep.orbit, 0, n, spec);
        rep.gc = ms.found_unit;
        rep.best_subset = ms.subset;
        rep.best_det = ms.det;
        if (!rep.gc && !ms.det.is_zero()) rep.needed_localizations.push_back(non_unit_factor(ms.det, spec));
    }

    if (rep.ic && !cols.empty()) {
        std::vector<Vec> cands = cols;
        cands.insert(cands.end(), rep.orbit.begin(), rep.orbit.end());
        MinorSearch ms = search_minor(cands, (int)cols.size(), n, spec);
        rep.coker_free = ms.found_unit ? Tri::True : Tri::Unknown;
    } else if (rep.ic) {
        rep.coker_free = Tri::True;
    }
    return rep;
}

} // namespace

ConditionReport check_conditions(const TStruct &t, const Vec &v)
{
    return conditions(t.spec, t.rank, residues(t).mu, nullptr, v);
}

ConditionReport check_conditions(const FBund &b, const Vec &v, Mode mode)
{
    Residues r = residues(b);
    return conditions(b.t.spec, b.t.rank, r.mu, mode == Mode::FBundle ? &r.K : nullptr, v);
}

MaximalCertificate check_maximal(const TStruct &t, const Vec &v)
{
    MaximalCertificate c;
    if (t.vars.size() != t.rank) {
        c.reason = std::to_string(t.vars.size()) + " variables for rank " + std::to_string(t.rank);
        return c;
    }
    c.det = mat_det(mu_v_matrix(t, v));
    c.maximal = safe_is_unit(c.det, t.spec);
    if (!c.maximal) c.reason = "determinant " + c.det.to_string() + " is not a unit";
    return c;
}

TStruct restrict_to(const TStruct &t, const VarList &sub)
{
    TStruct r{t.spec, sub, t.rank, {}, t.order};
    for (int i = 0; i < sub.size(); ++i) r.A.push_back(t.A[t.vars.require(sub.name(i))].restrict_to(sub));
    return r;
}

FBund restrict_to(const FBund &b, const VarList &sub)
{
    return {restrict_to(b.t, sub), b.U.restrict_to(sub), b.lambda_weight};
}

Vec unit_vector(int n, int i)
{
    Vec v(n);
    v.at(i) = Scalar(1);
    return v;
}

Vec parse_vector(const std::string &text, int n)
{
    static const std::regex unit_re(R"(\s*e([0-9]+)\s*)");
    std::smatch m;
    if (std::regex_match(text, m, unit_re)) {
        int i = std::stoi(m[1]);
        if (i < 1 || i > n) throw Error(ErrorKind::DimensionMismatch, "basis vector " + text + " out of range");
        return unit_vector(n, i - 1);
    }
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.size() == 1 && n > 1) {
        Scalar s = parse_scalar(parts[0]);
        if (s.is_one()) return unit_vector(n, 0);
    }
    if ((int)parts.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "vector '" + text + "' needs " + std::to_string(n) + " entries");
    Vec v;
    for (auto &p : parts) v.push_back(parse_scalar(p));
    return v;
}

std::string vec_string(const Vec &v)
{
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].to_string();
    return s + ")";
}

} // namespace fb
