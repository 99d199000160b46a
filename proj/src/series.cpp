#include "fb/series.hpp"

#include "fb/errors.hpp"
#include "fb/expr.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>
#include <thread>

namespace fb {

void TruncOrder::validate() const
{
    if (t_degree_cap < 0 || t_degree_cap > 200) throw Error(ErrorKind::Invalid, "t_degree_cap must lie in [0, 200]");
    if (u_min < -2) throw Error(ErrorKind::Invalid, "u_min below -2");
    if (u_max < u_min || u_max > 100) throw Error(ErrorKind::Invalid, "u_max must lie in [u_min, 100]");
}

TruncOrder meet(const TruncOrder &a, const TruncOrder &b)
{
    return {std::min(a.t_degree_cap, b.t_degree_cap), std::min(a.u_min, b.u_min), std::min(a.u_max, b.u_max)};
}

VarList::VarList() : names_(std::make_shared<const std::vector<std::string>>()) {}

VarList::VarList(std::vector<std::string> names)
{
    if ((int)names.size() > kMaxSeriesVars)
        throw Error(ErrorKind::Capacity, "at most " + std::to_string(kMaxSeriesVars) + " series variables");
    std::set<std::string> seen;
    for (auto &n : names) {
        if (n.empty() || !std::isalpha((unsigned char)n[0]))
            throw Error(ErrorKind::Invalid, "bad variable name '" + n + "'");
        if (n == "u") throw Error(ErrorKind::Invalid, "'u' is reserved for the loop parameter");
        if (!seen.insert(n).second) throw Error(ErrorKind::Invalid, "duplicate variable '" + n + "'");
    }
    names_ = std::make_shared<const std::vector<std::string>>(std::move(names));
}

std::optional<int> VarList::index_of(const std::string &name) const
{
    for (int i = 0; i < size(); ++i)
        if ((*names_)[i] == name) return i;
    return std::nullopt;
}

int VarList::require(const std::string &name) const
{
    if (auto i = index_of(name)) return *i;
    throw Error(ErrorKind::UnknownVariable, "unknown variable '" + name + "'");
}

VarList concat(const VarList &a, const std::vector<std::string> &extra)
{
    std::vector<std::string> v = a.names();
    v.insert(v.end(), extra.begin(), extra.end());
    return VarList(std::move(v));
}

SKey SKey::of_var(int var, int exp, int u)
{
    SKey k;
    k.e[var] = (uint8_t)exp;
    k.deg = exp;
    k.u = u;
    return k;
}

SKey SKey::operator*(const SKey &o) const
{
    SKey r;
    for (int i = 0; i < kMaxSeriesVars; ++i) {
        int s = e[i] + o.e[i];
        if (s > 255) throw Error(ErrorKind::Capacity, "series exponent exceeds 255");
        r.e[i] = (uint8_t)s;
    }
    r.deg = deg + o.deg;
    r.u = u + o.u;
    return r;
}

namespace {

bool coeff_zero(const Scalar &c) { return c.is_zero(); }
bool coeff_zero(const ScalarMatrix &c) { return c.is_zero(); }

void accumulate(Scalar &acc, const Scalar &x) { acc += x; }
void accumulate(ScalarMatrix &acc, const ScalarMatrix &x) { acc = acc + x; }

Scalar scale(const Scalar &c, const Scalar &x) { return c * x; }
ScalarMatrix scale(const Scalar &c, const ScalarMatrix &x) { return c * x; }

Scalar coeff_euler(const Scalar &c, uint32_t mask) { return c.euler(mask); }
ScalarMatrix coeff_euler(const ScalarMatrix &c, uint32_t mask)
{
    return c.map([mask](const Scalar &x) { return x.euler(mask); });
}

[[noreturn]] void underflow(int u, int u_min)
{
    throw Error(ErrorKind::ULaurentUnderflow,
                "term u^" + std::to_string(u) + " below the window floor u^" + std::to_string(u_min));
}

void require_same_vars(const VarList &a, const VarList &b)
{
    if (a != b) throw Error(ErrorKind::DimensionMismatch, "series over different variable lists");
}

} // namespace

template <class C>
Series<C>::Series(VarList vars, TruncOrder ord, int rows, int cols)
    : vars_(std::move(vars)), ord_(ord), rows_(rows), cols_(cols)
{
}

template <class C>
Series<C> Series<C>::constant(VarList vars, TruncOrder ord, const C &c)
{
    Series s(std::move(vars), ord);
    if constexpr (std::is_same_v<C, ScalarMatrix>) s.rows_ = c.rows(), s.cols_ = c.cols();
    s.add_term(SKey{}, c);
    return s;
}

template <class C>
C Series<C>::zero_coeff() const
{
    if constexpr (std::is_same_v<C, ScalarMatrix>)
        return ScalarMatrix(rows_, cols_);
    else
        return Scalar();
}

template <class C>
C Series<C>::coeff(const SKey &k) const
{
    auto it = terms_.find(k);
    return it == terms_.end() ? zero_coeff() : it->second;
}

template <class C>
void Series<C>::add_term(const SKey &k, const C &c)
{
    if (coeff_zero(c)) return;
    if (k.deg > ord_.t_degree_cap || k.u > ord_.u_max) return;
    if (k.u < ord_.u_min) underflow(k.u, ord_.u_min);
    auto [it, fresh] = terms_.try_emplace(k, c);
    if (!fresh) {
        accumulate(it->second, c);
        if (coeff_zero(it->second)) terms_.erase(it);
    }
}

template <class C>
Series<C> Series<C>::operator-() const
{
    Series r = *this;
    for (auto &[k, c] : r.terms_) c = -c;
    return r;
}

template <class C>
Series<C> &Series<C>::operator+=(const Series &o)
{
    require_same_vars(vars_, o.vars_);
    ord_ = meet(ord_, o.ord_);
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->first.deg > ord_.t_degree_cap || it->first.u > ord_.u_max)
            it = terms_.erase(it);
        else
            ++it;
    }
    for (auto &[k, c] : o.terms_) add_term(k, c);
    return *this;
}

template <class C>
Series<C> &Series<C>::operator-=(const Series &o)
{
    return *this += -o;
}

template <class C>
Series<C> Series<C>::scaled(const Scalar &c) const
{
    Series r(vars_, ord_, rows_, cols_);
    if (c.is_zero()) return r;
    for (auto &[k, x] : terms_) r.terms_.emplace(k, scale(c, x));
    return r;
}

template <class C>
Series<C> Series<C>::times_u(int k) const
{
    Series r(vars_, ord_, rows_, cols_);
    for (auto &[key, c] : terms_) {
        SKey n = key;
        n.u += k;
        r.add_term(n, c);
    }
    return r;
}

template <class C>
Series<C> Series<C>::map_coeffs(const std::function<C(const C &)> &f) const
{
    Series r(vars_, ord_, rows_, cols_);
    for (auto &[k, c] : terms_) r.add_term(k, f(c));
    return r;
}

template <class C>
Series<C> Series<C>::diff(int var) const
{
    if (var < 0 || var >= vars_.size()) throw Error(ErrorKind::UnknownVariable, "variable index out of range");
    TruncOrder o = ord_;
    o.t_degree_cap = std::max(0, o.t_degree_cap - 1);
    Series r(vars_, o, rows_, cols_);
    if (ord_.t_degree_cap == 0) return r;
    for (auto &[k, c] : terms_) {
        int e = k.e[var];
        if (!e) continue;
        SKey n = k;
        n.e[var] = (uint8_t)(e - 1);
        n.deg -= 1;
        r.add_term(n, scale(Scalar(e), c));
    }
    return r;
}

template <class C>
Series<C> Series<C>::diff(const std::string &name) const
{
    if (name == "u") return diff_u();
    return diff(vars_.require(name));
}

template <class C>
Series<C> Series<C>::diff_u() const
{
    Series r(vars_, ord_, rows_, cols_);
    for (auto &[k, c] : terms_) {
        if (!k.u) continue;
        SKey n = k;
        n.u -= 1;
        r.add_term(n, scale(Scalar(k.u), c));
    }
    return r;
}

template <class C>
Series<C> Series<C>::euler_params(uint32_t mask) const
{
    Series r(vars_, ord_, rows_, cols_);
    for (auto &[k, c] : terms_) r.add_term(k, coeff_euler(c, mask));
    return r;
}

template <class C>
Series<C> Series<C>::part_t_degree(int d) const
{
    Series r(vars_, ord_, rows_, cols_);
    for (auto &[k, c] : terms_)
        if (k.deg == d) r.terms_.emplace(k, c);
    return r;
}

template <class C>
Series<C> Series<C>::truncated_t(int cap) const
{
    TruncOrder o = ord_;
    o.t_degree_cap = std::min(cap, ord_.t_degree_cap);
    return with_order(o);
}

template <class C>
Series<C> Series<C>::with_order(const TruncOrder &ord) const
{
    Series r(vars_, ord, rows_, cols_);
    for (auto &[k, c] : terms_) r.add_term(k, c);
    return r;
}

template <class C>
Series<C> Series<C>::u_coeff(int u) const
{
    Series r(vars_, ord_, rows_, cols_);
    for (auto &[k, c] : terms_)
        if (k.u == u) {
            SKey n = k;
            n.u = 0;
            r.terms_.emplace(n, c);
        }
    return r;
}

template <class C>
int Series<C>::min_u() const
{
    int m = 0;
    bool first = true;
    for (auto &[k, c] : terms_) m = first ? k.u : std::min(m, k.u), first = false;
    return m;
}

template <class C>
int Series<C>::max_u() const
{
    int m = 0;
    bool first = true;
    for (auto &[k, c] : terms_) m = first ? k.u : std::max(m, k.u), first = false;
    return m;
}

template <class C>
Series<C> Series<C>::restrict_to(const VarList &sub) const
{
    std::vector<int> pos(vars_.size(), -1);
    for (int i = 0; i < vars_.size(); ++i)
        if (auto j = sub.index_of(vars_.name(i))) pos[i] = *j;
    Series r(sub, ord_, rows_, cols_);
    for (auto &[k, c] : terms_) {
        SKey n;
        n.u = k.u;
        n.deg = k.deg;
        bool keep = true;
        for (int i = 0; i < vars_.size() && keep; ++i) {
            if (!k.e[i]) continue;
            if (pos[i] < 0)
                keep = false;
            else
                n.e[pos[i]] = k.e[i];
        }
        if (keep) r.terms_.emplace(n, c);
    }
    return r;
}

template <class C>
Series<C> Series<C>::embed(const VarList &super) const
{
    std::vector<int> pos(vars_.size());
    for (int i = 0; i < vars_.size(); ++i) {
        auto j = super.index_of(vars_.name(i));
        if (!j) throw Error(ErrorKind::UnknownVariable, "embedding loses variable '" + vars_.name(i) + "'");
        pos[i] = *j;
    }
    Series r(super, ord_, rows_, cols_);
    for (auto &[k, c] : terms_) {
        SKey n;
        n.u = k.u;
        n.deg = k.deg;
        for (int i = 0; i < vars_.size(); ++i) n.e[pos[i]] = k.e[i];
        r.terms_.emplace(n, c);
    }
    return r;
}

template <class C>
Series<C> Series<C>::rename(const VarList &same_size) const
{
    if (same_size.size() != vars_.size()) throw Error(ErrorKind::DimensionMismatch, "rename needs equal sizes");
    Series r = *this;
    r.vars_ = same_size;
    return r;
}

template <class C>
Series<C> Series<C>::substitute(const std::vector<SeriesScalar> &images, const VarList &target) const
{
    if ((int)images.size() != vars_.size()) throw Error(ErrorKind::DimensionMismatch, "one image per variable");
    for (auto &im : images) {
        require_same_vars(im.vars(), target);
        for (auto &[k, c] : im.terms())
            if (k.deg == 0 || k.u != 0)
                throw Error(ErrorKind::Invalid, "substitution images must be u-free without constant term");
    }
    TruncOrder o = ord_;
    TruncOrder uo{ord_.t_degree_cap, 0, 0};
    // Powers of images, filled on demand.
    std::vector<std::vector<SeriesScalar>> pw(images.size());
    auto power = [&](int i, int e) -> const SeriesScalar & {
        auto &v = pw[i];
        if (v.empty()) v.push_back(SeriesScalar::constant(target, uo, Scalar(1)));
        while ((int)v.size() <= e) v.push_back(v.back() * images[i].with_order(uo));
        return v[e];
    };
    Series r(target, o, rows_, cols_);
    // Group terms by t-exponent so each monomial image is built once.
    std::map<SKey, std::vector<std::pair<int, const C *>>> by_mono;
    for (auto &[k, c] : terms_) {
        SKey m = k;
        m.u = 0;
        by_mono[m].push_back({k.u, &c});
    }
    for (auto &[m, list] : by_mono) {
        SeriesScalar img = SeriesScalar::constant(target, uo, Scalar(1));
        for (int i = 0; i < vars_.size(); ++i)
            if (m.e[i]) img = img * power(i, m.e[i]);
        for (auto &[k, c] : img.terms())
            for (auto &[u, coef] : list) {
                SKey n = k;
                n.u = u;
                r.add_term(n, scale(c, *coef));
            }
    }
    return r;
}

template class Series<Scalar>;
template class Series<ScalarMatrix>;

int num_threads()
{
    static const int n = [] {
        int hw = (int)std::max(1u, std::thread::hardware_concurrency());
        if (const char *env = std::getenv("FB_NUM_THREADS")) {
            int k = std::atoi(env);
            if (k >= 1) return std::min(k, 256);
        }
        return hw;
    }();
    return n;
}

namespace {

template <class A, class B, class R>
Series<R> multiply(const Series<A> &a, const Series<B> &b, int rows, int cols)
{
    require_same_vars(a.vars(), b.vars());
    TruncOrder o = meet(a.order(), b.order());
    int cap = o.t_degree_cap;
    using Pair = std::pair<const std::pair<const SKey, A> *, const std::pair<const SKey, B> *>;
    std::vector<Pair> pairs;
    for (auto &x : a.terms()) {
        if (x.first.deg > cap) break;
        for (auto &y : b.terms()) {
            if (x.first.deg + y.first.deg > cap) break;
            int u = x.first.u + y.first.u;
            if (u > o.u_max) continue;
            if (u < o.u_min) underflow(u, o.u_min);
            pairs.push_back({&x, &y});
        }
    }
    auto run = [&](size_t lo, size_t hi) {
        Series<R> part(a.vars(), o, rows, cols);
        for (size_t i = lo; i < hi; ++i) part.add_term(pairs[i].first->first * pairs[i].second->first,
                                                       pairs[i].first->second * pairs[i].second->second);
        return part;
    };
    int nt = num_threads();
    // Threads only pay off for matrix coefficients and many pairs. Exact
    // arithmetic makes the merged result independent of the schedule.
    if (nt <= 1 || rows * cols < 4 || pairs.size() < 64) return run(0, pairs.size());
    nt = std::min<int>(nt, (int)pairs.size() / 16);
    std::vector<Series<R>> parts(nt);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    size_t chunk = (pairs.size() + nt - 1) / nt;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            try {
                parts[t] = run(std::min(pairs.size(), t * chunk), std::min(pairs.size(), (t + 1) * chunk));
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    for (auto &th : pool) th.join();
    for (auto &e : errs)
        if (e) std::rethrow_exception(e);
    Series<R> out = parts[0];
    for (int t = 1; t < nt; ++t) out += parts[t];
    return out;
}

} // namespace

SeriesScalar operator*(const SeriesScalar &a, const SeriesScalar &b)
{
    return multiply<Scalar, Scalar, Scalar>(a, b, 1, 1);
}

SeriesMatrix operator*(const SeriesMatrix &a, const SeriesMatrix &b)
{
    if (a.cols() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "series matrix product shapes");
    return multiply<ScalarMatrix, ScalarMatrix, ScalarMatrix>(a, b, a.rows(), b.cols());
}

SeriesMatrix operator*(const SeriesScalar &a, const SeriesMatrix &b)
{
    return multiply<Scalar, ScalarMatrix, ScalarMatrix>(a, b, b.rows(), b.cols());
}

SeriesMatrix operator*(const ScalarMatrix &a, const SeriesMatrix &b)
{
    SeriesMatrix r(b.vars(), b.order(), a.rows(), b.cols());
    for (auto &[k, c] : b.terms()) r.add_term(k, a * c);
    return r;
}

SeriesMatrix operator*(const SeriesMatrix &a, const ScalarMatrix &b)
{
    SeriesMatrix r(a.vars(), a.order(), a.rows(), b.cols());
    for (auto &[k, c] : a.terms()) r.add_term(k, c * b);
    return r;
}

SeriesMatrix commutator(const SeriesMatrix &a, const SeriesMatrix &b) { return a * b - b * a; }

SeriesScalar series_var(const VarList &vars, const TruncOrder &ord, const std::string &name)
{
    SeriesScalar s(vars, ord);
    s.add_term(SKey::of_var(vars.require(name)), Scalar(1));
    return s;
}

SeriesScalar series_u_power(const VarList &vars, const TruncOrder &ord, int k)
{
    SeriesScalar s(vars, ord);
    s.add_term(SKey::of_u(k), Scalar(1));
    return s;
}

SeriesScalar series_inverse(const SeriesScalar &a)
{
    if (a.min_u() < 0) throw Error(ErrorKind::Invalid, "inverse needs u-exponents >= 0");
    Scalar c0 = a.coeff(SKey{});
    if (c0.is_zero()) throw Error(ErrorKind::DivisionByZero, "series with zero constant term");
    Scalar ci = c0.inverse();
    // a = c0 (1 - r) with r small; 1/a = c0^-1 sum r^j.
    SeriesScalar one = SeriesScalar::constant(a.vars(), a.order(), Scalar(1));
    SeriesScalar r = one - a.scaled(ci);
    SeriesScalar sum = one, p = one;
    while (true) {
        p = p * r;
        if (p.is_zero()) break;
        sum += p;
    }
    return sum.scaled(ci);
}

SeriesScalar series_exp(const SeriesScalar &x)
{
    for (auto &[k, c] : x.terms())
        if (k.deg == 0 || k.u != 0) throw Error(ErrorKind::Invalid, "exp needs a u-free series without constant term");
    SeriesScalar sum = SeriesScalar::constant(x.vars(), x.order(), Scalar(1)), p = sum;
    for (int j = 1;; ++j) {
        p = (p * x).scaled(Scalar(Rational(1, j)));
        if (p.is_zero()) break;
        sum += p;
    }
    return sum;
}

SeriesMatrix series_identity(const VarList &vars, const TruncOrder &ord, int n)
{
    return SeriesMatrix::constant(vars, ord, ScalarMatrix::identity(n));
}

SeriesMatrix series_constant(const VarList &vars, const TruncOrder &ord, const ScalarMatrix &m)
{
    SeriesMatrix s(vars, ord, m.rows(), m.cols());
    s.add_term(SKey{}, m);
    return s;
}

SeriesScalar entry(const SeriesMatrix &m, int i, int j)
{
    SeriesScalar s(m.vars(), m.order());
    for (auto &[k, c] : m.terms()) s.add_term(k, c(i, j));
    return s;
}

SeriesMatrix from_entries(const std::vector<std::vector<SeriesScalar>> &grid)
{
    if (grid.empty() || grid[0].empty()) throw Error(ErrorKind::DimensionMismatch, "empty matrix grid");
    int r = (int)grid.size(), c = (int)grid[0].size();
    const VarList &vars = grid[0][0].vars();
    TruncOrder o = grid[0][0].order();
    for (auto &row : grid) {
        if ((int)row.size() != c) throw Error(ErrorKind::DimensionMismatch, "ragged matrix grid");
        for (auto &s : row) {
            require_same_vars(vars, s.vars());
            o = meet(o, s.order());
        }
    }
    std::map<SKey, ScalarMatrix> acc;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
            for (auto &[k, x] : grid[i][j].terms()) {
                auto [it, fresh] = acc.try_emplace(k, r, c);
                it->second(i, j) = x;
            }
    SeriesMatrix m(vars, o, r, c);
    for (auto &[k, x] : acc) m.add_term(k, x);
    return m;
}

SeriesMatrix transpose(const SeriesMatrix &m)
{
    SeriesMatrix r(m.vars(), m.order(), m.cols(), m.rows());
    for (auto &[k, c] : m.terms()) r.add_term(k, c.transpose());
    return r;
}

SeriesMatrix series_inverse(const SeriesMatrix &m)
{
    if (m.rows() != m.cols()) throw Error(ErrorKind::NonSquare, "inverse of a non-square series matrix");
    if (m.min_u() < 0) throw Error(ErrorKind::Invalid, "inverse needs u-exponents >= 0");
    ScalarMatrix c0i = mat_inverse(constant_term(m));
    SeriesMatrix one = series_identity(m.vars(), m.order(), m.rows());
    SeriesMatrix r = one - c0i * m;
    SeriesMatrix sum = one, p = one;
    while (true) {
        p = p * r;
        if (p.is_zero()) break;
        sum += p;
    }
    return sum * c0i;
}

ScalarMatrix constant_term(const SeriesMatrix &m) { return m.coeff(SKey{}); }

std::vector<SeriesScalar> apply(const SeriesMatrix &m, const std::vector<SeriesScalar> &v)
{
    if ((int)v.size() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "vector length");
    std::vector<SeriesScalar> out;
    for (int i = 0; i < m.rows(); ++i) {
        SeriesScalar s(m.vars(), m.order());
        for (int j = 0; j < m.cols(); ++j) s += entry(m, i, j) * v[j];
        out.push_back(s);
    }
    return out;
}

SeriesMatrix column_matrix(const std::vector<SeriesScalar> &v)
{
    std::vector<std::vector<SeriesScalar>> g;
    for (auto &s : v) g.push_back({s});
    return from_entries(g);
}

std::string monomial_string(const SKey &k, const VarList &vars)
{
    std::string mono;
    for (int i = 0; i < vars.size(); ++i) {
        if (!k.e[i]) continue;
        if (!mono.empty()) mono += "*";
        mono += vars.name(i);
        if (k.e[i] > 1) mono += "^" + std::to_string(k.e[i]);
    }
    if (k.u) {
        if (!mono.empty()) mono += "*";
        mono += "u";
        if (k.u != 1) mono += "^" + std::to_string(k.u);
    }
    return mono;
}

std::string to_string(const SeriesScalar &s)
{
    if (s.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto &[k, c] : s.terms()) {
        std::string mono = monomial_string(k, s.vars());
        bool neg = false;
        std::string body;
        if (c.is_polynomial() && c.num().is_monomial()) {
            const Term &t = c.num().lead();
            Rational mag = t.c;
            neg = mag < 0;
            if (neg) mag = -mag;
            std::string pm = t.m.is_one() ? "" : Poly::monomial(t.m).to_string();
            std::vector<std::string> parts;
            if (mag != 1 || (pm.empty() && mono.empty())) parts.push_back(mag.get_str());
            if (!pm.empty()) parts.push_back(pm);
            if (!mono.empty()) parts.push_back(mono);
            for (size_t i = 0; i < parts.size(); ++i) body += (i ? "*" : "") + parts[i];
        } else {
            body = "(" + c.to_string() + ")";
            if (!mono.empty()) body += "*" + mono;
        }
        if (first)
            os << (neg ? "-" : "") << body;
        else
            os << (neg ? " - " : " + ") << body;
        first = false;
    }
    return os.str();
}

SeriesScalar parse_series(const std::string &text, const VarList &vars, const TruncOrder &ord)
{
    // Parse at a generous window so intermediate products of the literal do
    // not trip the caps; the final value is then checked against ord.
    TruncOrder wide{std::max(ord.t_degree_cap, 64), -100, 100};
    struct Ops {
        const VarList &vars;
        TruncOrder o;
        SeriesScalar constant(const Rational &c) { return SeriesScalar::constant(vars, o, Scalar(c)); }
        SeriesScalar symbol(const std::string &name, int, int)
        {
            if (name == "u") return series_u_power(vars, o, 1);
            if (vars.index_of(name)) return series_var(vars, o, name);
            return SeriesScalar::constant(vars, o, Scalar::symbol(name));
        }
        SeriesScalar add(const SeriesScalar &a, const SeriesScalar &b) { return a + b; }
        SeriesScalar sub(const SeriesScalar &a, const SeriesScalar &b) { return a - b; }
        SeriesScalar mul(const SeriesScalar &a, const SeriesScalar &b) { return a * b; }
        SeriesScalar div(const SeriesScalar &a, const SeriesScalar &b, int line, int col)
        {
            if (b.terms().size() != 1 || !b.terms().begin()->first.is_const())
                throw ParseError("division only by a nonzero t,u-free scalar", line, col);
            return a.scaled(b.terms().begin()->second.inverse());
        }
        SeriesScalar neg(const SeriesScalar &a) { return -a; }
        SeriesScalar pow(const SeriesScalar &a, int k, int line, int col)
        {
            if (k < 0) {
                if (a.terms().size() != 1 || a.terms().begin()->first.deg != 0)
                    throw ParseError("negative powers only of a single u-term", line, col);
                auto [key, c] = *a.terms().begin();
                SeriesScalar r(vars, o);
                r.add_term(SKey::of_u(key.u * k), c.pow(k));
                return r;
            }
            SeriesScalar r = constant(1);
            for (int i = 0; i < k; ++i) r = r * a;
            return r;
        }
    } ops{vars, wide};
    SeriesScalar s = parse_expression<SeriesScalar>(text, ops);
    for (auto &[k, c] : s.terms()) {
        if (k.deg > ord.t_degree_cap)
            throw Error(ErrorKind::Parse, "term of t-degree " + std::to_string(k.deg) + " exceeds the cap");
        if (k.u > ord.u_max || k.u < ord.u_min)
            throw Error(ErrorKind::Parse, "u-exponent " + std::to_string(k.u) + " outside the window");
    }
    return s.with_order(ord);
}

std::vector<std::vector<int>> multi_indices(int n, int cap)
{
    std::vector<std::vector<int>> out;
    for (int total = 0; total <= cap; ++total) {
        // Exponent vectors of the given size, lex descending.
        std::vector<int> k(n, 0);
        std::function<void(int, int)> rec = [&](int pos, int left) {
            if (pos == n - 1 || n == 0) {
                if (n) k[pos] = left;
                if (n || left == 0) out.push_back(k);
                return;
            }
            for (int x = left; x >= 0; --x) {
                k[pos] = x;
                rec(pos + 1, left - x);
            }
        };
        rec(0, total);
        if (n == 0) break;
    }
    return out;
}

std::string lifted_name(const std::string &base, const std::vector<int> &k)
{
    std::string s = base;
    for (int x : k) s += "_" + std::to_string(x);
    if (k.empty()) s += "_0";
    return s;
}

VarList lifted_vars(const VarList &vars, int n, int cap)
{
    std::vector<std::string> names;
    auto ks = multi_indices(n, cap);
    for (auto &v : vars.names())
        for (auto &k : ks) names.push_back(lifted_name(v, k));
    return VarList(names);
}

namespace {

std::vector<SeriesScalar> psi_images(const VarList &vars, const TruncOrder &ord, const ParamSpec &spec, int cap,
                                     VarList &target)
{
    int n = (int)spec.equiv_params.size();
    target = lifted_vars(vars, n, cap);
    auto ks = multi_indices(n, cap);
    TruncOrder uo{ord.t_degree_cap, 0, 0};
    std::vector<SeriesScalar> images;
    for (int i = 0; i < vars.size(); ++i) {
        SeriesScalar img(target, uo);
        for (size_t j = 0; j < ks.size(); ++j) {
            Scalar lam(1);
            for (int a = 0; a < n; ++a) lam *= Scalar::symbol(spec.equiv_params[a]).pow(ks[j][a]);
            img.add_term(SKey::of_var(i * (int)ks.size() + (int)j), lam);
        }
        images.push_back(img);
    }
    return images;
}

} // namespace

SeriesScalar substitute_psi_lambda(const SeriesScalar &a, const ParamSpec &spec, int cap)
{
    if (cap < 0) throw Error(ErrorKind::Invalid, "lambda cap must be >= 0");
    for (auto &[k, c] : a.terms())
        if (!in_ring(c, spec)) throw Error(ErrorKind::ScalarNotInR, c.to_string() + " is not in R");
    VarList target;
    auto images = psi_images(a.vars(), a.order(), spec, cap, target);
    return a.substitute(images, target);
}

SeriesMatrix substitute_psi_lambda(const SeriesMatrix &a, const ParamSpec &spec, int cap)
{
    if (cap < 0) throw Error(ErrorKind::Invalid, "lambda cap must be >= 0");
    for (auto &[k, c] : a.terms())
        for (int i = 0; i < c.rows(); ++i)
            for (int j = 0; j < c.cols(); ++j)
                if (!in_ring(c(i, j), spec)) throw Error(ErrorKind::ScalarNotInR, c(i, j).to_string() + " is not in R");
    VarList target;
    auto images = psi_images(a.vars(), a.order(), spec, cap, target);
    return a.substitute(images, target);
}

} // namespace fb
