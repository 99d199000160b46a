#include "fb/poly.hpp"

#include "fb/errors.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace fb {

namespace {

struct SymbolTable {
    std::mutex mu;
    std::vector<std::string> names;
    std::unordered_map<std::string, int> ids;
    std::array<std::atomic<int>, kMaxParams> rank{};
    std::array<std::atomic<int>, kMaxParams> by_rank{};
    std::atomic<int> count{0};
};

SymbolTable &table()
{
    static SymbolTable t;
    return t;
}

} // namespace

int intern_symbol(const std::string &name)
{
    auto &t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    if (auto it = t.ids.find(name); it != t.ids.end()) return it->second;
    if ((int)t.names.size() >= kMaxParams)
        throw Error(ErrorKind::Capacity, "more than " + std::to_string(kMaxParams) + " parameter symbols");
    int id = (int)t.names.size();
    t.names.push_back(name);
    t.ids[name] = id;
    std::vector<int> order(t.names.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return t.names[a] < t.names[b]; });
    for (size_t r = 0; r < order.size(); ++r) {
        t.rank[order[r]].store((int)r);
        t.by_rank[r].store(order[r]);
    }
    t.count.store(id + 1);
    return id;
}

std::optional<int> find_symbol(const std::string &name)
{
    auto &t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    if (auto it = t.ids.find(name); it != t.ids.end()) return it->second;
    return std::nullopt;
}

std::string symbol_name(int id)
{
    auto &t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    return t.names.at(id);
}

int symbol_count() { return table().count.load(); }

int symbol_rank(int id) { return table().rank[id].load(); }

Mono Mono::var(int id, int exp)
{
    Mono m;
    m.e[id] = (uint16_t)exp;
    return m;
}

Mono operator*(const Mono &a, const Mono &b)
{
    Mono r;
    for (int i = 0; i < kMaxParams; ++i) {
        unsigned s = a.e[i] + b.e[i];
        if (s > 65535) throw Error(ErrorKind::Capacity, "parameter exponent exceeds 65535");
        r.e[i] = (uint16_t)s;
    }
    return r;
}

Mono operator/(const Mono &a, const Mono &b)
{
    Mono r;
    for (int i = 0; i < kMaxParams; ++i) r.e[i] = (uint16_t)(a.e[i] - b.e[i]);
    return r;
}

Mono mono_gcd(const Mono &a, const Mono &b)
{
    Mono r;
    for (int i = 0; i < kMaxParams; ++i) r.e[i] = std::min(a.e[i], b.e[i]);
    return r;
}

int compare_by_name(const Mono &a, const Mono &b)
{
    auto &t = table();
    int n = t.count.load();
    for (int r = 0; r < n; ++r) {
        int id = t.by_rank[r].load();
        if (a.e[id] != b.e[id]) return a.e[id] < b.e[id] ? -1 : 1;
    }
    return 0;
}

Poly::Poly(long c)
{
    if (c != 0) terms_.push_back({Mono{}, Rational(c)});
}

Poly::Poly(const Rational &c)
{
    if (c != 0) terms_.push_back({Mono{}, c});
}

Poly Poly::monomial(const Mono &m, const Rational &c)
{
    Poly p;
    if (c != 0) p.terms_.push_back({m, c});
    return p;
}

Rational Poly::constant_value() const
{
    if (!terms_.empty() && terms_.back().m.is_one()) return terms_.back().c;
    return 0;
}

const Term &Poly::lead_by_name() const
{
    size_t best = 0;
    for (size_t i = 1; i < terms_.size(); ++i)
        if (compare_by_name(terms_[i].m, terms_[best].m) > 0) best = i;
    return terms_[best];
}

int Poly::degree_in(int var) const
{
    int d = -1;
    for (auto &t : terms_) d = std::max(d, (int)t.m.e[var]);
    return d;
}

int Poly::total_degree() const
{
    int d = -1;
    for (auto &t : terms_) d = std::max(d, t.m.total_degree());
    return d;
}

uint32_t Poly::support() const
{
    uint32_t s = 0;
    for (auto &t : terms_)
        for (int i = 0; i < kMaxParams; ++i)
            if (t.m.e[i]) s |= 1u << i;
    return s;
}

Mono Poly::min_exponents() const
{
    if (terms_.empty()) return Mono{};
    Mono m = terms_[0].m;
    for (auto &t : terms_) m = mono_gcd(m, t.m);
    return m;
}

std::vector<Poly> Poly::coeffs_in(int var) const
{
    int d = degree_in(var);
    std::vector<PolyBuilder> b(std::max(d + 1, 0));
    for (auto &t : terms_) {
        Mono m = t.m;
        int k = m.e[var];
        m.e[var] = 0;
        b[k].add(m, t.c);
    }
    std::vector<Poly> out;
    out.reserve(b.size());
    for (auto &x : b) out.push_back(x.build());
    return out;
}

Poly Poly::lead_coeff_in(int var) const
{
    int d = degree_in(var);
    PolyBuilder b;
    for (auto &t : terms_)
        if (t.m.e[var] == d) {
            Mono m = t.m;
            m.e[var] = 0;
            b.add(m, t.c);
        }
    return b.build();
}

Poly Poly::operator-() const
{
    Poly r = *this;
    for (auto &t : r.terms_) t.c = -t.c;
    return r;
}

namespace {

// Merge b*sign into a; both sorted descending.
std::vector<Term> merge(const std::vector<Term> &a, const std::vector<Term> &b, bool negate)
{
    std::vector<Term> out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && b[j].m < a[i].m)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || a[i].m < b[j].m) {
            out.push_back({b[j].m, negate ? Rational(-b[j].c) : b[j].c});
            ++j;
        } else {
            Rational c = negate ? Rational(a[i].c - b[j].c) : Rational(a[i].c + b[j].c);
            if (c != 0) out.push_back({a[i].m, std::move(c)});
            ++i, ++j;
        }
    }
    return out;
}

} // namespace

Poly &Poly::operator+=(const Poly &o)
{
    if (o.terms_.empty()) return *this;
    if (terms_.empty()) return *this = o;
    terms_ = merge(terms_, o.terms_, false);
    return *this;
}

Poly &Poly::operator-=(const Poly &o)
{
    if (o.terms_.empty()) return *this;
    terms_ = merge(terms_, o.terms_, true);
    return *this;
}

Poly operator*(const Poly &a, const Poly &b)
{
    if (a.terms_.empty() || b.terms_.empty()) return Poly();
    if (a.terms_.size() == 1 && a.terms_[0].m.is_one()) return b.scaled(a.terms_[0].c);
    if (b.terms_.size() == 1 && b.terms_[0].m.is_one()) return a.scaled(b.terms_[0].c);
    PolyBuilder pb;
    for (auto &x : a.terms_)
        for (auto &y : b.terms_) pb.add(x.m * y.m, x.c * y.c);
    return pb.build();
}

Poly Poly::scaled(const Rational &c) const
{
    if (c == 0) return Poly();
    Poly r = *this;
    for (auto &t : r.terms_) t.c *= c;
    return r;
}

Poly Poly::times_mono(const Mono &m) const
{
    Poly r = *this;
    for (auto &t : r.terms_) t.m = t.m * m;
    return r;
}

Poly Poly::divided_by_mono(const Mono &m) const
{
    Poly r = *this;
    for (auto &t : r.terms_) t.m = t.m / m;
    return r;
}

bool operator==(const Poly &a, const Poly &b)
{
    if (a.terms_.size() != b.terms_.size()) return false;
    for (size_t i = 0; i < a.terms_.size(); ++i)
        if (a.terms_[i].m != b.terms_[i].m || a.terms_[i].c != b.terms_[i].c) return false;
    return true;
}

std::optional<Poly> divide_exact(const Poly &a, const Poly &b)
{
    if (b.is_zero()) return std::nullopt;
    if (a.is_zero()) return Poly();
    if (b.is_constant()) return a.scaled(1 / b.terms_[0].c);
    if (b.is_monomial()) {
        const Mono &m = b.terms_[0].m;
        for (auto &t : a.terms_)
            if (!m.divides(t.m)) return std::nullopt;
        return a.divided_by_mono(m).scaled(1 / b.terms_[0].c);
    }
    const Term &lb = b.terms_[0];
    PolyBuilder q;
    Poly r = a;
    while (!r.is_zero()) {
        const Term &lr = r.terms_[0];
        if (!lb.m.divides(lr.m)) return std::nullopt;
        Mono m = lr.m / lb.m;
        Rational c = lr.c / lb.c;
        q.add(m, c);
        r -= b.times_mono(m).scaled(c);
    }
    return q.build();
}

Poly Poly::monic() const
{
    if (terms_.empty()) return *this;
    return scaled(1 / terms_[0].c);
}

Poly Poly::monic_by_name() const
{
    if (terms_.empty()) return *this;
    return scaled(1 / lead_by_name().c);
}

Poly Poly::pow(unsigned k) const
{
    Poly r(1), base = *this;
    while (k) {
        if (k & 1) r = r * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return r;
}

Poly Poly::euler(uint32_t mask) const
{
    PolyBuilder b;
    for (auto &t : terms_) {
        int w = 0;
        for (int i = 0; i < kMaxParams; ++i)
            if (mask >> i & 1) w += t.m.e[i];
        if (w) b.add(t.m, t.c * w);
    }
    return b.build();
}

Poly Poly::diff(int var) const
{
    PolyBuilder b;
    for (auto &t : terms_) {
        int k = t.m.e[var];
        if (!k) continue;
        Mono m = t.m;
        m.e[var] = (uint16_t)(k - 1);
        b.add(m, t.c * k);
    }
    return b.build();
}

Poly Poly::substitute(const std::function<std::optional<Poly>(int)> &images) const
{
    std::array<std::optional<Poly>, kMaxParams> img;
    uint32_t sup = support();
    for (int i = 0; i < kMaxParams; ++i)
        if (sup >> i & 1) img[i] = images(i);
    Poly out;
    for (auto &t : terms_) {
        Mono kept;
        Poly factor(t.c);
        for (int i = 0; i < kMaxParams; ++i) {
            if (!t.m.e[i]) continue;
            if (img[i])
                factor = factor * img[i]->pow(t.m.e[i]);
            else
                kept.e[i] = t.m.e[i];
        }
        out += factor.times_mono(kept);
    }
    return out;
}

std::string Poly::to_string() const
{
    if (terms_.empty()) return "0";
    std::vector<const Term *> ts;
    for (auto &t : terms_) ts.push_back(&t);
    std::sort(ts.begin(), ts.end(), [](const Term *a, const Term *b) { return compare_by_name(a->m, b->m) > 0; });
    std::ostringstream os;
    bool first = true;
    for (auto *t : ts) {
        Rational c = t->c;
        bool neg = c < 0;
        if (neg) c = -c;
        if (first)
            os << (neg ? "-" : "");
        else
            os << (neg ? " - " : " + ");
        first = false;
        std::vector<std::pair<int, int>> factors;
        for (int i = 0; i < kMaxParams; ++i)
            if (t->m.e[i]) factors.push_back({i, t->m.e[i]});
        std::sort(factors.begin(), factors.end(),
                  [](auto &a, auto &b) { return symbol_rank(a.first) < symbol_rank(b.first); });
        bool wrote = false;
        if (c != 1 || factors.empty()) {
            os << c.get_str();
            wrote = true;
        }
        for (auto &[id, e] : factors) {
            if (wrote) os << "*";
            os << symbol_name(id);
            if (e > 1) os << "^" << e;
            wrote = true;
        }
    }
    return os.str();
}

Poly PolyBuilder::build()
{
    std::sort(terms_.begin(), terms_.end(), [](const Term &a, const Term &b) { return b.m < a.m; });
    Poly p;
    for (auto &t : terms_) {
        if (!p.terms_.empty() && p.terms_.back().m == t.m)
            p.terms_.back().c += t.c;
        else {
            if (!p.terms_.empty() && p.terms_.back().c == 0) p.terms_.pop_back();
            p.terms_.push_back(std::move(t));
        }
    }
    if (!p.terms_.empty() && p.terms_.back().c == 0) p.terms_.pop_back();
    terms_.clear();
    return p;
}

namespace {

Poly gcd_rec(Poly a, Poly b);

// Heuristic gcd over Z (Char, Geddes and Gonnet): evaluate the main variable
// at a large integer, recurse, and read the gcd back off the xi-adic digits.
// Inputs and outputs carry integral coefficients.

mpz_class int_content(const Poly &p)
{
    mpz_class g = 0;
    for (auto &t : p.terms()) {
        g = gcd(g, mpz_class(t.c.get_num()));
        if (g == 1) break;
    }
    return g;
}

// Scale to integral coefficients with unit content and positive lead.
Poly int_primitive(const Poly &p)
{
    mpz_class l = 1;
    for (auto &t : p.terms()) l = lcm(l, mpz_class(t.c.get_den()));
    Poly r = p.scaled(Rational(l));
    mpz_class g = int_content(r);
    if (r.lead().c < 0) g = -g;
    return r.scaled(Rational(1, 1) / Rational(g));
}

mpz_class max_norm(const Poly &p)
{
    mpz_class m = 0;
    for (auto &t : p.terms()) m = std::max(m, mpz_class(abs(t.c.get_num())));
    return m;
}

Poly eval_at(const Poly &p, int var, const mpz_class &xi)
{
    std::vector<mpz_class> pw{1};
    PolyBuilder b;
    for (auto &t : p.terms()) {
        int k = t.m.e[var];
        while ((int)pw.size() <= k) pw.push_back(pw.back() * xi);
        Mono m = t.m;
        m.e[var] = 0;
        b.add(m, t.c * Rational(pw[k]));
    }
    return b.build();
}

Poly interpolate(Poly h, int var, const mpz_class &xi)
{
    PolyBuilder out;
    mpz_class half = xi / 2;
    for (int i = 0; !h.is_zero(); ++i) {
        PolyBuilder digit;
        for (auto &t : h.terms()) {
            mpz_class r = t.c.get_num() % xi;
            if (r < 0) r += xi;
            if (r > half) r -= xi;
            if (r != 0) digit.add(t.m, Rational(r));
        }
        Poly g = digit.build();
        for (auto &t : g.terms()) out.add(t.m * Mono::var(var, i), t.c);
        h = (h - g).scaled(Rational(1) / Rational(xi));
    }
    return out.build();
}

std::optional<Poly> zgcd(const Poly &a, const Poly &b, int depth);

// gcd over Z of two integral polynomials with unit content.
std::optional<Poly> heu_primitive(const Poly &a, const Poly &b, int depth)
{
    if (a.is_constant() || b.is_constant()) return Poly(1);
    uint32_t sup = a.support() | b.support();
    int var = -1, best = -1;
    for (int i = 0; i < kMaxParams; ++i)
        if (sup >> i & 1) {
            int d = std::max(a.degree_in(i), b.degree_in(i));
            if (d > best) best = d, var = i;
        }
    mpz_class xi = 2 * std::min(max_norm(a), max_norm(b)) + 29;
    for (int attempt = 0; attempt < 6; ++attempt) {
        if ((double)mpz_sizeinbase(xi.get_mpz_t(), 2) * best > 20000) return std::nullopt;
        Poly ea = eval_at(a, var, xi), eb = eval_at(b, var, xi);
        if (!ea.is_zero() && !eb.is_zero()) {
            auto h = zgcd(ea, eb, depth + 1);
            if (!h) return std::nullopt;
            Poly g = interpolate(*h, var, xi);
            if (!g.is_zero()) {
                g = int_primitive(g);
                if (divide_exact(a, g) && divide_exact(b, g)) return g;
            }
        }
        xi = xi * 73794 / 27011;
    }
    return std::nullopt;
}

// gcd over Z including integer content; nullopt when the heuristic gives up.
std::optional<Poly> zgcd(const Poly &a, const Poly &b, int depth)
{
    if (a.is_zero() || b.is_zero()) {
        const Poly &x = a.is_zero() ? b : a;
        return x.lead().c < 0 ? -x : x;
    }
    mpz_class c = gcd(int_content(a), int_content(b));
    if (a.is_constant() || b.is_constant()) return Poly(Rational(c));
    if (depth > kMaxParams) return std::nullopt;
    auto g = heu_primitive(int_primitive(a), int_primitive(b), depth);
    if (!g) return std::nullopt;
    return g->scaled(Rational(c));
}

// gcd of the coefficients of p viewed as a polynomial in var.
Poly content_in(const Poly &p, int var)
{
    auto cs = p.coeffs_in(var);
    Poly g;
    for (auto &c : cs) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? c.monic() : gcd_rec(g, c);
        if (g.is_constant()) break;
    }
    return g;
}

Poly pseudo_rem(Poly a, const Poly &b, int var)
{
    int db = b.degree_in(var);
    Poly lb = b.lead_coeff_in(var);
    while (!a.is_zero() && a.degree_in(var) >= db) {
        int da = a.degree_in(var);
        Poly la = a.lead_coeff_in(var);
        a = a * lb - (la * b).times_mono(Mono::var(var, da - db));
    }
    return a;
}

Poly primitive_in(const Poly &p, int var)
{
    Poly c = content_in(p, var);
    if (c.is_constant()) return p.monic();
    return divide_exact(p, c)->monic();
}

Poly gcd_rec(Poly a, Poly b)
{
    if (a.is_zero()) return b.monic();
    if (b.is_zero()) return a.monic();
    if (a.is_constant() || b.is_constant()) return Poly(1);

    Mono ma = a.min_exponents(), mb = b.min_exponents();
    Mono mg = mono_gcd(ma, mb);
    if (!ma.is_one()) a = a.divided_by_mono(ma);
    if (!mb.is_one()) b = b.divided_by_mono(mb);
    Poly mono_part = Poly::monomial(mg);
    if (a.is_monomial() || b.is_monomial()) return mono_part;

    uint32_t sa = a.support(), sb = b.support();
    uint32_t only_a = sa & ~sb, only_b = sb & ~sa;
    if (only_a) {
        int v = __builtin_ctz(only_a);
        return gcd_rec(content_in(a, v), b) * mono_part;
    }
    if (only_b) {
        int v = __builtin_ctz(only_b);
        return gcd_rec(a, content_in(b, v)) * mono_part;
    }
    // Same support: pick the variable of smallest combined degree as main variable.
    int var = -1, best = 1 << 30;
    for (int i = 0; i < kMaxParams; ++i)
        if (sa >> i & 1) {
            int d = a.degree_in(i) + b.degree_in(i);
            if (d < best) best = d, var = i;
        }
    if (auto h = zgcd(int_primitive(a), int_primitive(b), 0)) return (*h * mono_part).monic();
    Poly ca = content_in(a, var), cb = content_in(b, var);
    Poly c = gcd_rec(ca, cb);
    Poly pa = ca.is_constant() ? a : *divide_exact(a, ca);
    Poly pb = cb.is_constant() ? b : *divide_exact(b, cb);
    if (pa.degree_in(var) < pb.degree_in(var)) std::swap(pa, pb);
    while (true) {
        Poly r = pseudo_rem(pa, pb, var);
        if (r.is_zero()) break;
        if (r.degree_in(var) == 0) {
            pb = Poly(1);
            break;
        }
        pa = std::move(pb);
        pb = primitive_in(r, var);
    }
    Poly g = pb.is_constant() ? Poly(1) : primitive_in(pb, var);
    return (c * g * mono_part).monic();
}

} // namespace

Poly poly_gcd(const Poly &a, const Poly &b) { return gcd_rec(a, b); }

} // namespace fb
