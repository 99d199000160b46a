#include "fb/descriptor.hpp"

#include "fb/errors.hpp"

namespace fb {

using nlohmann::json;

const char *kind_name(BundleKind k)
{
    switch (k) {
    case BundleKind::TStructure: return "tstructure";
    case BundleKind::FBundle: return "fbundle";
    case BundleKind::Equivariant: return "equivariant";
    }
    return "?";
}

Descriptor Descriptor::of(const TStruct &t)
{
    Descriptor d;
    d.t = t;
    return d;
}

Descriptor Descriptor::of(const FBund &f)
{
    Descriptor d;
    d.kind = BundleKind::FBundle;
    d.t = f.t;
    d.f = f;
    return d;
}

Descriptor Descriptor::of(const EquivFBund &e)
{
    Descriptor d;
    d.kind = BundleKind::Equivariant;
    d.t = e.k_bundle.t;
    d.f = e.k_bundle;
    d.e = e;
    return d;
}

json params_json(const ParamSpec &p)
{
    json loc = json::array();
    for (auto &s : p.localized_at) loc.push_back(s.to_string());
    return {{"base", p.base_params}, {"equivariant", p.equiv_params}, {"flavor", flavor_name(p.flavor)},
            {"localized_at", loc}};
}

json order_json(const TruncOrder &o)
{
    return {{"t_degree_cap", o.t_degree_cap}, {"u_min", o.u_min}, {"u_max", o.u_max}};
}

json matrix_json(const SeriesMatrix &m)
{
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(to_string(entry(m, i, j)));
        rows.push_back(row);
    }
    return rows;
}

json scalar_matrix_json(const ScalarMatrix &m)
{
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j).to_string());
        rows.push_back(row);
    }
    return rows;
}

json vec_json(const Vec &v)
{
    json a = json::array();
    for (auto &x : v) a.push_back(x.to_string());
    return a;
}

json flatness_json(const FlatnessReport &r)
{
    json res = json::array();
    for (auto &x : r.residuals)
        res.push_back({{"directions", x.directions}, {"monomial", x.monomial}, {"value", scalar_matrix_json(x.value)}});
    return {{"flat", r.flat}, {"checked", r.checked}, {"residuals", res}};
}

json conditions_json(const ConditionReport &r)
{
    json orbit = json::array(), loc = json::array();
    for (auto &v : r.orbit) orbit.push_back(vec_json(v));
    for (auto &s : r.needed_localizations) loc.push_back(s.to_string());
    return {{"ic", r.ic},
            {"gc", r.gc},
            {"gc_prime", r.gc_prime},
            {"coker_free", tri_name(r.coker_free)},
            {"mu_matrix", scalar_matrix_json(r.mu_matrix)},
            {"orbit", orbit},
            {"best_subset", r.best_subset},
            {"best_det", r.best_det.to_string()},
            {"needed_localizations", loc},
            {"orbit_truncated", r.orbit_truncated}};
}

json certificate_json(const UnfoldResult &r)
{
    return {{"vector", vec_json(r.v)},
            {"added", r.added},
            {"mu_matrix", scalar_matrix_json(r.certificate.mu_matrix)},
            {"determinant", r.maximal.det.to_string()},
            {"maximal", r.maximal.maximal},
            {"needed_localizations", conditions_json(r.certificate)["needed_localizations"]},
            {"fiber_basis", scalar_matrix_json(r.fiber_basis)}};
}

namespace {

json tstruct_json(const TStruct &t)
{
    json conn = json::object();
    for (int i = 0; i < t.vars.size(); ++i) conn[t.vars.name(i)] = matrix_json(t.A[i]);
    return {{"schema", 1},        {"params", params_json(t.spec)}, {"vars", t.vars.names()},
            {"rank", t.rank},     {"connection", conn},            {"order", order_json(t.order)}};
}

} // namespace

json to_json(const Descriptor &d)
{
    json j = tstruct_json(d.t);
    if (d.kind != BundleKind::TStructure) {
        j["u_matrix"] = matrix_json(d.f.U);
        if (d.f.lambda_weight) j["lambda_weight"] = d.f.lambda_weight;
    }
    if (d.kind == BundleKind::Equivariant) {
        j["lambda_cap"] = d.e.lambda_cap;
        j["r_structure"] = tstruct_json(d.e.r_tstruct);
    }
    return j;
}

std::string dump_json(const json &j) { return j.dump(2) + "\n"; }

std::string export_descriptor(const Descriptor &d) { return dump_json(to_json(d)); }

namespace {

// Position of a parse failure inside the whole document: the string is
// located in the raw text and the inner column is added.
struct Locator {
    const std::string &text;

    [[noreturn]] void fail(const std::string &path, const std::string &value, const ParseError *inner,
                           const std::string &what) const
    {
        size_t at = text.find("\"" + value + "\"");
        int line = 1, col = 1;
        if (at != std::string::npos) {
            for (size_t i = 0; i < at; ++i) {
                if (text[i] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
            }
            col += 1 + (inner ? inner->column() - 1 : 0);
        }
        throw ParseError(path + ": " + what, line, col);
    }
};

const json &require(const json &j, const std::string &key, const std::string &path)
{
    if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::Invalid, path + ": missing key '" + key + "'");
    return j.at(key);
}

std::vector<std::string> string_list(const json &j, const std::string &path)
{
    if (!j.is_array()) throw Error(ErrorKind::Invalid, path + ": expected an array of strings");
    std::vector<std::string> out;
    for (auto &x : j) {
        if (!x.is_string()) throw Error(ErrorKind::Invalid, path + ": expected strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

int integer(const json &j, const std::string &path)
{
    if (!j.is_number_integer()) throw Error(ErrorKind::Invalid, path + ": expected an integer");
    return j.get<int>();
}

SeriesMatrix parse_matrix(const json &grid, int n, const VarList &vars, const TruncOrder &o, const std::string &path,
                          const Locator &loc)
{
    if (!grid.is_array() || (int)grid.size() != n)
        throw Error(ErrorKind::DimensionMismatch, path + ": expected " + std::to_string(n) + " rows");
    std::vector<std::vector<SeriesScalar>> rows(n);
    for (int i = 0; i < n; ++i) {
        if (!grid[i].is_array() || (int)grid[i].size() != n)
            throw Error(ErrorKind::DimensionMismatch, path + ": expected " + std::to_string(n) + " columns");
        for (int j = 0; j < n; ++j) {
            std::string p = path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
            if (!grid[i][j].is_string()) throw Error(ErrorKind::Invalid, p + ": expected a series string");
            std::string s = grid[i][j].get<std::string>();
            try {
                rows[i].push_back(parse_series(s, vars, o));
            } catch (const ParseError &e) {
                loc.fail(p, s, &e, e.what());
            } catch (const Error &e) {
                loc.fail(p, s, nullptr, e.what());
            }
        }
    }
    return from_entries(rows);
}

TStruct parse_tstruct(const json &j, const std::string &path, const Locator &loc)
{
    if (!j.is_object()) throw Error(ErrorKind::Invalid, path + ": expected an object");
    if (j.contains("schema") && integer(j.at("schema"), path + ".schema") != 1)
        throw Error(ErrorKind::Invalid, path + ": unsupported schema version");
    const json &p = require(j, "params", path);
    ParamSpec spec;
    spec.base_params = string_list(require(p, "base", path + ".params"), path + ".params.base");
    spec.equiv_params = string_list(require(p, "equivariant", path + ".params"), path + ".params.equivariant");
    const json &fl = require(p, "flavor", path + ".params");
    if (!fl.is_string()) throw Error(ErrorKind::Invalid, path + ".params.flavor: expected a string");
    spec.flavor = parse_flavor(fl.get<std::string>());
    if (p.contains("localized_at"))
        for (auto &s : string_list(p.at("localized_at"), path + ".params.localized_at")) {
            try {
                spec.localized_at.push_back(parse_scalar(s));
            } catch (const ParseError &e) {
                loc.fail(path + ".params.localized_at", s, &e, e.what());
            }
        }
    spec.validate();

    VarList vars(string_list(require(j, "vars", path), path + ".vars"));
    int n = integer(require(j, "rank", path), path + ".rank");
    if (n <= 0) throw Error(ErrorKind::Invalid, path + ".rank: must be positive");
    const json &o = require(j, "order", path);
    TruncOrder ord{integer(require(o, "t_degree_cap", path + ".order"), path + ".order.t_degree_cap"),
                   integer(require(o, "u_min", path + ".order"), path + ".order.u_min"),
                   integer(require(o, "u_max", path + ".order"), path + ".order.u_max")};
    ord.validate();
    const json &conn = require(j, "connection", path);
    if (!conn.is_object() || (int)conn.size() != vars.size())
        throw Error(ErrorKind::DimensionMismatch, path + ".connection: need one matrix per variable");
    TStruct t{spec, vars, n, {}, ord};
    for (int i = 0; i < vars.size(); ++i)
        t.A.push_back(parse_matrix(require(conn, vars.name(i), path + ".connection"), n, vars, ord,
                                   path + ".connection." + vars.name(i), loc));
    t.validate();
    return t;
}

} // namespace

Descriptor parse_descriptor(const std::string &text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        size_t at = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
        int line = 1, col = 1;
        for (size_t i = 0; i < at; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError("invalid JSON", line, col);
    }
    Locator loc{text};
    Descriptor d;
    d.t = parse_tstruct(j, "$", loc);
    if (!j.contains("u_matrix")) {
        if (j.contains("r_structure") || j.contains("lambda_cap"))
            throw Error(ErrorKind::Invalid, "$: an equivariant pair needs u_matrix");
        return d;
    }
    d.kind = BundleKind::FBundle;
    d.f.t = d.t;
    d.f.U = parse_matrix(j.at("u_matrix"), d.t.rank, d.t.vars, d.t.order, "$.u_matrix", loc);
    if (j.contains("lambda_weight")) d.f.lambda_weight = integer(j.at("lambda_weight"), "$.lambda_weight");
    d.f.validate();
    if (!j.contains("r_structure")) {
        if (j.contains("lambda_cap")) throw Error(ErrorKind::Invalid, "$: lambda_cap without r_structure");
        return d;
    }
    d.kind = BundleKind::Equivariant;
    TStruct r = parse_tstruct(j.at("r_structure"), "$.r_structure", loc);
    int cap = integer(require(j, "lambda_cap", "$"), "$.lambda_cap");
    d.e = assemble_equivariant(d.f, r, cap);
    return d;
}

Descriptor with_order(const Descriptor &d, const TruncOrder &o)
{
    const TruncOrder &cur = d.t.order;
    if (o.t_degree_cap > cur.t_degree_cap || o.u_min < cur.u_min || o.u_max > cur.u_max)
        throw Error(ErrorKind::Invalid, "requested caps exceed the descriptor's caps");
    Descriptor r = d;
    auto cut = [&](TStruct &t) {
        t.order = o;
        for (auto &a : t.A) a = a.with_order(o);
    };
    cut(r.t);
    if (d.kind != BundleKind::TStructure) {
        r.f.t = r.t;
        r.f.U = r.f.U.with_order(o);
    }
    if (d.kind == BundleKind::Equivariant) {
        r.e.k_bundle = r.f;
        cut(r.e.r_tstruct);
    }
    return r;
}

} // namespace fb
