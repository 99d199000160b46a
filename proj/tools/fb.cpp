#include "fb/descriptor.hpp"
#include "fb/errors.hpp"
#include "fb/instances.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace fb;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Thrown for bad command-line or file input (exit 2).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Caps {
    int t_order = 4;
    std::string u_order = "-2,6";
    int lambda_cap = 2;
    CLI::Option *t_opt = nullptr, *u_opt = nullptr, *l_opt = nullptr;

    void add(CLI::App *app)
    {
        t_opt = app->add_option("--t-order", t_order, "t-degree cap")->capture_default_str();
        u_opt = app->add_option("--u-order", u_order, "u-window as MIN,MAX")->capture_default_str();
        l_opt = app->add_option("--lambda-cap", lambda_cap, "lambda-substitution cap")->capture_default_str();
    }

    TruncOrder order() const
    {
        int lo = 0, hi = 0;
        char comma = 0;
        std::istringstream in(u_order);
        if (!(in >> lo >> comma >> hi) || comma != ',' || !in.eof())
            throw InputError("--u-order must look like MIN,MAX, got '" + u_order + "'");
        TruncOrder o{t_order, lo, hi};
        o.validate();
        return o;
    }

    // Caps given on the command line re-truncate an ingested descriptor.
    Descriptor apply(const Descriptor &d) const
    {
        if (!t_opt->count() && !u_opt->count()) return d;
        TruncOrder o = d.t.order;
        if (t_opt->count()) o.t_degree_cap = t_order;
        if (u_opt->count()) {
            TruncOrder w = order();
            o.u_min = w.u_min;
            o.u_max = w.u_max;
        }
        return with_order(d, o);
    }
};

std::string read_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path &path, const std::string &text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

void print(const json &j) { std::cout << dump_json(j); }

bool is_math_failure(ErrorKind k)
{
    switch (k) {
    case ErrorKind::ULaurentUnderflow:
    case ErrorKind::SingularFiberBasis:
    case ErrorKind::GCFailed:
    case ErrorKind::ConditionsNotMet:
    case ErrorKind::NoUnitComplement:
    case ErrorKind::NotComparable:
    case ErrorKind::NotIsomorphic:
    case ErrorKind::LiftMismatch:
    case ErrorKind::ReductionWindowExceeded:
        return true;
    default:
        return false;
    }
}

json error_json(const Error &e) { return {{"error", error_kind_name(e.kind())}, {"message", e.what()}}; }

int cmd_check_flat(const std::string &in, const Caps &caps)
{
    Descriptor d = caps.apply(parse_descriptor(read_file(in)));
    FlatnessReport r = d.kind == BundleKind::TStructure ? check_flatness(d.t) : check_flatness(d.f);
    json j = flatness_json(r);
    j["kind"] = kind_name(d.kind);
    j["order"] = order_json(d.t.order);
    print(j);
    return r.flat ? 0 : 1;
}

Vec vector_arg(const std::string &text, int n)
{
    try {
        return parse_vector(text, n);
    } catch (const Error &e) {
        throw InputError(std::string("--vector: ") + e.what());
    }
}

void emit_bundle(const Descriptor &d, const std::string &out, json &report)
{
    if (out.empty()) {
        report["bundle"] = to_json(d);
    } else {
        write_file(out, export_descriptor(d));
        report["output"] = out;
    }
}

std::vector<SeriesScalar> read_f(const std::string &path, const VarList &vars, std::vector<std::string> &names,
                                 const TruncOrder &o)
{
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error &e) {
        throw InputError(path + ": " + e.what());
    }
    if (!j.contains("vars") || !j.contains("f")) throw InputError(path + ": needs keys 'vars' and 'f'");
    names = j.at("vars").get<std::vector<std::string>>();
    VarList nv = concat(vars, names);
    TruncOrder o1 = o;
    o1.t_degree_cap += 1;
    std::vector<SeriesScalar> f;
    for (auto &s : j.at("f")) f.push_back(parse_series(s.get<std::string>(), nv, o1));
    return f;
}

int cmd_unfold(const std::string &in, const std::string &vec, const std::string &mode, const std::string &fpath,
               const std::string &out, const Caps &caps)
{
    Descriptor d = caps.apply(parse_descriptor(read_file(in)));
    if (mode != "max" && mode != "with-f") throw InputError("--mode must be max or with-f");
    json report{{"kind", kind_name(d.kind)}, {"mode", mode}, {"order", order_json(d.t.order)}};
    Vec v = mode == "max" ? vector_arg(vec, d.t.rank) : unit_vector(d.t.rank, 0);
    try {
        if (d.kind == BundleKind::Equivariant) {
            if (mode != "max") throw InputError("equivariant bundles only support --mode max");
            EquivUnfoldResult r = equivariant_maximal_unfold(d.e, v);
            report["certificate"] = certificate_json(r.r);
            report["lambda_cap"] = r.bundle.lambda_cap;
            emit_bundle(Descriptor::of(r.bundle), out, report);
            print(report);
            return r.r.maximal.maximal ? 0 : 1;
        }
        UnfoldResult r;
        if (mode == "max") {
            r = d.kind == BundleKind::FBundle ? maximal_unfold(d.f, v) : maximal_unfold(d.t, v);
        } else {
            if (fpath.empty()) throw InputError("--mode with-f needs --f");
            std::vector<std::string> names;
            auto f = read_f(fpath, d.t.vars, names, d.t.order);
            r = d.kind == BundleKind::FBundle ? unfold_with_f(d.f, names, f) : unfold_with_f(d.t, names, f);
        }
        report["certificate"] = certificate_json(r);
        emit_bundle(r.has_u ? Descriptor::of(r.bundle) : Descriptor::of(r.bundle.t), out, report);
        if (!out.empty()) {
            fs::path cert = fs::path(out).replace_extension(".certificate.json");
            write_file(cert, dump_json(report["certificate"]));
            report["certificate_file"] = cert.string();
        }
        print(report);
        return r.maximal.maximal || mode == "with-f" ? 0 : 1;
    } catch (const Error &e) {
        if (!is_math_failure(e.kind())) throw;
        report["error"] = error_json(e);
        const TStruct &r = d.kind == BundleKind::Equivariant ? d.e.r_tstruct : d.t;
        if (mode == "max") report["conditions"] = conditions_json(check_conditions(r, v));
        print(report);
        return 1;
    }
}

int cmd_frame(const std::string &in, const std::string &out, const Caps &caps)
{
    Descriptor d = caps.apply(parse_descriptor(read_file(in)));
    if (d.kind == BundleKind::Equivariant) d.kind = BundleKind::FBundle;
    Framing f = compute_framing(d.t);
    json report{{"kind", kind_name(d.kind)}, {"gauge", matrix_json(f.gauge.P)}};
    Descriptor framed = Descriptor::of(f.framed);
    if (d.kind == BundleKind::FBundle) {
        FBund b = apply_gauge(d.f, f.gauge);
        report["F_framed"] = is_F_framed(b);
        framed = Descriptor::of(b);
    }
    emit_bundle(framed, out, report);
    print(report);
    return 0;
}

int cmd_conditions(const std::string &in, const std::string &vec, const std::string &mode, const Caps &caps)
{
    Descriptor d = caps.apply(parse_descriptor(read_file(in)));
    const TStruct &t = d.kind == BundleKind::Equivariant ? d.e.r_tstruct : d.t;
    Vec v = vector_arg(vec, t.rank);
    ConditionReport r;
    if (d.kind == BundleKind::FBundle && mode != "t")
        r = check_conditions(d.f, v);
    else
        r = check_conditions(t, v);
    json j = conditions_json(r);
    j["vector"] = vec_json(v);
    print(j);
    return r.ic && r.gc ? 0 : 1;
}

int cmd_lift(const std::string &in, const std::string &out, const Caps &caps)
{
    Descriptor d = caps.apply(parse_descriptor(read_file(in)));
    if (d.kind != BundleKind::TStructure) throw InputError("lift expects an R-linear (T)-structure descriptor");
    TStruct lift = lift_T_structure(d.t, caps.lambda_cap);
    json report{{"lambda_cap", caps.lambda_cap}, {"vars", lift.vars.names()}, {"flat", check_flatness(lift).flat}};
    emit_bundle(Descriptor::of(lift), out, report);
    print(report);
    return 0;
}

Vec complement_arg(const std::string &text, int n)
{
    try {
        return parse_vector(text, n);
    } catch (const Error &e) {
        throw InputError(std::string("--complement: ") + e.what());
    }
}

int cmd_compare(const std::string &in, const std::string &vec, const std::vector<std::string> &comps, const Caps &caps)
{
    Descriptor d = caps.apply(parse_descriptor(read_file(in)));
    if (d.kind == BundleKind::Equivariant) throw InputError("compare works on R-linear descriptors");
    const int n = d.t.rank, ell = n - d.t.vars.size();
    if ((int)comps.size() != 2 * ell)
        throw InputError("give " + std::to_string(ell) + " --complement values for each of the two unfoldings");
    Vec v = vector_arg(vec, n);
    UnfoldOptions a, b;
    for (int i = 0; i < ell; ++i) {
        a.forced_complements.push_back(complement_arg(comps[i], n));
        b.forced_complements.push_back(complement_arg(comps[ell + i], n));
    }
    json report{{"vector", vec_json(v)}};
    try {
        UnfoldResult ra = d.kind == BundleKind::FBundle ? maximal_unfold(d.f, v, a) : maximal_unfold(d.t, v, a);
        UnfoldResult rb = d.kind == BundleKind::FBundle ? maximal_unfold(d.f, v, b) : maximal_unfold(d.t, v, b);
        UnfoldIso iso = compare_unfoldings(ra, rb);
        json map = json::object();
        for (int i = 0; i < iso.target.size(); ++i) map[iso.target.name(i)] = to_string(iso.base_map[i]);
        report["isomorphic"] = true;
        report["direction"] = iso.direction;
        report["base_map"] = map;
        report["bundle_map"] = matrix_json(iso.bundle_map);
        report["verified_t_order"] = iso.verified_cap;
        print(report);
        return 0;
    } catch (const Error &e) {
        if (!is_math_failure(e.kind())) throw;
        report["isomorphic"] = false;
        report["error"] = error_json(e);
        print(report);
        return 1;
    }
}

struct DemoLog {
    json checks = json::array();
    json files = json::array();
    fs::path dir;
    bool ok = true;

    void check(const std::string &name, bool pass)
    {
        checks.push_back({{"name", name}, {"ok", pass}});
        ok = ok && pass;
    }
    void write(const std::string &name, const std::string &text)
    {
        write_file(dir / name, text);
        files.push_back((dir / name).string());
    }
};

void demo_ex310(DemoLog &log, const TruncOrder &o, int lambda_cap)
{
    FBund b = make_example_3_10({}, o);
    log.write("ex310.json", export_descriptor(Descriptor::of(b)));
    log.write("ex310_localized_l1.json", export_descriptor(Descriptor::of(make_example_3_10({"l1"}, o))));
    log.check("flat", check_flatness(b).flat);
    Scalar det = mat_det(example_3_10_evaluation_matrix());
    log.write("ex310_determinant.txt", "det(v, Bv, B^2 v) for v = (alpha, beta, gamma):\n" + det.to_string() + "\n");
    log.check("cubic determinant",
              det == parse_scalar("l1^2*l2*alpha^3 + l2^2*beta^3 + l1*gamma^3 - 3*l1*l2*alpha*beta*gamma"));
    json conds = json::object();
    for (int i = 0; i < 3; ++i) conds["e" + std::to_string(i + 1)] = conditions_json(check_conditions(b, unit_vector(3, i)));
    log.write("ex310_conditions.json", dump_json(conds));
    log.check("e3 needs l1", conds["e3"]["needed_localizations"] == json::array({"l1"}));
    log.check("e2 needs l2^2", conds["e2"]["needed_localizations"] == json::array({"l2^2"}));
    UnfoldResult r = maximal_unfold(make_example_3_10({"l1"}, o), unit_vector(3, 2));
    log.write("ex310_unfolded_e3.json", export_descriptor(Descriptor::of(r.bundle)));
    log.write("ex310_unfolded_e3.certificate.json", dump_json(certificate_json(r)));
    log.check("e3 unfolding maximal", r.maximal.maximal && r.added.size() == 1);
    log.check("e3 unfolding flat", check_flatness(r.bundle).flat);
    EquivFBund e = make_example_3_10_equivariant({"l1"}, o, lambda_cap);
    EquivUnfoldResult er = equivariant_maximal_unfold(e, unit_vector(3, 2));
    log.check("equivariant e3 unfolding flat", check_flatness(er.bundle.k_bundle).flat);
}

void demo_p1a(DemoLog &log, const TruncOrder &o, int lambda_cap)
{
    P1AModel m = make_p1_a_model(o, lambda_cap);
    log.write("p1a_small.json", export_descriptor(Descriptor::of(m.small)));
    log.write("p1a_small_r.json", export_descriptor(Descriptor::of(m.small.r_tstruct)));
    log.write("p1a_big.json", export_descriptor(Descriptor::of(m.big)));
    log.check("small flat", check_flatness(m.small.k_bundle).flat);
    log.check("big flat", check_flatness(m.big.k_bundle).flat);
    log.check("small grading", check_grading(m.small, p1_grading(1)).ok);
    log.check("big grading", check_grading(m.big, p1_grading(2)).ok);
    UnfoldOptions opt;
    opt.names = {"tau2"};
    EquivUnfoldResult r = equivariant_maximal_unfold(m.small, unit_vector(2, 0), opt);
    log.write("p1a_unfolded.json", export_descriptor(Descriptor::of(r.bundle)));
    log.write("p1a_unfolded.certificate.json", dump_json(certificate_json(r.r)));
    log.check("unfolding equals big model", r.bundle.k_bundle.t.A == m.big.k_bundle.t.A &&
                                                r.bundle.k_bundle.U == m.big.k_bundle.U &&
                                                r.bundle.r_tstruct.A == m.big.r_tstruct.A);
}

void demo_p1b(DemoLog &log, const TruncOrder &o, int lambda_cap)
{
    BrieskornP1 b = make_brieskorn_p1(o, false);
    json table = json::object();
    for (int m = -1; m <= 5; ++m) {
        auto c = b.reduce(m);
        table[std::to_string(m)] = {to_string(c[0]), to_string(c[1])};
    }
    log.write("p1b_reduction_table.json", dump_json({{"basis", {"[Omega]", "[z Omega]"}}, {"normal_forms", table}}));
    log.check("reduction confluent", b.confluent());
    EquivFBund small = make_p1_b_model(o, lambda_cap), big = unfold_p1_b_model(o, lambda_cap);
    log.write("p1b_small.json", export_descriptor(Descriptor::of(small)));
    log.write("p1b_unfolded.json", export_descriptor(Descriptor::of(big)));
    log.check("small flat", check_flatness(small.k_bundle).flat);
    log.check("unfolded flat", check_flatness(big.k_bundle).flat);
    log.check("small grading", check_grading(small, p1_grading(1)).ok);
    log.check("unfolded grading", check_grading(big, p1_grading(2)).ok);
    log.check("unfolded maximal", check_maximal(big.r_tstruct, unit_vector(2, 0)).maximal);
    FBund z = at_lambda_zero(big.k_bundle);
    SeriesMatrix U0 = z.U.restrict_to(VarList({"y_0", "y2_0"})).rename(VarList({"y", "y2"}));
    log.check("non-equivariant u-direction is -W action", U0 == -p1_w_action_nonequivariant(o));
}

void demo_mirror(DemoLog &log, const TruncOrder &o, int lambda_cap)
{
    auto report_json = [](const MirrorReport &r) {
        json j{{"found", r.found}, {"attempts", r.attempts}};
        if (r.found) {
            j["kappa"] = r.kappa;
            j["lambda_sign"] = r.sign;
            j["g"] = scalar_matrix_json(r.g);
        } else {
            j["obstruction"] = r.obstruction;
        }
        return j;
    };
    MirrorReport r = verify_small_mirror_p1(o, lambda_cap);
    MirrorReport z = verify_small_mirror_p1(o, lambda_cap, {Scalar(1), Scalar(0)}, true);
    MirrorReport forced = verify_small_mirror_p1(o, lambda_cap, {Scalar(0), Scalar(1)});
    log.write("mirror_p1.json", dump_json({{"equivariant", report_json(r)},
                                           {"lambda_zero", report_json(z)},
                                           {"forced_g_omega_sigma", report_json(forced)},
                                           {"order", order_json(o)},
                                           {"lambda_cap", lambda_cap}}));
    log.check("intertwiner found", r.found);
    log.check("lambda = 0 intertwiner found", z.found);
    log.check("g[Omega] = s is obstructed", !forced.found);
}

int cmd_demo(const std::string &name, const std::string &out, const Caps &caps)
{
    DemoLog log;
    log.dir = out.empty() ? fs::path("fb_demo_" + name) : fs::path(out);
    TruncOrder o = caps.order();
    if (name == "ex310")
        demo_ex310(log, o, caps.lambda_cap);
    else if (name == "p1a")
        demo_p1a(log, o, caps.lambda_cap);
    else if (name == "p1b")
        demo_p1b(log, o, caps.lambda_cap);
    else if (name == "mirror-p1")
        demo_mirror(log, o, caps.lambda_cap);
    else
        throw InputError("unknown demo '" + name + "' (ex310, p1a, p1b, mirror-p1)");
    print({{"demo", name},
           {"order", order_json(o)},
           {"lambda_cap", caps.lambda_cap},
           {"checks", log.checks},
           {"files", log.files},
           {"ok", log.ok}});
    return log.ok ? 0 : 1;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Formal F-bundles: framing, unfolding and equivariant lifts"};
    app.require_subcommand(1);

    std::string in, out, vec = "e1", mode = "max", fpath, name, cond_mode = "auto";
    std::vector<std::string> comps;

    Caps c_flat, c_unfold, c_frame, c_cond, c_lift, c_cmp, c_demo;
    auto *flat = app.add_subcommand("check-flat", "check flatness of a bundle descriptor");
    flat->add_option("in", in, "descriptor")->required();
    c_flat.add(flat);

    auto *unfold = app.add_subcommand("unfold", "maximal unfolding or unfolding along a prescribed f");
    unfold->add_option("in", in, "descriptor")->required();
    unfold->add_option("--vector", vec, "cyclic vector: e<i>, 1 or a comma list")->capture_default_str();
    unfold->add_option("--mode", mode, "max or with-f")->capture_default_str();
    unfold->add_option("--f", fpath, "JSON file {\"vars\": [...], \"f\": [...]}");
    unfold->add_option("--out", out, "output descriptor path");
    c_unfold.add(unfold);

    auto *frame = app.add_subcommand("frame", "compute the framing gauge");
    frame->add_option("in", in, "descriptor")->required();
    frame->add_option("--out", out, "output descriptor path");
    c_frame.add(frame);

    auto *cond = app.add_subcommand("conditions", "check (IC), (GC) and (GC') for a vector");
    cond->add_option("in", in, "descriptor")->required();
    cond->add_option("--vector", vec, "fiber vector")->capture_default_str();
    cond->add_option("--mode", cond_mode, "auto or t (ignore the u-residue)")->capture_default_str();
    c_cond.add(cond);

    auto *lift = app.add_subcommand("lift", "lift an R-linear (T)-structure to the variables t_{i,k}");
    lift->add_option("in", in, "descriptor")->required();
    lift->add_option("--out", out, "output descriptor path");
    c_lift.add(lift);

    auto *cmp = app.add_subcommand("compare", "compare two maximal unfoldings with forced complements");
    cmp->add_option("in", in, "descriptor")->required();
    cmp->add_option("--vector", vec, "cyclic vector")->capture_default_str();
    cmp->add_option("--complement", comps, "complement vector; first half for the first unfolding")->required();
    c_cmp.add(cmp);

    auto *demo = app.add_subcommand("demo", "build a built-in instance and run its checks");
    demo->add_option("name", name, "ex310, p1a, p1b or mirror-p1")->required();
    demo->add_option("--out", out, "output directory");
    c_demo.add(demo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        // Series multiplication reads the cap itself; reject malformed values here.
        if (const char *nt = std::getenv("FB_NUM_THREADS")) {
            char *end = nullptr;
            long n = std::strtol(nt, &end, 10);
            if (!*nt || *end || n < 1) throw InputError("FB_NUM_THREADS must be a positive integer");
        }
        if (*flat) return cmd_check_flat(in, c_flat);
        if (*unfold) return cmd_unfold(in, vec, mode, fpath, out, c_unfold);
        if (*frame) return cmd_frame(in, out, c_frame);
        if (*cond) return cmd_conditions(in, vec, cond_mode, c_cond);
        if (*lift) return cmd_lift(in, out, c_lift);
        if (*cmp) return cmd_compare(in, vec, comps, c_cmp);
        if (*demo) return cmd_demo(name, out, c_demo);
    } catch (const ParseError &e) {
        print({{"error", "Parse"}, {"message", e.what()}, {"line", e.line()}, {"column", e.column()}});
        return 2;
    } catch (const InputError &e) {
        print({{"error", "Input"}, {"message", e.what()}});
        return 2;
    } catch (const Error &e) {
        print(error_json(e));
        return is_math_failure(e.kind()) ? 1 : 2;
    } catch (const std::exception &e) {
        print({{"error", "Input"}, {"message", e.what()}});
        return 2;
    }
    return 2;
}
