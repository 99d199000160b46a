#include "doctest.h"

#include "fb/descriptor.hpp"
#include "fb/instances.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fb;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

const fs::path &workdir()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("fb_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Run fb_run(const std::string &args, const std::string &env = "")
{
    const char *bin = std::getenv("FB_BIN");
    REQUIRE_MESSAGE(bin, "FB_BIN is not set");
    std::string cmd = env + (env.empty() ? "" : " ") + "'" + std::string(bin) + "' " + args + " 2>&1";
    FILE *p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    Run r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path put(const std::string &name, const std::string &text)
{
    fs::path p = workdir() / name;
    std::ofstream(p) << text;
    return p;
}

std::string q(const fs::path &p) { return "'" + p.string() + "'"; }

} // namespace

TEST_CASE("export, ingest, export is byte-identical")
{
    TruncOrder o = default_order();
    std::vector<Descriptor> ds = {Descriptor::of(make_example_3_10({"l1"}, o)),
                                  Descriptor::of(make_p1_a_model(o, 2).small),
                                  Descriptor::of(make_p1_b_model(o, 2).r_tstruct)};
    for (auto &d : ds) {
        std::string a = export_descriptor(d);
        std::string b = export_descriptor(parse_descriptor(a));
        CHECK(a == b);
    }
    // Through the binary: unfolding writes a descriptor that re-exports unchanged.
    fs::path in = put("rt_in.json", export_descriptor(ds[0])), out = workdir() / "rt_out.json";
    Run r = fb_run("unfold " + q(in) + " --vector e3 --out " + q(out));
    REQUIRE(r.code == 0);
    std::string written = slurp(out);
    CHECK(export_descriptor(parse_descriptor(written)) == written);
}

TEST_CASE("check-flat exit codes")
{
    TruncOrder o = default_order();
    fs::path good = put("flat.json", export_descriptor(Descriptor::of(make_example_3_10({}, o))));
    Run r = fb_run("check-flat " + q(good));
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["flat"] == true);

    // Two constant non-commuting matrices are not flat.
    json bad = json::parse(slurp(good));
    bad["connection"]["t1"] = {{"0", "1", "0"}, {"0", "0", "0"}, {"0", "0", "0"}};
    fs::path badp = put("notflat.json", bad.dump());
    r = fb_run("check-flat " + q(badp));
    CHECK(r.code == 1);
    CHECK(json::parse(r.out)["flat"] == false);

    fs::path garbage = put("garbage.json", "{\n  \"schema\": 1,\n  oops\n}");
    r = fb_run("check-flat " + q(garbage));
    CHECK(r.code == 2);
    CHECK(json::parse(r.out)["line"] == 3);

    json wrong = json::parse(slurp(good));
    wrong["connection"]["t2"][0][0] = "1 + * t1";
    r = fb_run("check-flat " + q(put("badseries.json", wrong.dump())));
    CHECK(r.code == 2);

    CHECK(fb_run("check-flat " + q(workdir() / "missing.json")).code == 2);
    CHECK(fb_run("no-such-command").code == 2);
    CHECK(fb_run("check-flat " + q(good) + " --u-order 3").code == 2);
    CHECK(fb_run("check-flat " + q(good), "FB_NUM_THREADS=0").code == 2);
    CHECK(fb_run("check-flat " + q(good), "FB_NUM_THREADS=1").code == 0);
}

TEST_CASE("unfold the rank-3 cyclic example from the command line")
{
    TruncOrder o = default_order();
    fs::path loc = put("ex_l1.json", export_descriptor(Descriptor::of(make_example_3_10({"l1"}, o))));
    fs::path plain = put("ex.json", export_descriptor(Descriptor::of(make_example_3_10({}, o))));

    Run r = fb_run("unfold " + q(loc) + " --vector e3");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["certificate"]["maximal"] == true);
    CHECK(j["certificate"]["added"].size() == 1);
    CHECK(j["bundle"]["vars"].size() == 3);

    r = fb_run("unfold " + q(plain) + " --vector e2");
    CHECK(r.code == 1);
    CHECK(r.out.find("l2") != std::string::npos);
    CHECK(json::parse(r.out)["error"]["error"] == "NoUnitComplement");

    CHECK(fb_run("unfold " + q(loc) + " --vector e7").code == 2);
    CHECK(fb_run("unfold " + q(loc) + " --mode sideways").code == 2);
}

TEST_CASE("unfold along a prescribed f")
{
    // f = s e_2 forces S = A_2 / l1.
    TruncOrder o = default_order();
    fs::path loc = put("ex_f.json", export_descriptor(Descriptor::of(make_example_3_10({"l1"}, o))));
    fs::path f = put("f.json", R"({"vars": ["s"], "f": ["0", "s", "0"]})");
    Run r = fb_run("unfold " + q(loc) + " --mode with-f --f " + q(f));
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    json s = j["bundle"]["connection"]["s"];
    CHECK(parse_scalar(s[0][2].get<std::string>()) == parse_scalar("1/l1"));
    CHECK(parse_scalar(s[1][0].get<std::string>()) == Scalar(1));
    CHECK(parse_scalar(s[2][1].get<std::string>()) == parse_scalar("l2/l1"));
    CHECK(fb_run("unfold " + q(loc) + " --mode with-f").code == 2);
}

TEST_CASE("unfold the small A-model")
{
    TruncOrder o = default_order();
    fs::path small = put("p1a.json", export_descriptor(Descriptor::of(make_p1_a_model(o, 2).small)));
    Run r = fb_run("unfold " + q(small) + " --vector 1");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["kind"] == "equivariant");
    CHECK(j["certificate"]["maximal"] == true);
}

TEST_CASE("frame, conditions, lift and compare")
{
    TruncOrder o = default_order();
    fs::path loc = put("ex_c.json", export_descriptor(Descriptor::of(make_example_3_10({"l1"}, o))));
    fs::path plain = put("ex_c0.json", export_descriptor(Descriptor::of(make_example_3_10({}, o))));

    Run r = fb_run("frame " + q(loc));
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["F_framed"] == true);

    r = fb_run("conditions " + q(plain) + " --vector e3");
    CHECK(r.code == 1);
    CHECK(json::parse(r.out)["needed_localizations"] == json::array({"l1"}));
    CHECK(fb_run("conditions " + q(loc) + " --vector e3").code == 0);

    fs::path r_only = put("r.json", export_descriptor(Descriptor::of(make_p1_a_model(o, 2).small.r_tstruct)));
    fs::path lifted = workdir() / "lifted.json";
    r = fb_run("lift " + q(r_only) + " --lambda-cap 1 --out " + q(lifted));
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["flat"] == true);
    CHECK(json::parse(slurp(lifted))["vars"].size() == 2);
    CHECK(fb_run("lift " + q(loc)).code == 2);

    fs::path rt = put("ex_t.json", export_descriptor(Descriptor::of(make_example_3_10({"l1"}, o).t)));
    r = fb_run("compare " + q(rt) + " --vector e3 --complement 0,l1,0 --complement 0,2*l1,0");
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["base_map"]["s1"] == "1/2*s1");
    CHECK(fb_run("compare " + q(rt) + " --vector e3 --complement 0,l1,0").code == 2);
}

TEST_CASE("demos")
{
    for (std::string name : {"ex310", "p1b"}) {
        fs::path dir = workdir() / ("demo_" + name);
        Run r = fb_run("demo " + name + " --t-order 3 --out " + q(dir));
        CHECK_MESSAGE(r.code == 0, r.out);
        CHECK(json::parse(r.out)["ok"] == true);
    }
    CHECK(slurp(workdir() / "demo_ex310" / "ex310_determinant.txt").find("alpha^3") != std::string::npos);
    json table = json::parse(slurp(workdir() / "demo_p1b" / "p1b_reduction_table.json"));
    CHECK(table["normal_forms"].size() == 7);
    CHECK(fb_run("demo nothing").code == 2);
}
