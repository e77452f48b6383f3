#include "ahspec/cli/driver.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

using namespace ahspec;
using namespace ahspec::cli;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {
std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const InputError& e) {
        return e.what();
    }
    return {};
}

io::Json metric_doc() {
    return io::Json::parse(R"j({"n": 3, "grid": {"t_min": 0, "t_max": 14, "policy": "uniform", "count": 1401},
                               "profiles": [{"expr": "sinh(t)", "multiplicity": 3}]})j");
}
} // namespace

TEST_CASE("git blob hashes", "[cli]") {
    REQUIRE(io::git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    REQUIRE(io::git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("shortest round-trip number formatting", "[cli]") {
    for (double x : {0.1, 2.25, 1.0 / 3.0, -1e-300, 6.02214076e23}) REQUIRE(std::stod(io::format_double(x)) == x);
    REQUIRE(io::format_double(2.25) == "2.25");
    REQUIRE(io::format_double(NAN) == "nan");
    REQUIRE(io::format_double(-INFINITY) == "-inf");
}

TEST_CASE("config round-trips through JSON", "[cli]") {
    RunConfig c;
    c.task = "lambda0";
    c.metric = "data/metrics/h4.json";
    c.parameters = {{"scale", 2.0}};
    c.tolerances = {{"boundary", 1e-4}};
    c.schedule = {8.0, 10.0, 12.0};
    c.output_dir = "out";
    c.seed = 17;
    const auto back = config_from_json(io::Json::parse(to_json(c).dump()));
    REQUIRE(back == c);
    for (const char* f : {"data/configs/lambda0_h4.json", "data/configs/sweep.json", "data/configs/flow_holder.json"}) {
        const auto a = load_config(f);
        REQUIRE(config_from_json(to_json(a)) == a);
    }
}

TEST_CASE("config errors name the offending field", "[cli]") {
    auto bad = [](const char* text) { return error_of([&] { config_from_json(io::Json::parse(text)); }); };
    REQUIRE_THAT(bad(R"({"task": "nope"})"), ContainsSubstring("/task") && ContainsSubstring("unknown task"));
    REQUIRE_THAT(bad(R"({"task": "lambda0", "colour": 1})"), ContainsSubstring("/colour"));
    REQUIRE_THAT(bad(R"({"task": "lambda0", "tolerances": {"magic": 1}})"), ContainsSubstring("/tolerances/magic"));
    REQUIRE_THAT(bad(R"({"task": "lambda0", "tolerances": {"solver": -1}})"), ContainsSubstring("/tolerances/solver"));
    REQUIRE_THAT(bad(R"({"task": "certify", "tolerances": {"solver": 1e-3}})"), ContainsSubstring("conflict"));
    REQUIRE_THAT(bad(R"({"task": "lambda0", "schedule": [8, 8, 12]})"), ContainsSubstring("/schedule"));
    REQUIRE_THAT(bad(R"({"task": "lambda0", "seed": -3})"), ContainsSubstring("/seed"));
    REQUIRE_THAT(bad(R"({"task": "lambda0", "parameters": {"s": "big"}})"), ContainsSubstring("/parameters/s"));
    REQUIRE_THAT(bad(R"([1, 2])"), ContainsSubstring("object"));
}

TEST_CASE("metric parse errors carry a JSON pointer", "[cli]") {
    auto bad = [](const std::function<void(io::Json&)>& edit) {
        auto j = metric_doc();
        edit(j);
        return error_of([&] { io::parse_metric(j, "m.json"); });
    };
    REQUIRE_THAT(bad([](auto& j) { j["profiles"][0]["multiplicity"] = "three"; }),
                 ContainsSubstring("m.json: /profiles/0/multiplicity"));
    REQUIRE_THAT(bad([](auto& j) { j.erase("n"); }), ContainsSubstring("/n"));
    REQUIRE_THAT(bad([](auto& j) { j["n"] = 0; }), ContainsSubstring("/n"));
    REQUIRE_THAT(bad([](auto& j) { j["grid"]["count"] = 1; }), ContainsSubstring("/grid"));
    REQUIRE_THAT(bad([](auto& j) { j["profiles"][0]["expr"] = "sinh(t"; }), ContainsSubstring("/profiles/0/expr"));
    REQUIRE_THAT(bad([](auto& j) { j["profiles"][0]["multiplicity"] = 2; }), ContainsSubstring("multiplicit"));
    REQUIRE_THAT(error_of([] { io::load_metric("data/metrics/malformed.json"); }),
                 ContainsSubstring("/profiles/0/multiplicity"));
    REQUIRE_THROWS_AS(io::load_metric("data/metrics/no_such_file.json"), InputError);
}

TEST_CASE("metrics round-trip through JSON", "[cli]") {
    const auto g = io::parse_metric(metric_doc());
    const auto back = io::parse_metric(io::metric_to_json(g));
    REQUIRE(back.profiles()[0].f == g.profiles()[0].f);

    const auto su2 = io::load_metric("data/metrics/h4_su2.json");
    const auto su2_back = io::parse_metric(io::metric_to_json(su2));
    REQUIRE(su2_back.profiles().size() == su2.profiles().size());
    const auto s1 = geometry::curvature(su2).scalar, s2 = geometry::curvature(su2_back).scalar;
    for (std::size_t i = 10; i < s1.size(); i += 100) REQUIRE_THAT(s2[i], WithinAbs(s1[i], 1e-12));

    // sampled profiles (no expression) survive as samples
    const auto shot = einstein::shoot_biaxial_einstein(3, -0.05, geometry::default_grid(16.0));
    const auto shot_back = io::parse_metric(io::metric_to_json(shot.metric));
    REQUIRE(shot_back.profiles()[1].f == shot.metric.profiles()[1].f);
}

TEST_CASE("alpha substitution only replaces the identifier", "[cli]") {
    REQUIRE(io::substitute_alpha("x + abs(x)^(1+alpha)", 0.5) == "x + abs(x)^(1+(0.5))");
    REQUIRE(io::substitute_alpha("alphabet*alpha", 0.25) == "alphabet*(0.25)");
}

TEST_CASE("tasks run in-process and fold errors into exit codes", "[cli]") {
    RunConfig c;
    c.task = "indicial";
    c.parameters = {{"n", 3}, {"kappa", 4}};
    auto env = execute(c);
    REQUIRE(env.exit_code == exit_ok);
    REQUIRE(env.outputs["roots"] == io::Json::array({-1.0, 4.0}));

    c.parameters = {{"n", 3}};
    env = execute(c);
    REQUIRE(env.exit_code == exit_input);
    REQUIRE_THAT(env.error, ContainsSubstring("/parameters/kappa"));

    c.task = "einstein-shoot";
    c.parameters = {{"param", -0.1}};
    env = execute(c);
    REQUIRE(env.exit_code == exit_numeric);
    REQUIRE(env.status == "numerical_diagnostic");
}

TEST_CASE("identical configs give identical payloads and files", "[cli]") {
    RunConfig c;
    c.task = "eigenfunction";
    c.metric = "data/metrics/h4.json";
    const auto a = run(c), b = run(c);
    REQUIRE(a.files == b.files);
    REQUIRE(a.outputs == b.outputs);
    REQUIRE(a.config_hash == b.config_hash);
    REQUIRE(a.inputs[0].sha1 == io::git_blob_sha1(io::read_file("data/metrics/h4.json")));
    auto ja = to_json(a), jb = to_json(b);
    ja.erase("wall_clock_seconds");
    jb.erase("wall_clock_seconds");
    REQUIRE(ja == jb);
}

TEST_CASE("plot data comes from the stored series", "[cli]") {
    RunConfig c;
    c.task = "lambda0";
    c.metric = "data/metrics/h4.json";
    const auto env = run(c);
    const auto csv = emit_plot_data(env, "dirichlet");
    REQUIRE(csv.rfind("T,dirichlet,error\n", 0) == 0);
    const auto lines = std::count(csv.begin(), csv.end(), '\n');
    REQUIRE(static_cast<std::size_t>(lines) == env.series.at("dirichlet").x.size() + 1);
    REQUIRE_THAT(error_of([&] { emit_plot_data(env, "G"); }), ContainsSubstring("available: dirichlet"));
}

TEST_CASE("outputs land in the output directory", "[cli]") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "ahspec_unit_out";
    fs::remove_all(dir);
    RunConfig c;
    c.task = "eigenfunction";
    c.metric = "data/metrics/h4.json";
    c.output_dir = dir.string();
    const auto env = run(c);
    write_outputs(env);
    REQUIRE(fs::exists(dir / "envelope.json"));
    REQUIRE(io::read_file((dir / "eigenfunction.csv").string()) == env.files.at("eigenfunction.csv"));
    const auto j = io::read_json_file((dir / "envelope.json").string());
    REQUIRE(j["schema"] == "ahspec-result/1");
    REQUIRE(j["status"] == "ok");
    fs::remove_all(dir);
}
