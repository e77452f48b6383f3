#pragma once

// Batch driver: RunConfig -> ResultEnvelope, file output and plot data.

#include "ahspec/core/error.hpp"
#include "ahspec/einstein/einstein.hpp"
#include "ahspec/gauge/gauge_flow.hpp"
#include "ahspec/indicial.hpp"
#include "ahspec/io/hash.hpp"
#include "ahspec/io/metric_json.hpp"
#include "ahspec/io/report_json.hpp"
#include "ahspec/spectral/eigenfunction.hpp"
#include "ahspec/spectral/spectrum.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ahspec::cli {

using io::Json;

inline const std::vector<std::string>& known_tasks() {
    static const std::vector<std::string> t{"indicial", "lambda0",        "sullivan", "eigenfunction",
                                            "certify",  "einstein-shoot", "sweep",    "flow-check"};
    return t;
}

inline const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> d{{"boundary", 1e-3},    {"certificate", 1e-6}, {"holder_ratio", 1e-6},
                                                 {"identity", 1e-6},    {"monotone", 1e-9},    {"ode", 1e-12},
                                                 {"solver", 1e-8}};
    return d;
}

struct RunConfig {
    std::string task;
    std::string metric; ///< metric file path, when the task takes one
    std::map<std::string, std::string> inputs;  ///< other input files: "field", "schedule"
    std::map<std::string, double> parameters;   ///< task parameters (n, kappa, s, d, param, alpha, t, ...)
    std::map<std::string, double> tolerances;   ///< overrides of default_tolerances()
    std::vector<double> schedule;               ///< truncation radii for lambda_0
    std::string output_dir;
    std::uint64_t seed = 1;

    bool operator==(const RunConfig&) const = default;

    [[nodiscard]] double tol(const std::string& name) const {
        auto it = tolerances.find(name);
        return it != tolerances.end() ? it->second : default_tolerances().at(name);
    }
    [[nodiscard]] std::optional<double> param(const std::string& name) const {
        auto it = parameters.find(name);
        if (it == parameters.end()) return std::nullopt;
        return it->second;
    }
    [[nodiscard]] double param_or(const std::string& name, double fallback) const { return param(name).value_or(fallback); }
    [[nodiscard]] double need(const std::string& name) const {
        auto v = param(name);
        if (!v) throw InputError("config: /parameters/" + name + ": required by task '" + task + "'");
        return *v;
    }
    [[nodiscard]] int need_int(const std::string& name) const {
        const double v = need(name);
        if (v != std::floor(v) || std::abs(v) > 1e6)
            throw InputError("config: /parameters/" + name + ": expected an integer");
        return static_cast<int>(v);
    }

    /// Task-independent checks; task-specific ones happen in run().
    void validate() const {
        if (std::find(known_tasks().begin(), known_tasks().end(), task) == known_tasks().end()) {
            std::string all;
            for (const auto& t : known_tasks()) all += (all.empty() ? "" : ", ") + t;
            throw InputError("config: /task: unknown task '" + task + "' (known: " + all + ")");
        }
        for (const auto& [k, v] : tolerances) {
            if (!default_tolerances().count(k)) throw InputError("config: /tolerances/" + k + ": unknown tolerance");
            if (!(v > 0.0) || !std::isfinite(v)) throw InputError("config: /tolerances/" + k + ": must be positive");
        }
        if (tol("solver") > tol("certificate"))
            throw InputError("config: /tolerances: conflict, solver tolerance exceeds the certificate tolerance");
        if (tol("solver") > tol("boundary"))
            throw InputError("config: /tolerances: conflict, solver tolerance exceeds the boundary tolerance");
        for (std::size_t i = 1; i < schedule.size(); ++i)
            if (!(schedule[i] > schedule[i - 1])) throw InputError("config: /schedule: must be strictly increasing");
        for (std::size_t i = 0; i < schedule.size(); ++i)
            if (!(schedule[i] > 0.0)) throw InputError("config: /schedule/" + std::to_string(i) + ": must be positive");
        for (const auto& [k, v] : parameters)
            if (!std::isfinite(v)) throw InputError("config: /parameters/" + k + ": not finite");
    }
};

inline Json to_json(const RunConfig& c) {
    Json j;
    j["task"] = c.task;
    j["metric"] = c.metric;
    j["inputs"] = Json::object();
    for (const auto& [k, v] : c.inputs) j["inputs"][k] = v;
    j["parameters"] = Json::object();
    for (const auto& [k, v] : c.parameters) j["parameters"][k] = v;
    j["tolerances"] = Json::object();
    for (const auto& [k, v] : c.tolerances) j["tolerances"][k] = v;
    j["schedule"] = c.schedule;
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    return j;
}

inline RunConfig config_from_json(const Json& j, const std::string& source = "config") {
    const io::detail::Reader rd{source};
    if (!j.is_object()) throw io::field_error(source, "", "expected a JSON object");
    static const std::set<std::string> keys{"task",     "metric",   "inputs",     "parameters",
                                            "tolerances", "schedule", "output_dir", "seed"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!keys.count(it.key())) throw io::field_error(source, "/" + it.key(), "unknown field");
    RunConfig c;
    c.task = rd.string(rd.need(j, "", "task"), "/task");
    if (j.contains("metric")) c.metric = rd.string(j["metric"], "/metric");
    auto dict = [&](const char* key, auto&& put) {
        if (!j.contains(key)) return;
        const Json& d = j[key];
        if (!d.is_object()) throw io::field_error(source, std::string("/") + key, "expected an object");
        for (auto it = d.begin(); it != d.end(); ++it) put(it.key(), it.value(), std::string("/") + key + "/" + it.key());
    };
    dict("inputs", [&](const std::string& k, const Json& v, const std::string& p) { c.inputs[k] = rd.string(v, p); });
    dict("parameters", [&](const std::string& k, const Json& v, const std::string& p) { c.parameters[k] = rd.number(v, p); });
    dict("tolerances", [&](const std::string& k, const Json& v, const std::string& p) { c.tolerances[k] = rd.number(v, p); });
    if (j.contains("schedule")) c.schedule = rd.numbers(j["schedule"], "/schedule");
    if (j.contains("output_dir")) c.output_dir = rd.string(j["output_dir"], "/output_dir");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw io::field_error(source, "/seed", "expected a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    try {
        c.validate();
    } catch (const InputError& e) {
        throw InputError(source + ": " + e.what());
    }
    return c;
}

inline RunConfig load_config(const std::string& path) { return config_from_json(io::read_json_file(path), path); }

/// Plot-ready series: y (and optional error) against a named abscissa.
struct Series {
    std::string abscissa;
    std::vector<double> x, y;
    std::vector<double> error;
};

struct InputHash {
    std::string role, path, sha1;
};

struct ResultEnvelope {
    RunConfig config;
    std::string config_hash;
    std::vector<InputHash> inputs;
    Json outputs = Json::object();
    std::map<std::string, Series> series;
    std::map<std::string, std::string> files; ///< file name -> content written next to the envelope
    double wall_clock_seconds = 0.0;
    std::vector<std::string> warnings;
    std::string status = "ok";
    int exit_code = 0;
    std::string error;
};

inline Json to_json(const Series& s) {
    Json j{{"abscissa", s.abscissa}, {"x", s.x}, {"y", s.y}};
    if (!s.error.empty()) j["error"] = s.error;
    return j;
}

inline Json to_json(const ResultEnvelope& e) {
    Json j;
    j["schema"] = "ahspec-result/1";
    j["status"] = e.status;
    j["exit_code"] = e.exit_code;
    if (!e.error.empty()) j["error"] = e.error;
    j["config"] = to_json(e.config);
    j["config_hash"] = e.config_hash;
    Json in = Json::array();
    for (const auto& h : e.inputs) in.push_back(Json{{"role", h.role}, {"path", h.path}, {"sha1", h.sha1}});
    j["inputs"] = in;
    j["outputs"] = e.outputs;
    j["series"] = Json::object();
    for (const auto& [k, s] : e.series) j["series"][k] = to_json(s);
    Json files = Json::array();
    for (const auto& [name, content] : e.files) files.push_back(Json{{"name", name}, {"sha1", io::git_blob_sha1(content)}});
    j["files"] = files;
    j["wall_clock_seconds"] = e.wall_clock_seconds;
    j["warnings"] = e.warnings;
    return j;
}

namespace detail {

inline void need_metric(const RunConfig& c) {
    if (c.metric.empty()) throw InputError("config: /metric: task '" + c.task + "' needs a metric file");
}

inline void only_parameters(const RunConfig& c, std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : c.parameters) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw InputError("config: /parameters/" + k + ": not a parameter of task '" + c.task + "'");
    }
}

inline geometry::WarpedMetric load_input_metric(const RunConfig& c, ResultEnvelope& env) {
    need_metric(c);
    env.inputs.push_back({"metric", c.metric, io::git_blob_sha1(io::read_file(c.metric))});
    return io::load_metric(c.metric);
}

inline std::string input_file(const RunConfig& c, ResultEnvelope& env, const std::string& role) {
    auto it = c.inputs.find(role);
    if (it == c.inputs.end()) throw InputError("config: /inputs/" + role + ": task '" + c.task + "' needs this file");
    env.inputs.push_back({role, it->second, io::git_blob_sha1(io::read_file(it->second))});
    return it->second;
}

inline Series series_of(std::string abscissa, const std::vector<double>& x, const std::vector<double>& y,
                        std::vector<double> err = {}) {
    return Series{std::move(abscissa), x, y, std::move(err)};
}

inline double default_scale(const geometry::WarpedMetric& g) { return geometry::conformal_infinity(g).scale; }

inline spectral::GrowthEigenfunction growth(const RunConfig& c, const geometry::WarpedMetric& g) {
    spectral::EigenfunctionOptions eo;
    eo.solver_tol = c.tol("solver");
    const double scale = c.param("scale").value_or(default_scale(g));
    return spectral::solve_growth_eigenfunction(g, scale, eo);
}

inline void task_indicial(const RunConfig& c, ResultEnvelope& env) {
    only_parameters(c, {"n", "kappa", "s"});
    const int n = c.need_int("n");
    const double kappa = c.need("kappa");
    const auto d = indicial::indicial_roots(n, kappa);
    env.outputs = io::to_json(d);
    if (auto s = c.param("s")) {
        env.outputs["s"] = *s;
        env.outputs["admissible"] = indicial::weight_admissible(*s, n, kappa);
    }
}

inline void task_sullivan(const RunConfig& c, ResultEnvelope& env) {
    only_parameters(c, {"n", "d"});
    const int n = c.need_int("n");
    const double d = c.need("d");
    env.outputs = Json{{"n", n}, {"d", d}, {"lambda0", spectral::sullivan_lambda0(n, d)},
                       {"regime", d > 0.5 * n ? "d(n-d)" : "threshold n^2/4"}};
}

inline void task_lambda0(const RunConfig& c, ResultEnvelope& env) {
    only_parameters(c, {"scan_points", "shooting"});
    const auto g = load_input_metric(c, env);
    spectral::Lambda0Options opt;
    if (!c.schedule.empty()) opt.schedule.T = c.schedule;
    opt.monotone_tol = c.tol("monotone");
    if (auto sp = c.param("scan_points")) opt.shoot.scan_points = static_cast<std::size_t>(c.need_int("scan_points"));
    if (auto sh = c.param("shooting")) opt.shooting = *sh != 0.0;
    const auto rep = spectral::lambda0_estimate(g, opt);
    env.outputs = io::to_json(rep);
    env.series["dirichlet"] = series_of("T", rep.truncations, rep.dirichlet, rep.dirichlet_errors);
    io::Table t{{"T", "dirichlet", "error"}, {}};
    for (std::size_t i = 0; i < rep.truncations.size(); ++i)
        t.add({io::format_double(rep.truncations[i]), io::format_double(rep.dirichlet[i]),
               io::format_double(rep.dirichlet_errors[i])});
    env.files["lambda0.csv"] = t.csv();
    if (!rep.discrete_eigenvalues.empty())
        env.warnings.push_back("discrete spectrum below n^2/4: lambda_0 is the lowest eigenvalue " +
                               io::format_double(rep.discrete_eigenvalues.front().value));
}

inline void eigenfunction_outputs(const RunConfig& c, const spectral::GrowthEigenfunction& ge, ResultEnvelope& env) {
    spectral::BoundaryLimitOptions bo;
    bo.tol = c.tol("boundary");
    const auto vl = spectral::boundary_v_limit(ge, bo);
    const auto gd = spectral::gradient_defect_boundary(ge, bo);
    spectral::SubharmonicityOptions so;
    so.tol = c.tol("identity");
    so.boundary = bo;
    const auto sh = spectral::subharmonicity_check(ge, so);
    env.outputs = Json{{"eigenfunction", io::summary_json(ge)},
                       {"v_limit", io::to_json(vl)},
                       {"gradient_defect", io::to_json(gd)},
                       {"subharmonicity", io::summary_json(sh)}};
    env.series["u"] = series_of("t", ge.t, ge.u);
    env.series["v"] = series_of("t", ge.t, ge.v);
    env.series["G"] = series_of("t", ge.t, ge.G);
    io::Table t{{"t", "u", "v", "G"}, {}};
    for (std::size_t i = 0; i < ge.t.size(); ++i)
        t.add({io::format_double(ge.t[i]), io::format_double(ge.u[i]), io::format_double(ge.v[i]), io::format_double(ge.G[i])});
    env.files["eigenfunction.csv"] = t.csv();
    for (const auto* b : {&vl, &gd}) {
        if (b->inconclusive) env.warnings.push_back("boundary limit inconclusive: " + b->note);
        else if (!b->note.empty()) env.warnings.push_back(b->note);
    }
    for (const auto& w : sh.warnings) env.warnings.push_back(w);
}

inline void task_eigenfunction(const RunConfig& c, ResultEnvelope& env) {
    only_parameters(c, {"scale"});
    const auto g = load_input_metric(c, env);
    eigenfunction_outputs(c, growth(c, g), env);
}

inline void task_certify(const RunConfig& c, ResultEnvelope& env) {
    only_parameters(c, {"s", "scale"});
    const auto g = load_input_metric(c, env);
    const double s = c.need("s");
    const auto ge = growth(c, g);
    const auto cert = spectral::certificate_lower_bound(ge, s, c.tol("certificate"));
    env.outputs = Json{{"certificate", io::to_json(cert)}, {"eigenfunction", io::summary_json(ge)}};
    std::vector<double> ratio(ge.t.size());
    for (std::size_t i = 0; i < ratio.size(); ++i) ratio[i] = ge.du[i] * ge.du[i] / (ge.u[i] * ge.u[i]);
    env.series["gradient_ratio"] = series_of("t", ge.t, ratio);
    if (!cert.success) env.warnings.push_back("certificate did not succeed: " + cert.condition);
}

inline void task_einstein_shoot(const RunConfig& c, ResultEnvelope& env) {
    only_parameters(c, {"param", "t_max", "spacing"});
    const double d = c.need("param");
    const double t_max = c.param_or("t_max", 22.0), h = c.param_or("spacing", 0.01);
    if (!(t_max > 1.0) || !(h > 0.0) || h > 0.1)
        throw InputError("config: /parameters: need t_max > 1 and 0 < spacing <= 0.1");
    einstein::ShootOptions so;
    so.residual_tol = c.tol("identity");
    const auto p = einstein::shoot_biaxial_einstein(3, d, geometry::default_grid(t_max, h), so);
    env.outputs = io::summary_json(p);
    const auto& pr = p.metric.profiles();
    const auto t = p.metric.grid().points();
    const std::vector<double> tv(t.begin(), t.end());
    env.series["a"] = series_of("t", tv, pr[0].f);
    env.series["c"] = series_of("t", tv, pr[1].f);
    io::Table tab{{"t", "a", "da", "c", "dc"}, {}};
    for (std::size_t i = 0; i < tv.size(); ++i)
        tab.add({io::format_double(tv[i]), io::format_double(pr[0].f[i]), io::format_double((*pr[0].df)[i]),
                 io::format_double(pr[1].f[i]), io::format_double((*pr[1].df)[i])});
    env.files["einstein.csv"] = tab.csv();
    env.files["profile.metric.json"] = io::metric_to_json(p.metric).dump(1) + "\n";
    if (!p.ah.passed) env.warnings.push_back("AH diagnostic failed on the outer collar");
    if (p.einstein_residual > so.residual_tol)
        env.warnings.push_back("Einstein residual " + io::format_double(p.einstein_residual) + " above tolerance");
}

inline void task_sweep(const RunConfig& c, ResultEnvelope& env) {
    only_parameters(c, {"t_max", "spacing"});
    const std::string path = input_file(c, env, "schedule");
    const Json sj = io::read_json_file(path);
    const io::detail::Reader rd{path};
    const auto params = rd.numbers(rd.need(sj, "", "shoot_parameters"), "/shoot_parameters");
    einstein::SweepOptions opt;
    opt.t_max = c.param_or("t_max", opt.t_max);
    opt.spacing = c.param_or("spacing", opt.spacing);
    if (!c.schedule.empty()) opt.lambda0.schedule.T = c.schedule;
    if (opt.lambda0.schedule.T.back() > opt.t_max)
        throw InputError("config: /schedule: truncation radii exceed t_max = " + io::format_double(opt.t_max));
    opt.lambda0.monotone_tol = c.tol("monotone");
    opt.certificate_tol = c.tol("certificate");
    opt.shoot.residual_tol = c.tol("identity");
    const auto table = einstein::pedersen_sweep(params, opt);
    env.outputs = io::to_json(table);
    Series lam{"berger_t", {}, {}, {}}, rhat{"berger_t", {}, {}, {}};
    for (const auto& r : table.rows) {
        lam.x.push_back(r.berger_t.value);
        lam.y.push_back(r.lambda0.value);
        lam.error.push_back(r.lambda0.error);
        rhat.x.push_back(r.berger_t.value);
        rhat.y.push_back(r.boundary_scalar);
        if (!r.eigenvalues_below.empty() && r.yamabe != geometry::Sign::Negative)
            env.warnings.push_back("finding: eigenvalue below n^2/4 at berger_t = " + io::format_double(r.berger_t.value) +
                                   " with yamabe sign " + geometry::to_string(r.yamabe));
        if (!r.identities_ok)
            env.warnings.push_back("boundary identities incoherent at shoot parameter " + io::format_double(r.shoot_parameter));
    }
    env.series["lambda0"] = lam;
    env.series["boundary_scalar"] = rhat;
    env.files["sweep.csv"] = io::sweep_table(table).csv();
    for (const auto& f : table.failures)
        env.warnings.push_back("shoot parameter " + io::format_double(f.shoot_parameter) + " rejected (" + f.branch +
                               "): " + f.message);
}

inline void task_flow_check(const RunConfig& c, ResultEnvelope& env) {
    only_parameters(c, {"alpha", "t", "pairs", "min_gap", "max_gap"});
    const std::string path = input_file(c, env, "field");
    auto spec = io::parse_field(io::read_json_file(path), path);
    if (auto a = c.param("alpha")) spec.alpha = *a;
    const auto f = io::make_field(spec, path);
    const double t = c.param_or("t", 1.0);
    const int count = c.param("pairs") ? c.need_int("pairs") : 100;
    if (count < 1) throw InputError("config: /parameters/pairs: must be >= 1");
    const double lo = c.param_or("min_gap", 1e-6), hi = c.param_or("max_gap", 1e-2);
    if (!(lo > 0.0 && hi > lo)) throw InputError("config: /parameters: need 0 < min_gap < max_gap");
    gauge::HolderOptions ho;
    ho.ratio_tol = c.tol("holder_ratio");
    ho.ode_tol = c.tol("ode");
    const auto pairs = gauge::straddling_pairs(static_cast<std::size_t>(count), lo, hi, c.seed);
    const auto rep = gauge::flow_holder_check(f, t, pairs, ho);
    const auto ex = gauge::empirical_holder_exponent(f, t);
    env.outputs = io::to_json(rep);
    env.outputs["expression"] = spec.expression;
    if (std::isfinite(ex.exponent)) {
        env.outputs["empirical_exponent"] = ex.exponent;
    } else {
        env.outputs["empirical_exponent"] = Json();
        env.outputs["exponent_note"] = "flow derivative identical across 0: no measurable Holder modulus";
    }
    env.series["derivative_gap"] = series_of("distance", ex.gaps, ex.differences);
    Series ratios{"pair", {}, {}, {}};
    for (std::size_t i = 0; i < rep.pairs.size(); ++i) {
        ratios.x.push_back(static_cast<double>(i));
        ratios.y.push_back(rep.pairs[i].ratio);
    }
    env.series["pair_ratio"] = ratios;
    if (!rep.bound_holds) env.warnings.push_back("Hölder bound violated: worst ratio " + io::format_double(rep.worst_ratio));
}

} // namespace detail

/// Dispatches the task. Throws InputError / NumericalDiagnostic.
inline ResultEnvelope run(const RunConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    ResultEnvelope env;
    env.config = config;
    env.config_hash = io::git_blob_sha1(to_json(config).dump());
    const std::string& t = config.task;
    if (t == "indicial") detail::task_indicial(config, env);
    else if (t == "sullivan") detail::task_sullivan(config, env);
    else if (t == "lambda0") detail::task_lambda0(config, env);
    else if (t == "eigenfunction") detail::task_eigenfunction(config, env);
    else if (t == "certify") detail::task_certify(config, env);
    else if (t == "einstein-shoot") detail::task_einstein_shoot(config, env);
    else if (t == "sweep") detail::task_sweep(config, env);
    else if (t == "flow-check") detail::task_flow_check(config, env);
    env.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return env;
}

inline constexpr int exit_ok = 0, exit_input = 1, exit_numeric = 2;

/// run() with errors folded into the envelope and the exit code.
inline ResultEnvelope execute(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    auto failed = [&](const char* status, int code, const std::exception& e) {
        ResultEnvelope env;
        env.config = config;
        env.config_hash = io::git_blob_sha1(to_json(config).dump());
        env.status = status;
        env.exit_code = code;
        env.error = e.what();
        env.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return env;
    };
    try {
        return run(config);
    } catch (const InputError& e) {
        return failed("input_error", exit_input, e);
    } catch (const NumericalDiagnostic& e) {
        return failed("numerical_diagnostic", exit_numeric, e);
    } catch (const std::invalid_argument& e) {
        return failed("input_error", exit_input, e);
    } catch (const std::exception& e) {
        return failed("numerical_diagnostic", exit_numeric, e);
    }
}

/// Writes envelope.json and the envelope's files into config.output_dir.
inline void write_outputs(const ResultEnvelope& env) {
    namespace fs = std::filesystem;
    const fs::path dir = env.config.output_dir;
    if (dir.empty()) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("config: /output_dir: cannot create '" + dir.string() + "': " + ec.message());
    auto put = [&](const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw InputError("config: /output_dir: cannot write '" + (dir / name).string() + "'");
        out << content;
    };
    for (const auto& [name, content] : env.files) put(name, content);
    put("envelope.json", to_json(env).dump(2) + "\n");
}

/// Two- or three-column CSV of a stored series.
inline std::string emit_plot_data(const Json& envelope, const std::string& quantity) {
    const Json* series = envelope.contains("series") && envelope["series"].is_object() ? &envelope["series"] : nullptr;
    if (!series || !series->contains(quantity)) {
        std::string avail;
        if (series)
            for (auto it = series->begin(); it != series->end(); ++it) avail += (avail.empty() ? "" : ", ") + it.key();
        throw InputError("plot-data: quantity '" + quantity + "' not in envelope (available: " +
                         (avail.empty() ? "none" : avail) + ")");
    }
    const Json& s = (*series)[quantity];
    const auto x = s.at("x").get<std::vector<double>>(), y = s.at("y").get<std::vector<double>>();
    const bool has_err = s.contains("error");
    const auto err = has_err ? s["error"].get<std::vector<double>>() : std::vector<double>{};
    io::Table t{{s.at("abscissa").get<std::string>(), quantity}, {}};
    if (has_err) t.columns.push_back("error");
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<std::string> row{io::format_double(x[i]), io::format_double(y[i])};
        if (has_err) row.push_back(io::format_double(err[i]));
        t.add(std::move(row));
    }
    return t.csv();
}

inline std::string emit_plot_data(const ResultEnvelope& env, const std::string& quantity) {
    return emit_plot_data(to_json(env), quantity);
}

} // namespace ahspec::cli
