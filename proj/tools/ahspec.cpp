// ahspec: command-line front end for the batch driver.
//
// Every subcommand builds a RunConfig (optionally starting from --config) and
// prints the result envelope as JSON; with --out it also writes the envelope
// and CSV tables to that directory. Exit codes: 0 ok, 1 input error,
// 2 numerical diagnostic.

#include "ahspec/cli/driver.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace ahspec;

namespace {

struct Common {
    std::string config_path;
    std::string out;
    std::vector<std::string> tolerances; // name=value
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "start from this RunConfig JSON");
    sub->add_option("--out", c.out, "output directory for envelope.json and CSV tables");
    sub->add_option("--tol", c.tolerances, "tolerance override name=value (repeatable)");
    sub->add_option("--seed", c.seed, "seed for randomized sampling");
    sub->add_flag("--quiet", c.quiet, "do not print the envelope");
}

cli::RunConfig base_config(const Common& c, const std::string& task) {
    cli::RunConfig cfg;
    if (!c.config_path.empty()) {
        cfg = cli::load_config(c.config_path);
        if (task != "run" && cfg.task != task)
            throw InputError(c.config_path + ": /task: is '" + cfg.task + "' but the subcommand is '" + task + "'");
    }
    if (task != "run") cfg.task = task;
    if (!c.out.empty()) cfg.output_dir = c.out;
    if (c.seed) cfg.seed = *c.seed;
    for (const auto& kv : c.tolerances) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw InputError("--tol: expected name=value, got '" + kv + "'");
        try {
            cfg.tolerances[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw InputError("--tol: '" + kv.substr(eq + 1) + "' is not a number");
        }
    }
    return cfg;
}

int finish(const cli::ResultEnvelope& env, bool quiet) {
    try {
        cli::write_outputs(env);
    } catch (const InputError& e) {
        std::cerr << "ahspec: " << e.what() << "\n";
        return cli::exit_input;
    }
    if (!quiet) std::cout << cli::to_json(env).dump(2) << "\n";
    if (env.exit_code != 0) std::cerr << "ahspec: " << env.status << ": " << env.error << "\n";
    for (const auto& w : env.warnings) std::cerr << "ahspec: warning: " << w << "\n";
    return env.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ahspec: spectra and growth eigenfunctions of asymptotically hyperbolic warped metrics"};
    app.require_subcommand(1);

    Common common;
    std::map<std::string, std::optional<double>> p; // parameter flags, set when given
    std::string metric, field, sweep_schedule;
    std::vector<double> schedule;

    auto param = [&](CLI::App* sub, const std::string& name, const std::string& help) {
        p[name];
        sub->add_option("--" + name, p[name], help);
    };

    auto* ind = app.add_subcommand("indicial", "indicial roots and weight admissibility");
    param(ind, "n", "boundary dimension");
    param(ind, "kappa", "spectral shift in Delta + kappa");
    param(ind, "s", "weight to test");

    auto* lam = app.add_subcommand("lambda0", "bottom of the L2 spectrum");
    lam->add_option("--metric", metric, "metric JSON file");
    lam->add_option("--schedule", schedule, "truncation radii (increasing)");
    param(lam, "scan_points", "shooting scan resolution below n^2/4");

    auto* sul = app.add_subcommand("sullivan", "d(n-d) for d > n/2, else n^2/4");
    param(sul, "n", "boundary dimension");
    param(sul, "d", "limit-set dimension");

    auto* eig = app.add_subcommand("eigenfunction", "growth eigenfunction, v and G fields");
    eig->add_option("--metric", metric, "metric JSON file");
    param(eig, "scale", "C in r = C e^{-t} (default: conformal-infinity gauge)");

    auto* cer = app.add_subcommand("certify", "test-function lower bound for lambda_0");
    cer->add_option("--metric", metric, "metric JSON file");
    param(cer, "s", "exponent of phi = u^{-s}");
    param(cer, "scale", "C in r = C e^{-t}");

    auto* ein = app.add_subcommand("einstein-shoot", "biaxial Einstein profile from the pole");
    param(ein, "param", "pole parameter delta");
    param(ein, "t_max", "outer radius");
    param(ein, "spacing", "grid spacing");

    auto* swp = app.add_subcommand("sweep", "Berger-boundary Einstein sweep");
    swp->add_option("--schedule", sweep_schedule, "JSON file with shoot_parameters");
    swp->add_option("--truncations", schedule, "lambda_0 truncation radii");
    param(swp, "t_max", "outer radius");
    param(swp, "spacing", "grid spacing");

    auto* flo = app.add_subcommand("flow-check", "Holder bound for the flow derivative");
    flo->add_option("--field", field, "field JSON file");
    param(flo, "alpha", "Holder exponent (overrides the file)");
    param(flo, "t", "flow time");
    param(flo, "pairs", "number of random point pairs");

    auto* run = app.add_subcommand("run", "execute a RunConfig file");

    std::string envelope_path, quantity, plot_out;
    auto* plt = app.add_subcommand("plot-data", "CSV series from an envelope");
    plt->add_option("--envelope", envelope_path, "envelope.json")->required();
    plt->add_option("--quantity", quantity, "series name")->required();
    plt->add_option("--out", plot_out, "write CSV here instead of stdout");

    for (auto* sub : {ind, lam, sul, eig, cer, ein, swp, flo, run}) add_common(sub, common);
    run->get_option("--config")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::exit_input;
    }

    try {
        if (plt->parsed()) {
            const auto csv = cli::emit_plot_data(io::read_json_file(envelope_path), quantity);
            if (plot_out.empty()) {
                std::cout << csv;
            } else {
                std::ofstream out(plot_out, std::ios::binary);
                if (!out) throw InputError("plot-data: cannot write '" + plot_out + "'");
                out << csv;
            }
            return 0;
        }
        CLI::App* sub = app.get_subcommands().front();
        auto cfg = base_config(common, sub->get_name());
        if (!metric.empty()) cfg.metric = metric;
        if (!field.empty()) cfg.inputs["field"] = field;
        if (!sweep_schedule.empty()) cfg.inputs["schedule"] = sweep_schedule;
        if (!schedule.empty()) cfg.schedule = schedule;
        for (const auto& [name, v] : p)
            if (v && sub->get_option_no_throw("--" + name)) cfg.parameters[name] = *v;
        return finish(cli::execute(cfg), common.quiet);
    } catch (const InputError& e) {
        std::cerr << "ahspec: input error: " << e.what() << "\n";
        return cli::exit_input;
    } catch (const NumericalDiagnostic& e) {
        std::cerr << "ahspec: numerical diagnostic: " << e.what() << "\n";
        return cli::exit_numeric;
    }
}
