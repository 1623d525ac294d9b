// Command-line front end: scenario parsing, command dispatch, and CSV/JSON
// emission for spectra, classifications, sweeps, trajectories, and
// bifurcation tables.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cnb/cli.hpp"

namespace {

struct CommonFlags {
    std::string scenario_path;
    int n = 0;
    double alpha = 0.0;
    std::vector<double> masses;
    std::vector<double> phi;
    std::vector<double> theta;
    double dt = 0.0;
    double T = 0.0;
    int stride = 0;
    long long seed = -1;
    std::string format = "json";
    std::string out_path;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--scenario", f.scenario_path, "JSON scenario file; flags override it");
    cmd->add_option("--n", f.n, "number of bodies");
    cmd->add_option("--alpha", f.alpha, "angular velocity (rad/time)");
    cmd->add_option("--masses", f.masses, "masses (defaults to uniform)")->delimiter(',');
    cmd->add_option("--phi", f.phi, "explicit phi angles in radians")->delimiter(',');
    cmd->add_option("--theta", f.theta, "explicit theta angles in radians")->delimiter(',');
    cmd->add_option("--dt", f.dt, "integrator step size");
    cmd->add_option("--T", f.T, "integration horizon");
    cmd->add_option("--stride", f.stride, "sample stride in steps");
    cmd->add_option("--seed", f.seed, "seed for random perturbations");
    cmd->add_option("--format", f.format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", f.out_path, "write output to this path instead of stdout");
}

// Merge the scenario file (if any) with command-line overrides, then run the
// shared validation.
cnb::cli::Scenario build_scenario(const CLI::App* cmd, const CommonFlags& f) {
    nlohmann::json doc = nlohmann::json::object();
    if (!f.scenario_path.empty()) {
        std::ifstream in(f.scenario_path);
        if (!in) throw cnb::ParseError("cannot open scenario file '" + f.scenario_path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            doc = nlohmann::json::parse(ss.str());
        } catch (const nlohmann::json::parse_error& e) {
            throw cnb::ParseError(e.what());
        }
        if (!doc.is_object()) throw cnb::ValidationError("scenario must be a JSON object");
    }
    if (cmd->count("--n")) doc["n"] = f.n;
    if (cmd->count("--alpha")) doc["alpha"] = f.alpha;
    if (cmd->count("--masses")) doc["masses"] = f.masses;
    if (cmd->count("--phi")) doc["phi"] = f.phi;
    if (cmd->count("--theta")) doc["theta"] = f.theta;
    if (cmd->count("--dt")) doc["integrator"]["dt"] = f.dt;
    if (cmd->count("--T")) doc["integrator"]["T"] = f.T;
    if (cmd->count("--stride")) doc["integrator"]["sample_stride"] = f.stride;
    if (cmd->count("--seed")) doc["seed"] = f.seed;
    return cnb::cli::scenario_from_json(doc);
}

int emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write to '" << out_path << "'\n";
        return 1;
    }
    out << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regular polygonal equilibria of the curved n-body problem on the sphere: "
                 "spectra, stability thresholds, and constrained simulation"};
    app.require_subcommand(1);

    const std::vector<std::string> commands = {"polygon", "verify",   "spectrum", "certify",
                                               "classify", "simulate", "probe",    "masses",
                                               "bifurcate", "sweep"};
    const std::vector<std::string> help = {
        "emit the regular n-gon configuration",
        "evaluate equilibrium residuals for a configuration",
        "closed-form Gamma/Phi/Theta spectra and the critical angular velocity",
        "certify the proof-backing sequence inequalities for one n",
        "classify stability of the polygon relative equilibrium at alpha",
        "integrate the constrained equations of motion",
        "perturb the relative equilibrium and fit the shape-deviation growth rate",
        "solve the near-polygon equilibrium masses (kernel of B)",
        "tabulate the latitude-circle family alpha^2(theta)",
        "cross n-list x alpha-grid stability classifications"};

    std::vector<CommonFlags> flags(commands.size());
    std::vector<CLI::App*> subs(commands.size());
    cnb::cli::CommandOptions options;

    for (std::size_t i = 0; i < commands.size(); ++i) {
        subs[i] = app.add_subcommand(commands[i], help[i]);
        add_common_flags(subs[i], flags[i]);
    }

    // Command-specific knobs.
    CLI::App* probe = subs[6];
    probe->add_option("--epsilon", options.epsilon, "perturbation size (default 1e-6)");
    probe->add_option("--direction", options.direction,
                      "unstable-mode or random-shape")
        ->check(CLI::IsMember({"unstable-mode", "random-shape"}));
    CLI::App* simulate = subs[5];
    simulate->add_option("--epsilon", options.epsilon,
                         "seeded shape-perturbation size (with --seed)");
    CLI::App* masses_cmd = subs[7];
    masses_cmd->add_option("--perturb", options.perturb,
                           "per-angle perturbation scale for seeded draws (default 0.03)");
    CLI::App* bifurcate = subs[8];
    bifurcate->add_option("--theta-min", options.theta_min, "grid start (default 0.2)");
    bifurcate->add_option("--theta-max", options.theta_max, "grid end (default pi - 0.2)");
    bifurcate->add_option("--points", options.points, "grid size (default 99)");
    CLI::App* sweep = subs[9];
    sweep->add_option("--n-list", options.n_list, "odd body counts to sweep")->delimiter(',');
    sweep->add_option("--alphas", options.alpha_list, "alpha grid to sweep")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < commands.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        cnb::cli::Scenario scenario;
        try {
            scenario = build_scenario(subs[i], flags[i]);
        } catch (const cnb::InputError& e) {
            nlohmann::json err{{"error", {{"name", e.name()}, {"message", e.what()}}}};
            std::cout << err.dump(2) << "\n";
            return 2;
        }
        const cnb::cli::CommandResult result =
            cnb::cli::run_command(commands[i], scenario, options);
        std::string text;
        try {
            text = cnb::cli::render(commands[i], result, flags[i].format);
        } catch (const cnb::InputError& e) {
            nlohmann::json err{{"error", {{"name", e.name()}, {"message", e.what()}}}};
            std::cout << err.dump(2) << "\n";
            return 2;
        }
        if (emit(text, flags[i].out_path) != 0) return 1;
        return result.exit_code;
    }
    return 2;
}
