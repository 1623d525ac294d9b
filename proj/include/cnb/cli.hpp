#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cnb/dynamics.hpp"
#include "cnb/errors.hpp"
#include "cnb/families.hpp"
#include "cnb/geometry.hpp"
#include "cnb/potential.hpp"
#include "cnb/reduction.hpp"
#include "cnb/spectra.hpp"

namespace cnb::cli {

using json = nlohmann::json;

// Validated input for a single command. Defaults: uniform masses, the
// regular polygon shape, dt = 1e-3, T = 100.
struct Scenario {
    int n = 0;
    std::optional<std::vector<double>> masses;
    std::optional<std::vector<double>> phi;
    std::optional<std::vector<double>> theta;
    std::optional<double> alpha;
    IntegratorConfig integrator;
    std::optional<std::uint64_t> seed;

    MassVector mass_vector() const {
        if (masses) return MassVector(*masses);
        return MassVector::uniform(n);
    }

    std::vector<double> phi_or_polygon() const {
        if (phi) return *phi;
        return regular_polygon(n).phi;
    }

    std::vector<double> theta_or_equator() const {
        if (theta) return *theta;
        return std::vector<double>(n, kPi / 2.0);
    }
};

namespace detail {

inline std::vector<double> number_list(const json& j, const std::string& field) {
    if (!j.is_array()) throw ValidationError("field '" + field + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : j) {
        if (!x.is_number()) throw ValidationError("field '" + field + "' must contain numbers only");
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace detail

inline Scenario scenario_from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("scenario must be a JSON object");
    static const std::vector<std::string> known = {"n",     "masses",     "phi", "theta",
                                                   "alpha", "integrator", "seed"};
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        bool ok = false;
        for (const auto& k : known) ok = ok || (k == key);
        if (!ok) throw ValidationError("unknown field '" + key + "' in scenario");
    }

    Scenario s;
    if (!doc.contains("n") || !doc["n"].is_number_integer())
        throw ValidationError("scenario requires an integer field 'n'");
    s.n = doc["n"].get<int>();
    if (s.n < 2) throw ValidationError("n must be at least 2");

    if (doc.contains("masses")) {
        s.masses = detail::number_list(doc["masses"], "masses");
        if (static_cast<int>(s.masses->size()) != s.n)
            throw ValidationError("masses must have length n");
        for (double m : *s.masses)
            if (!(m > 0.0)) throw ValidationError("masses must be positive");
    }
    if (doc.contains("phi")) {
        s.phi = detail::number_list(doc["phi"], "phi");
        if (static_cast<int>(s.phi->size()) != s.n)
            throw ValidationError("phi must have length n");
    }
    if (doc.contains("theta")) {
        s.theta = detail::number_list(doc["theta"], "theta");
        if (static_cast<int>(s.theta->size()) != s.n)
            throw ValidationError("theta must have length n");
        for (double t : *s.theta)
            if (!(t > kPoleMargin && t < kPi - kPoleMargin))
                throw ValidationError("theta values must stay inside (0, pi) off the poles");
    }
    if (doc.contains("alpha")) {
        if (!doc["alpha"].is_number()) throw ValidationError("alpha must be a number");
        s.alpha = doc["alpha"].get<double>();
    }
    if (doc.contains("integrator")) {
        const json& ji = doc["integrator"];
        if (!ji.is_object()) throw ValidationError("integrator must be an object");
        for (const auto& [key, value] : ji.items()) {
            (void)value;
            if (key != "dt" && key != "T" && key != "sample_stride")
                throw ValidationError("unknown field 'integrator." + key + "'");
        }
        if (ji.contains("dt")) s.integrator.dt = ji["dt"].get<double>();
        if (ji.contains("T")) s.integrator.T = ji["T"].get<double>();
        if (ji.contains("sample_stride")) s.integrator.sample_stride = ji["sample_stride"].get<int>();
        if (!(s.integrator.dt > 0.0)) throw ValidationError("integrator.dt must be positive");
        if (!(s.integrator.T > 0.0)) throw ValidationError("integrator.T must be positive");
        if (s.integrator.sample_stride < 1)
            throw ValidationError("integrator.sample_stride must be >= 1");
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer() || doc["seed"].get<long long>() < 0)
            throw ValidationError("seed must be a non-negative integer");
        s.seed = doc["seed"].get<std::uint64_t>();
    }

    // Polygon-based commands need odd n; an explicit configuration lifts
    // the restriction for the ops that accept general n.
    if (s.n % 2 == 0 && !s.phi)
        throw ValidationError("even n requires an explicit phi configuration; "
                              "the regular polygon exists only for odd n");
    return s;
}

inline Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    return scenario_from_json(doc);
}

struct CommandOptions {
    std::string format = "json";  // json | csv
    double epsilon = 1e-6;
    std::string direction = "unstable-mode";
    double perturb = 0.03;  // masses command: per-angle perturbation scale
    double theta_min = 0.2;
    double theta_max = kPi - 0.2;
    int points = 99;
    std::vector<int> n_list;          // sweep
    std::vector<double> alpha_list;   // sweep
};

struct CommandResult {
    int exit_code = 0;  // 0 success, 1 domain error, 2 input error
    json payload;
};

namespace detail {

inline std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline json vec_json(const std::vector<double>& v) { return json(v); }

inline double require_alpha(const Scenario& s) {
    if (!s.alpha) throw ValidationError("this command requires 'alpha'");
    return *s.alpha;
}

inline void require_odd_n(const Scenario& s, const char* cmd) {
    if (s.n % 2 == 0)
        throw ValidationError(std::string(cmd) + " works on the regular polygon; n must be odd");
}

inline json signature_json(const SignatureCount& c) {
    return json{{"zeros", c.zeros}, {"negatives", c.negatives}, {"positives", c.positives}};
}

inline json run_polygon(const Scenario& s) {
    require_odd_n(s, "polygon");
    const SphericalConfig cfg = regular_polygon(s.n);
    const CartesianConfig cart = spherical_to_cartesian(cfg);
    json pts = json::array();
    for (const Vec4& q : cart.points) pts.push_back({q.x, q.y, q.z, q.w});
    return json{{"n", s.n},
                {"phi", cfg.phi},
                {"theta", cfg.theta},
                {"cartesian", pts},
                {"neighbor_distance", 2.0 * kPi / s.n}};
}

inline json run_verify(const Scenario& s) {
    const MassVector masses = s.mass_vector();
    const std::vector<double> phi = s.phi_or_polygon();
    SphericalConfig cfg{phi, s.theta_or_equator()};
    check_spherical_config(cfg);
    const CartesianConfig cart = spherical_to_cartesian(cfg);

    const EquilibriumResidual res = equilibrium_residual_cartesian(masses, cart);
    const std::vector<Vec4> grad = grad_cartesian(masses, cart);
    double gmax = 0.0;
    for (const Vec4& g : grad) gmax = std::max(gmax, norm(g));

    json out{{"n", s.n},
             {"cartesian_residual_max", res.max_norm},
             {"gradient_norm_max", gmax},
             {"lambda", res.lambda},
             {"is_equilibrium", res.max_norm <= kEquilibriumTol},
             {"equilibrium_tolerance", kEquilibriumTol}};
    bool equatorial = true;
    for (double t : cfg.theta) equatorial = equatorial && std::abs(t - kPi / 2.0) < 1e-12;
    if (equatorial)
        out["s1_residual_max"] = norm_inf(equilibrium_residual_s1(masses, phi));
    return out;
}

inline json run_spectrum(const Scenario& s) {
    require_odd_n(s, "spectrum");
    const SpectrumReport r = spectrum_report(s.n);
    return json{{"n", r.n},
                {"phi_angle", r.phi_angle},
                {"gamma", r.gamma},
                {"phi", r.phi_evals},
                {"theta", r.theta_evals},
                {"theta1", r.theta1},
                {"critical_alpha", r.critical_alpha},
                {"signatures",
                 json{{"phi", signature_json(r.phi_signature)},
                      {"theta", signature_json(r.theta_signature)}}}};
}

inline json run_certify(const Scenario& s) {
    require_odd_n(s, "certify");
    const CertificationRecord r = certify_sequences(s.n);
    return json{{"n", r.n},
                {"vacuous", r.vacuous},
                {"gamma_second_diff_negative", r.gamma_second_diff_negative},
                {"gamma_ends_positive", r.gamma_ends_positive},
                {"gamma_cot_identity", r.gamma_cot_identity},
                {"phi_third_diff_negative", r.phi_third_diff_negative},
                {"phi_diff_ends_positive", r.phi_diff_ends_positive},
                {"phi_ordering", r.phi_ordering},
                {"theta_third_diff_negative", r.theta_third_diff_negative},
                {"theta_diff_ends_positive", r.theta_diff_ends_positive},
                {"theta_ordering", r.theta_ordering},
                {"theta1_positive", r.theta1_positive},
                {"worst_margin", r.worst_margin},
                {"all_passed", r.all_passed}};
}

inline json run_classify(const Scenario& s) {
    require_odd_n(s, "classify");
    const StabilityClassification c = classify_stability(s.n, require_alpha(s));
    return json{{"n", c.n},
                {"alpha", c.alpha},
                {"alpha_sq", c.alpha_sq},
                {"theta1", c.theta1},
                {"critical_alpha", c.critical_alpha},
                {"s1_verdict", to_string(c.s1)},
                {"s2_verdict", to_string(c.s2)},
                {"h1_positive_definite", c.h1_positive_definite},
                {"h2_positive_definite", c.h2_positive_definite}};
}

inline json trajectory_json(const MassVector& masses, const TrajectoryRecord& rec) {
    json rows = json::array();
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const SphericalState ss = phase_to_spherical(masses, rec.samples[i]);
        json row{{"t", rec.times[i]},
                 {"phi", ss.phi},
                 {"theta", ss.theta},
                 {"p_phi", ss.p_phi},
                 {"p_theta", ss.p_theta},
                 {"H", hamiltonian(masses, rec.samples[i])},
                 {"J2", momentum_J2(rec.samples[i])},
                 {"shape_deviation", rec.shape_deviation(i)}};
        rows.push_back(std::move(row));
    }
    return json{{"samples", rows},
                {"energy_drift", rec.energy_drift},
                {"momentum_drift", rec.momentum_drift},
                {"max_constraint_violation", rec.max_constraint_violation},
                {"max_shape_deviation", rec.max_shape_deviation()},
                {"aborted", rec.aborted},
                {"abort_reason", rec.abort_reason}};
}

inline json run_simulate(const Scenario& s, const CommandOptions& opt) {
    const MassVector masses = s.mass_vector();
    const double alpha = s.alpha.value_or(0.0);

    SphericalState s0;
    s0.phi = s.phi_or_polygon();
    s0.theta = s.theta_or_equator();
    s0.p_theta.assign(s.n, 0.0);
    s0.p_phi.resize(s.n);
    for (int i = 0; i < s.n; ++i) s0.p_phi[i] = masses[i] * alpha;

    if (s.seed) {
        std::mt19937_64 rng(*s.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> dphi(s.n), dtheta(s.n);
        double nrm = 0.0;
        for (int i = 0; i < s.n; ++i) {
            dphi[i] = gauss(rng);
            dtheta[i] = gauss(rng);
            nrm += dphi[i] * dphi[i] + dtheta[i] * dtheta[i];
        }
        nrm = std::sqrt(nrm);
        for (int i = 0; i < s.n; ++i) {
            s0.phi[i] += opt.epsilon * dphi[i] / nrm;
            s0.theta[i] += opt.epsilon * dtheta[i] / nrm;
        }
    }

    check_spherical_config(SphericalConfig{s0.phi, s0.theta});
    // Purely equatorial scenarios get exact-zero z so the S^1 invariant
    // manifold survives the chart conversion.
    const bool equatorial = !s.theta.has_value() && !s.seed.has_value();
    const PhaseState start = equatorial ? equatorial_phase_state(s0.phi, s0.p_phi)
                                        : spherical_to_phase(masses, s0);
    const TrajectoryRecord rec = integrate(masses, start, s.integrator);
    json out = trajectory_json(masses, rec);
    out["n"] = s.n;
    out["alpha"] = alpha;
    return out;
}

inline json run_probe(const Scenario& s, const CommandOptions& opt) {
    require_odd_n(s, "probe");
    ProbeDirection dir;
    if (opt.direction == "unstable-mode")
        dir = ProbeDirection::UnstableMode;
    else if (opt.direction == "random-shape")
        dir = ProbeDirection::RandomShape;
    else
        throw ValidationError("direction must be 'unstable-mode' or 'random-shape'");
    const ProbeReport r = stability_probe(s.n, require_alpha(s), opt.epsilon, dir,
                                          s.integrator, s.seed.value_or(0));
    return json{{"n", r.n},
                {"alpha", r.alpha},
                {"epsilon", r.epsilon},
                {"direction", to_string(r.direction)},
                {"verdict", to_string(r.verdict)},
                {"fitted_rate", r.fitted_rate},
                {"predicted_rate", r.predicted_rate},
                {"max_deviation", r.max_deviation},
                {"fit_window_t0", r.fit_window_t0},
                {"fit_window_t1", r.fit_window_t1},
                {"fit_points", r.fit_points},
                {"energy_drift", r.energy_drift},
                {"momentum_drift", r.momentum_drift},
                {"max_constraint_violation", r.max_constraint_violation}};
}

inline json run_masses(const Scenario& s, const CommandOptions& opt) {
    require_odd_n(s, "masses");
    std::vector<double> phi;
    if (s.phi) {
        phi = *s.phi;
    } else {
        phi = regular_polygon(s.n).phi;
        if (s.seed) {
            std::mt19937_64 rng(*s.seed);
            std::uniform_real_distribution<double> u(-opt.perturb, opt.perturb);
            for (double& x : phi) x += u(rng);
        }
    }
    const MassSolveResult r = solve_masses(phi);

    SphericalConfig cfg;
    cfg.phi = phi;
    cfg.theta.assign(s.n, kPi / 2.0);
    const std::vector<Vec4> grad =
        grad_cartesian(MassVector(r.masses), spherical_to_cartesian(cfg));
    double gmax = 0.0;
    for (const Vec4& g : grad) gmax = std::max(gmax, norm(g));

    return json{{"n", s.n},
                {"phi", phi},
                {"masses", r.masses},
                {"nullspace_dim", r.nullspace_dim},
                {"residual", r.residual},
                {"sigma_ratio", r.sigma_ratio},
                {"cartesian_gradient_norm", gmax}};
}

inline json run_bifurcate(const Scenario& s, const CommandOptions& opt) {
    require_odd_n(s, "bifurcate");
    if (opt.points < 1) throw ValidationError("bifurcate needs at least one grid point");
    if (!(opt.theta_min > 0.0 && opt.theta_max < kPi && opt.theta_min <= opt.theta_max))
        throw ValidationError("bifurcate grid must lie inside (0, pi)");
    std::vector<double> grid(opt.points);
    for (int i = 0; i < opt.points; ++i)
        grid[i] = opt.points == 1
                      ? opt.theta_min
                      : opt.theta_min + (opt.theta_max - opt.theta_min) * i / (opt.points - 1);
    const BifurcationScan scan = bifurcation_scan(s.n, grid);
    json rows = json::array();
    for (const FamilyPoint& p : scan.points)
        rows.push_back(json{{"theta", p.theta},
                            {"alpha_sq", p.alpha_sq},
                            {"alpha", std::sqrt(p.alpha_sq)},
                            {"gap_to_theta1", std::abs(p.alpha_sq - scan.theta1)}});
    return json{{"n", s.n},
                {"theta1", scan.theta1},
                {"intersection_gap", scan.intersection_gap},
                {"points", rows}};
}

inline json run_sweep(const Scenario& s, const CommandOptions& opt) {
    std::vector<int> ns = opt.n_list;
    if (ns.empty()) ns = {s.n};
    std::vector<double> alphas = opt.alpha_list;
    if (alphas.empty() && s.alpha) alphas = {*s.alpha};
    if (alphas.empty()) throw ValidationError("sweep requires an alpha list");
    for (int n : ns)
        if (n < 3 || n % 2 == 0)
            throw ValidationError("sweep n-list entries must be odd and >= 3");

    json rows = json::array();
    for (int n : ns)
        for (double a : alphas) {
            const StabilityClassification c = classify_stability(n, a);
            rows.push_back(json{{"n", n},
                                {"alpha", a},
                                {"alpha_sq", c.alpha_sq},
                                {"theta1", c.theta1},
                                {"critical_alpha", c.critical_alpha},
                                {"s1_verdict", to_string(c.s1)},
                                {"s2_verdict", to_string(c.s2)}});
        }
    return json{{"rows", rows}};
}

}  // namespace detail

inline CommandResult run_command(const std::string& command, const Scenario& scenario,
                                 const CommandOptions& options) {
    CommandResult result;
    try {
        if (command == "polygon")
            result.payload = detail::run_polygon(scenario);
        else if (command == "verify")
            result.payload = detail::run_verify(scenario);
        else if (command == "spectrum")
            result.payload = detail::run_spectrum(scenario);
        else if (command == "certify")
            result.payload = detail::run_certify(scenario);
        else if (command == "classify")
            result.payload = detail::run_classify(scenario);
        else if (command == "simulate")
            result.payload = detail::run_simulate(scenario, options);
        else if (command == "probe")
            result.payload = detail::run_probe(scenario, options);
        else if (command == "masses")
            result.payload = detail::run_masses(scenario, options);
        else if (command == "bifurcate")
            result.payload = detail::run_bifurcate(scenario, options);
        else if (command == "sweep")
            result.payload = detail::run_sweep(scenario, options);
        else
            throw ValidationError("unknown command '" + command + "'");
    } catch (const InputError& e) {
        result.exit_code = 2;
        result.payload = json{{"error", json{{"name", e.name()}, {"message", e.what()}}}};
    } catch (const DomainError& e) {
        result.exit_code = 1;
        result.payload = json{{"error", json{{"name", e.name()}, {"message", e.what()}}}};
    }
    return result;
}

namespace detail {

inline void csv_row(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
}

inline std::string csv_table(const json& rows, const std::vector<std::string>& columns) {
    std::string out;
    csv_row(out, columns);
    for (const auto& row : rows) {
        std::vector<std::string> cells;
        for (const auto& col : columns) {
            const json& v = row.at(col);
            if (v.is_number_float())
                cells.push_back(fmt17(v.get<double>()));
            else if (v.is_number_integer())
                cells.push_back(std::to_string(v.get<long long>()));
            else if (v.is_boolean())
                cells.push_back(v.get<bool>() ? "true" : "false");
            else
                cells.push_back(v.get<std::string>());
        }
        csv_row(out, cells);
    }
    return out;
}

}  // namespace detail

// Renders a successful payload per --format. Errors are always emitted as
// the machine-readable JSON object.
inline std::string render(const std::string& command, const CommandResult& result,
                          const std::string& format) {
    if (result.exit_code != 0 || format == "json") return result.payload.dump(2) + "\n";
    if (format != "csv") throw ValidationError("format must be 'json' or 'csv'");

    using detail::csv_row;
    using detail::fmt17;
    std::string out;
    const json& p = result.payload;

    if (command == "spectrum") {
        csv_row(out, {"k", "gamma", "phi", "theta"});
        for (std::size_t k = 0; k < p["gamma"].size(); ++k)
            csv_row(out, {std::to_string(k + 1), fmt17(p["gamma"][k]), fmt17(p["phi"][k]),
                          fmt17(p["theta"][k])});
        return out;
    }
    if (command == "sweep")
        return detail::csv_table(p["rows"], {"n", "alpha", "alpha_sq", "theta1",
                                             "critical_alpha", "s1_verdict", "s2_verdict"});
    if (command == "bifurcate")
        return detail::csv_table(p["points"], {"theta", "alpha_sq", "alpha", "gap_to_theta1"});
    if (command == "polygon") {
        csv_row(out, {"body", "phi", "theta", "x", "y", "z", "w"});
        for (std::size_t i = 0; i < p["phi"].size(); ++i)
            csv_row(out, {std::to_string(i + 1), fmt17(p["phi"][i]), fmt17(p["theta"][i]),
                          fmt17(p["cartesian"][i][0]), fmt17(p["cartesian"][i][1]),
                          fmt17(p["cartesian"][i][2]), fmt17(p["cartesian"][i][3])});
        return out;
    }
    if (command == "simulate") {
        const json& samples = p["samples"];
        const std::size_t n = samples.empty() ? 0 : samples[0]["phi"].size();
        std::vector<std::string> header{"t"};
        for (std::size_t i = 1; i <= n; ++i) {
            header.push_back("phi_" + std::to_string(i));
            header.push_back("theta_" + std::to_string(i));
            header.push_back("p_phi_" + std::to_string(i));
            header.push_back("p_theta_" + std::to_string(i));
        }
        header.insert(header.end(), {"H", "J2", "shape_deviation"});
        csv_row(out, header);
        for (const auto& row : samples) {
            std::vector<std::string> cells{fmt17(row["t"])};
            for (std::size_t i = 0; i < n; ++i) {
                cells.push_back(fmt17(row["phi"][i]));
                cells.push_back(fmt17(row["theta"][i]));
                cells.push_back(fmt17(row["p_phi"][i]));
                cells.push_back(fmt17(row["p_theta"][i]));
            }
            cells.push_back(fmt17(row["H"]));
            cells.push_back(fmt17(row["J2"]));
            cells.push_back(fmt17(row["shape_deviation"]));
            csv_row(out, cells);
        }
        return out;
    }

    // Scalar reports render as a two-line key/value table.
    std::vector<std::string> keys, values;
    for (const auto& [key, v] : p.items()) {
        if (v.is_array() || v.is_object()) continue;
        keys.push_back(key);
        if (v.is_number_float())
            values.push_back(fmt17(v.get<double>()));
        else if (v.is_number_integer())
            values.push_back(std::to_string(v.get<long long>()));
        else if (v.is_boolean())
            values.push_back(v.get<bool>() ? "true" : "false");
        else
            values.push_back(v.get<std::string>());
    }
    csv_row(out, keys);
    csv_row(out, values);
    return out;
}

}  // namespace cnb::cli
