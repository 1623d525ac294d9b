#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "cnb/errors.hpp"
#include "cnb/geometry.hpp"
#include "cnb/potential.hpp"
#include "cnb/reduction.hpp"

namespace cnb {

// Unreduced phase point on (S^3)^n: unit positions and tangent momenta.
struct PhaseState {
    std::vector<Vec4> q;
    std::vector<Vec4> p;
    double time = 0.0;

    std::size_t size() const { return q.size(); }
};

struct SphericalState {
    std::vector<double> phi;
    std::vector<double> theta;
    std::vector<double> p_phi;
    std::vector<double> p_theta;
    double time = 0.0;

    std::size_t size() const { return phi.size(); }
};

struct CartesianDerivatives {
    std::vector<Vec4> qdot;
    std::vector<Vec4> pdot;
};

// Right-hand side of the constrained equations of motion:
// qdot = p/m, pdot = grad U - (p.p) q / m.
inline CartesianDerivatives eom_cartesian(const MassVector& masses, const PhaseState& s) {
    const std::size_t n = s.size();
    CartesianDerivatives d;
    d.qdot.resize(n);
    d.pdot = grad_cartesian(masses, CartesianConfig{s.q, Chart::S3});
    for (std::size_t i = 0; i < n; ++i) {
        d.qdot[i] = (1.0 / masses[i]) * s.p[i];
        d.pdot[i] += (-dot(s.p[i], s.p[i]) / masses[i]) * s.q[i];
    }
    return d;
}

struct SphericalDerivatives {
    std::vector<double> phidot;
    std::vector<double> thetadot;
    std::vector<double> p_phidot;
    std::vector<double> p_thetadot;
};

// Canonical equations of the spherical-chart Hamiltonian
// H = sum (p_phi^2 / (2 m sin^2 theta) + p_theta^2 / 2m) - U.
inline SphericalDerivatives eom_spherical(const MassVector& masses, const SphericalState& s) {
    const std::size_t n = s.size();
    for (double t : s.theta)
        if (t < kPoleMargin || t > kPi - kPoleMargin)
            throw PoleSingularity("eom_spherical: theta within pole margin");
    SphericalConfig cfg{s.phi, s.theta};
    const SphericalGradient g = grad_spherical(masses, cfg);
    SphericalDerivatives d;
    d.phidot.resize(n);
    d.thetadot.resize(n);
    d.p_phidot.resize(n);
    d.p_thetadot.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double st = std::sin(s.theta[i]), ct = std::cos(s.theta[i]);
        d.phidot[i] = s.p_phi[i] / (masses[i] * st * st);
        d.thetadot[i] = s.p_theta[i] / masses[i];
        d.p_phidot[i] = g.dphi[i];
        d.p_thetadot[i] = s.p_phi[i] * s.p_phi[i] * ct / (masses[i] * st * st * st) + g.dtheta[i];
    }
    return d;
}

// Chart transport between the spherical state and the embedded phase point.
inline PhaseState spherical_to_phase(const MassVector& masses, const SphericalState& s) {
    const std::size_t n = s.size();
    PhaseState out;
    out.time = s.time;
    out.q.resize(n);
    out.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sp = std::sin(s.phi[i]), cp = std::cos(s.phi[i]);
        const double st = std::sin(s.theta[i]), ct = std::cos(s.theta[i]);
        out.q[i] = {st * cp, st * sp, ct, 0.0};
        const double phidot = s.p_phi[i] / (masses[i] * st * st);
        const double thetadot = s.p_theta[i] / masses[i];
        const Vec4 dq_dphi{-st * sp, st * cp, 0.0, 0.0};
        const Vec4 dq_dtheta{ct * cp, ct * sp, -st, 0.0};
        out.p[i] = masses[i] * (phidot * dq_dphi + thetadot * dq_dtheta);
    }
    return out;
}

inline SphericalState phase_to_spherical(const MassVector& masses, const PhaseState& s) {
    const std::size_t n = s.size();
    SphericalState out;
    out.time = s.time;
    out.phi.resize(n);
    out.theta.resize(n);
    out.p_phi.resize(n);
    out.p_theta.resize(n);
    (void)masses;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec4& q = s.q[i];
        double phi = std::atan2(q.y, q.x);
        if (phi < 0.0) phi += 2.0 * kPi;
        const double theta = std::acos(clamp_unit(q.z));
        const double st = std::sin(theta);
        if (st < kPoleMargin) throw PoleSingularity("phase_to_spherical: point at pole");
        out.phi[i] = phi;
        out.theta[i] = theta;
        out.p_phi[i] = q.x * s.p[i].y - q.y * s.p[i].x;
        out.p_theta[i] = -s.p[i].z / st;
    }
    return out;
}

// Phase point on the great circle z = w = 0 with the zeros exact in floating
// point, so the integrator preserves the S^1 invariant manifold bit-exactly.
// p_phi are the conjugate momenta (p_phi = m phidot on the equator).
inline PhaseState equatorial_phase_state(const std::vector<double>& phi,
                                         const std::vector<double>& p_phi) {
    const std::size_t n = phi.size();
    PhaseState s;
    s.q.resize(n);
    s.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::cos(phi[i]), si = std::sin(phi[i]);
        s.q[i] = {c, si, 0.0, 0.0};
        s.p[i] = {-p_phi[i] * si, p_phi[i] * c, 0.0, 0.0};
    }
    return s;
}

inline double hamiltonian(const MassVector& masses, const PhaseState& s) {
    double t = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) t += dot(s.p[i], s.p[i]) / (2.0 * masses[i]);
    return t - potential_U(masses, CartesianConfig{s.q, Chart::S3});
}

// Momentum of the SO(2) action about the z axis, J2 = sum p_phi_i.
inline double momentum_J2(const PhaseState& s) {
    double j = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        j += s.q[i].x * s.p[i].y - s.q[i].y * s.p[i].x;
    return j;
}

struct IntegratorConfig {
    double dt = 1e-3;
    double T = 100.0;
    int sample_stride = 10;
    double singularity_floor = 1e-3;  // abort below this min_separation
    double stop_deviation = 0.0;      // > 0: stop once shape deviation exceeds it
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<PhaseState> samples;
    std::vector<double> dist_deviation;   // max_{i<j} |d_ij(t) - d_ij(0)|
    std::vector<double> theta_deviation;  // max_i |theta_i(t) - pi/2|
    double energy_drift = 0.0;            // max |H - H0| / |H0|
    double momentum_drift = 0.0;          // max |J2 - J2(0)|
    double max_constraint_violation = 0.0;
    bool aborted = false;
    bool stopped_early = false;
    std::string abort_reason;

    // Combined shape metric at sample i.
    double shape_deviation(std::size_t i) const {
        return std::max(dist_deviation[i], theta_deviation[i]);
    }
    double max_shape_deviation() const {
        double m = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) m = std::max(m, shape_deviation(i));
        return m;
    }
};

namespace detail {

inline std::vector<double> pair_distances(const std::vector<Vec4>& q) {
    std::vector<double> d;
    d.reserve(q.size() * (q.size() - 1) / 2);
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = i + 1; j < q.size(); ++j)
            d.push_back(std::acos(clamp_unit(dot(q[i], q[j]))));
    return d;
}

struct Sampler {
    const MassVector& masses;
    TrajectoryRecord& rec;
    std::vector<double> d0;
    double h0 = 0.0, j0 = 0.0;

    Sampler(const MassVector& m, TrajectoryRecord& r, const PhaseState& s0)
        : masses(m), rec(r), d0(pair_distances(s0.q)) {
        h0 = hamiltonian(m, s0);
        j0 = momentum_J2(s0);
    }

    void record(const PhaseState& s) {
        rec.times.push_back(s.time);
        rec.samples.push_back(s);
        const std::vector<double> d = pair_distances(s.q);
        double dd = 0.0;
        for (std::size_t k = 0; k < d.size(); ++k) dd = std::max(dd, std::abs(d[k] - d0[k]));
        rec.dist_deviation.push_back(dd);
        double td = 0.0;
        for (const Vec4& q : s.q)
            td = std::max(td, std::abs(std::acos(clamp_unit(q.z)) - kPi / 2.0));
        rec.theta_deviation.push_back(td);

        rec.energy_drift = std::max(
            rec.energy_drift, std::abs(hamiltonian(masses, s) - h0) / std::max(std::abs(h0), 1e-30));
        rec.momentum_drift = std::max(rec.momentum_drift, std::abs(momentum_J2(s) - j0));
        for (std::size_t i = 0; i < s.size(); ++i) {
            rec.max_constraint_violation =
                std::max(rec.max_constraint_violation, std::abs(dot(s.q[i], s.q[i]) - 1.0));
            rec.max_constraint_violation =
                std::max(rec.max_constraint_violation, std::abs(dot(s.q[i], s.p[i])));
        }
    }
};

inline PhaseState rk4_step_cartesian(const MassVector& masses, const PhaseState& s, double dt) {
    const std::size_t n = s.size();
    const auto k1 = eom_cartesian(masses, s);
    PhaseState s2 = s;
    for (std::size_t i = 0; i < n; ++i) {
        s2.q[i] += (dt / 2.0) * k1.qdot[i];
        s2.p[i] += (dt / 2.0) * k1.pdot[i];
    }
    const auto k2 = eom_cartesian(masses, s2);
    PhaseState s3 = s;
    for (std::size_t i = 0; i < n; ++i) {
        s3.q[i] += (dt / 2.0) * k2.qdot[i];
        s3.p[i] += (dt / 2.0) * k2.pdot[i];
    }
    const auto k3 = eom_cartesian(masses, s3);
    PhaseState s4 = s;
    for (std::size_t i = 0; i < n; ++i) {
        s4.q[i] += dt * k3.qdot[i];
        s4.p[i] += dt * k3.pdot[i];
    }
    const auto k4 = eom_cartesian(masses, s4);

    PhaseState out = s;
    out.time = s.time + dt;
    for (std::size_t i = 0; i < n; ++i) {
        out.q[i] += (dt / 6.0) * (k1.qdot[i] + 2.0 * k2.qdot[i] + 2.0 * k3.qdot[i] + k4.qdot[i]);
        out.p[i] += (dt / 6.0) * (k1.pdot[i] + 2.0 * k2.pdot[i] + 2.0 * k3.pdot[i] + k4.pdot[i]);
        // Project back onto the constraint manifold: unit q, tangent p.
        out.q[i] = normalized(out.q[i]);
        out.p[i] += (-dot(out.p[i], out.q[i])) * out.q[i];
    }
    return out;
}

}  // namespace detail

// Classical 4-stage one-step integration with post-step projection onto the
// constraint manifold. Clean abort (flagged partial record) when the
// configuration approaches the singular set.
inline TrajectoryRecord integrate(const MassVector& masses, const PhaseState& state0,
                                  const IntegratorConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.T > 0.0))
        throw ValidationError("integrate: dt and T must be positive");
    TrajectoryRecord rec;
    detail::Sampler sampler(masses, rec, state0);
    sampler.record(state0);
    if (min_separation(CartesianConfig{state0.q, Chart::S3}) < cfg.singularity_floor) {
        rec.aborted = true;
        rec.abort_reason = "initial min_separation below singularity floor";
        return rec;
    }

    PhaseState s = state0;
    const long steps = std::lround(cfg.T / cfg.dt);
    for (long step = 1; step <= steps; ++step) {
        try {
            s = detail::rk4_step_cartesian(masses, s, cfg.dt);
        } catch (const SingularConfiguration& e) {
            rec.aborted = true;
            rec.abort_reason = e.what();
            break;
        }
        const bool at_sample = (step % cfg.sample_stride == 0) || step == steps;
        if (!at_sample) continue;
        if (min_separation(CartesianConfig{s.q, Chart::S3}) < cfg.singularity_floor) {
            rec.aborted = true;
            rec.abort_reason = "min_separation fell below singularity floor";
            break;
        }
        sampler.record(s);
        if (cfg.stop_deviation > 0.0 && rec.shape_deviation(rec.times.size() - 1) > cfg.stop_deviation) {
            rec.stopped_early = true;
            break;
        }
    }
    return rec;
}

// Same record produced by integrating the canonical spherical-chart
// equations; samples are transported to the embedded representation.
inline TrajectoryRecord integrate_spherical(const MassVector& masses,
                                            const SphericalState& state0,
                                            const IntegratorConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.T > 0.0))
        throw ValidationError("integrate_spherical: dt and T must be positive");
    const std::size_t n = state0.size();
    TrajectoryRecord rec;
    const PhaseState phase0 = spherical_to_phase(masses, state0);
    detail::Sampler sampler(masses, rec, phase0);
    sampler.record(phase0);

    SphericalState s = state0;
    const long steps = std::lround(cfg.T / cfg.dt);
    const auto axpy = [n](SphericalState& dst, double a, const SphericalDerivatives& d) {
        for (std::size_t i = 0; i < n; ++i) {
            dst.phi[i] += a * d.phidot[i];
            dst.theta[i] += a * d.thetadot[i];
            dst.p_phi[i] += a * d.p_phidot[i];
            dst.p_theta[i] += a * d.p_thetadot[i];
        }
    };
    for (long step = 1; step <= steps; ++step) {
        SphericalDerivatives k1, k2, k3, k4;
        try {
            k1 = eom_spherical(masses, s);
            SphericalState s2 = s;
            axpy(s2, cfg.dt / 2.0, k1);
            k2 = eom_spherical(masses, s2);
            SphericalState s3 = s;
            axpy(s3, cfg.dt / 2.0, k2);
            k3 = eom_spherical(masses, s3);
            SphericalState s4 = s;
            axpy(s4, cfg.dt, k3);
            k4 = eom_spherical(masses, s4);
        } catch (const DomainError& e) {
            rec.aborted = true;
            rec.abort_reason = e.what();
            break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            s.phi[i] += (cfg.dt / 6.0) * (k1.phidot[i] + 2.0 * k2.phidot[i] + 2.0 * k3.phidot[i] + k4.phidot[i]);
            s.theta[i] += (cfg.dt / 6.0) * (k1.thetadot[i] + 2.0 * k2.thetadot[i] + 2.0 * k3.thetadot[i] + k4.thetadot[i]);
            s.p_phi[i] += (cfg.dt / 6.0) * (k1.p_phidot[i] + 2.0 * k2.p_phidot[i] + 2.0 * k3.p_phidot[i] + k4.p_phidot[i]);
            s.p_theta[i] += (cfg.dt / 6.0) * (k1.p_thetadot[i] + 2.0 * k2.p_thetadot[i] + 2.0 * k3.p_thetadot[i] + k4.p_thetadot[i]);
        }
        s.time += cfg.dt;
        const bool at_sample = (step % cfg.sample_stride == 0) || step == steps;
        if (!at_sample) continue;
        const PhaseState ps = spherical_to_phase(masses, s);
        if (min_separation(CartesianConfig{ps.q, Chart::S2}) < cfg.singularity_floor) {
            rec.aborted = true;
            rec.abort_reason = "min_separation fell below singularity floor";
            break;
        }
        sampler.record(ps);
    }
    return rec;
}

// Exact relative-equilibrium phase point A_{alpha,beta}(t) applied to the
// regular n-gon, optionally lifted to the latitude circle theta = latitude.
inline PhaseState relative_equilibrium_trajectory(int n, double alpha, double beta, double t,
                                                  double latitude = kPi / 2.0) {
    detail::require_odd(n, "relative_equilibrium_trajectory");
    if (latitude < kPoleMargin || latitude > kPi - kPoleMargin)
        throw PoleLatitude("relative_equilibrium_trajectory: latitude at pole");
    PhaseState s;
    s.time = t;
    s.q.resize(n);
    s.p.resize(n);
    const RotationParams rot{alpha, beta, t};
    // On the equator keep z = w = 0 exact so the S^1 invariant manifold
    // survives in floating point.
    const double cz = (latitude == kPi / 2.0) ? 0.0 : std::cos(latitude);
    const double sz = (latitude == kPi / 2.0) ? 1.0 : std::sin(latitude);
    for (int k = 1; k <= n; ++k) {
        const double a = 2.0 * kPi * k / n;
        const Vec4 base{sz * std::cos(a), sz * std::sin(a), cz, 0.0};
        const Vec4 q = rotate_point(base, rot);
        s.q[k - 1] = q;
        s.p[k - 1] = apply_generator(alpha, beta, q);  // unit masses: p = qdot
    }
    return s;
}

enum class ProbeDirection { UnstableMode, RandomShape };

enum class ProbeVerdict { Grows, Bounded };

struct ProbeReport {
    int n = 0;
    double alpha = 0.0;
    double epsilon = 0.0;
    ProbeDirection direction = ProbeDirection::UnstableMode;
    ProbeVerdict verdict = ProbeVerdict::Bounded;
    double fitted_rate = 0.0;
    double predicted_rate = 0.0;  // sqrt(max(Theta_1 - alpha^2, 0))
    double max_deviation = 0.0;
    double fit_window_t0 = 0.0;
    double fit_window_t1 = 0.0;
    std::size_t fit_points = 0;
    double energy_drift = 0.0;
    double momentum_drift = 0.0;
    double max_constraint_violation = 0.0;
};

// Lower and upper shape-deviation edges of the growth-rate fit window; the
// lower edge skips the transient, the upper edge stays inside the linear
// regime.
inline constexpr double kFitWindowUpper = 1e-3;

// Perturbs the unreduced state corresponding to Y_alpha by epsilon along the
// chosen direction, integrates, and fits the exponential growth rate of the
// shape deviation.
inline ProbeReport stability_probe(int n, double alpha, double epsilon,
                                   ProbeDirection direction, IntegratorConfig cfg,
                                   std::uint64_t seed = 0) {
    detail::require_odd(n, "stability_probe");
    if (!(epsilon > 0.0) || epsilon >= kFitWindowUpper / 10.0)
        throw ValidationError("stability_probe: epsilon must lie in (0, 1e-4)");
    const MassVector masses = MassVector::uniform(n);

    SphericalState s0;
    s0.phi.resize(n);
    s0.theta.assign(n, kPi / 2.0);
    s0.p_phi.assign(n, alpha);
    s0.p_theta.assign(n, 0.0);
    for (int k = 1; k <= n; ++k) s0.phi[k - 1] = 2.0 * kPi * k / n;

    if (direction == ProbeDirection::UnstableMode) {
        // Growing-mode seed from the linearization: (dtheta, dp_theta) =
        // eps (u, sqrt(lambda) u) for the largest theta-block eigenvalue.
        const LinearizationReport rep = linearize_at_Y(n, alpha);
        const EigenClass* best = nullptr;
        for (const EigenClass& c : rep.eigen_classes)
            if (c.part == "theta" && (best == nullptr || c.lambda > best->lambda)) best = &c;
        double scale = 0.0;
        for (double x : best->mode) scale = std::max(scale, std::abs(x));
        const double rate = best->lambda > 0.0 ? std::sqrt(best->lambda) : 0.0;
        for (int i = 0; i < n; ++i) {
            const double dtheta = epsilon * best->mode[i] / scale;
            s0.theta[i] += dtheta;
            s0.p_theta[i] += rate * dtheta;
        }
    } else {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> dphi(n), dtheta(n);
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) {
            dphi[i] = gauss(rng);
            dtheta[i] = gauss(rng);
            nrm += dphi[i] * dphi[i] + dtheta[i] * dtheta[i];
        }
        nrm = std::sqrt(nrm);
        for (int i = 0; i < n; ++i) {
            s0.phi[i] += epsilon * dphi[i] / nrm;
            s0.theta[i] += epsilon * dtheta[i] / nrm;
        }
    }

    if (cfg.stop_deviation <= 0.0) cfg.stop_deviation = 10.0 * kFitWindowUpper;
    const TrajectoryRecord rec = integrate(masses, spherical_to_phase(masses, s0), cfg);

    ProbeReport rep;
    rep.n = n;
    rep.alpha = alpha;
    rep.epsilon = epsilon;
    rep.direction = direction;
    rep.predicted_rate = std::sqrt(std::max(critical_alpha_sq(n) - alpha * alpha, 0.0));
    rep.max_deviation = rec.max_shape_deviation();
    rep.energy_drift = rec.energy_drift;
    rep.momentum_drift = rec.momentum_drift;
    rep.max_constraint_violation = rec.max_constraint_violation;

    // Least-squares slope of log(deviation) over the fit window.
    const double lo = 10.0 * epsilon, hi = kFitWindowUpper;
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t m = 0;
    double t0 = 0.0, t1 = 0.0;
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        const double dev = rec.shape_deviation(i);
        if (dev < lo || dev > hi) continue;
        const double t = rec.times[i], y = std::log(dev);
        if (m == 0) t0 = t;
        t1 = t;
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        ++m;
    }
    if (rec.aborted && rep.max_deviation < hi)
        throw SingularityApproach("probe run hit the singularity floor before the fit window");
    if (m >= 2) {
        rep.fitted_rate = (sty - st * sy / m) / (stt - st * st / m);
        rep.fit_points = m;
        rep.fit_window_t0 = t0;
        rep.fit_window_t1 = t1;
    }
    rep.verdict = rep.max_deviation >= hi ? ProbeVerdict::Grows : ProbeVerdict::Bounded;
    return rep;
}

inline std::string to_string(ProbeVerdict v) {
    return v == ProbeVerdict::Grows ? "grows" : "bounded";
}

inline std::string to_string(ProbeDirection d) {
    return d == ProbeDirection::UnstableMode ? "unstable-mode" : "random-shape";
}

}  // namespace cnb
