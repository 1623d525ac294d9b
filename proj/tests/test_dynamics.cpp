#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cnb/dynamics.hpp"
#include "cnb/families.hpp"
#include "support/oracles.hpp"

using namespace cnb;
using Catch::Approx;

namespace {

PhaseState polygon_rest_state(int n) {
    return equatorial_phase_state(regular_polygon(n).phi, std::vector<double>(n, 0.0));
}

}  // namespace

TEST_CASE("eom_cartesian") {
    const MassVector m3 = MassVector::uniform(3);
    SECTION("equilibrium with zero momenta is a fixed point") {
        const CartesianDerivatives d = eom_cartesian(m3, polygon_rest_state(3));
        for (int i = 0; i < 3; ++i) {
            REQUIRE(norm(d.qdot[i]) == 0.0);
            REQUIRE(norm(d.pdot[i]) < 1e-12);
        }
    }
    SECTION("qdot = p/m and the constraint derivative vanishes") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const MassVector m(oracles::random_masses(rng, 4));
        PhaseState s;
        const CartesianConfig c = spherical_to_cartesian(oracles::random_config(rng, 4));
        s.q = c.points;
        s.p.resize(4);
        for (int i = 0; i < 4; ++i) {
            Vec4 raw{u(rng), u(rng), u(rng), 0.0};
            s.p[i] = raw - dot(raw, s.q[i]) * s.q[i];  // tangent momentum
        }
        const CartesianDerivatives d = eom_cartesian(m, s);
        for (int i = 0; i < 4; ++i) {
            REQUIRE(norm(d.qdot[i] - (1.0 / m[i]) * s.p[i]) == 0.0);
            REQUIRE(std::abs(dot(s.q[i], d.qdot[i])) < 1e-12);
            // d/dt (q.p) = qdot.p + q.pdot = 0 keeps momenta tangent.
            REQUIRE(std::abs(dot(d.qdot[i], s.p[i]) + dot(s.q[i], d.pdot[i])) < 1e-12);
        }
    }
}

TEST_CASE("eom_spherical") {
    SECTION("the equator is invariant") {
        SphericalState s;
        s.phi = {0.5, 1.7, 2.9, 4.6};  // clear of coincident and antipodal folds
        s.theta.assign(4, kPi / 2.0);
        s.p_phi = {0.3, -0.2, 0.6, 0.1};
        s.p_theta.assign(4, 0.0);
        const SphericalDerivatives d = eom_spherical(MassVector::uniform(4), s);
        for (int i = 0; i < 4; ++i) {
            REQUIRE(std::abs(d.thetadot[i]) == 0.0);
            REQUIRE(std::abs(d.p_thetadot[i]) < 1e-13);
        }
    }
    SECTION("relative equilibrium data keeps p_phi constant") {
        SphericalState s;
        const SphericalConfig poly = regular_polygon(3);
        s.phi = poly.phi;
        s.theta = poly.theta;
        s.p_phi.assign(3, 1.4);
        s.p_theta.assign(3, 0.0);
        const SphericalDerivatives d = eom_spherical(MassVector::uniform(3), s);
        for (int i = 0; i < 3; ++i) REQUIRE(std::abs(d.p_phidot[i]) < 1e-13);
    }
    SECTION("consistent with the chart-transported Cartesian field") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-0.8, 0.8);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 3 + trial % 3;
            const MassVector m(oracles::random_masses(rng, n));
            const SphericalConfig cfg = oracles::random_config(rng, n);
            SphericalState s;
            s.phi = cfg.phi;
            s.theta = cfg.theta;
            s.p_phi.resize(n);
            s.p_theta.resize(n);
            for (int i = 0; i < n; ++i) {
                s.p_phi[i] = u(rng);
                s.p_theta[i] = u(rng);
            }
            const SphericalDerivatives ds = eom_spherical(m, s);
            const PhaseState ps = spherical_to_phase(m, s);
            const CartesianDerivatives dc = eom_cartesian(m, ps);
            for (int i = 0; i < n; ++i) {
                const Vec4& q = ps.q[i];
                const Vec4& qd = dc.qdot[i];
                const double s2 = q.x * q.x + q.y * q.y;
                const double st = std::sqrt(s2);
                const double phidot = (q.x * qd.y - q.y * qd.x) / s2;
                const double thetadot = -qd.z / st;
                const double p_phidot =
                    qd.x * ps.p[i].y + q.x * dc.pdot[i].y - qd.y * ps.p[i].x - q.y * dc.pdot[i].x;
                const double p_thetadot =
                    -dc.pdot[i].z / st + ps.p[i].z * q.z * thetadot / s2;
                REQUIRE(ds.phidot[i] == Approx(phidot).margin(1e-10));
                REQUIRE(ds.thetadot[i] == Approx(thetadot).margin(1e-10));
                REQUIRE(ds.p_phidot[i] == Approx(p_phidot).margin(1e-10));
                REQUIRE(ds.p_thetadot[i] == Approx(p_thetadot).margin(1e-10));
            }
        }
    }
}

TEST_CASE("integrate") {
    const MassVector m3 = MassVector::uniform(3);
    SECTION("equilibrium at rest stays put") {
        IntegratorConfig cfg;
        cfg.T = 10.0;
        const TrajectoryRecord rec = integrate(m3, polygon_rest_state(3), cfg);
        REQUIRE_FALSE(rec.aborted);
        const PhaseState& last = rec.samples.back();
        const PhaseState start = polygon_rest_state(3);
        for (int i = 0; i < 3; ++i) {
            REQUIRE(norm(last.q[i] - start.q[i]) < 1e-10);
            REQUIRE(norm(last.p[i]) < 1e-10);
        }
    }
    SECTION("exact relative equilibrium: invariant shape and conserved quantities") {
        IntegratorConfig cfg;
        cfg.T = 50.0;
        const TrajectoryRecord rec =
            integrate(m3, relative_equilibrium_trajectory(3, 1.0, 0.0, 0.0), cfg);
        REQUIRE_FALSE(rec.aborted);
        REQUIRE(rec.max_shape_deviation() <= 1e-8);
        REQUIRE(rec.energy_drift <= 1e-8);
        REQUIRE(rec.momentum_drift <= 1e-10);
        REQUIRE(rec.max_constraint_violation <= 1e-10);
    }
    SECTION("fourth-order convergence of the energy drift") {
        SphericalState s0;
        s0.phi = {2.0 * kPi / 3.0 + 0.05, 4.0 * kPi / 3.0 - 0.03, 2.0 * kPi + 0.01};
        s0.theta = {kPi / 2.0 + 0.04, kPi / 2.0 - 0.02, kPi / 2.0};
        s0.p_phi.assign(3, 0.0);
        s0.p_theta.assign(3, 0.0);
        const PhaseState start = spherical_to_phase(m3, s0);
        IntegratorConfig coarse;
        coarse.dt = 0.02;
        coarse.T = 2.0;
        coarse.sample_stride = 5;
        IntegratorConfig fine = coarse;
        fine.dt = 0.01;
        const double drift_c = integrate(m3, start, coarse).energy_drift;
        const double drift_f = integrate(m3, start, fine).energy_drift;
        REQUIRE(drift_c / drift_f > 10.0);
        REQUIRE(drift_c / drift_f < 24.0);
    }
    SECTION("equatorial initial data never leaves the equator") {
        const std::vector<double> phi0 = {2.0 * kPi / 3.0 + 0.03, 4.0 * kPi / 3.0,
                                          2.0 * kPi - 0.05};
        IntegratorConfig cfg;
        cfg.T = 10.0;
        const TrajectoryRecord rec =
            integrate(m3, equatorial_phase_state(phi0, std::vector<double>(3, 0.4)), cfg);
        double worst = 0.0;
        for (double d : rec.theta_deviation) worst = std::max(worst, d);
        REQUIRE(worst <= 1e-10);
    }
    SECTION("near-coincident start aborts with a flagged record") {
        SphericalState s0;
        s0.phi = {0.1, 0.1005, 2.0};
        s0.theta.assign(3, kPi / 2.0);
        s0.p_phi.assign(3, 0.0);
        s0.p_theta.assign(3, 0.0);
        IntegratorConfig cfg;
        cfg.T = 1.0;
        const TrajectoryRecord rec = integrate(m3, spherical_to_phase(m3, s0), cfg);
        REQUIRE(rec.aborted);
        REQUIRE_FALSE(rec.abort_reason.empty());
    }
}

TEST_CASE("relative_equilibrium_trajectory") {
    SECTION("t = 0 returns the polygon with tangent momenta") {
        const PhaseState s = relative_equilibrium_trajectory(3, 2.0, 0.0, 0.0);
        const CartesianConfig poly = spherical_to_cartesian(regular_polygon(3));
        for (int i = 0; i < 3; ++i) {
            REQUIRE(norm(s.q[i] - poly.points[i]) < 1e-15);
            REQUIRE(std::abs(dot(s.q[i], s.p[i])) < 1e-15);
            REQUIRE(norm(s.p[i]) == Approx(2.0).margin(1e-14));
        }
    }
    SECTION("beta = 0 keeps the motion on the equator") {
        for (double t : {0.3, 1.7, 9.2}) {
            const PhaseState s = relative_equilibrium_trajectory(5, 1.3, 0.0, t);
            for (const Vec4& q : s.q) {
                REQUIRE(std::abs(q.z) < 1e-15);
                REQUIRE(std::abs(q.w) < 1e-15);
            }
        }
    }
    SECTION("satisfies the equations of motion for beta = 0 and alpha = beta") {
        const MassVector m = MassVector::uniform(5);
        for (const auto& [alpha, beta] : {std::pair<double, double>{1.2, 0.0}, {0.8, 0.8}}) {
            for (double t : {0.0, 0.6, 2.9}) {
                const PhaseState s = relative_equilibrium_trajectory(5, alpha, beta, t);
                const CartesianDerivatives d = eom_cartesian(m, s);
                for (int i = 0; i < 5; ++i) {
                    // Exact derivative of the group orbit: qdot = J q, pdot = J p.
                    const Vec4 qdot = apply_generator(alpha, beta, s.q[i]);
                    const Vec4 pdot = apply_generator(alpha, beta, s.p[i]);
                    REQUIRE(norm(d.qdot[i] - qdot) < 1e-12);
                    REQUIRE(norm(d.pdot[i] - pdot) < 1e-10);
                }
            }
        }
    }
    SECTION("latitude-circle generalization with the family angular velocity") {
        const double theta = kPi / 3.0;
        const FamilyPoint fp = second_family_alpha_sq(3, theta);
        const double alpha = std::sqrt(fp.alpha_sq);
        const MassVector m = MassVector::uniform(3);
        for (double t : {0.0, 1.1, 4.4}) {
            const PhaseState s = relative_equilibrium_trajectory(3, alpha, 0.0, t, theta);
            const CartesianDerivatives d = eom_cartesian(m, s);
            for (int i = 0; i < 3; ++i) {
                const Vec4 pdot = apply_generator(alpha, 0.0, s.p[i]);
                REQUIRE(norm(d.pdot[i] - pdot) < 1e-9);
            }
        }
    }
    SECTION("even n rejected") {
        REQUIRE_THROWS_AS(relative_equilibrium_trajectory(4, 1.0, 0.0, 0.0), EvenN);
    }
}

TEST_CASE("chart agreement between Cartesian and spherical integrations") {
    // Rotation fast enough for Lyapunov stability, so chart-level truncation
    // differences stay bounded instead of riding the unstable mode.
    const MassVector m = MassVector::uniform(3);
    SphericalState s0;
    s0.phi = {2.0 * kPi / 3.0 + 0.02, 4.0 * kPi / 3.0 - 0.01, 2.0 * kPi};
    s0.theta = {kPi / 2.0 - 0.03, kPi / 2.0 + 0.01, kPi / 2.0 + 0.02};
    s0.p_phi.assign(3, 3.5);
    s0.p_theta = {0.02, -0.01, 0.0};
    IntegratorConfig cfg;
    cfg.T = 10.0;
    const TrajectoryRecord cart = integrate(m, spherical_to_phase(m, s0), cfg);
    const TrajectoryRecord sph = integrate_spherical(m, s0, cfg);
    REQUIRE(cart.times.size() == sph.times.size());
    for (std::size_t k = 0; k < cart.times.size(); k += 50) {
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                const double dc = geodesic_distance(cart.samples[k].q[i], cart.samples[k].q[j]);
                const double dsph = geodesic_distance(sph.samples[k].q[i], sph.samples[k].q[j]);
                REQUIRE(dc == Approx(dsph).margin(1e-7));
            }
    }
}

TEST_CASE("stability_probe") {
    SECTION("alpha = 0 grows at sqrt(Theta1)") {
        IntegratorConfig cfg;
        cfg.T = 15.0;
        const ProbeReport rep =
            stability_probe(3, 0.0, 1e-6, ProbeDirection::UnstableMode, cfg);
        REQUIRE(rep.verdict == ProbeVerdict::Grows);
        REQUIRE(rep.fitted_rate ==
                Approx(2.1491398636470838).epsilon(0.05));
        REQUIRE(rep.energy_drift <= 1e-8);
        REQUIRE(rep.momentum_drift <= 1e-10);
    }
    SECTION("stable regime stays bounded") {
        IntegratorConfig cfg;
        cfg.T = 20.0;
        const double alpha = 1.5 * std::sqrt(critical_alpha_sq(3));
        const ProbeReport rep =
            stability_probe(3, alpha, 1e-6, ProbeDirection::RandomShape, cfg, 42);
        REQUIRE(rep.verdict == ProbeVerdict::Bounded);
        REQUIRE(rep.max_deviation <= 100.0 * 1e-6);
    }
    SECTION("epsilon outside the fit window is rejected") {
        REQUIRE_THROWS_AS(
            stability_probe(3, 0.0, 1e-3, ProbeDirection::UnstableMode, IntegratorConfig{}),
            ValidationError);
    }
}
