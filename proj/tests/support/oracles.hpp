// Test-only oracles, independent of the library's computation paths:
// a generic LAPACK eigensolve, sphere-restricted finite differences, and
// seeded random generators.
#pragma once

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "cnb/geometry.hpp"
#include "cnb/linalg.hpp"
#include "cnb/potential.hpp"

extern "C" {
void dgeev_(const char* jobvl, const char* jobvr, const int* n, double* a, const int* lda,
            double* wr, double* wi, double* vl, const int* ldvl, double* vr, const int* ldvr,
            double* work, const int* lwork, int* info);
}

namespace oracles {

// Generic dense nonsymmetric eigensolve (LAPACK dgeev), the brute-force
// route against which the closed-form and block constructions are checked.
inline std::vector<std::complex<double>> dgeev_eigenvalues(const cnb::Matrix& m) {
    const int n = static_cast<int>(m.rows());
    std::vector<double> a(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[j * n + i] = m(i, j);  // column-major
    std::vector<double> wr(n), wi(n), work(16 * n);
    int lwork = 16 * n, info = 0;
    dgeev_("N", "N", &n, a.data(), &n, wr.data(), wi.data(), nullptr, &n, nullptr, &n,
           work.data(), &lwork, &info);
    if (info != 0) throw std::runtime_error("dgeev failed");
    std::vector<std::complex<double>> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = {wr[i], wi[i]};
    return ev;
}

// Largest pairing distance between two eigenvalue multisets, by greedy
// nearest-neighbor matching (robust to sign/ordering noise in the tiny real
// parts of nearly imaginary spectra).
inline double multiset_distance(const std::vector<std::complex<double>>& a,
                                std::vector<std::complex<double>> b) {
    double worst = 0.0;
    std::vector<bool> used(b.size(), false);
    for (const auto& x : a) {
        std::size_t best = b.size();
        double best_d = 1e300;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(x - b[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        used[best] = true;
        worst = std::max(worst, best_d);
    }
    return worst;
}

inline double multiset_distance_real(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

// Directional derivative of U along the great circle through q_i with unit
// tangent e: gamma(h) = cos(h) q_i + sin(h) e stays on the sphere exactly.
inline double fd_sphere_directional(const cnb::MassVector& masses,
                                    const cnb::CartesianConfig& cfg, std::size_t i,
                                    const cnb::Vec4& e, double h = 1e-6) {
    cnb::CartesianConfig plus = cfg, minus = cfg;
    plus.points[i] = std::cos(h) * cfg.points[i] + std::sin(h) * e;
    minus.points[i] = std::cos(h) * cfg.points[i] - std::sin(h) * e;
    return (cnb::potential_U(masses, plus) - cnb::potential_U(masses, minus)) / (2.0 * h);
}

inline double fd_spherical_dphi(const cnb::MassVector& masses, const cnb::SphericalConfig& cfg,
                                std::size_t i, double h = 1e-5) {
    cnb::SphericalConfig plus = cfg, minus = cfg;
    plus.phi[i] += h;
    minus.phi[i] -= h;
    return (cnb::potential_U(masses, cnb::spherical_to_cartesian(plus)) -
            cnb::potential_U(masses, cnb::spherical_to_cartesian(minus))) /
           (2.0 * h);
}

inline double fd_spherical_dtheta(const cnb::MassVector& masses, const cnb::SphericalConfig& cfg,
                                  std::size_t i, double h = 1e-5) {
    cnb::SphericalConfig plus = cfg, minus = cfg;
    plus.theta[i] += h;
    minus.theta[i] -= h;
    return (cnb::potential_U(masses, cnb::spherical_to_cartesian(plus)) -
            cnb::potential_U(masses, cnb::spherical_to_cartesian(minus))) /
           (2.0 * h);
}

// Random nonsingular spherical configuration with all pairs at least
// min_sep from the singular set.
inline cnb::SphericalConfig random_config(std::mt19937_64& rng, std::size_t n,
                                          double min_sep = 0.35) {
    std::uniform_real_distribution<double> uphi(0.0, 2.0 * cnb::kPi);
    std::uniform_real_distribution<double> utheta(0.6, cnb::kPi - 0.6);
    for (;;) {
        cnb::SphericalConfig cfg;
        cfg.phi.resize(n);
        cfg.theta.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            cfg.phi[i] = uphi(rng);
            cfg.theta[i] = utheta(rng);
        }
        if (cnb::min_separation(cnb::spherical_to_cartesian(cfg)) > min_sep) return cfg;
    }
}

inline std::vector<double> random_masses(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.3, 3.0);
    std::vector<double> m(n);
    for (double& x : m) x = u(rng);
    return m;
}

}  // namespace oracles
