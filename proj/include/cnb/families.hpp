#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cnb/errors.hpp"
#include "cnb/geometry.hpp"
#include "cnb/linalg.hpp"
#include "cnb/potential.hpp"
#include "cnb/spectra.hpp"

namespace cnb {

struct MassSolveResult {
    std::vector<double> masses;  // normalized to sum = n
    int nullspace_dim = 0;
    double residual = 0.0;     // max |S^1 equilibrium residual|
    double sigma_ratio = 0.0;  // second-smallest / smallest singular value of B
};

// Acceptance gap for a one-dimensional numerical kernel of B.
inline constexpr double kKernelGap = 1e6;

// Default per-angle bound on the distance to the regular polygon.
inline constexpr double kMassSolvePerturbationBound = 0.05;

// Solves for masses making a near-polygon S^1 configuration an equilibrium:
// the right kernel of the skew matrix B, extracted as the smallest singular
// vector via the symmetric eigendecomposition of B^T B.
inline MassSolveResult solve_masses(const std::vector<double>& phi,
                                    double max_perturbation = kMassSolvePerturbationBound) {
    const int n = static_cast<int>(phi.size());
    detail::require_odd(n, "solve_masses");

    // Precondition: stay within the perturbation bound of the polygon,
    // modulo a common rotation (best-aligning shift = mid-range of the
    // angle deviations).
    double lo = 1e300, hi = -1e300;
    for (int k = 1; k <= n; ++k) {
        const double d = std::remainder(phi[k - 1] - 2.0 * kPi * k / n, 2.0 * kPi);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    if (0.5 * (hi - lo) > max_perturbation + 1e-12)
        throw ValidationError("solve_masses: configuration exceeds the polygon perturbation bound");

    const Matrix b = build_skew_B(phi);
    const SymmetricEigen e = jacobi_eigen(b.transposed() * b);
    std::vector<double> sigma(e.values.size());
    for (std::size_t i = 0; i < sigma.size(); ++i)
        sigma[i] = std::sqrt(std::max(e.values[i], 0.0));

    MassSolveResult out;
    out.sigma_ratio = sigma[1] / std::max(sigma[0], 1e-300);
    if (out.sigma_ratio < kKernelGap) {
        const double tol = sigma.back() * 1e-9;
        int dim = 0;
        for (double s : sigma)
            if (s <= tol) ++dim;
        throw KernelDimensionError("numerical kernel of B is not one-dimensional (approx dim " +
                                   std::to_string(dim) + ", gap " +
                                   std::to_string(out.sigma_ratio) + ")");
    }
    out.nullspace_dim = 1;

    std::vector<double> m(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        m[i] = e.vectors(i, 0);
        sum += m[i];
    }
    if (sum < 0.0) {
        for (double& x : m) x = -x;
        sum = -sum;
    }
    for (double x : m)
        if (!(x > 0.0))
            throw NonPositiveMasses("kernel vector is not sign-definite; no positive mass solution");
    for (double& x : m) x *= n / sum;
    out.masses = m;

    const std::vector<double> r = equilibrium_residual_s1(MassVector(m), phi);
    out.residual = norm_inf(r);
    return out;
}

// The critical alpha^2 of Corollary 11 for a (near-polygon) S^1 equilibrium:
// the largest eigenvalue of the mass-weighted theta-theta Hessian block
// M^{-1/2} [d2U/dtheta dtheta] M^{-1/2} at the equatorial lift.
inline double near_polygon_threshold(const std::vector<double>& phi, const MassVector& masses,
                                     double residual_tol = 1e-9) {
    const std::size_t n = phi.size();
    const std::vector<double> r = equilibrium_residual_s1(masses, phi);
    if (norm_inf(r) > residual_tol)
        throw NotAnEquilibrium("S^1 equilibrium residual " + std::to_string(norm_inf(r)) +
                               " exceeds " + std::to_string(residual_tol));
    SphericalConfig cfg;
    cfg.phi = phi;
    cfg.theta.assign(n, kPi / 2.0);
    const SphericalHessian h = hessian_spherical(masses, cfg);
    Matrix weighted(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            weighted(i, j) = h.theta_block(i, j) / std::sqrt(masses[i] * masses[j]);
    return jacobi_eigen(weighted).values.back();
}

// One member of the latitude-circle family: n equal masses equally spaced on
// the circle at latitude theta, with the squared angular velocity the
// configuration requires.
struct FamilyPoint {
    double theta = 0.0;
    double alpha_sq = 0.0;
    std::vector<double> d1j;  // distances from body 1 to bodies 2..n
};

inline FamilyPoint second_family_alpha_sq(int n, double theta) {
    detail::require_odd(n, "second_family_alpha_sq");
    if (theta < kPoleMargin || theta > kPi - kPoleMargin)
        throw PoleLatitude("second_family_alpha_sq: latitude within pole margin");
    const double phi = 2.0 * kPi / n;
    const double c2 = std::cos(theta) * std::cos(theta);
    const double s2 = 1.0 - c2;
    FamilyPoint out;
    out.theta = theta;
    out.d1j.reserve(n - 1);
    double sum = 0.0;
    for (int j = 2; j <= n; ++j) {
        const double cd = clamp_unit(c2 + s2 * std::cos((j - 1) * phi));
        const double sd2 = 1.0 - cd * cd;
        out.d1j.push_back(std::acos(cd));
        sum += (1.0 - std::cos((j - 1) * phi)) / (sd2 * std::sqrt(sd2));
    }
    out.alpha_sq = sum;
    return out;
}

struct BifurcationScan {
    std::vector<FamilyPoint> points;
    double theta1 = 0.0;            // critical alpha^2 of the equatorial family
    double intersection_gap = 0.0;  // |alpha^2(theta -> pi/2) - Theta_1|
};

// Walks the latitude grid and reports how closely the family meets the
// equatorial one at theta = pi/2.
inline BifurcationScan bifurcation_scan(int n, const std::vector<double>& theta_grid) {
    detail::require_odd(n, "bifurcation_scan");
    BifurcationScan scan;
    scan.points.reserve(theta_grid.size());
    for (double t : theta_grid) scan.points.push_back(second_family_alpha_sq(n, t));
    scan.theta1 = critical_alpha_sq(n);
    scan.intersection_gap =
        std::abs(second_family_alpha_sq(n, kPi / 2.0).alpha_sq - scan.theta1);
    return scan;
}

}  // namespace cnb
