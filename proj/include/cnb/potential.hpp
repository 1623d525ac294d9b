#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cnb/errors.hpp"
#include "cnb/geometry.hpp"
#include "cnb/linalg.hpp"

namespace cnb {

// Pairwise quantities derived from cos d = q_i . q_j. sin d comes from
// sqrt(1 - cos^2 d) rather than arccos-then-sin; better conditioned near
// d = pi/2 where the cotangent changes sign.
struct PairGeom {
    double cd;   // cos d
    double sd;   // sin d
    double sd3;  // sin^3 d
    double sd5;  // sin^5 d
};

inline PairGeom pair_geom(double cos_d, double antipodal_tol = kAntipodalTol) {
    if (std::abs(cos_d) >= 1.0 - antipodal_tol)
        throw SingularConfiguration("pair at coincidence/antipode: cos d = " +
                                    std::to_string(cos_d));
    const double sd2 = 1.0 - cos_d * cos_d;
    const double sd = std::sqrt(sd2);
    return {cos_d, sd, sd2 * sd, sd2 * sd2 * sd};
}

// Cotangent potential U = sum_{i<j} m_i m_j cot d_ij.
inline double potential_U(const MassVector& masses, const CartesianConfig& cfg) {
    double u = 0.0;
    for (std::size_t i = 0; i < cfg.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.size(); ++j) {
            const PairGeom g = pair_geom(clamp_unit(dot(cfg.points[i], cfg.points[j])));
            u += masses[i] * masses[j] * g.cd / g.sd;
        }
    return u;
}

// Constrained gradient: grad_{q_i} U = sum_{j != i} m_i m_j (q_j - cos d_ij q_i) / sin^3 d_ij.
// Each vector is tangent to the sphere at q_i.
inline std::vector<Vec4> grad_cartesian(const MassVector& masses, const CartesianConfig& cfg) {
    const std::size_t n = cfg.size();
    std::vector<Vec4> g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const PairGeom pg = pair_geom(clamp_unit(dot(cfg.points[i], cfg.points[j])));
            g[i] += (masses[i] * masses[j] / pg.sd3) * (cfg.points[j] - pg.cd * cfg.points[i]);
        }
    return g;
}

struct SphericalGradient {
    std::vector<double> dphi;
    std::vector<double> dtheta;
};

namespace detail {

struct ChartPair {
    PairGeom g;
    double si, ci, sj, cj;  // sin/cos of theta_i, theta_j
    double sdp, cdp;        // sin/cos of (phi_i - phi_j)
};

inline ChartPair chart_pair(const SphericalConfig& cfg, std::size_t i, std::size_t j) {
    ChartPair p;
    p.si = std::sin(cfg.theta[i]);
    p.ci = std::cos(cfg.theta[i]);
    p.sj = std::sin(cfg.theta[j]);
    p.cj = std::cos(cfg.theta[j]);
    p.sdp = std::sin(cfg.phi[i] - cfg.phi[j]);
    p.cdp = std::cos(cfg.phi[i] - cfg.phi[j]);
    p.g = pair_geom(clamp_unit(p.ci * p.cj + p.si * p.sj * p.cdp));
    return p;
}

}  // namespace detail

// Chart gradient (d U / d phi_i, d U / d theta_i) on (S^2)^n.
inline SphericalGradient grad_spherical(const MassVector& masses, const SphericalConfig& cfg) {
    const std::size_t n = cfg.size();
    SphericalGradient out;
    out.dphi.assign(n, 0.0);
    out.dtheta.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const detail::ChartPair p = detail::chart_pair(cfg, i, j);
            const double mm = masses[i] * masses[j];
            out.dphi[i] += mm * (-p.si * p.sj * p.sdp) / p.g.sd3;
            out.dtheta[i] += mm * (-p.si * p.cj + p.ci * p.sj * p.cdp) / p.g.sd3;
        }
    return out;
}

struct SphericalHessian {
    Matrix phi_block;    // d^2 U / d phi_i d phi_j, symmetric
    Matrix theta_block;  // d^2 U / d theta_i d theta_j, symmetric
    Matrix mixed_block;  // mixed_block(i, j) = d^2 U / d theta_i d phi_j (finite differences)
    SphericalConfig evaluation_point;
};

// Step for the finite-difference mixed block; the analytic mixed formula is
// not available, only its vanishing at the regular polygon.
inline constexpr double kMixedHessianStep = 1e-5;

inline SphericalHessian hessian_spherical(const MassVector& masses, const SphericalConfig& cfg) {
    const std::size_t n = cfg.size();
    SphericalHessian h;
    h.phi_block = Matrix(n, n);
    h.theta_block = Matrix(n, n);
    h.mixed_block = Matrix(n, n);
    h.evaluation_point = cfg;

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const detail::ChartPair p = detail::chart_pair(cfg, i, j);
            const double mm = masses[i] * masses[j];

            // d^2 U / d phi_i d phi_j and the diagonal as minus the row sum.
            const double pp =
                mm * (-3.0 * p.g.cd * p.si * p.si * p.sj * p.sj * p.sdp * p.sdp +
                      p.g.sd * p.g.sd * p.si * p.sj * p.cdp) / p.g.sd5;
            h.phi_block(i, j) = pp;
            h.phi_block(i, i) -= pp;

            // d cos d / d theta_i and d cos d / d theta_j.
            const double gi = -p.si * p.cj + p.ci * p.sj * p.cdp;
            const double gj = -p.sj * p.ci + p.cj * p.si * p.cdp;
            h.theta_block(i, j) =
                mm * (3.0 * p.g.cd * gj * gi + p.g.sd * p.g.sd * (p.si * p.sj + p.ci * p.cj * p.cdp)) /
                p.g.sd5;
            h.theta_block(i, i) +=
                mm * (3.0 * p.g.cd * gi * gi - p.g.sd * p.g.sd * p.g.cd) / p.g.sd5;
        }

    // Mixed block by central differences of the analytic gradient in theta_i.
    const double step = kMixedHessianStep;
    for (std::size_t i = 0; i < n; ++i) {
        SphericalConfig plus = cfg, minus = cfg;
        plus.theta[i] += step;
        minus.theta[i] -= step;
        const SphericalGradient gp = grad_spherical(masses, plus);
        const SphericalGradient gm = grad_spherical(masses, minus);
        for (std::size_t j = 0; j < n; ++j)
            h.mixed_block(i, j) = (gp.dphi[j] - gm.dphi[j]) / (2.0 * step);
    }
    return h;
}

struct EquilibriumResidual {
    std::vector<Vec4> residual_vectors;  // tangential parts, one per body
    std::vector<double> lambda;          // multipliers sum_j m_j cos d_ij / sin^3 d_ij
    double max_norm = 0.0;
};

// Declares a configuration an equilibrium when max_norm falls below this.
inline constexpr double kEquilibriumTol = 1e-10;

// Residual of sum_{j != i} m_j q_j / sin^3 d_ij - lambda_i q_i = 0 with the
// multiplier that makes the normal component vanish. m_i times the residual
// equals grad_{q_i} U exactly.
inline EquilibriumResidual equilibrium_residual_cartesian(const MassVector& masses,
                                                          const CartesianConfig& cfg) {
    const std::size_t n = cfg.size();
    EquilibriumResidual out;
    out.residual_vectors.resize(n);
    out.lambda.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        Vec4 s{};
        double lam = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const PairGeom g = pair_geom(clamp_unit(dot(cfg.points[i], cfg.points[j])));
            s += (masses[j] / g.sd3) * cfg.points[j];
            lam += masses[j] * g.cd / g.sd3;
        }
        out.lambda[i] = lam;
        out.residual_vectors[i] = s - lam * cfg.points[i];
        out.max_norm = std::max(out.max_norm, norm(out.residual_vectors[i]));
    }
    return out;
}

// Left-hand sides of the S^1 equilibrium condition
//   0 = sum_{j != i} m_j sin(phi_j - phi_i) / sin^3 d_ij.
inline std::vector<double> equilibrium_residual_s1(const MassVector& masses,
                                                   const std::vector<double>& phi) {
    const std::size_t n = phi.size();
    std::vector<double> r(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double s = std::sin(phi[j] - phi[i]);
            const PairGeom g = pair_geom(clamp_unit(std::cos(phi[j] - phi[i])));
            r[i] += masses[j] * s / g.sd3;
        }
    return r;
}

}  // namespace cnb
