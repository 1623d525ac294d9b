#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "cnb/errors.hpp"
#include "cnb/geometry.hpp"
#include "cnb/linalg.hpp"
#include "cnb/potential.hpp"
#include "cnb/spectra.hpp"

namespace cnb {

// Jacobi-coordinate data for a mass vector: the transformation matrix, the
// partial sums mu_k and the reduced masses M_k = m_k mu_{k-1} / mu_k.
// Arrays are indexed like the math (mu[k] for mu_k; slot 0 unused).
struct JacobiChart {
    int n = 0;
    Matrix A;
    Matrix A_inv;
    std::vector<double> mu;    // mu[1..n]
    std::vector<double> bigM;  // bigM[2..n]
    double total_mass = 0.0;

    // First n-1 columns of A_inv: d phi / d u at fixed g_n.
    Matrix shape_columns() const {
        Matrix w(n, n - 1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j + 1 < n; ++j) w(i, j) = A_inv(i, j);
        return w;
    }
};

inline JacobiChart jacobi_chart(const MassVector& masses) {
    const int n = static_cast<int>(masses.size());
    JacobiChart c;
    c.n = n;
    c.mu.assign(n + 1, 0.0);
    for (int k = 1; k <= n; ++k) c.mu[k] = c.mu[k - 1] + masses[k - 1];
    c.total_mass = c.mu[n];
    c.bigM.assign(n + 1, 0.0);
    for (int k = 2; k <= n; ++k) c.bigM[k] = masses[k - 1] * c.mu[k - 1] / c.mu[k];

    c.A = Matrix(n, n);
    for (int k = 1; k < n; ++k) {
        for (int j = 1; j <= k; ++j) c.A(k - 1, j - 1) = -masses[j - 1] / c.mu[k];
        c.A(k - 1, k) = 1.0;
    }
    for (int j = 1; j <= n; ++j) c.A(n - 1, j - 1) = masses[j - 1] / c.mu[n];
    c.A_inv = inverse(c.A);
    return c;
}

// Reduced phase point on the circle: (u_2..u_n, v_2..v_n) plus the cyclic
// pair (g_n, G_n) carried for reconstruction.
struct ReducedStateS1 {
    std::vector<double> u;
    std::vector<double> v;
    double g = 0.0;
    double G = 0.0;
};

struct ReducedStateS2 {
    std::vector<double> u;
    std::vector<double> theta;
    std::vector<double> v;
    std::vector<double> p_theta;
    double g = 0.0;
    double G = 0.0;
};

inline ReducedStateS1 to_jacobi(const JacobiChart& chart, const std::vector<double>& phi,
                                const std::vector<double>& p_phi) {
    const int n = chart.n;
    const std::vector<double> au = chart.A * phi;
    const std::vector<double> v = solve(chart.A.transposed(), p_phi);
    ReducedStateS1 s;
    s.u.assign(au.begin(), au.begin() + (n - 1));
    s.g = au[n - 1];
    s.v.assign(v.begin(), v.begin() + (n - 1));
    s.G = v[n - 1];
    return s;
}

inline std::pair<std::vector<double>, std::vector<double>> from_jacobi(
    const JacobiChart& chart, const ReducedStateS1& s) {
    std::vector<double> au = s.u;
    au.push_back(s.g);
    std::vector<double> v = s.v;
    v.push_back(s.G);
    return {chart.A_inv * au, chart.A.transposed() * v};
}

inline std::vector<double> reconstruct_phi(const JacobiChart& chart,
                                           const std::vector<double>& u, double g) {
    std::vector<double> au = u;
    au.push_back(g);
    return chart.A_inv * au;
}

// Reduced Hamiltonian on S^1: sum v_i^2 / 2 M_i - U. Equals the unreduced
// Hamiltonian minus the constant G_n^2 / 2 mu_n.
inline double reduced_h1(const JacobiChart& chart, const ReducedStateS1& s,
                         const MassVector& masses) {
    double kin = 0.0;
    for (int i = 2; i <= chart.n; ++i) kin += s.v[i - 2] * s.v[i - 2] / (2.0 * chart.bigM[i]);
    SphericalConfig cfg;
    cfg.phi = reconstruct_phi(chart, s.u, s.g);
    cfg.theta.assign(chart.n, kPi / 2.0);
    return kin - potential_U(masses, spherical_to_cartesian(cfg));
}

// Kinetic matrix P = A S M S A^T of the partially reduced S^2 system,
// assembled from its closed-form entries. S = diag(1/sin theta_i),
// M = diag(1/m_i).
inline Matrix p_matrix(const JacobiChart& chart, const std::vector<double>& theta,
                       const MassVector& masses) {
    const int n = chart.n;
    for (double t : theta)
        if (t < kPoleMargin || t > kPi - kPoleMargin)
            throw PoleSingularity("p_matrix: theta within pole margin");

    // prefix[k] = sum_{i<=k} m_i / sin^2 theta_i
    std::vector<double> prefix(n + 1, 0.0);
    std::vector<double> inv_sin2(n + 1, 0.0);
    for (int i = 1; i <= n; ++i) {
        const double s = std::sin(theta[i - 1]);
        inv_sin2[i] = 1.0 / (s * s);
        prefix[i] = prefix[i - 1] + masses[i - 1] * inv_sin2[i];
    }

    Matrix p(n, n);
    for (int k = 1; k < n; ++k)
        p(k - 1, k - 1) = prefix[k] / (chart.mu[k] * chart.mu[k]) +
                          inv_sin2[k + 1] / masses[k];
    p(n - 1, n - 1) = prefix[n] / (chart.mu[n] * chart.mu[n]);
    for (int k = 1; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
            const double v = prefix[k] / (chart.mu[k] * chart.mu[l]) -
                             inv_sin2[k + 1] / chart.mu[l];
            p(k - 1, l - 1) = v;
            p(l - 1, k - 1) = v;
        }
        const double v = -prefix[k] / (chart.mu[k] * chart.mu[n]) +
                         inv_sin2[k + 1] / chart.mu[n];
        p(k - 1, n - 1) = v;
        p(n - 1, k - 1) = v;
    }
    return p;
}

namespace detail {

inline std::vector<double> momentum_vector(const ReducedStateS2& s) {
    std::vector<double> v = s.v;
    v.push_back(s.G);
    return v;
}

}  // namespace detail

// Partially reduced Hamiltonian on S^2: (1/2) v^T P v + sum p_theta^2 / 2 m - U,
// where v carries G_n in its last slot.
inline double reduced_h2(const JacobiChart& chart, const ReducedStateS2& s,
                         const MassVector& masses) {
    const int n = chart.n;
    const Matrix p = p_matrix(chart, s.theta, masses);
    const std::vector<double> v = detail::momentum_vector(s);
    const std::vector<double> pv = p * v;
    double h = 0.5 * dot(v, pv);
    for (int i = 0; i < n; ++i) h += s.p_theta[i] * s.p_theta[i] / (2.0 * masses[i]);
    SphericalConfig cfg;
    cfg.phi = reconstruct_phi(chart, s.u, s.g);
    cfg.theta = s.theta;
    return h - potential_U(masses, spherical_to_cartesian(cfg));
}

struct ReducedGradientS1 {
    std::vector<double> du;
    std::vector<double> dv;

    double max_norm() const {
        return std::max(norm_inf(du), norm_inf(dv));
    }
};

struct ReducedGradientS2 {
    std::vector<double> du;
    std::vector<double> dtheta;
    std::vector<double> dv;
    std::vector<double> dp_theta;

    double max_norm() const {
        return std::max(std::max(norm_inf(du), norm_inf(dtheta)),
                        std::max(norm_inf(dv), norm_inf(dp_theta)));
    }
};

// Analytic gradient of H_1 in the reduced variables (chain rule through the
// chart; the g_n direction is cyclic and excluded).
inline ReducedGradientS1 reduced_gradient_h1(const JacobiChart& chart,
                                             const ReducedStateS1& s,
                                             const MassVector& masses) {
    const int n = chart.n;
    ReducedGradientS1 g;
    g.dv.resize(n - 1);
    for (int i = 2; i <= n; ++i) g.dv[i - 2] = s.v[i - 2] / chart.bigM[i];

    SphericalConfig cfg;
    cfg.phi = reconstruct_phi(chart, s.u, s.g);
    cfg.theta.assign(n, kPi / 2.0);
    const SphericalGradient du = grad_spherical(masses, cfg);
    const Matrix w = chart.shape_columns();
    g.du.assign(n - 1, 0.0);
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i < n; ++i) g.du[j] -= w(i, j) * du.dphi[i];
    return g;
}

inline ReducedGradientS2 reduced_gradient_h2(const JacobiChart& chart,
                                             const ReducedStateS2& s,
                                             const MassVector& masses) {
    const int n = chart.n;
    ReducedGradientS2 g;

    SphericalConfig cfg;
    cfg.phi = reconstruct_phi(chart, s.u, s.g);
    cfg.theta = s.theta;
    const SphericalGradient grad = grad_spherical(masses, cfg);

    const Matrix w = chart.shape_columns();
    g.du.assign(n - 1, 0.0);
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i < n; ++i) g.du[j] -= w(i, j) * grad.dphi[i];

    // dF/dtheta_i = -p_phi_i^2 cos / (m_i sin^3) through p_phi = A^T v.
    const std::vector<double> v = detail::momentum_vector(s);
    const std::vector<double> p_phi = chart.A.transposed() * v;
    g.dtheta.resize(n);
    for (int i = 0; i < n; ++i) {
        const double st = std::sin(s.theta[i]), ct = std::cos(s.theta[i]);
        g.dtheta[i] = -p_phi[i] * p_phi[i] * ct / (masses[i] * st * st * st) - grad.dtheta[i];
    }

    const Matrix p = p_matrix(chart, s.theta, masses);
    const std::vector<double> pv = p * v;
    g.dv.assign(pv.begin(), pv.begin() + (n - 1));

    g.dp_theta.resize(n);
    for (int i = 0; i < n; ++i) g.dp_theta[i] = s.p_theta[i] / masses[i];
    return g;
}

// Reduced fixed points of the polygon relative equilibrium with angular
// velocity alpha: X_alpha on S^1, Y_alpha on S^2. Equal unit masses.
inline ReducedStateS1 reduced_equilibrium_s1(int n, double alpha) {
    detail::require_odd(n, "reduced_equilibrium_s1");
    const JacobiChart chart = jacobi_chart(MassVector::uniform(n));
    const SphericalConfig poly = regular_polygon(n);
    std::vector<double> p_phi(n, alpha);
    ReducedStateS1 s = to_jacobi(chart, poly.phi, p_phi);
    std::fill(s.v.begin(), s.v.end(), 0.0);
    s.G = n * alpha;
    return s;
}

inline ReducedStateS2 reduced_equilibrium_s2(int n, double alpha) {
    detail::require_odd(n, "reduced_equilibrium_s2");
    const ReducedStateS1 s1 = reduced_equilibrium_s1(n, alpha);
    ReducedStateS2 s;
    s.u = s1.u;
    s.v = s1.v;
    s.g = s1.g;
    s.G = s1.G;
    s.theta.assign(n, kPi / 2.0);
    s.p_theta.assign(n, 0.0);
    return s;
}

enum class Verdict { LyapunovStable, LinearlyUnstable, Critical };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::LyapunovStable: return "LyapunovStable";
        case Verdict::LinearlyUnstable: return "LinearlyUnstable";
        default: return "Critical";
    }
}

enum class SubspaceType { Elliptic, Hyperbolic, Nilpotent };

inline std::string to_string(SubspaceType t) {
    switch (t) {
        case SubspaceType::Elliptic: return "elliptic";
        case SubspaceType::Hyperbolic: return "hyperbolic";
        default: return "nilpotent";
    }
}

// One two-dimensional invariant subspace of the linearization: the pair
// (+sqrt(lambda), -sqrt(lambda)) when lambda > 0, (+-i sqrt(-lambda)) when
// lambda < 0, or a 2x2 nilpotent Jordan block when lambda = 0.
struct EigenClass {
    double lambda = 0.0;          // eigenvalue of the block product (KD or QE)
    SubspaceType type = SubspaceType::Elliptic;
    std::string part;             // "u" or "theta"
    std::vector<double> mode;     // eigenvector within its block
    std::string description;
};

struct LinearizationReport {
    int n = 0;
    double alpha = 0.0;
    Matrix L;             // full (4n-2) x (4n-2) linearization at Y_alpha
    Matrix u_hessian;     // W^T [d2U/dphi dphi] W, (n-1) x (n-1)
    Matrix theta_matrix;  // [d2U/dtheta dtheta] - alpha^2 I, n x n
    std::vector<EigenClass> eigen_classes;
    Verdict verdict = Verdict::Critical;

    // Eigenvalue multiset of L implied by the block classes.
    std::vector<std::complex<double>> eigenvalues() const {
        std::vector<std::complex<double>> ev;
        for (const EigenClass& c : eigen_classes) {
            if (c.type == SubspaceType::Hyperbolic) {
                const double r = std::sqrt(c.lambda);
                ev.emplace_back(r, 0.0);
                ev.emplace_back(-r, 0.0);
            } else if (c.type == SubspaceType::Elliptic) {
                const double r = std::sqrt(-c.lambda);
                ev.emplace_back(0.0, r);
                ev.emplace_back(0.0, -r);
            } else {
                ev.emplace_back(0.0, 0.0);
                ev.emplace_back(0.0, 0.0);
            }
        }
        return ev;
    }
};

struct StabilityClassification {
    int n = 0;
    double alpha = 0.0;
    double alpha_sq = 0.0;
    double theta1 = 0.0;          // critical alpha^2
    double critical_alpha = 0.0;  // sqrt(theta1)
    Verdict s1 = Verdict::LyapunovStable;
    Verdict s2 = Verdict::Critical;
    bool h1_positive_definite = false;
    bool h2_positive_definite = false;
};

namespace detail {

inline bool positive_definite(const Matrix& m) {
    const SymmetricEigen e = jacobi_eigen(m);
    return e.values.front() > 0.0;
}

}  // namespace detail

inline LinearizationReport linearize_at_Y(int n, double alpha) {
    detail::require_odd(n, "linearize_at_Y");
    const MassVector masses = MassVector::uniform(n);
    const JacobiChart chart = jacobi_chart(masses);
    const SphericalConfig poly = regular_polygon(n);
    const SphericalHessian hess = hessian_spherical(masses, poly);

    LinearizationReport rep;
    rep.n = n;
    rep.alpha = alpha;

    // u-Hessian by congruence with the shape columns of A^{-1}; the cyclic
    // g_n direction carries the zero eigenvalue and is dropped.
    const Matrix w = chart.shape_columns();
    Matrix k = w.transposed() * hess.phi_block * w;
    for (int i = 0; i + 1 < n; ++i)
        for (int j = i + 1; j + 1 < n; ++j) {
            const double s = 0.5 * (k(i, j) + k(j, i));
            k(i, j) = s;
            k(j, i) = s;
        }
    rep.u_hessian = k;

    Matrix q = hess.theta_block;
    for (int i = 0; i < n; ++i) q(i, i) -= alpha * alpha;
    rep.theta_matrix = q;

    // Momentum blocks at the equator: D from the P matrix (diagonal there),
    // E = diag(1/m_i) = I for unit masses.
    const Matrix p_eq = p_matrix(chart, std::vector<double>(n, kPi / 2.0), masses);
    Matrix d(n - 1, n - 1);
    for (int i = 0; i + 1 < n; ++i) d(i, i) = p_eq(i, i);
    const Matrix e = Matrix::identity(n);

    // Assemble L in the state ordering (u, theta, v, p_theta).
    const int dim = 4 * n - 2;
    rep.L = Matrix(dim, dim);
    const int ou = 0, ot = n - 1, ov = 2 * n - 1, op = 3 * n - 2;
    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j) {
            rep.L(ou + i, ov + j) = d(i, j);
            rep.L(ov + i, ou + j) = k(i, j);
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            rep.L(ot + i, op + j) = e(i, j);
            rep.L(op + i, ot + j) = q(i, j);
        }

    // u-part classes from K D, via the symmetric D^{1/2} K D^{1/2}.
    Matrix dk(n - 1, n - 1);
    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j)
            dk(i, j) = std::sqrt(d(i, i)) * k(i, j) * std::sqrt(d(j, j));
    const SymmetricEigen ue = jacobi_eigen(dk);
    const double utol = 1e-9 * (1.0 + dk.max_abs());
    for (int m = 0; m + 1 < n; ++m) {
        EigenClass c;
        c.lambda = ue.values[m];
        c.part = "u";
        c.mode.resize(n - 1);
        for (int i = 0; i + 1 < n; ++i)
            c.mode[i] = ue.vectors(i, m) / std::sqrt(d(i, i));
        c.type = (std::abs(c.lambda) <= utol)
                     ? SubspaceType::Nilpotent
                     : (c.lambda > 0.0 ? SubspaceType::Hyperbolic : SubspaceType::Elliptic);
        c.description = "u-block pair, lambda = " + std::to_string(c.lambda);
        rep.eigen_classes.push_back(std::move(c));
    }

    // theta-part classes from Q E = Q.
    const SymmetricEigen te = jacobi_eigen(q);
    const double ttol = 1e-9 * (1.0 + q.max_abs());
    for (int m = 0; m < n; ++m) {
        EigenClass c;
        c.lambda = te.values[m];
        c.part = "theta";
        c.mode.resize(n);
        for (int i = 0; i < n; ++i) c.mode[i] = te.vectors(i, m);
        c.type = (std::abs(c.lambda) <= ttol)
                     ? SubspaceType::Nilpotent
                     : (c.lambda > 0.0 ? SubspaceType::Hyperbolic : SubspaceType::Elliptic);
        c.description = "theta-block pair, lambda = " + std::to_string(c.lambda);
        rep.eigen_classes.push_back(std::move(c));
    }

    const double theta1 = critical_alpha_sq(n);
    const double band = 1e-9 * (1.0 + theta1);
    const double a2 = alpha * alpha;
    rep.verdict = (a2 < theta1 - band)   ? Verdict::LinearlyUnstable
                  : (a2 > theta1 + band) ? Verdict::LyapunovStable
                                         : Verdict::Critical;
    return rep;
}

// Theorem-7 classification: on S^1 the polygon relative equilibrium is
// Lyapunov stable for every alpha; on S^2 the verdict flips at
// alpha^2 = Theta_1, with a Critical band at the threshold itself.
inline StabilityClassification classify_stability(int n, double alpha) {
    detail::require_odd(n, "classify_stability");
    StabilityClassification out;
    out.n = n;
    out.alpha = alpha;
    out.alpha_sq = alpha * alpha;
    out.theta1 = critical_alpha_sq(n);
    out.critical_alpha = std::sqrt(out.theta1);

    const LinearizationReport rep = linearize_at_Y(n, alpha);
    out.s2 = rep.verdict;
    out.s1 = Verdict::LyapunovStable;

    // Certificates: H_1 is positive definite at X_alpha iff the u-Hessian is
    // negative definite; D^2 H_2 at Y_alpha additionally needs
    // alpha^2 I - [d2U/dtheta dtheta] positive definite.
    const SymmetricEigen ue = jacobi_eigen(rep.u_hessian);
    out.h1_positive_definite = ue.values.back() < 0.0;
    Matrix neg_q = rep.theta_matrix.scaled(-1.0);
    out.h2_positive_definite = out.h1_positive_definite && detail::positive_definite(neg_q);
    return out;
}

}  // namespace cnb
