#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "cnb/errors.hpp"

namespace cnb {

inline constexpr double kPi = std::numbers::pi;

// Tolerance below which |q_i . q_j| = 1 is treated as membership in the
// singular set (coincident or antipodal pair). Machine-epsilon scale.
inline constexpr double kAntipodalTol = 1e-14;

// Spherical charts degenerate at the coordinate poles; reject latitudes
// within this margin of {0, pi}.
inline constexpr double kPoleMargin = 1e-8;

struct Vec4 {
    double x = 0.0, y = 0.0, z = 0.0, w = 0.0;

    double& operator[](std::size_t i) { return (&x)[i]; }
    double operator[](std::size_t i) const { return (&x)[i]; }

    Vec4 operator+(const Vec4& o) const { return {x + o.x, y + o.y, z + o.z, w + o.w}; }
    Vec4 operator-(const Vec4& o) const { return {x - o.x, y - o.y, z - o.z, w - o.w}; }
    Vec4 operator*(double s) const { return {x * s, y * s, z * s, w * s}; }
    Vec4& operator+=(const Vec4& o) {
        x += o.x; y += o.y; z += o.z; w += o.w;
        return *this;
    }
};

inline Vec4 operator*(double s, const Vec4& v) { return v * s; }

inline double dot(const Vec4& a, const Vec4& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z + a.w * b.w;
}

inline double norm(const Vec4& v) { return std::sqrt(dot(v, v)); }

inline Vec4 normalized(const Vec4& v) {
    const double n = norm(v);
    return {v.x / n, v.y / n, v.z / n, v.w / n};
}

enum class Chart { S1, S2, S3 };

// n positive masses. Partial sums are strictly increasing by positivity.
struct MassVector {
    std::vector<double> m;

    explicit MassVector(std::vector<double> masses) : m(std::move(masses)) {
        if (m.size() < 2) throw ValidationError("MassVector: need at least 2 masses");
        for (double mi : m)
            if (!(mi > 0.0)) throw ValidationError("MassVector: masses must be positive");
    }

    std::size_t size() const { return m.size(); }
    double operator[](std::size_t i) const { return m[i]; }

    static MassVector uniform(std::size_t n, double value = 1.0) {
        return MassVector(std::vector<double>(n, value));
    }

    double total() const {
        double s = 0.0;
        for (double mi : m) s += mi;
        return s;
    }
};

struct CartesianConfig {
    std::vector<Vec4> points;
    Chart chart = Chart::S3;

    std::size_t size() const { return points.size(); }
};

// (phi, theta) chart on S^2: (x, y, z) = (sin t cos p, sin t sin p, cos t).
// Angles in radians; phi is taken mod 2*pi, theta must stay off the poles.
struct SphericalConfig {
    std::vector<double> phi;
    std::vector<double> theta;

    std::size_t size() const { return phi.size(); }
};

struct RotationParams {
    double alpha = 0.0;
    double beta = 0.0;
    double t = 0.0;
};

inline double clamp_unit(double x) { return std::max(-1.0, std::min(1.0, x)); }

// Geodesic distance on the unit sphere, arccos of the clamped dot product.
// Signals the singular set when the pair is (anti)parallel within tol.
inline double geodesic_distance(const Vec4& a, const Vec4& b,
                                double antipodal_tol = kAntipodalTol) {
    const double c = clamp_unit(dot(a, b));
    if (std::abs(c) >= 1.0 - antipodal_tol)
        throw AntipodalOrCoincident("pair is coincident or antipodal: |q_i.q_j| = " +
                                    std::to_string(std::abs(c)));
    return std::acos(c);
}

inline Vec4 spherical_point(double phi, double theta) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
            std::cos(theta), 0.0};
}

// Throws if the chart is degenerate (theta at a pole) or the configuration
// touches the singular set.
inline void check_spherical_config(const SphericalConfig& cfg,
                                   double pole_margin = kPoleMargin) {
    const std::size_t n = cfg.size();
    if (cfg.theta.size() != n)
        throw ValidationError("SphericalConfig: phi/theta length mismatch");
    for (double t : cfg.theta)
        if (t < pole_margin || t > kPi - pole_margin)
            throw PoleSingularity("theta within pole margin: " + std::to_string(t));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec4 a = spherical_point(cfg.phi[i], cfg.theta[i]);
            const Vec4 b = spherical_point(cfg.phi[j], cfg.theta[j]);
            if (std::abs(dot(a, b)) >= 1.0 - kAntipodalTol)
                throw SingularConfiguration("bodies " + std::to_string(i + 1) + " and " +
                                            std::to_string(j + 1) +
                                            " coincident or antipodal");
        }
}

inline CartesianConfig spherical_to_cartesian(const SphericalConfig& cfg) {
    CartesianConfig out;
    out.chart = Chart::S2;
    out.points.reserve(cfg.size());
    for (std::size_t i = 0; i < cfg.size(); ++i)
        out.points.push_back(spherical_point(cfg.phi[i], cfg.theta[i]));
    return out;
}

// Inverse chart map. Requires w = 0; phi lands in [0, 2*pi), theta in (0, pi).
inline SphericalConfig cartesian_to_spherical(const CartesianConfig& cfg) {
    SphericalConfig out;
    out.phi.reserve(cfg.size());
    out.theta.reserve(cfg.size());
    for (const Vec4& q : cfg.points) {
        if (std::abs(q.w) > 1e-12)
            throw ValidationError("cartesian_to_spherical: point leaves the S2 chart (w != 0)");
        double phi = std::atan2(q.y, q.x);
        if (phi < 0.0) phi += 2.0 * kPi;
        out.phi.push_back(phi);
        out.theta.push_back(std::acos(clamp_unit(q.z)));
    }
    return out;
}

// One-parameter rotation subgroup of SO(4): block rotation by alpha*t in the
// (x, y) plane and beta*t in the (z, w) plane.
inline Vec4 rotate_point(const Vec4& q, const RotationParams& r) {
    const double ca = std::cos(r.alpha * r.t), sa = std::sin(r.alpha * r.t);
    const double cb = std::cos(r.beta * r.t), sb = std::sin(r.beta * r.t);
    return {ca * q.x - sa * q.y, sa * q.x + ca * q.y,
            cb * q.z - sb * q.w, sb * q.z + cb * q.w};
}

inline CartesianConfig apply_rotation(const CartesianConfig& cfg, const RotationParams& r) {
    CartesianConfig out;
    out.chart = cfg.chart;
    out.points.reserve(cfg.size());
    for (const Vec4& q : cfg.points) out.points.push_back(rotate_point(q, r));
    return out;
}

// Generator of the subgroup applied to a point: d/dt at t = 0.
inline Vec4 apply_generator(double alpha, double beta, const Vec4& q) {
    return {-alpha * q.y, alpha * q.x, -beta * q.w, beta * q.z};
}

// Regular n-gon on the equator: phi_k = 2*pi*k/n (k = 1..n), theta = pi/2.
// Even n places bodies antipodally and is excluded.
inline SphericalConfig regular_polygon(int n) {
    if (n < 3) throw ValidationError("regular_polygon: need n >= 3");
    if (n % 2 == 0)
        throw EvenN("regular polygon with even n has antipodal pairs (singular set)");
    SphericalConfig cfg;
    cfg.phi.resize(n);
    cfg.theta.assign(n, kPi / 2.0);
    for (int k = 1; k <= n; ++k) cfg.phi[k - 1] = 2.0 * kPi * k / n;
    return cfg;
}

// Distance to the singular set: the smallest of min(d_ij, pi - d_ij) over
// pairs. Zero marks a coincident or antipodal pair. Never throws.
inline double min_separation(const CartesianConfig& cfg) {
    double best = kPi;
    for (std::size_t i = 0; i < cfg.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.size(); ++j) {
            const double d = std::acos(clamp_unit(dot(cfg.points[i], cfg.points[j])));
            best = std::min(best, std::min(d, kPi - d));
        }
    return best;
}

}  // namespace cnb
