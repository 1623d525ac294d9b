#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "cnb/errors.hpp"
#include "cnb/linalg.hpp"
#include "cnb/potential.hpp"

namespace cnb {

struct CirculantRow {
    std::vector<double> c;  // first row; row k is the (k-1)-th cyclic shift

    std::size_t size() const { return c.size(); }
};

// k-th eigenvector (1, rho_{k-1}, rho_{k-1}^2, ...) of any n x n circulant,
// rho_m = exp(i 2 pi m / n). k is 1-based.
inline std::vector<std::complex<double>> circulant_eigenvector(std::size_t n, std::size_t k) {
    std::vector<std::complex<double>> v(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t e = ((k - 1) * j) % n;
        v[j] = std::polar(1.0, 2.0 * kPi * static_cast<double>(e) / static_cast<double>(n));
    }
    return v;
}

// Eigenvalues lambda_k = sum_j c_{1j} rho_{k-1}^{j-1}, k = 1..n (index k-1).
inline std::vector<std::complex<double>> circulant_eigen(const CirculantRow& row) {
    const std::size_t n = row.size();
    std::vector<std::complex<double>> lam(n);
    for (std::size_t k = 1; k <= n; ++k) {
        std::complex<double> s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t e = ((k - 1) * j) % n;
            s += row.c[j] * std::polar(1.0, 2.0 * kPi * static_cast<double>(e) /
                                               static_cast<double>(n));
        }
        lam[k - 1] = s;
    }
    return lam;
}

inline Matrix circulant_matrix(const CirculantRow& row) {
    const std::size_t n = row.size();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = row.c[(j + n - i) % n];
    return m;
}

// Skew-symmetric coefficient matrix of the S^1 equilibrium system:
// b_kj = sin(phi_j - phi_k) / sin^3 d_kj, zero diagonal. B m = 0 is exactly
// the equilibrium condition for the mass vector m.
inline Matrix build_skew_B(const std::vector<double>& phi) {
    const std::size_t n = phi.size();
    Matrix b(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = k + 1; j < n; ++j) {
            const double s = std::sin(phi[j] - phi[k]);
            const PairGeom g = pair_geom(clamp_unit(std::cos(phi[j] - phi[k])));
            b(k, j) = s / g.sd3;
            b(j, k) = -b(k, j);
        }
    return b;
}

namespace detail {

inline void require_odd(int n, const char* who) {
    if (n < 3) throw ValidationError(std::string(who) + ": need n >= 3");
    if (n % 2 == 0) throw EvenN(std::string(who) + ": n must be odd");
}

}  // namespace detail

// The three closed-form eigenvalue families at the regular n-gon, n = 2p + 1,
// phi = 2 pi / n. The formulas extend to any integer index k >= 1; the
// certification walks them past k = n.

inline double gamma_closed(int n, int k) {
    const int p = (n - 1) / 2;
    const double phi = 2.0 * kPi / n;
    double s = 0.0;
    for (int j = 1; j <= p; ++j) {
        const double sj = std::sin(j * phi);
        s += std::sin(static_cast<double>(j) * (k - 1) * phi) / (sj * sj);
    }
    return 2.0 * s;
}

inline double phi_closed(int n, int k) {
    const int p = (n - 1) / 2;
    const double phi = 2.0 * kPi / n;
    double s = 0.0;
    for (int j = 1; j <= p; ++j) {
        const double sj = std::sin(j * phi);
        s += std::cos(j * phi) * (1.0 - std::cos(static_cast<double>(k - 1) * j * phi)) /
             (sj * sj * sj);
    }
    return 4.0 * s;
}

inline double theta_closed(int n, int k) {
    const int p = (n - 1) / 2;
    const double phi = 2.0 * kPi / n;
    double s = 0.0;
    for (int j = 1; j <= p; ++j) {
        const double sj = std::sin(j * phi);
        s += (std::cos(static_cast<double>(j) * (k - 1) * phi) - std::cos(j * phi)) /
             (sj * sj * sj);
    }
    return 2.0 * s;
}

inline std::vector<double> gamma_sequence(int n) {
    detail::require_odd(n, "gamma_sequence");
    std::vector<double> out(n);
    for (int k = 1; k <= n; ++k) out[k - 1] = gamma_closed(n, k);
    return out;
}

inline std::vector<double> phi_sequence(int n) {
    detail::require_odd(n, "phi_sequence");
    std::vector<double> out(n);
    for (int k = 1; k <= n; ++k) out[k - 1] = phi_closed(n, k);
    return out;
}

inline std::vector<double> theta_sequence(int n) {
    detail::require_odd(n, "theta_sequence");
    std::vector<double> out(n);
    for (int k = 1; k <= n; ++k) out[k - 1] = theta_closed(n, k);
    return out;
}

// Squared critical angular velocity Theta_1 = 2 sum_j (1 - cos j phi) / sin^3 j phi.
inline double critical_alpha_sq(int n) {
    detail::require_odd(n, "critical_alpha_sq");
    return theta_closed(n, 1);
}

// Explicit circulant Hessian blocks of U at the regular n-gon with unit
// masses (phi-phi and theta-theta blocks in the spherical chart).
inline Matrix polygon_phi_block(int n) {
    detail::require_odd(n, "polygon_phi_block");
    const double phi = 2.0 * kPi / n;
    CirculantRow row;
    row.c.assign(n, 0.0);
    for (int j = 2; j <= n; ++j) {
        const double s = std::abs(std::sin((j - 1) * phi));
        row.c[j - 1] = -2.0 * std::cos((j - 1) * phi) / (s * s * s);
        row.c[0] -= row.c[j - 1];
    }
    return circulant_matrix(row);
}

inline Matrix polygon_theta_block(int n) {
    detail::require_odd(n, "polygon_theta_block");
    const double phi = 2.0 * kPi / n;
    CirculantRow row;
    row.c.assign(n, 0.0);
    for (int j = 2; j <= n; ++j) {
        const double s = std::abs(std::sin((j - 1) * phi));
        row.c[j - 1] = 1.0 / (s * s * s);
        row.c[0] -= std::cos((j - 1) * phi) / (s * s * s);
    }
    return circulant_matrix(row);
}

struct SignatureCount {
    int zeros = 0;
    int negatives = 0;
    int positives = 0;
};

inline SignatureCount count_signature(const std::vector<double>& values) {
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    const double tol = 1e-9 * (1.0 + scale);
    SignatureCount c;
    for (double v : values) {
        if (std::abs(v) <= tol)
            ++c.zeros;
        else if (v < 0.0)
            ++c.negatives;
        else
            ++c.positives;
    }
    return c;
}

struct SpectrumReport {
    int n = 0;
    double phi_angle = 0.0;  // 2 pi / n
    std::vector<double> gamma;
    std::vector<double> phi_evals;
    std::vector<double> theta_evals;
    double theta1 = 0.0;
    double critical_alpha = 0.0;  // sqrt(theta1)
    SignatureCount phi_signature;
    SignatureCount theta_signature;
};

inline SpectrumReport spectrum_report(int n) {
    detail::require_odd(n, "spectrum_report");
    SpectrumReport r;
    r.n = n;
    r.phi_angle = 2.0 * kPi / n;
    r.gamma = gamma_sequence(n);
    r.phi_evals = phi_sequence(n);
    r.theta_evals = theta_sequence(n);
    r.theta1 = r.theta_evals[0];
    r.critical_alpha = std::sqrt(r.theta1);
    r.phi_signature = count_signature(r.phi_evals);
    r.theta_signature = count_signature(r.theta_evals);
    return r;
}

// Per-n certificate of the sequence properties the stability proofs rest on:
// concavity of the even Gamma subsequence, positivity of its ends (with the
// cotangent-sum identity), concavity of the first differences of the even
// Phi and Theta subsequences, and the strict orderings they imply.
struct CertificationRecord {
    int n = 0;
    bool vacuous = false;  // n = 3 leaves no interior points to test

    bool gamma_second_diff_negative = true;
    bool gamma_ends_positive = true;
    bool gamma_cot_identity = true;  // Gamma_{2p} = -2 sum cot j phi
    bool phi_third_diff_negative = true;
    bool phi_diff_ends_positive = true;
    bool phi_ordering = true;  // Phi_2 < Phi_4 < ... < Phi_{2p} < Phi_{2p+2} = 0
    bool theta_third_diff_negative = true;
    bool theta_diff_ends_positive = true;
    bool theta_ordering = true;  // 0 = Theta_2 < Theta_4 < ... < Theta_{2p+2} = Theta_1
    bool theta1_positive = true;

    double worst_margin = 0.0;  // smallest slack over all strict inequalities
    bool all_passed = true;
};

inline constexpr double kCertifyMargin = 1e-9;

inline CertificationRecord certify_sequences(int n) {
    detail::require_odd(n, "certify_sequences");
    CertificationRecord rec;
    rec.n = n;
    const int p = (n - 1) / 2;
    const double phi = 2.0 * kPi / n;

    if (n == 3) {
        rec.vacuous = true;
        rec.worst_margin = gamma_closed(3, 2);  // the lone end value
        return rec;
    }

    double worst = std::numeric_limits<double>::infinity();
    const auto strict_pos = [&](double v, bool& flag) {
        worst = std::min(worst, v);
        if (!(v > kCertifyMargin)) flag = false;
    };

    // Gamma: second differences over even k, ends positive, Eq.-(10) identity.
    for (int k = 2; k <= 2 * p - 2; k += 2)
        strict_pos(-(gamma_closed(n, k + 4) - 2.0 * gamma_closed(n, k + 2) + gamma_closed(n, k)),
                   rec.gamma_second_diff_negative);
    strict_pos(gamma_closed(n, 2), rec.gamma_ends_positive);
    strict_pos(gamma_closed(n, 2 * p), rec.gamma_ends_positive);
    // Cotangent-sum form of the top end. The proof's prose carries the
    // sequences at half the displayed normalization, so the eigenvalue
    // Gamma_{2p} equals -4 sum cot(j phi); its positivity is what matters.
    double cot_sum = 0.0;
    for (int j = 1; j <= p; ++j) cot_sum += std::cos(j * phi) / std::sin(j * phi);
    if (std::abs(gamma_closed(n, 2 * p) + 4.0 * cot_sum) >
        kCertifyMargin * (1.0 + std::abs(gamma_closed(n, 2 * p))))
        rec.gamma_cot_identity = false;
    strict_pos(-2.0 * cot_sum, rec.gamma_ends_positive);

    // Phi: third differences over even k, difference ends, strict ordering.
    for (int k = 2; k <= 2 * p - 4; k += 2)
        strict_pos(-(phi_closed(n, k + 6) - 3.0 * phi_closed(n, k + 4) +
                     3.0 * phi_closed(n, k + 2) - phi_closed(n, k)),
                   rec.phi_third_diff_negative);
    strict_pos(phi_closed(n, 4) - phi_closed(n, 2), rec.phi_diff_ends_positive);
    strict_pos(phi_closed(n, 2 * p + 2) - phi_closed(n, 2 * p), rec.phi_diff_ends_positive);
    for (int k = 2; k <= 2 * p; k += 2)
        strict_pos(phi_closed(n, k + 2) - phi_closed(n, k), rec.phi_ordering);
    if (std::abs(phi_closed(n, 2 * p + 2)) > kCertifyMargin) rec.phi_ordering = false;

    // Theta: third differences over even k, difference ends, strict ordering.
    for (int k = 2; k <= 2 * p - 2; k += 2)
        strict_pos(-(theta_closed(n, k + 6) - 3.0 * theta_closed(n, k + 4) +
                     3.0 * theta_closed(n, k + 2) - theta_closed(n, k)),
                   rec.theta_third_diff_negative);
    strict_pos(theta_closed(n, 4) - theta_closed(n, 2), rec.theta_diff_ends_positive);
    strict_pos(theta_closed(n, 2 * p + 2) - theta_closed(n, 2 * p),
               rec.theta_diff_ends_positive);
    for (int k = 2; k <= 2 * p; k += 2)
        strict_pos(theta_closed(n, k + 2) - theta_closed(n, k), rec.theta_ordering);
    if (std::abs(theta_closed(n, 2)) > kCertifyMargin) rec.theta_ordering = false;
    if (std::abs(theta_closed(n, 2 * p + 2) - theta_closed(n, 1)) >
        kCertifyMargin * (1.0 + theta_closed(n, 1)))
        rec.theta_ordering = false;
    strict_pos(theta_closed(n, 1), rec.theta1_positive);

    rec.worst_margin = worst;
    rec.all_passed = rec.gamma_second_diff_negative && rec.gamma_ends_positive &&
                     rec.gamma_cot_identity && rec.phi_third_diff_negative &&
                     rec.phi_diff_ends_positive && rec.phi_ordering &&
                     rec.theta_third_diff_negative && rec.theta_diff_ends_positive &&
                     rec.theta_ordering && rec.theta1_positive;
    return rec;
}

}  // namespace cnb
