#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "cnb/errors.hpp"

namespace cnb {

// Dense row-major matrix of doubles. Sized for the desk-scale problems of
// this toolkit (n up to a few hundred); no view/expression machinery.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix operator*(const Matrix& rhs) const {
        Matrix out(rows_, rhs.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const double aik = (*this)(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < rhs.cols_; ++j)
                    out(i, j) += aik * rhs(k, j);
            }
        return out;
    }

    std::vector<double> operator*(const std::vector<double>& v) const {
        std::vector<double> out(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
            out[i] = s;
        }
        return out;
    }

    Matrix operator-(const Matrix& rhs) const {
        Matrix out = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] -= rhs.a_[i];
        return out;
    }

    Matrix operator+(const Matrix& rhs) const {
        Matrix out = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] += rhs.a_[i];
        return out;
    }

    Matrix scaled(double s) const {
        Matrix out = *this;
        for (double& x : out.a_) x *= s;
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : a_) m = std::max(m, std::abs(x));
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm2(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

inline double norm_inf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Solves A x = b by LU factorization with partial pivoting. A is taken by
// value and factored in place.
inline std::vector<double> solve(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n)
        throw ValidationError("solve: dimension mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) throw ValidationError("solve: singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            a(i, k) = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
        x[ii] = s / a(ii, ii);
    }
    return x;
}

inline Matrix inverse(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        std::vector<double> col = solve(a, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

struct SymmetricEigen {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column k is the eigenvector of values[k]
};

// Cyclic Jacobi rotation diagonalization of a real symmetric matrix.
// Eigenvalues come back ascending with orthonormal eigenvectors as columns.
inline SymmetricEigen jacobi_eigen(Matrix a, int max_sweeps = 64) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw ValidationError("jacobi_eigen: matrix not square");
    Matrix v = Matrix::identity(n);
    const double scale = std::max(a.max_abs(), 1e-300);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a(p, q));
        if (off <= n * n * scale * 1e-17) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= scale * 1e-18) continue;
                const double h = a(q, q) - a(p, p);
                double t;
                if (std::abs(h) + 100.0 * std::abs(apq) == std::abs(h)) {
                    t = apq / h;
                } else {
                    const double theta = 0.5 * h / apq;
                    t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double hpq = t * apq;

                a(p, p) -= hpq;
                a(q, q) += hpq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i != p && i != q) {
                        const double aip = (i < p) ? a(i, p) : a(p, i);
                        const double aiq = (i < q) ? a(i, q) : a(q, i);
                        const double np_ = aip - s * (aiq + aip * tau);
                        const double nq_ = aiq + s * (aip - aiq * tau);
                        if (i < p) a(i, p) = np_; else a(p, i) = np_;
                        if (i < q) a(i, q) = nq_; else a(q, i) = nq_;
                    }
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = vip - s * (viq + vip * tau);
                    v(i, q) = viq + s * (vip - viq * tau);
                }
            }
        }
    }

    SymmetricEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return out.values[i] < out.values[j]; });
    std::vector<double> sorted(n);
    Matrix vs(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        sorted[k] = out.values[order[k]];
        for (std::size_t i = 0; i < n; ++i) vs(i, k) = v(i, order[k]);
    }
    out.values = std::move(sorted);
    out.vectors = std::move(vs);
    return out;
}

// Singular values of a real matrix via the symmetric eigendecomposition of
// A^T A, ascending. For skew-symmetric input these are |Gamma_k| since
// A^T A = -A^2.
inline std::vector<double> singular_values(const Matrix& a) {
    const Matrix ata = a.transposed() * a;
    SymmetricEigen e = jacobi_eigen(ata);
    std::vector<double> s(e.values.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sqrt(std::max(e.values[i], 0.0));
    return s;
}

}  // namespace cnb
