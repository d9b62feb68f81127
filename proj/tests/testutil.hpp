// Shared helpers for the unit suites: independent oracles and randomized
// instance generators. Everything here is test-only and must not lean on
// the implementation paths it is used to check.

#pragma once

#include "cgl/systems.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testutil {

using cgl::Matrix;
using cgl::Vector;

// Truncated Taylor series for e^{-t m}; the independent oracle for the
// spectral exponential.
inline Matrix series_expm_neg(const Matrix& m, double t, int terms = 30) {
    const Eigen::Index n = m.rows();
    Matrix sum = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int k = 1; k <= terms; ++k) {
        term = term * (-t / static_cast<double>(k)) * m;
        sum += term;
    }
    return sum;
}

// Eigenvalues of a symmetric 2x2 via the characteristic polynomial.
inline std::pair<double, double> eig2_oracle(const Matrix& m) {
    const double tr = m(0, 0) + m(1, 1);
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return {tr / 2.0 - disc, tr / 2.0 + disc};
}

// 2x2 rotation by angle.
inline Matrix rotation2(double angle) {
    Matrix q(2, 2);
    q << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return q;
}

// Closed-form 2D quantities for A = diag(1, lambda), phi at angle theta.
struct TwoDClosedForm {
    double lambda, theta;
    double cos2, sin2;

    TwoDClosedForm(double lambda_, double theta_)
        : lambda(lambda_),
          theta(theta_),
          cos2(std::cos(theta_) * std::cos(theta_)),
          sin2(std::sin(theta_) * std::sin(theta_)) {}

    double a0() const { return cos2 + lambda * sin2; }
    double a1() const { return sin2 + lambda * cos2; }
    double alpha() const { return (lambda - 1.0) * std::sin(theta) * std::cos(theta); }
    double b() const { return lambda / (lambda * cos2 + sin2); }
    double c() const {
        const double num = lambda * cos2 + sin2;
        return num * num / (lambda * lambda * cos2 + sin2);
    }
    double r_full(double tau, double beta = 1.0) const {
        return (std::exp(-tau) * cos2 + std::exp(-tau * lambda) * sin2 / lambda) / beta;
    }
    double r1(double tau, double beta = 1.0) const {
        return std::exp(-tau * b()) / b() / beta;
    }
    double r2(double tau, double beta = 1.0) const {
        return std::exp(-tau * b() * c()) / b() / beta;
    }
};

// Solves D X + X D^T = S for symmetric S via the Kronecker-vectorized
// linear system; the stationary-covariance oracle for OU processes.
inline Matrix lyapunov_solve(const Matrix& d, const Matrix& s) {
    const Eigen::Index n = d.rows();
    Matrix big = Matrix::Zero(n * n, n * n);
    const Matrix eye = Matrix::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index k = 0; k < n; ++k) {
                for (Eigen::Index l = 0; l < n; ++l) {
                    // vec index: row-major (i, j) entry of X
                    big(i * n + j, k * n + l) = d(i, k) * eye(j, l) + eye(i, k) * d(j, l);
                }
            }
        }
    }
    Vector rhs(n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) rhs(i * n + j) = s(i, j);
    }
    const Vector x = big.fullPivLu().solve(rhs);
    Matrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = x(i * n + j);
    }
    return out;
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testutil
