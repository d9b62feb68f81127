// matcore.hpp — spectral toolkit for real symmetric matrices.
// Eigendecomposition-based matrix functions, Loewner-order tests and
// SPD square roots/inverses shared by all higher-level modules.

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <utility>

namespace cgl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Asymmetry accepted silently on construction; larger asymmetry is an error.
inline constexpr double kSymmetryTol = 1e-12;

// Relative eigenvalue floor below which a matrix is treated as singular.
inline constexpr double kSpdRelTol = 1e-12;

// Real symmetric matrix. Construction symmetrizes (m + m^T)/2 when the
// input asymmetry is below kSymmetryTol and throws otherwise, so entries
// are exactly symmetric afterwards.
struct SymMatrix {
    Matrix m;

    SymMatrix() = default;
    explicit SymMatrix(Matrix in);

    Eigen::Index dim() const { return m.rows(); }

    static SymMatrix identity(Eigen::Index n) { return SymMatrix(Matrix::Identity(n, n)); }
    static SymMatrix from_diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }
};

// Eigendecomposition m = Q diag(eigenvalues) Q^T with ascending eigenvalues
// and orthogonal Q (columns are eigenvectors).
struct SpectralDecomp {
    Vector eigenvalues;
    Matrix q;

    // Q f(D) Q^T for a scalar function applied to the eigenvalues.
    Matrix apply(const std::function<double(double)>& f) const;
};

SpectralDecomp spectral_decompose(const SymMatrix& m);

// Q f(D) Q^T; throws if f is not finite at some eigenvalue.
SymMatrix matrix_function(const SymMatrix& m, const std::function<double(double)>& f);

// e^{-t m} for t >= 0, via spectral decomposition.
SymMatrix expm_scaled(const SymMatrix& m, double t);

// e^{-t b c} for SPD b, c, computed as c^{-1/2} e^{-t S} c^{1/2} with
// S = c^{1/2} b c^{1/2}. The product b c is similar to the symmetric S, so
// the exponential is well defined even though b c itself is not symmetric.
Matrix expm_nonsym_similar(const SymMatrix& b, const SymMatrix& c, double t);

// Smallest eigenvalue of (a - b).
double loewner_margin(const SymMatrix& a, const SymMatrix& b);

// a >= b in the Loewner order, up to tol: lambda_min(a - b) >= -tol.
bool loewner_geq(const SymMatrix& a, const SymMatrix& b, double tol);

// sqrt(tr(m^T m)).
double frobenius_norm(const Matrix& m);

// True when the smallest eigenvalue exceeds kSpdRelTol times the largest.
bool is_spd(const SymMatrix& m);

// m^{-1/2}, m^{1/2}, m^{-1} for SPD m; throw on rank deficiency.
SymMatrix sqrtm_inv(const SymMatrix& m);
SymMatrix sqrtm_spd(const SymMatrix& m);
SymMatrix inverse_spd(const SymMatrix& m);

}  // namespace cgl
