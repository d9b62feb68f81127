#include "cgl/matcore.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cgl {

SymMatrix::SymMatrix(Matrix in) : m(std::move(in)) {
    if (m.rows() != m.cols()) {
        std::ostringstream msg;
        msg << "SymMatrix: expected square matrix, got " << m.rows() << "x" << m.cols();
        throw std::invalid_argument(msg.str());
    }
    if (m.size() == 0) return;
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym >= kSymmetryTol) {
        std::ostringstream msg;
        msg << "SymMatrix: asymmetry " << asym << " exceeds tolerance " << kSymmetryTol;
        throw std::invalid_argument(msg.str());
    }
    m = (0.5 * (m + m.transpose())).eval();
}

Matrix SpectralDecomp::apply(const std::function<double(double)>& f) const {
    Vector fd(eigenvalues.size());
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) fd(i) = f(eigenvalues(i));
    return q * fd.asDiagonal() * q.transpose();
}

SpectralDecomp spectral_decompose(const SymMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m.m);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "spectral_decompose: eigensolver failed to converge for dimension " << m.dim();
        throw std::runtime_error(msg.str());
    }
    return SpectralDecomp{solver.eigenvalues(), solver.eigenvectors()};
}

SymMatrix matrix_function(const SymMatrix& m, const std::function<double(double)>& f) {
    const SpectralDecomp sd = spectral_decompose(m);
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
        const double fi = f(sd.eigenvalues(i));
        if (!std::isfinite(fi)) {
            std::ostringstream msg;
            msg << "matrix_function: function not finite at eigenvalue " << sd.eigenvalues(i);
            throw std::runtime_error(msg.str());
        }
    }
    return SymMatrix(sd.apply(f));
}

SymMatrix expm_scaled(const SymMatrix& m, double t) {
    if (t < 0.0) throw std::invalid_argument("expm_scaled: t must be nonnegative");
    return matrix_function(m, [t](double x) { return std::exp(-t * x); });
}

namespace {

// SPD gate shared by the square-root/inverse family. Returns the
// decomposition so callers do not decompose twice.
SpectralDecomp require_spd(const SymMatrix& m, const char* who) {
    const SpectralDecomp sd = spectral_decompose(m);
    const double lo = sd.eigenvalues.size() ? sd.eigenvalues(0) : 1.0;
    const double hi = sd.eigenvalues.size() ? sd.eigenvalues(sd.eigenvalues.size() - 1) : 1.0;
    if (lo <= kSpdRelTol * std::max(hi, 0.0) || hi <= 0.0) {
        std::ostringstream msg;
        msg << who << ": matrix is not SPD (smallest eigenvalue " << lo
            << ", largest " << hi << "); rank-deficient input";
        throw std::runtime_error(msg.str());
    }
    return sd;
}

}  // namespace

Matrix expm_nonsym_similar(const SymMatrix& b, const SymMatrix& c, double t) {
    if (b.dim() != c.dim()) throw std::invalid_argument("expm_nonsym_similar: dimension mismatch");
    const SpectralDecomp sdc = require_spd(c, "expm_nonsym_similar (c)");
    const Matrix c_half = sdc.apply([](double x) { return std::sqrt(x); });
    const Matrix c_half_inv = sdc.apply([](double x) { return 1.0 / std::sqrt(x); });
    const SymMatrix s(c_half * b.m * c_half);
    const SymMatrix es = expm_scaled(s, t);
    return c_half_inv * es.m * c_half;
}

double loewner_margin(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("loewner_margin: dimension mismatch");
    if (a.dim() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.m - b.m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("loewner_margin: eigensolver failed to converge");
    }
    return solver.eigenvalues()(0);
}

bool loewner_geq(const SymMatrix& a, const SymMatrix& b, double tol) {
    return loewner_margin(a, b) >= -tol;
}

double frobenius_norm(const Matrix& m) { return m.norm(); }

bool is_spd(const SymMatrix& m) {
    if (m.dim() == 0) return true;
    const SpectralDecomp sd = spectral_decompose(m);
    const double lo = sd.eigenvalues(0);
    const double hi = sd.eigenvalues(sd.eigenvalues.size() - 1);
    return hi > 0.0 && lo > kSpdRelTol * hi;
}

SymMatrix sqrtm_inv(const SymMatrix& m) {
    const SpectralDecomp sd = require_spd(m, "sqrtm_inv");
    return SymMatrix(sd.apply([](double x) { return 1.0 / std::sqrt(x); }));
}

SymMatrix sqrtm_spd(const SymMatrix& m) {
    const SpectralDecomp sd = require_spd(m, "sqrtm_spd");
    return SymMatrix(sd.apply([](double x) { return std::sqrt(x); }));
}

SymMatrix inverse_spd(const SymMatrix& m) {
    const SpectralDecomp sd = require_spd(m, "inverse_spd");
    return SymMatrix(sd.apply([](double x) { return 1.0 / x; }));
}

}  // namespace cgl
