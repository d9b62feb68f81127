#include "cgl/systems.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cgl {

std::pair<SystemSpec, CoarseGrainingMap> build_2d(const TwoDSpec& spec, double beta) {
    if (!(spec.lambda >= 1.0)) throw std::invalid_argument("build_2d: lambda must be >= 1");
    if (!(std::abs(spec.theta) < M_PI / 2.0)) {
        throw std::invalid_argument("build_2d: theta must lie in (-pi/2, pi/2)");
    }
    Matrix a(2, 2);
    a << 1.0, 0.0, 0.0, spec.lambda;
    Matrix phi(1, 2);
    phi << std::cos(spec.theta), std::sin(spec.theta);
    Matrix psi(1, 2);
    psi << -std::sin(spec.theta), std::cos(spec.theta);
    return {make_system(SymMatrix(a), beta), make_map(phi, psi)};
}

SystemSpec build_tridiag(const TridiagSpec& spec, double beta) {
    const Eigen::Index n = spec.diag.size();
    if (n < 1) throw std::invalid_argument("build_tridiag: empty diagonal");
    for (Eigen::Index i = 1; i < n; ++i) {
        if (spec.diag(i) < spec.diag(i - 1)) {
            throw std::invalid_argument("build_tridiag: diagonal entries must be ascending");
        }
    }
    if (spec.offdiag_sigma < 0.0) {
        throw std::invalid_argument("build_tridiag: sigma must be nonnegative");
    }
    Matrix a = Matrix::Zero(n, n);
    a.diagonal() = spec.diag;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        a(i, i + 1) = spec.offdiag_sigma;
        a(i + 1, i) = spec.offdiag_sigma;
    }
    SymMatrix drift(a);
    if (!is_spd(drift)) {
        const SpectralDecomp sd = spectral_decompose(drift);
        std::ostringstream msg;
        msg << "build_tridiag: sigma " << spec.offdiag_sigma
            << " destroys positivity (smallest eigenvalue " << sd.eigenvalues(0) << ")";
        throw std::invalid_argument(msg.str());
    }
    return make_system(std::move(drift), beta);
}

std::vector<double> chain_spring_constants(const ChainSpec& spec) {
    const int n = spec.n_masses;
    if (n < 1) throw std::invalid_argument("chain: need at least one mass");
    if (!spec.spring_override.empty()) {
        if (static_cast<int>(spec.spring_override.size()) != n) {
            throw std::invalid_argument("chain: spring_override must have one entry per spring");
        }
        return spec.spring_override;
    }
    if (!(spec.k1 > 0.0 && spec.k2 > 0.0 && spec.k3 > 0.0)) {
        throw std::invalid_argument("chain: spring constants must be positive");
    }
    std::vector<double> springs(static_cast<std::size_t>(n), spec.k3);
    springs[0] = spec.k1;
    if (n > 1) springs[1] = spec.k2;
    return springs;
}

SystemSpec build_chain(const ChainSpec& spec, double beta) {
    const Eigen::Index n = spec.n_masses;
    const std::vector<double> k = chain_spring_constants(spec);
    for (double ki : k) {
        if (!(ki > 0.0)) throw std::invalid_argument("chain: spring constants must be positive");
    }

    // Incidence rows: spring i < n stretches by q_i - q_{i+1}; the wall
    // spring (index n) stretches by q_n. A = D^T diag(k) D.
    Matrix incidence = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        incidence(i, i) = 1.0;
        incidence(i, i + 1) = -1.0;
    }
    incidence(n - 1, n - 1) = 1.0;
    Vector kv = Eigen::Map<const Vector>(k.data(), n);
    const Matrix a = incidence.transpose() * kv.asDiagonal() * incidence;
    return make_system(SymMatrix(a), beta);
}

Matrix selection_rows(Eigen::Index n, Eigen::Index full) {
    if (n < 1 || n > full) throw std::invalid_argument("selection_rows: invalid row count");
    Matrix rows = Matrix::Zero(n, full);
    for (Eigen::Index i = 0; i < n; ++i) rows(i, i) = 1.0;
    return rows;
}

ProgressiveSpec make_progressive(const Matrix& outer, const Matrix& inner) {
    if (outer.cols() != inner.rows()) {
        throw std::invalid_argument("make_progressive: outer/inner dimension mismatch");
    }
    if (outer.rows() > outer.cols()) {
        throw std::invalid_argument("make_progressive: outer map must reduce dimension");
    }
    const auto check = [](const Matrix& m, const char* who) {
        const double defect =
            (m * m.transpose() - Matrix::Identity(m.rows(), m.rows())).norm();
        if (defect > 1e-10) {
            std::ostringstream msg;
            msg << "make_progressive: " << who << " rows not orthonormal (defect " << defect
                << ")";
            throw std::invalid_argument(msg.str());
        }
    };
    check(outer, "outer");
    check(inner, "inner");
    ProgressiveSpec spec{outer, inner, outer * inner};
    check(spec.composed, "composed");
    return spec;
}

ProgressiveComparison progressive_compare(const SystemSpec& sys, const ProgressiveSpec& maps,
                                          Approach approach, const std::vector<double>& lags,
                                          int threads) {
    if (maps.inner.cols() != sys.dim()) {
        throw std::invalid_argument("progressive_compare: map/system dimension mismatch");
    }
    const CoarseGrainingMap inner_cg = normalize_map(maps.inner);
    const CoarseGrainingMap composed_cg = normalize_map(maps.composed);

    ProgressiveComparison cmp;
    cmp.full_projected = acf_full(sys, composed_cg, lags, threads);

    const ReducedModel inner_model = build_reduced(sys, inner_cg, approach);
    const AcfCurve inner_curve = acf_reduced(inner_model, lags, threads);
    cmp.intermediate_projected.lags = lags;
    cmp.intermediate_projected.values.reserve(lags.size());
    for (const SymMatrix& v : inner_curve.values) {
        cmp.intermediate_projected.values.emplace_back(
            Matrix(maps.outer * v.m * maps.outer.transpose()));
    }

    const ReducedModel coarse_model = build_reduced(sys, composed_cg, approach);
    cmp.coarse = acf_reduced(coarse_model, lags, threads);

    cmp.gap_full_vs_intermediate.resize(lags.size());
    cmp.gap_intermediate_vs_coarse.resize(lags.size());
    cmp.gap_full_vs_coarse.resize(lags.size());
    for (std::size_t i = 0; i < lags.size(); ++i) {
        const Matrix& f = cmp.full_projected.values[i].m;
        const Matrix& x = cmp.intermediate_projected.values[i].m;
        const Matrix& c = cmp.coarse.values[i].m;
        cmp.gap_full_vs_intermediate[i] = (f - x).norm();
        cmp.gap_intermediate_vs_coarse[i] = (x - c).norm();
        cmp.gap_full_vs_coarse[i] = (f - c).norm();
    }
    return cmp;
}

SymMatrix random_spd(Eigen::Index dim, std::mt19937_64& rng, double lo, double hi) {
    if (dim < 1) throw std::invalid_argument("random_spd: dimension must be positive");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = gauss(rng);
    }
    const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
    std::uniform_real_distribution<double> unif(std::log(lo), std::log(hi));
    Vector eigs(dim);
    for (Eigen::Index i = 0; i < dim; ++i) eigs(i) = std::exp(unif(rng));
    return SymMatrix(q * eigs.asDiagonal() * q.transpose());
}

Matrix random_orthonormal_rows(Eigen::Index n, Eigen::Index full, std::mt19937_64& rng) {
    if (n < 1 || n > full) throw std::invalid_argument("random_orthonormal_rows: bad shape");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(full, n);
    for (Eigen::Index i = 0; i < full; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = gauss(rng);
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    const Matrix q = Matrix(qr.householderQ()).leftCols(n);
    return q.transpose();
}

}  // namespace cgl
