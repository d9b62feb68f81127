#include "cgl/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cgl {

namespace {

constexpr double kOrthoTol = 1e-10;

void require_orthonormal_rows(const Matrix& m, const char* who) {
    if (m.rows() == 0) return;
    const Matrix gram = m * m.transpose();
    const double defect = (gram - Matrix::Identity(m.rows(), m.rows())).norm();
    if (defect > kOrthoTol) {
        std::ostringstream msg;
        msg << who << ": rows not orthonormal (defect " << defect << ")";
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

SystemSpec make_system(SymMatrix a, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("make_system: beta must be positive");
    if (!is_spd(a)) throw std::invalid_argument("make_system: drift matrix A must be SPD");
    return SystemSpec{std::move(a), beta};
}

CoarseGrainingMap normalize_map(const Matrix& raw) {
    const Eigen::Index n = raw.rows();
    const Eigen::Index full = raw.cols();
    if (n == 0 || full == 0 || n > full) {
        std::ostringstream msg;
        msg << "normalize_map: invalid map shape " << n << "x" << full;
        throw std::invalid_argument(msg.str());
    }

    SymMatrix gram(raw * raw.transpose());
    SpectralDecomp sd = spectral_decompose(gram);
    const double hi = sd.eigenvalues(n - 1);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (sd.eigenvalues(i) > kSpdRelTol * hi) ++rank;
    }
    if (rank < n) {
        std::ostringstream msg;
        msg << "normalize_map: raw map has rank " << rank << " < " << n
            << " rows (redundant coarse-grained variables)";
        throw std::invalid_argument(msg.str());
    }

    CoarseGrainingMap cg;
    cg.raw = raw;
    cg.phi = sd.apply([](double x) { return 1.0 / std::sqrt(x); }) * raw;

    // Complement rows: Gram-Schmidt over e_1..e_N against the rows of phi,
    // orthogonalizing twice before acceptance.
    const Eigen::Index m = full - n;
    cg.psi = Matrix::Zero(m, full);
    Matrix basis(full, full);  // rows: phi rows then accepted complement rows
    basis.topRows(n) = cg.phi;
    Eigen::Index have = n;
    for (Eigen::Index k = 0; k < full && have < full; ++k) {
        Vector v = Vector::Zero(full);
        v(k) = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index r = 0; r < have; ++r) {
                v -= basis.row(r).dot(v) * basis.row(r).transpose();
            }
        }
        const double norm = v.norm();
        if (norm > 1e-6) {
            v /= norm;
            for (Eigen::Index r = 0; r < have; ++r) {
                v -= basis.row(r).dot(v) * basis.row(r).transpose();
            }
            v.normalize();
            basis.row(have) = v.transpose();
            cg.psi.row(have - n) = v.transpose();
            ++have;
        }
    }
    if (have != full) {
        throw std::runtime_error("normalize_map: failed to complete the complement basis");
    }
    return cg;
}

CoarseGrainingMap make_map(const Matrix& phi, const Matrix& psi) {
    if (phi.cols() != psi.cols() && psi.rows() != 0) {
        throw std::invalid_argument("make_map: phi/psi column mismatch");
    }
    if (phi.rows() + psi.rows() != phi.cols()) {
        throw std::invalid_argument("make_map: row counts must sum to the full dimension");
    }
    require_orthonormal_rows(phi, "make_map (phi)");
    require_orthonormal_rows(psi, "make_map (psi)");
    if (psi.rows() > 0 && (phi * psi.transpose()).norm() > kOrthoTol) {
        throw std::invalid_argument("make_map: phi and psi are not mutually orthogonal");
    }
    return CoarseGrainingMap{phi, phi, psi};
}

BlockDecomposition block_decompose(const SystemSpec& sys, const CoarseGrainingMap& cg) {
    if (cg.full_dim() != sys.dim()) {
        throw std::invalid_argument("block_decompose: map/system dimension mismatch");
    }
    BlockDecomposition bd;
    bd.a0 = SymMatrix(cg.phi * sys.a.m * cg.phi.transpose());
    bd.alpha = cg.phi * sys.a.m * cg.psi.transpose();
    bd.a1 = SymMatrix(cg.psi * sys.a.m * cg.psi.transpose());
    return bd;
}

std::pair<SymMatrix, SymMatrix> effective_matrices(const BlockDecomposition& bd) {
    const Eigen::Index n = bd.a0.dim();
    if (bd.a1.dim() == 0) {
        return {bd.a0, SymMatrix::identity(n)};
    }
    const SymMatrix a1_inv = inverse_spd(bd.a1);
    const SymMatrix b(bd.a0.m - bd.alpha * a1_inv.m * bd.alpha.transpose());
    const SymMatrix c_inv(Matrix::Identity(n, n) +
                          bd.alpha * a1_inv.m * a1_inv.m * bd.alpha.transpose());
    return {b, inverse_spd(c_inv)};
}

Approach approach_from_int(int value) {
    switch (value) {
        case 0: return Approach::zero;
        case 1: return Approach::one;
        case 2: return Approach::two;
        default: break;
    }
    std::ostringstream msg;
    msg << "approach must be 0, 1 or 2 (got " << value << ")";
    throw std::invalid_argument(msg.str());
}

ReducedModel build_reduced(const SystemSpec& sys, const CoarseGrainingMap& cg,
                           Approach approach, const std::optional<Vector>& zeta0) {
    const BlockDecomposition bd = block_decompose(sys, cg);
    auto [b, c] = effective_matrices(bd);

    ReducedModel model;
    model.approach = approach;
    model.b = b;
    model.c = c;
    model.beta = sys.beta;
    switch (approach) {
        case Approach::zero:
            model.drift = bd.a0.m;
            model.noise_factor = SymMatrix::identity(bd.a0.dim());
            break;
        case Approach::one:
            model.drift = b.m;
            model.noise_factor = SymMatrix::identity(b.dim());
            break;
        case Approach::two:
            model.drift = c.m * b.m;
            model.noise_factor = sqrtm_spd(c);
            break;
    }
    if (zeta0) {
        if (zeta0->size() != bd.a1.dim()) {
            std::ostringstream msg;
            msg << "build_reduced: zeta0 has length " << zeta0->size()
                << ", expected " << bd.a1.dim();
            throw std::invalid_argument(msg.str());
        }
        model.memory = MemoryForcing{bd.alpha, bd.a1, *zeta0};
    }
    return model;
}

Vector default_zeta0(const BlockDecomposition& bd, const Vector& xi0) {
    if (xi0.size() != bd.a0.dim()) {
        throw std::invalid_argument("default_zeta0: xi0 dimension mismatch");
    }
    if (bd.a1.dim() == 0) return Vector(0);
    return -(inverse_spd(bd.a1).m * bd.alpha.transpose() * xi0);
}

bool check_eigenspace_alignment(const SystemSpec& sys, const CoarseGrainingMap& cg, double tol) {
    const BlockDecomposition bd = block_decompose(sys, cg);
    return bd.alpha.norm() <= tol * sys.a.m.norm();
}

}  // namespace cgl
