// model.hpp — full system assembly, coarse-graining map normalization,
// block decomposition and the three Markovian reduced models.

#pragma once

#include "cgl/matcore.hpp"

#include <optional>

namespace cgl {

// Full linear overdamped Langevin system dq = -A q dt + sqrt(2/beta) dW
// with SPD drift A and inverse temperature beta.
struct SystemSpec {
    SymMatrix a;
    double beta = 1.0;

    Eigen::Index dim() const { return a.dim(); }
};

SystemSpec make_system(SymMatrix a, double beta);

// Row maps phi (n x N, orthonormal rows) and psi (m x N, orthonormal rows
// spanning the complement), n + m = N. raw keeps the unnormalized input.
struct CoarseGrainingMap {
    Matrix raw;
    Matrix phi;
    Matrix psi;

    Eigen::Index n() const { return phi.rows(); }
    Eigen::Index m() const { return psi.rows(); }
    Eigen::Index full_dim() const { return phi.cols(); }
};

// phi = (raw raw^T)^{-1/2} raw; psi is built by Gram-Schmidt over the
// canonical basis against the rows of phi, so the complement is
// deterministic and reproducible. Throws when raw is rank deficient.
// n == N is allowed and yields an empty psi.
CoarseGrainingMap normalize_map(const Matrix& raw);

// Direct construction from a known orthonormal pair; validates the
// orthogonality invariants instead of recomputing psi.
CoarseGrainingMap make_map(const Matrix& phi, const Matrix& psi);

// A0 = phi A phi^T, alpha = phi A psi^T, A1 = psi A psi^T.
struct BlockDecomposition {
    SymMatrix a0;
    Matrix alpha;
    SymMatrix a1;
};

BlockDecomposition block_decompose(const SystemSpec& sys, const CoarseGrainingMap& cg);

// B = A0 - alpha A1^{-1} alpha^T and C = (I + alpha A1^{-2} alpha^T)^{-1}.
std::pair<SymMatrix, SymMatrix> effective_matrices(const BlockDecomposition& bd);

enum class Approach { zero = 0, one = 1, two = 2 };

Approach approach_from_int(int value);

// Data for the transient forcing alpha e^{-A1 t} zeta0.
struct MemoryForcing {
    Matrix alpha;
    SymMatrix a1;
    Vector zeta0;
};

// One of the three Markovian reduced SDEs
//   d xi = -(drift xi - forcing(t)) dt + sqrt(2/beta) noise_factor dW.
// Approach 0: drift A0; approach 1: drift B; approach 2: drift C B with
// noise factor C^{1/2} (single-noise form of the corrected dynamics).
struct ReducedModel {
    Approach approach = Approach::one;
    Matrix drift;
    SymMatrix noise_factor;
    std::optional<MemoryForcing> memory;
    SymMatrix b;
    SymMatrix c;
    double beta = 1.0;

    Eigen::Index dim() const { return drift.rows(); }
};

// zeta0, when given, must have length m; nullopt disables the forcing.
ReducedModel build_reduced(const SystemSpec& sys, const CoarseGrainingMap& cg,
                           Approach approach, const std::optional<Vector>& zeta0 = std::nullopt);

// zeta0 = -A1^{-1} alpha^T xi0, the memory initial condition matched to a
// deterministic coarse state xi0.
Vector default_zeta0(const BlockDecomposition& bd, const Vector& xi0);

// True iff |alpha|_F <= tol |A|_F, i.e. the rows of phi span (numerically)
// a union of eigenspaces of A; in that case B and A0 coincide.
bool check_eigenspace_alignment(const SystemSpec& sys, const CoarseGrainingMap& cg, double tol);

}  // namespace cgl
