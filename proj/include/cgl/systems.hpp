// systems.hpp — canonical experiment families: the 2D (lambda, theta)
// system, tridiagonal drifts with tunable off-diagonal coupling, the
// harmonic spring-mass chain, and the progressive-coarsening harness.

#pragma once

#include "cgl/analytics.hpp"

#include <random>
#include <vector>

namespace cgl {

// Ascending diagonal entries plus one coupling constant sigma placed on
// both off-diagonals.
struct TridiagSpec {
    Vector diag;
    double offdiag_sigma = 0.0;
};

// Chain of n_masses with a free left end and a spring to a fixed wall on
// the right. Spring 1 (constant k1) couples masses 1-2, spring 2 (k2)
// couples masses 2-3, and every later spring including the wall spring
// uses k3. spring_override, when nonempty, replaces the whole per-spring
// constant list (length n_masses).
struct ChainSpec {
    int n_masses = 0;
    double k1 = 1.0;
    double k2 = 1.0;
    double k3 = 1.0;
    std::vector<double> spring_override;
};

// Composition Y = X phi of two orthonormal-row maps.
struct ProgressiveSpec {
    Matrix outer;     // d x n
    Matrix inner;     // n x N
    Matrix composed;  // d x N
};

// Autocovariance curves at the three fidelity levels, plus per-lag
// Frobenius gaps between them. full_vs_coarse is the shared right-hand
// side of both progressive-coarsening inequalities.
struct ProgressiveComparison {
    AcfCurve full_projected;          // Y R_full(tau) Y^T semantics
    AcfCurve intermediate_projected;  // X R_reduced(phi) X^T
    AcfCurve coarse;                  // R_reduced(Y)
    std::vector<double> gap_full_vs_intermediate;
    std::vector<double> gap_intermediate_vs_coarse;
    std::vector<double> gap_full_vs_coarse;
};

// A = diag(1, lambda), phi = (cos theta, sin theta), psi = (-sin theta, cos theta).
std::pair<SystemSpec, CoarseGrainingMap> build_2d(const TwoDSpec& spec, double beta);

SystemSpec build_tridiag(const TridiagSpec& spec, double beta);

SystemSpec build_chain(const ChainSpec& spec, double beta);

// Resolved per-spring constants (k1, k2, k3, k3, ...) or the override.
std::vector<double> chain_spring_constants(const ChainSpec& spec);

// Coordinate-selection map onto the first n of full variables.
Matrix selection_rows(Eigen::Index n, Eigen::Index full);

ProgressiveSpec make_progressive(const Matrix& outer, const Matrix& inner);

ProgressiveComparison progressive_compare(const SystemSpec& sys, const ProgressiveSpec& maps,
                                          Approach approach, const std::vector<double>& lags,
                                          int threads = 1);

// Randomized instances for property checks and the bounds-check harness:
// SPD matrices with eigenvalues log-uniform in [lo, hi] on a random
// orthogonal frame, and maps with orthonormal rows.
SymMatrix random_spd(Eigen::Index dim, std::mt19937_64& rng, double lo = 0.5, double hi = 10.0);
Matrix random_orthonormal_rows(Eigen::Index n, Eigen::Index full, std::mt19937_64& rng);

}  // namespace cgl
