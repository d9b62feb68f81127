// mc.hpp — Euler-Maruyama Monte Carlo: ensemble integration of the full
// and reduced SDEs, deterministic per-trajectory seeding, and sample
// autocovariance estimation with standard-error bands.

#pragma once

#include "cgl/analytics.hpp"

#include <cstdint>
#include <vector>

namespace cgl {

struct SimConfig {
    double dt = 5e-4;
    double t_total = 60.0;
    int n_samples = 500;
    std::uint64_t base_seed = 0;
    double burn_in_fraction = 0.5;
    // Full runs take an N-vector; reduced runs accept an n-vector (xi0
    // directly) or an N-vector (projected through phi). Empty means zero.
    Vector q0;
    // Steps between stored samples; 0 selects the default (4). Use
    // stride_for_lags to match a lag grid exactly.
    int stride = 0;
    int threads = 1;
};

// Trajectories share one time grid with spacing dt * stride; trajectory i
// is a pure function of (base_seed, i).
struct Ensemble {
    double dt = 0.0;
    int stride = 1;
    double burn_in_fraction = 0.5;
    std::vector<Matrix> trajectories;  // each: stored steps x n

    double stored_spacing() const { return dt * stride; }
};

// Largest stride whose stored grid hits every requested lag exactly.
int stride_for_lags(const std::vector<double>& lags, double dt);

// One explicit step: state - dt (drift state - forcing) + sqrt(2 dt / beta) factor g.
Vector em_step(const Vector& state, const Matrix& drift, const Vector& forcing,
               const Matrix& noise_factor, double dt, double beta, const Vector& gaussians);

// Integrates dq = -A q dt + sqrt(2/beta) dW and records xi = phi q.
Ensemble simulate_full(const SystemSpec& sys, const CoarseGrainingMap& cg,
                       const SimConfig& cfg);

// Integrates the reduced SDE including the transient forcing
// alpha e^{-A1 t} zeta0 (premultiplied by C for approach 2).
Ensemble simulate_reduced(const ReducedModel& model, const SimConfig& cfg);

// Mean-subtracted, ensemble-and-time averaged, symmetrized estimator over
// the post-burn-in window.
AcfCurve sample_acf(const Ensemble& ens, const std::vector<double>& lags);

// Per-lag across-trajectory standard deviation of per-trajectory ACF
// estimates, divided by sqrt(n_samples); Frobenius-aggregated entrywise.
std::vector<double> standard_error(const Ensemble& ens, const std::vector<double>& lags);

}  // namespace cgl
