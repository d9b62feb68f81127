#include "cgl/mc.hpp"

#include "cgl/parallel.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cgl {

namespace {

constexpr int kDefaultStride = 4;
constexpr long kForcingRefreshInterval = 10000;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent stream per (base_seed, trajectory index), insensitive to
// execution order.
std::mt19937_64 trajectory_rng(std::uint64_t base_seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(base_seed ^ splitmix64(index)));
}

void validate_config(const SimConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("sim: dt must be positive");
    if (!(cfg.t_total > 0.0)) throw std::invalid_argument("sim: t_total must be positive");
    if (cfg.n_samples < 1) throw std::invalid_argument("sim: n_samples must be positive");
    if (!(cfg.burn_in_fraction >= 0.0 && cfg.burn_in_fraction < 1.0)) {
        throw std::invalid_argument("sim: burn_in_fraction must lie in [0, 1)");
    }
    if (cfg.stride < 0) throw std::invalid_argument("sim: stride must be nonnegative");
}

void check_stability(double dt, double max_eigenvalue) {
    if (dt * max_eigenvalue >= 2.0) {
        std::ostringstream msg;
        msg << "sim: dt " << dt << " unstable for drift with largest eigenvalue "
            << max_eigenvalue << " (max stable dt " << 2.0 / max_eigenvalue << ")";
        throw std::invalid_argument(msg.str());
    }
}

struct TrajectoryPlan {
    long n_steps = 0;
    int stride = kDefaultStride;
    long n_stored = 0;
};

TrajectoryPlan make_plan(const SimConfig& cfg) {
    TrajectoryPlan plan;
    plan.n_steps = std::lround(cfg.t_total / cfg.dt);
    if (plan.n_steps < 1) throw std::invalid_argument("sim: t_total shorter than one step");
    plan.stride = cfg.stride > 0 ? cfg.stride : kDefaultStride;
    plan.n_stored = plan.n_steps / plan.stride + 1;
    return plan;
}

// Forcing vectors alpha e^{-A1 k dt} zeta0 for every integration step,
// evolved by repeated application of e^{-A1 dt} with a spectral refresh
// every 10^4 steps to contain roundoff drift.
std::vector<Vector> precompute_forcing(const MemoryForcing& memory, const Matrix& premul,
                                       double dt, long n_steps) {
    std::vector<Vector> forcing(static_cast<std::size_t>(n_steps) + 1);
    const Eigen::Index m = memory.a1.dim();
    if (m == 0 || memory.zeta0.size() == 0 || memory.zeta0.cwiseAbs().maxCoeff() == 0.0) {
        const Vector zero = Vector::Zero(memory.alpha.rows());
        for (auto& f : forcing) f = zero;
        return forcing;
    }
    const SpectralDecomp sd = spectral_decompose(memory.a1);
    const Matrix step = sd.apply([dt](double x) { return std::exp(-dt * x); });
    const Vector zeta_modes = sd.q.transpose() * memory.zeta0;

    Vector z = memory.zeta0;
    for (long k = 0; k <= n_steps; ++k) {
        forcing[static_cast<std::size_t>(k)] = premul * (memory.alpha * z);
        if ((k + 1) % kForcingRefreshInterval == 0) {
            const double t_next = dt * static_cast<double>(k + 1);
            Vector w(m);
            for (Eigen::Index i = 0; i < m; ++i) {
                w(i) = std::exp(-t_next * sd.eigenvalues(i)) * zeta_modes(i);
            }
            z = sd.q * w;
        } else {
            z = step * z;
        }
    }
    return forcing;
}

}  // namespace

int stride_for_lags(const std::vector<double>& lags, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("stride_for_lags: dt must be positive");
    long g = 0;
    for (double tau : lags) {
        const long k = std::lround(tau / dt);
        if (std::abs(tau - static_cast<double>(k) * dt) > 1e-9 * std::max(1.0, std::abs(tau))) {
            std::ostringstream msg;
            msg << "lag " << tau << " is not an integer multiple of dt " << dt;
            throw std::invalid_argument(msg.str());
        }
        if (k > 0) g = std::gcd(g, k);
    }
    return g > 0 ? static_cast<int>(g) : 1;
}

Vector em_step(const Vector& state, const Matrix& drift, const Vector& forcing,
               const Matrix& noise_factor, double dt, double beta, const Vector& gaussians) {
    return state - dt * (drift * state - forcing) +
           std::sqrt(2.0 * dt / beta) * (noise_factor * gaussians);
}

Ensemble simulate_full(const SystemSpec& sys, const CoarseGrainingMap& cg,
                       const SimConfig& cfg) {
    validate_config(cfg);
    if (cg.full_dim() != sys.dim()) {
        throw std::invalid_argument("simulate_full: map/system dimension mismatch");
    }
    const SpectralDecomp sd = spectral_decompose(sys.a);
    check_stability(cfg.dt, sd.eigenvalues(sd.eigenvalues.size() - 1));

    const Eigen::Index full = sys.dim();
    Vector q0 = cfg.q0.size() == 0 ? Vector::Zero(full) : cfg.q0;
    if (q0.size() != full) {
        throw std::invalid_argument("simulate_full: q0 must have the full dimension");
    }

    const TrajectoryPlan plan = make_plan(cfg);
    const double amp = std::sqrt(2.0 * cfg.dt / sys.beta);
    const Matrix& a = sys.a.m;
    const Matrix& phi = cg.phi;
    const Eigen::Index n = cg.n();

    Ensemble ens;
    ens.dt = cfg.dt;
    ens.stride = plan.stride;
    ens.burn_in_fraction = cfg.burn_in_fraction;
    ens.trajectories.assign(static_cast<std::size_t>(cfg.n_samples), Matrix());

    parallel_for(static_cast<std::size_t>(cfg.n_samples), cfg.threads, [&](std::size_t i) {
        std::mt19937_64 rng = trajectory_rng(cfg.base_seed, i);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Matrix out(plan.n_stored, n);
        Vector q = q0;
        Vector g(full);
        out.row(0) = (phi * q).transpose();
        long stored = 1;
        for (long step = 1; step <= plan.n_steps; ++step) {
            for (Eigen::Index j = 0; j < full; ++j) g(j) = gauss(rng);
            q = q - cfg.dt * (a * q) + amp * g;
            if (step % plan.stride == 0 && stored < plan.n_stored) {
                out.row(stored++) = (phi * q).transpose();
            }
        }
        ens.trajectories[i] = std::move(out);
    });
    return ens;
}

Ensemble simulate_reduced(const ReducedModel& model, const SimConfig& cfg) {
    validate_config(cfg);
    // Approach-2 drift C B is similar to the symmetric C^{1/2} B C^{1/2},
    // so its spectrum is obtained from that form.
    double max_eig = 0.0;
    if (model.approach == Approach::two) {
        const SymMatrix c_half = sqrtm_spd(model.c);
        const SpectralDecomp sd =
            spectral_decompose(SymMatrix(c_half.m * model.b.m * c_half.m));
        max_eig = sd.eigenvalues(sd.eigenvalues.size() - 1);
    } else {
        const SpectralDecomp sd = spectral_decompose(SymMatrix(model.drift));
        max_eig = sd.eigenvalues(sd.eigenvalues.size() - 1);
    }
    check_stability(cfg.dt, max_eig);

    const Eigen::Index n = model.dim();
    Vector xi0;
    if (cfg.q0.size() == 0) {
        xi0 = Vector::Zero(n);
    } else if (cfg.q0.size() == n) {
        xi0 = cfg.q0;
    } else {
        throw std::invalid_argument("simulate_reduced: q0 must be the reduced state xi0");
    }

    const TrajectoryPlan plan = make_plan(cfg);
    const double amp = std::sqrt(2.0 * cfg.dt / model.beta);

    std::vector<Vector> forcing;
    if (model.memory) {
        const Matrix premul = model.approach == Approach::two
                                  ? model.c.m
                                  : Matrix(Matrix::Identity(n, n));
        forcing = precompute_forcing(*model.memory, premul, cfg.dt, plan.n_steps);
    }

    Ensemble ens;
    ens.dt = cfg.dt;
    ens.stride = plan.stride;
    ens.burn_in_fraction = cfg.burn_in_fraction;
    ens.trajectories.assign(static_cast<std::size_t>(cfg.n_samples), Matrix());

    const Matrix& drift = model.drift;
    const Matrix& factor = model.noise_factor.m;
    parallel_for(static_cast<std::size_t>(cfg.n_samples), cfg.threads, [&](std::size_t i) {
        std::mt19937_64 rng = trajectory_rng(cfg.base_seed, i);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Matrix out(plan.n_stored, n);
        Vector xi = xi0;
        Vector g(n);
        out.row(0) = xi.transpose();
        long stored = 1;
        for (long step = 1; step <= plan.n_steps; ++step) {
            for (Eigen::Index j = 0; j < n; ++j) g(j) = gauss(rng);
            Vector next = xi - cfg.dt * (drift * xi) + amp * (factor * g);
            if (!forcing.empty()) next += cfg.dt * forcing[static_cast<std::size_t>(step - 1)];
            xi = std::move(next);
            if (step % plan.stride == 0 && stored < plan.n_stored) {
                out.row(stored++) = xi.transpose();
            }
        }
        ens.trajectories[i] = std::move(out);
    });
    return ens;
}

namespace {

struct AcfWindow {
    long burn = 0;
    long retained = 0;
    std::vector<long> lag_steps;
};

AcfWindow make_window(const Ensemble& ens, const std::vector<double>& lags) {
    if (ens.trajectories.empty()) throw std::invalid_argument("sample_acf: empty ensemble");
    const long n_stored = ens.trajectories.front().rows();
    AcfWindow win;
    win.burn = static_cast<long>(ens.burn_in_fraction * static_cast<double>(n_stored));
    win.retained = n_stored - win.burn;
    if (win.retained < 2) throw std::invalid_argument("sample_acf: retained window too short");

    const double h = ens.stored_spacing();
    win.lag_steps.reserve(lags.size());
    for (double tau : lags) {
        const long k = std::lround(tau / h);
        if (std::abs(tau - static_cast<double>(k) * h) > 1e-9 * std::max(1.0, std::abs(tau))) {
            std::ostringstream msg;
            msg << "lag " << tau << " is not a multiple of the stored spacing " << h;
            throw std::invalid_argument(msg.str());
        }
        if (k >= win.retained) {
            std::ostringstream msg;
            msg << "lag " << tau << " exceeds the retained window "
                << static_cast<double>(win.retained - 1) * h;
            throw std::invalid_argument(msg.str());
        }
        win.lag_steps.push_back(k);
    }
    return win;
}

// Per-trajectory raw product sums and state sums over the retained window.
struct TrajectoryMoments {
    std::vector<Matrix> products;  // one n x n sum per lag
    Vector state_sum;
};

TrajectoryMoments trajectory_moments(const Matrix& traj, const AcfWindow& win) {
    const Eigen::Index n = traj.cols();
    TrajectoryMoments mom;
    mom.state_sum = Vector::Zero(n);
    const long last = traj.rows() - 1;
    for (long t = win.burn; t <= last; ++t) mom.state_sum += traj.row(t).transpose();
    mom.products.reserve(win.lag_steps.size());
    for (long k : win.lag_steps) {
        Matrix sum = Matrix::Zero(n, n);
        for (long t = win.burn; t + k <= last; ++t) {
            sum.noalias() += traj.row(t).transpose() * traj.row(t + k);
        }
        mom.products.push_back(std::move(sum));
    }
    return mom;
}

}  // namespace

AcfCurve sample_acf(const Ensemble& ens, const std::vector<double>& lags) {
    const AcfWindow win = make_window(ens, lags);
    const Eigen::Index n = ens.trajectories.front().cols();
    const std::size_t n_traj = ens.trajectories.size();

    std::vector<Matrix> products(lags.size(), Matrix::Zero(n, n));
    Vector state_sum = Vector::Zero(n);
    for (const Matrix& traj : ens.trajectories) {
        const TrajectoryMoments mom = trajectory_moments(traj, win);
        state_sum += mom.state_sum;
        for (std::size_t l = 0; l < lags.size(); ++l) products[l] += mom.products[l];
    }

    const double count_mean = static_cast<double>(n_traj) * static_cast<double>(win.retained);
    const Vector mean = state_sum / count_mean;
    const Matrix mean_outer = mean * mean.transpose();

    AcfCurve curve;
    curve.lags = lags;
    curve.values.reserve(lags.size());
    for (std::size_t l = 0; l < lags.size(); ++l) {
        const double pairs =
            static_cast<double>(n_traj) * static_cast<double>(win.retained - win.lag_steps[l]);
        const Matrix est = products[l] / pairs - mean_outer;
        curve.values.emplace_back(Matrix(0.5 * (est + est.transpose())));
    }
    return curve;
}

std::vector<double> standard_error(const Ensemble& ens, const std::vector<double>& lags) {
    const AcfWindow win = make_window(ens, lags);
    const Eigen::Index n = ens.trajectories.front().cols();
    const std::size_t n_traj = ens.trajectories.size();
    if (n_traj < 2) throw std::invalid_argument("standard_error: need at least two trajectories");

    std::vector<Matrix> sum(lags.size(), Matrix::Zero(n, n));
    std::vector<Matrix> sum_sq(lags.size(), Matrix::Zero(n, n));
    for (const Matrix& traj : ens.trajectories) {
        const TrajectoryMoments mom = trajectory_moments(traj, win);
        const Vector mean = mom.state_sum / static_cast<double>(win.retained);
        const Matrix mean_outer = mean * mean.transpose();
        for (std::size_t l = 0; l < lags.size(); ++l) {
            const double pairs = static_cast<double>(win.retained - win.lag_steps[l]);
            Matrix est = mom.products[l] / pairs - mean_outer;
            est = 0.5 * (est + est.transpose());
            sum[l] += est;
            sum_sq[l] += est.cwiseProduct(est);
        }
    }

    std::vector<double> out(lags.size());
    const double nt = static_cast<double>(n_traj);
    for (std::size_t l = 0; l < lags.size(); ++l) {
        const Matrix mean = sum[l] / nt;
        const Matrix var = (sum_sq[l] - nt * mean.cwiseProduct(mean)) / (nt - 1.0);
        out[l] = var.cwiseMax(0.0).cwiseSqrt().norm() / std::sqrt(nt);
    }
    return out;
}

}  // namespace cgl
