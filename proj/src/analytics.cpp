#include "cgl/analytics.hpp"

#include "cgl/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cgl {

namespace {

constexpr double kCurveSymTol = 1e-9;
constexpr double kRelFloor = 1e-14;

void require_lag_grid(const std::vector<double>& lags) {
    if (lags.empty()) throw std::invalid_argument("lag grid must be nonempty");
    double prev = -std::numeric_limits<double>::infinity();
    for (double tau : lags) {
        if (!(tau >= 0.0)) throw std::invalid_argument("lags must be nonnegative");
        if (!(tau >= prev)) throw std::invalid_argument("lags must be ascending");
        prev = tau;
    }
}

// Accept roundoff asymmetry up to the curve tolerance, then symmetrize.
SymMatrix curve_value(Matrix v) {
    if (v.size() > 0) {
        const double asym = (v - v.transpose()).cwiseAbs().maxCoeff();
        if (asym >= kCurveSymTol) {
            std::ostringstream msg;
            msg << "autocovariance value asymmetry " << asym << " exceeds " << kCurveSymTol;
            throw std::runtime_error(msg.str());
        }
        v = (0.5 * (v + v.transpose())).eval();
    }
    return SymMatrix(std::move(v));
}

// Cached pieces for R2(tau) = beta^{-1} B^{-1} C^{-1/2} e^{-tau S} C^{1/2},
// S = C^{1/2} B C^{1/2}.
struct App2Kernel {
    Matrix left;   // B^{-1} C^{-1/2} Q_S
    Matrix right;  // Q_S^T C^{1/2}
    Vector omega;  // eigenvalues of S

    explicit App2Kernel(const ReducedModel& model) {
        const SpectralDecomp sdc = spectral_decompose(model.c);
        const Matrix c_half = sdc.apply([](double x) { return std::sqrt(x); });
        const Matrix c_half_inv = sdc.apply([](double x) { return 1.0 / std::sqrt(x); });
        const SpectralDecomp sds = spectral_decompose(SymMatrix(c_half * model.b.m * c_half));
        left = inverse_spd(model.b).m * c_half_inv * sds.q;
        right = sds.q.transpose() * c_half;
        omega = sds.eigenvalues;
    }

    Matrix value(double tau, double beta) const {
        Vector w(omega.size());
        for (Eigen::Index i = 0; i < omega.size(); ++i) w(i) = std::exp(-tau * omega(i));
        return (left * w.asDiagonal() * right) / beta;
    }
};

}  // namespace

bool BoundMargins::all_pass() const {
    for (bool p : pass) {
        if (!p) return false;
    }
    return true;
}

AcfCurve acf_full(const SystemSpec& sys, const CoarseGrainingMap& cg,
                  const std::vector<double>& lags, int threads) {
    require_lag_grid(lags);
    if (cg.full_dim() != sys.dim()) {
        throw std::invalid_argument("acf_full: map/system dimension mismatch");
    }
    const SpectralDecomp sd = spectral_decompose(sys.a);
    const Matrix g = cg.phi * sd.q;  // n x N

    AcfCurve curve;
    curve.lags = lags;
    curve.values.resize(lags.size());
    parallel_for(lags.size(), threads, [&](std::size_t i) {
        const double tau = lags[i];
        Vector w(sd.eigenvalues.size());
        for (Eigen::Index j = 0; j < w.size(); ++j) {
            w(j) = std::exp(-tau * sd.eigenvalues(j)) / sd.eigenvalues(j);
        }
        curve.values[i] = curve_value((g * w.asDiagonal() * g.transpose()) / sys.beta);
    });
    return curve;
}

AcfCurve acf_reduced(const ReducedModel& model, const std::vector<double>& lags, int threads) {
    require_lag_grid(lags);
    AcfCurve curve;
    curve.lags = lags;
    curve.values.resize(lags.size());

    if (model.approach == Approach::two) {
        const App2Kernel kernel(model);
        parallel_for(lags.size(), threads, [&](std::size_t i) {
            curve.values[i] = curve_value(kernel.value(lags[i], model.beta));
        });
        return curve;
    }

    // Approaches 0 and 1: the drift is symmetric and the equilibrium
    // covariance is its inverse over beta.
    const SpectralDecomp sd = spectral_decompose(SymMatrix(model.drift));
    parallel_for(lags.size(), threads, [&](std::size_t i) {
        const double tau = lags[i];
        Vector w(sd.eigenvalues.size());
        for (Eigen::Index j = 0; j < w.size(); ++j) {
            w(j) = std::exp(-tau * sd.eigenvalues(j)) / sd.eigenvalues(j);
        }
        curve.values[i] = curve_value((sd.q * w.asDiagonal() * sd.q.transpose()) / model.beta);
    });
    return curve;
}

namespace {

void require_zero_start(const Vector& xi0) {
    if (xi0.size() > 0 && xi0.cwiseAbs().maxCoeff() > 0.0) {
        throw std::invalid_argument(
            "msd: only the deterministic zero initial condition is supported "
            "(nonzero means add a squared-drift term outside this formula)");
    }
}

}  // namespace

std::vector<double> msd(const SystemSpec& sys, const CoarseGrainingMap& cg,
                        const std::vector<double>& t_grid, const Vector& xi0) {
    require_zero_start(xi0);
    const SpectralDecomp sd = spectral_decompose(sys.a);
    const Matrix g = cg.phi * sd.q;
    const Vector col_sq = g.colwise().squaredNorm();  // sum_i G_ij^2

    std::vector<double> out(t_grid.size());
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const double t = t_grid[k];
        if (!(t >= 0.0)) throw std::invalid_argument("msd: times must be nonnegative");
        double acc = 0.0;
        for (Eigen::Index j = 0; j < col_sq.size(); ++j) {
            acc += col_sq(j) * (1.0 - std::exp(-2.0 * t * sd.eigenvalues(j))) / sd.eigenvalues(j);
        }
        out[k] = acc / sys.beta;
    }
    return out;
}

std::vector<double> msd(const ReducedModel& model, const std::vector<double>& t_grid,
                        const Vector& xi0) {
    require_zero_start(xi0);
    std::vector<double> out(t_grid.size());
    if (model.approach == Approach::two) {
        const App2Kernel kernel(model);
        const double tr_eq = inverse_spd(model.b).m.trace() / model.beta;
        for (std::size_t k = 0; k < t_grid.size(); ++k) {
            const double t = t_grid[k];
            if (!(t >= 0.0)) throw std::invalid_argument("msd: times must be nonnegative");
            out[k] = tr_eq - kernel.value(2.0 * t, model.beta).trace();
        }
        return out;
    }
    const SpectralDecomp sd = spectral_decompose(SymMatrix(model.drift));
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const double t = t_grid[k];
        if (!(t >= 0.0)) throw std::invalid_argument("msd: times must be nonnegative");
        double acc = 0.0;
        for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j) {
            acc += (1.0 - std::exp(-2.0 * t * sd.eigenvalues(j))) / sd.eigenvalues(j);
        }
        out[k] = acc / model.beta;
    }
    return out;
}

SymMatrix equilibrium_covariance(const SystemSpec& sys, const CoarseGrainingMap& cg) {
    const SymMatrix a_inv = inverse_spd(sys.a);
    return SymMatrix((cg.phi * a_inv.m * cg.phi.transpose()) / sys.beta);
}

SymMatrix equilibrium_covariance(const ReducedModel& model) {
    if (model.approach == Approach::zero) {
        return SymMatrix(inverse_spd(SymMatrix(model.drift)).m / model.beta);
    }
    return SymMatrix(inverse_spd(model.b).m / model.beta);
}

ErrorReport error_report(const AcfCurve& truth, const AcfCurve& approx) {
    if (truth.lags != approx.lags) {
        throw std::invalid_argument("error_report: lag grids differ");
    }
    const std::size_t count = truth.size();
    ErrorReport report;
    report.lags = truth.lags;
    report.abs_err.resize(count);
    report.rel_err.resize(count);
    report.l1_mean_abs.resize(count);
    report.l1_mean_rel.resize(count);

    std::vector<double> truth_norm(count);
    for (std::size_t i = 0; i < count; ++i) {
        report.abs_err[i] = (approx.values[i].m - truth.values[i].m).norm();
        truth_norm[i] = truth.values[i].m.norm();
        if (truth_norm[i] > kRelFloor) {
            report.rel_err[i] = report.abs_err[i] / truth_norm[i];
        } else {
            report.rel_err[i] = report.abs_err[i] < kRelFloor
                                    ? 0.0
                                    : std::numeric_limits<double>::quiet_NaN();
        }
    }

    double int_abs = 0.0;
    double int_truth = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        if (i == 0) {
            report.l1_mean_abs[0] = report.abs_err[0];
            report.l1_mean_rel[0] = report.rel_err[0];
            continue;
        }
        const double h = truth.lags[i] - truth.lags[i - 1];
        int_abs += 0.5 * h * (report.abs_err[i] + report.abs_err[i - 1]);
        int_truth += 0.5 * h * (truth_norm[i] + truth_norm[i - 1]);
        const double tau = truth.lags[i];
        report.l1_mean_abs[i] = tau > 0.0 ? int_abs / tau : 0.0;
        if (int_truth > kRelFloor) {
            report.l1_mean_rel[i] = int_abs / int_truth;
        } else {
            report.l1_mean_rel[i] =
                int_abs < kRelFloor ? 0.0 : std::numeric_limits<double>::quiet_NaN();
        }
    }
    return report;
}

BoundMargins check_bounds(const SystemSpec& sys, const CoarseGrainingMap& cg,
                          const std::vector<double>& lags, double tol) {
    require_lag_grid(lags);
    for (double tau : lags) {
        if (!(tau > 0.0)) throw std::invalid_argument("check_bounds: lags must be positive");
    }
    const BlockDecomposition bd = block_decompose(sys, cg);
    auto [b, c] = effective_matrices(bd);
    const ReducedModel m1 = build_reduced(sys, cg, Approach::one);
    const ReducedModel m2 = build_reduced(sys, cg, Approach::two);

    const AcfCurve full = acf_full(sys, cg, lags);
    const AcfCurve r1 = acf_reduced(m1, lags);
    const AcfCurve r2 = acf_reduced(m2, lags);

    const Eigen::Index n = bd.a0.dim();
    const Matrix eye = Matrix::Identity(n, n);
    const Matrix cbc = c.m * b.m * c.m;
    const double inv_beta = 1.0 / sys.beta;

    BoundMargins margins;
    margins.lags = lags;
    margins.app1_lower.resize(lags.size());
    margins.app1_upper.resize(lags.size());
    margins.app2_lower.resize(lags.size());
    margins.app2_upper.resize(lags.size());
    margins.pass.resize(lags.size());
    for (std::size_t i = 0; i < lags.size(); ++i) {
        const double tau = lags[i];
        const Matrix d1 = full.values[i].m - r1.values[i].m;
        const Matrix d2 = full.values[i].m - r2.values[i].m;

        const SymMatrix zero(Matrix::Zero(n, n));
        margins.app1_lower[i] = loewner_margin(SymMatrix(d1), zero);
        margins.app1_upper[i] = loewner_margin(
            SymMatrix(0.5 * inv_beta * tau * tau * (bd.a0.m - b.m) - d1), zero);
        margins.app2_lower[i] =
            loewner_margin(SymMatrix(d2 - inv_beta * tau * (c.m - eye)), zero);
        margins.app2_upper[i] = loewner_margin(
            SymMatrix(0.5 * inv_beta * tau * tau * (bd.a0.m - cbc) +
                      inv_beta * tau * (c.m - eye) - d2),
            zero);
        margins.pass[i] = margins.app1_lower[i] >= -tol && margins.app1_upper[i] >= -tol &&
                          margins.app2_lower[i] >= -tol && margins.app2_upper[i] >= -tol;
    }
    return margins;
}

ShortTimeExpansion short_time_expansions(const SystemSpec& sys, const CoarseGrainingMap& cg,
                                         double tau) {
    const BlockDecomposition bd = block_decompose(sys, cg);
    auto [b, c] = effective_matrices(bd);
    const Matrix b_inv = inverse_spd(b).m;
    const Eigen::Index n = bd.a0.dim();
    const Matrix eye = Matrix::Identity(n, n);
    const double inv_beta = 1.0 / sys.beta;

    ShortTimeExpansion exp3;
    exp3.full = SymMatrix(inv_beta * (b_inv - tau * eye + 0.5 * tau * tau * bd.a0.m));
    exp3.app1 = SymMatrix(inv_beta * (b_inv - tau * eye + 0.5 * tau * tau * b.m));
    exp3.app2 = SymMatrix(inv_beta * (b_inv - tau * c.m + 0.5 * tau * tau * c.m * b.m * c.m));
    return exp3;
}

Asymptotics2D asymptotics_2d(const TwoDSpec& spec, double tau, double beta) {
    if (!(spec.lambda >= 1.0)) throw std::invalid_argument("asymptotics_2d: lambda must be >= 1");
    if (!(beta > 0.0)) throw std::invalid_argument("asymptotics_2d: beta must be positive");
    const double lambda = spec.lambda;
    const double cos2 = std::cos(spec.theta) * std::cos(spec.theta);
    const double sin2 = std::sin(spec.theta) * std::sin(spec.theta);
    const double tan2 = sin2 / cos2;
    const double sec2 = 1.0 / cos2;
    const double inv_beta = 1.0 / beta;

    Asymptotics2D out;
    out.app1_abs = inv_beta * (std::exp(-tau) - std::exp(-tau * sec2)) * cos2;
    out.app1_rel = 1.0 - std::exp(-tau * tan2);
    out.app2_abs = inv_beta * (sin2 / lambda) *
                   std::abs(std::exp(-lambda * tau) - std::exp(-tau) * (1.0 - tau));
    out.app2_rel = std::min(1.0, std::abs(tau - 1.0) / lambda * tan2);
    out.app1_rel_tau1 = 1.0 - std::exp(-tan2);
    out.app2_rel_tau1 = tan2 * std::abs(1.0 - 0.5 * tan2) / (lambda * lambda);
    out.short_app1_rel = 0.5 * tau * tau * (lambda - 1.0) * tan2;
    out.short_app2_rel = tau * tan2;
    return out;
}

}  // namespace cgl
