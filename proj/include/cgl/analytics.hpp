// analytics.hpp — closed-form equilibrium statistics of the full and
// reduced dynamics, autocovariance error metrics, Loewner bound margins
// and the two-dimensional asymptotic error laws.

#pragma once

#include "cgl/model.hpp"

#include <vector>

namespace cgl {

// Equilibrium autocovariance sampled on an ascending lag grid; one n x n
// symmetric matrix per lag.
struct AcfCurve {
    std::vector<double> lags;
    std::vector<SymMatrix> values;

    std::size_t size() const { return lags.size(); }
};

// Pointwise and L1-mean Frobenius errors between two curves on a shared
// lag grid. The L1 means use trapezoid quadrature over the grid; the
// absolute version is divided by the lag so the rates have consistent
// units. At the first grid point both L1 columns take their limiting
// (pointwise) values.
struct ErrorReport {
    std::vector<double> lags;
    std::vector<double> abs_err;
    std::vector<double> rel_err;
    std::vector<double> l1_mean_abs;
    std::vector<double> l1_mean_rel;
};

// Two-dimensional family: A = diag(1, lambda) with the coarse variable at
// angle theta from the slow eigenvector.
struct TwoDSpec {
    double lambda = 1.0;
    double theta = 0.0;
};

// Smallest-eigenvalue margins of the four global autocovariance
// inequalities (nonnegative margin = inequality holds):
//   app1_lower:  R - R1 >= 0
//   app1_upper:  tau^2/(2 beta) (A0 - B) - (R - R1) >= 0
//   app2_lower:  (R - R2) - tau/beta (C - I) >= 0
//   app2_upper:  tau^2/(2 beta) (A0 - C B C) + tau/beta (C - I) - (R - R2) >= 0
struct BoundMargins {
    std::vector<double> lags;
    std::vector<double> app1_lower;
    std::vector<double> app1_upper;
    std::vector<double> app2_lower;
    std::vector<double> app2_upper;
    std::vector<bool> pass;

    bool all_pass() const;
};

// Second-order expansions of the three autocovariance curves about tau=0,
// each scaled by 1/beta:
//   full: B^{-1} - tau I + tau^2/2 A0
//   app1: B^{-1} - tau I + tau^2/2 B
//   app2: B^{-1} - tau C + tau^2/2 C B C
struct ShortTimeExpansion {
    SymMatrix full;
    SymMatrix app1;
    SymMatrix app2;
};

// Leading asymptotic error terms for the 2D family with large timescale
// separation.
struct Asymptotics2D {
    double app1_abs = 0.0;       // (e^{-tau} - e^{-tau sec^2}) cos^2 / beta
    double app1_rel = 0.0;       // 1 - e^{-tau tan^2}
    double app2_abs = 0.0;       // sin^2/(beta lambda) |e^{-lambda tau} - e^{-tau}(1 - tau)|
    double app2_rel = 0.0;       // min{1, |tau - 1| tan^2 / lambda}
    double app1_rel_tau1 = 0.0;  // 1 - e^{-tan^2}
    double app2_rel_tau1 = 0.0;  // tan^2 |1 - tan^2/2| / lambda^2
    double short_app1_rel = 0.0; // tau^2 (lambda - 1) tan^2 / 2
    double short_app2_rel = 0.0; // tau tan^2
};

// count uniformly spaced lags on (0, tau_max], optionally prepending 0.
inline std::vector<double> uniform_lags(double tau_max, std::size_t count,
                                        bool include_zero = false) {
    std::vector<double> lags;
    lags.reserve(count + (include_zero ? 1 : 0));
    if (include_zero) lags.push_back(0.0);
    for (std::size_t i = 1; i <= count; ++i) {
        lags.push_back(tau_max * static_cast<double>(i) / static_cast<double>(count));
    }
    return lags;
}

// R(tau) = beta^{-1} phi A^{-1} e^{-tau A} phi^T.
AcfCurve acf_full(const SystemSpec& sys, const CoarseGrainingMap& cg,
                  const std::vector<double>& lags, int threads = 1);

// R0 = beta^{-1} A0^{-1} e^{-tau A0}, R1 = beta^{-1} B^{-1} e^{-tau B},
// R2 = beta^{-1} B^{-1} e^{-tau B C}.
AcfCurve acf_reduced(const ReducedModel& model, const std::vector<double>& lags,
                     int threads = 1);

// Mean-squared displacement from a deterministic start at the origin;
// a nonzero xi0 is rejected.
std::vector<double> msd(const SystemSpec& sys, const CoarseGrainingMap& cg,
                        const std::vector<double>& t_grid, const Vector& xi0 = Vector());
std::vector<double> msd(const ReducedModel& model, const std::vector<double>& t_grid,
                        const Vector& xi0 = Vector());

// beta^{-1} phi A^{-1} phi^T for the full dynamics; beta^{-1} A0^{-1} for
// approach 0 and beta^{-1} B^{-1} for approaches 1 and 2.
SymMatrix equilibrium_covariance(const SystemSpec& sys, const CoarseGrainingMap& cg);
SymMatrix equilibrium_covariance(const ReducedModel& model);

ErrorReport error_report(const AcfCurve& truth, const AcfCurve& approx);

BoundMargins check_bounds(const SystemSpec& sys, const CoarseGrainingMap& cg,
                          const std::vector<double>& lags, double tol = 1e-9);

ShortTimeExpansion short_time_expansions(const SystemSpec& sys, const CoarseGrainingMap& cg,
                                         double tau);

// beta enters the absolute-error expressions only.
Asymptotics2D asymptotics_2d(const TwoDSpec& spec, double tau, double beta = 1.0);

}  // namespace cgl
