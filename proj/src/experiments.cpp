#include "cgl/experiments.hpp"

#include <Eigen/Core>

#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

namespace cgl {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr int kPaperScaleSamples = 5000;

struct RunContext {
    fs::path dir;
    std::vector<fs::path> files;
    std::uint64_t base_seed = 0;
    int threads = 1;
    json resolved = json::object();

    fs::path file(const std::string& name) {
        files.push_back(dir / name);
        return files.back();
    }
};

double get_num(const json& cfg, const char* key, double dflt) {
    if (!cfg.contains(key)) return dflt;
    if (!cfg.at(key).is_number()) throw io::ConfigError(key, std::string(key) + " must be numeric");
    return cfg.at(key).get<double>();
}

int get_int(const json& cfg, const char* key, int dflt) {
    if (!cfg.contains(key)) return dflt;
    if (!cfg.at(key).is_number_integer()) {
        throw io::ConfigError(key, std::string(key) + " must be an integer");
    }
    return cfg.at(key).get<int>();
}

std::vector<double> get_num_list(const json& cfg, const char* key, std::vector<double> dflt) {
    if (!cfg.contains(key)) return dflt;
    const json& arr = cfg.at(key);
    if (!arr.is_array() || arr.empty()) {
        throw io::ConfigError(key, std::string(key) + " must be a nonempty array");
    }
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) throw io::ConfigError(key, std::string(key) + " must be numeric");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<int> get_int_list(const json& cfg, const char* key, std::vector<int> dflt) {
    if (!cfg.contains(key)) return dflt;
    const json& arr = cfg.at(key);
    if (!arr.is_array() || arr.empty()) {
        throw io::ConfigError(key, std::string(key) + " must be a nonempty array");
    }
    std::vector<int> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number_integer()) {
            throw io::ConfigError(key, std::string(key) + " must hold integers");
        }
        out.push_back(v.get<int>());
    }
    return out;
}

struct LagSpec {
    double max = 1.0;
    std::size_t count = 100;
};

LagSpec parse_lag_spec(const json& cfg, const char* key, LagSpec dflt) {
    if (!cfg.contains(key)) return dflt;
    const json& obj = cfg.at(key);
    io::check_keys(obj, key, {}, {"max", "count"});
    LagSpec spec = dflt;
    spec.max = get_num(obj, "max", dflt.max);
    const int count = get_int(obj, "count", static_cast<int>(dflt.count));
    if (!(spec.max > 0.0) || count < 1) {
        throw io::ConfigError(key, std::string(key) + ": max must be > 0 and count >= 1");
    }
    spec.count = static_cast<std::size_t>(count);
    return spec;
}

const std::vector<double> kDefaultThetas{0.05, 0.2, 0.4, M_PI / 4.0};

Vector default_tridiag_diag() {
    Vector diag(10);
    diag(0) = 1.0;
    for (int i = 1; i < 10; ++i) {
        diag(i) = 1.5 + (10.0 - 1.5) * static_cast<double>(i - 1) / 8.0;
    }
    return diag;
}

double rel_error_at(const SymMatrix& truth, const SymMatrix& approx) {
    return (approx.m - truth.m).norm() / truth.m.norm();
}

// ------------------------------ acf-2d ------------------------------

struct Acf2dParams {
    double lambda = 2.0;
    std::vector<double> thetas = {0.2, 0.4, 0.6, M_PI / 4.0};
    double beta = 1.0;
    LagSpec lags{5.0, 2560};
};

Acf2dParams parse_acf_2d(const json& cfg) {
    io::check_keys(cfg, "acf-2d", {"experiment"}, {"output_path", "lambda", "thetas", "beta", "lags"});
    Acf2dParams p;
    p.lambda = get_num(cfg, "lambda", p.lambda);
    p.thetas = get_num_list(cfg, "thetas", p.thetas);
    p.beta = get_num(cfg, "beta", p.beta);
    p.lags = parse_lag_spec(cfg, "lags", p.lags);
    return p;
}

void run_acf_2d(const Acf2dParams& p, RunContext& ctx) {
    const std::vector<double> lags = uniform_lags(p.lags.max, p.lags.count);
    for (std::size_t i = 0; i < p.thetas.size(); ++i) {
        auto [sys, cg] = build_2d(TwoDSpec{p.lambda, p.thetas[i]}, p.beta);
        const AcfCurve full = acf_full(sys, cg, lags, ctx.threads);
        const AcfCurve r1 = acf_reduced(build_reduced(sys, cg, Approach::one), lags, ctx.threads);
        const AcfCurve r2 = acf_reduced(build_reduced(sys, cg, Approach::two), lags, ctx.threads);
        const std::string tag = "theta" + std::to_string(i);
        io::write_curve_csv(ctx.file("acf2d_" + tag + "_full.csv"), full);
        io::write_curve_csv(ctx.file("acf2d_" + tag + "_app1.csv"), r1);
        io::write_curve_csv(ctx.file("acf2d_" + tag + "_app2.csv"), r2);
        io::write_report_csv(ctx.file("acf2d_" + tag + "_report_app1.csv"),
                             error_report(full, r1));
        io::write_report_csv(ctx.file("acf2d_" + tag + "_report_app2.csv"),
                             error_report(full, r2));
    }
}

// --------------------------- sweep-lambda ---------------------------

struct SweepLambdaParams {
    std::vector<double> thetas = kDefaultThetas;
    double lambda_min = 1.1;
    double lambda_max = 1000.0;
    int n_lambda = 25;
    double beta = 1.0;
    double tau_small = 1e-6;
};

SweepLambdaParams parse_sweep_lambda(const json& cfg) {
    io::check_keys(cfg, "sweep-lambda", {"experiment"},
                   {"output_path", "thetas", "lambda_min", "lambda_max", "n_lambda", "beta",
                    "tau_small"});
    SweepLambdaParams p;
    p.thetas = get_num_list(cfg, "thetas", p.thetas);
    p.lambda_min = get_num(cfg, "lambda_min", p.lambda_min);
    p.lambda_max = get_num(cfg, "lambda_max", p.lambda_max);
    p.n_lambda = get_int(cfg, "n_lambda", p.n_lambda);
    p.beta = get_num(cfg, "beta", p.beta);
    p.tau_small = get_num(cfg, "tau_small", p.tau_small);
    if (!(p.lambda_min > 1.0) || !(p.lambda_max >= p.lambda_min) || p.n_lambda < 2) {
        throw io::ConfigError("lambda_min", "sweep-lambda: need 1 < lambda_min <= lambda_max");
    }
    if (!(p.tau_small > 0.0 && p.tau_small < 1.0)) {
        throw io::ConfigError("tau_small", "sweep-lambda: tau_small must lie in (0, 1)");
    }
    return p;
}

void run_sweep_lambda(const SweepLambdaParams& p, RunContext& ctx) {
    std::vector<std::vector<double>> rows;
    // Short-lag errors vanish as tau -> 0+; they are evaluated at a fixed
    // small lag together with its half for a Richardson-style consistency
    // column.
    for (double theta : p.thetas) {
        for (int j = 0; j < p.n_lambda; ++j) {
            const double frac = static_cast<double>(j) / static_cast<double>(p.n_lambda - 1);
            const double lambda =
                std::exp(std::log(p.lambda_min) +
                         frac * (std::log(p.lambda_max) - std::log(p.lambda_min)));
            auto [sys, cg] = build_2d(TwoDSpec{lambda, theta}, p.beta);
            const ReducedModel m1 = build_reduced(sys, cg, Approach::one);
            const ReducedModel m2 = build_reduced(sys, cg, Approach::two);
            const std::vector<double> lags{0.5 * p.tau_small, p.tau_small, 1.0};
            const AcfCurve full = acf_full(sys, cg, lags);
            const AcfCurve r1 = acf_reduced(m1, lags);
            const AcfCurve r2 = acf_reduced(m2, lags);

            const Asymptotics2D asym_small =
                asymptotics_2d(TwoDSpec{lambda, theta}, p.tau_small, p.beta);
            const Asymptotics2D asym_one = asymptotics_2d(TwoDSpec{lambda, theta}, 1.0, p.beta);
            rows.push_back({theta, lambda,
                            rel_error_at(full.values[1], r1.values[1]),
                            asym_small.short_app1_rel,
                            rel_error_at(full.values[1], r2.values[1]),
                            asym_small.short_app2_rel,
                            rel_error_at(full.values[0], r1.values[0]),
                            rel_error_at(full.values[0], r2.values[0]),
                            rel_error_at(full.values[2], r1.values[2]),
                            asym_one.app1_rel_tau1,
                            rel_error_at(full.values[2], r2.values[2]),
                            asym_one.app2_rel_tau1});
        }
    }
    io::write_csv(ctx.file("sweep_lambda.csv"),
                  {"theta", "lambda", "rel_tau0_app1", "pred_tau0_app1", "rel_tau0_app2",
                   "pred_tau0_app2", "rel_tau0_half_app1", "rel_tau0_half_app2", "rel_tau1_app1",
                   "pred_tau1_app1", "rel_tau1_app2", "pred_tau1_app2"},
                  rows);
}

// ---------------------------- abs-vs-tau ----------------------------

struct AbsVsTauParams {
    double lambda = 10.0;
    std::vector<double> thetas = kDefaultThetas;
    double beta = 1.0;
    LagSpec long_lags{5.0, 200};
    LagSpec short_lags{1e-3, 100};
};

AbsVsTauParams parse_abs_vs_tau(const json& cfg) {
    io::check_keys(cfg, "abs-vs-tau", {"experiment"},
                   {"output_path", "lambda", "thetas", "beta", "lags", "short_lags"});
    AbsVsTauParams p;
    p.lambda = get_num(cfg, "lambda", p.lambda);
    p.thetas = get_num_list(cfg, "thetas", p.thetas);
    p.beta = get_num(cfg, "beta", p.beta);
    p.long_lags = parse_lag_spec(cfg, "lags", p.long_lags);
    p.short_lags = parse_lag_spec(cfg, "short_lags", p.short_lags);
    return p;
}

void run_abs_vs_tau(const AbsVsTauParams& p, RunContext& ctx) {
    std::vector<std::vector<double>> long_rows;
    std::vector<std::vector<double>> short_rows;
    for (double theta : p.thetas) {
        auto [sys, cg] = build_2d(TwoDSpec{p.lambda, theta}, p.beta);
        const ReducedModel m1 = build_reduced(sys, cg, Approach::one);
        const ReducedModel m2 = build_reduced(sys, cg, Approach::two);
        const double sin2 = std::sin(theta) * std::sin(theta);

        const std::vector<double> lags = uniform_lags(p.long_lags.max, p.long_lags.count);
        const AcfCurve full = acf_full(sys, cg, lags, ctx.threads);
        const AcfCurve r1 = acf_reduced(m1, lags, ctx.threads);
        const AcfCurve r2 = acf_reduced(m2, lags, ctx.threads);
        for (std::size_t i = 0; i < lags.size(); ++i) {
            const Asymptotics2D asym = asymptotics_2d(TwoDSpec{p.lambda, theta}, lags[i], p.beta);
            long_rows.push_back({theta, lags[i],
                                 (r1.values[i].m - full.values[i].m).norm(),
                                 (r2.values[i].m - full.values[i].m).norm(), asym.app1_abs,
                                 asym.app2_abs});
        }

        const std::vector<double> short_grid =
            uniform_lags(p.short_lags.max, p.short_lags.count);
        const AcfCurve sfull = acf_full(sys, cg, short_grid, ctx.threads);
        const AcfCurve sr1 = acf_reduced(m1, short_grid, ctx.threads);
        const AcfCurve sr2 = acf_reduced(m2, short_grid, ctx.threads);
        for (std::size_t i = 0; i < short_grid.size(); ++i) {
            const double tau = short_grid[i];
            short_rows.push_back({theta, tau,
                                  (sr1.values[i].m - sfull.values[i].m).norm(),
                                  (sr2.values[i].m - sfull.values[i].m).norm(),
                                  0.5 * tau * tau * (p.lambda - 1.0) * sin2 / p.beta,
                                  tau * sin2 / p.beta});
        }
    }
    const std::vector<std::string> header{"theta",    "tau",       "abs_app1",
                                          "abs_app2", "pred_app1", "pred_app2"};
    io::write_csv(ctx.file("abs_vs_tau_long.csv"), header, long_rows);
    io::write_csv(ctx.file("abs_vs_tau_short.csv"), header, short_rows);
}

// ----------------------- tridiag-progressive ------------------------

struct TridiagProgressiveParams {
    Vector diag = default_tridiag_diag();
    double sigma = 0.5;
    std::vector<double> sigma_values = {0.25, 0.5, 0.75, 1.0};
    int d = 1;
    std::vector<int> n_levels = {2, 4, 6, 8};
    double beta = 1.0;
    LagSpec lags{5.0, 200};
    double slack = 1e-9;
};

TridiagProgressiveParams parse_tridiag_progressive(const json& cfg) {
    io::check_keys(cfg, "tridiag-progressive", {"experiment"},
                   {"output_path", "diag", "sigma", "sigma_values", "d", "n_levels", "beta",
                    "lags", "slack"});
    TridiagProgressiveParams p;
    if (cfg.contains("diag")) p.diag = io::parse_vector(cfg.at("diag"), "diag");
    p.sigma = get_num(cfg, "sigma", p.sigma);
    p.sigma_values = get_num_list(cfg, "sigma_values", p.sigma_values);
    p.d = get_int(cfg, "d", p.d);
    p.n_levels = get_int_list(cfg, "n_levels", p.n_levels);
    p.beta = get_num(cfg, "beta", p.beta);
    p.lags = parse_lag_spec(cfg, "lags", p.lags);
    p.slack = get_num(cfg, "slack", p.slack);
    const int full = static_cast<int>(p.diag.size());
    if (p.d < 1 || p.d >= full) throw io::ConfigError("d", "tridiag-progressive: bad d");
    for (int n : p.n_levels) {
        if (n <= p.d || n > full) {
            throw io::ConfigError("n_levels", "tridiag-progressive: levels must satisfy d < n <= N");
        }
    }
    return p;
}

void run_tridiag_progressive(const TridiagProgressiveParams& p, RunContext& ctx) {
    const std::vector<double> lags = uniform_lags(p.lags.max, p.lags.count);
    const Eigen::Index full_dim = p.diag.size();

    // Relative d-level ACF errors against the full dynamics as the
    // off-diagonal coupling grows.
    std::vector<std::vector<double>> rel_rows;
    for (double sigma : p.sigma_values) {
        const SystemSpec sys = build_tridiag(TridiagSpec{p.diag, sigma}, p.beta);
        const CoarseGrainingMap cg = normalize_map(selection_rows(p.d, full_dim));
        const AcfCurve full = acf_full(sys, cg, lags, ctx.threads);
        const AcfCurve r1 = acf_reduced(build_reduced(sys, cg, Approach::one), lags, ctx.threads);
        const AcfCurve r2 = acf_reduced(build_reduced(sys, cg, Approach::two), lags, ctx.threads);
        for (std::size_t i = 0; i < lags.size(); ++i) {
            rel_rows.push_back({sigma, lags[i], rel_error_at(full.values[i], r1.values[i]),
                                rel_error_at(full.values[i], r2.values[i])});
        }
    }
    io::write_csv(ctx.file("tridiag_rel_errors.csv"), {"sigma", "tau", "rel_app1", "rel_app2"},
                  rel_rows);

    const SystemSpec sys = build_tridiag(TridiagSpec{p.diag, p.sigma}, p.beta);
    std::vector<std::vector<double>> summary_rows;
    for (Approach approach : {Approach::one, Approach::two}) {
        std::vector<std::string> header{"tau"};
        std::vector<std::vector<double>> rows(lags.size());
        for (std::size_t i = 0; i < lags.size(); ++i) rows[i].push_back(lags[i]);
        for (int n : p.n_levels) {
            const ProgressiveSpec maps = make_progressive(
                selection_rows(p.d, n), selection_rows(n, full_dim));
            const ProgressiveComparison cmp =
                progressive_compare(sys, maps, approach, lags, ctx.threads);
            const std::string suffix = "_n" + std::to_string(n);
            header.push_back("gap_full_vs_intermediate" + suffix);
            header.push_back("gap_intermediate_vs_coarse" + suffix);
            header.push_back("gap_full_vs_coarse" + suffix);
            long violations = 0;
            double max_overshoot = 0.0;
            for (std::size_t i = 0; i < lags.size(); ++i) {
                rows[i].push_back(cmp.gap_full_vs_intermediate[i]);
                rows[i].push_back(cmp.gap_intermediate_vs_coarse[i]);
                rows[i].push_back(cmp.gap_full_vs_coarse[i]);
                const double overshoot = std::max(
                    cmp.gap_full_vs_intermediate[i] - cmp.gap_full_vs_coarse[i],
                    cmp.gap_intermediate_vs_coarse[i] - cmp.gap_full_vs_coarse[i]);
                max_overshoot = std::max(max_overshoot, overshoot);
                if (overshoot > p.slack) ++violations;
            }
            summary_rows.push_back({static_cast<double>(static_cast<int>(approach)),
                                    static_cast<double>(n), static_cast<double>(violations),
                                    max_overshoot});
        }
        const std::string name = approach == Approach::one ? "tridiag_progressive_app1.csv"
                                                           : "tridiag_progressive_app2.csv";
        io::write_csv(ctx.file(name), header, rows);
    }
    io::write_csv(ctx.file("tridiag_progressive_summary.csv"),
                  {"approach", "n", "violations", "max_overshoot"}, summary_rows);
}

// ------------------------------- chain ------------------------------

struct ChainParams {
    int n_masses = 40;
    double k1 = 1.0;
    std::vector<double> k2_values = {2.0, 4.0, 8.0};
    std::vector<double> k3_values = {2.0, 4.0, 8.0};
    int d = 2;
    int n = 4;
    double beta = 1.0;
    LagSpec lags{25.0, 100};
};

ChainParams parse_chain(const json& cfg) {
    io::check_keys(cfg, "chain", {"experiment"},
                   {"output_path", "n_masses", "k1", "k2_values", "k3_values", "d", "n", "beta",
                    "lags"});
    ChainParams p;
    p.n_masses = get_int(cfg, "n_masses", p.n_masses);
    p.k1 = get_num(cfg, "k1", p.k1);
    p.k2_values = get_num_list(cfg, "k2_values", p.k2_values);
    p.k3_values = get_num_list(cfg, "k3_values", p.k3_values);
    p.d = get_int(cfg, "d", p.d);
    p.n = get_int(cfg, "n", p.n);
    p.beta = get_num(cfg, "beta", p.beta);
    p.lags = parse_lag_spec(cfg, "lags", p.lags);
    if (p.d < 1 || p.d >= p.n || p.n >= p.n_masses) {
        throw io::ConfigError("d", "chain: need 1 <= d < n < n_masses");
    }
    return p;
}

void run_chain(const ChainParams& p, RunContext& ctx) {
    const std::vector<double> lags = uniform_lags(p.lags.max, p.lags.count);
    std::vector<std::vector<double>> summary_rows;
    for (std::size_t i2 = 0; i2 < p.k2_values.size(); ++i2) {
        for (std::size_t i3 = 0; i3 < p.k3_values.size(); ++i3) {
            ChainSpec spec;
            spec.n_masses = p.n_masses;
            spec.k1 = p.k1;
            spec.k2 = p.k2_values[i2];
            spec.k3 = p.k3_values[i3];
            const SystemSpec sys = build_chain(spec, p.beta);
            const ProgressiveSpec maps =
                make_progressive(selection_rows(p.d, p.n), selection_rows(p.n, p.n_masses));

            const ProgressiveComparison cmp1 =
                progressive_compare(sys, maps, Approach::one, lags, ctx.threads);
            const ProgressiveComparison cmp2 =
                progressive_compare(sys, maps, Approach::two, lags, ctx.threads);

            std::vector<std::vector<double>> rows(lags.size());
            long better = 0;
            long total = 0;
            for (std::size_t i = 0; i < lags.size(); ++i) {
                const double denom = cmp1.full_projected.values[i].m.norm();
                const double a1_coarse = cmp1.gap_full_vs_coarse[i] / denom;
                const double a1_inter = cmp1.gap_full_vs_intermediate[i] / denom;
                const double a1_cross = cmp1.gap_intermediate_vs_coarse[i] / denom;
                const double a2_coarse = cmp2.gap_full_vs_coarse[i] / denom;
                const double a2_inter = cmp2.gap_full_vs_intermediate[i] / denom;
                const double a2_cross = cmp2.gap_intermediate_vs_coarse[i] / denom;
                rows[i] = {lags[i], a1_coarse, a1_inter, a1_cross,
                           a2_coarse, a2_inter, a2_cross};
                better += (a2_coarse <= a1_coarse ? 1 : 0) + (a2_inter <= a1_inter ? 1 : 0);
                total += 2;
            }
            const std::string name =
                "chain_k2_" + std::to_string(i2) + "_k3_" + std::to_string(i3) + ".csv";
            io::write_csv(ctx.file(name),
                          {"tau", "app1_40v2", "app1_40v4", "app1_4v2", "app2_40v2",
                           "app2_40v4", "app2_4v2"},
                          rows);
            summary_rows.push_back({spec.k2, spec.k3,
                                    static_cast<double>(better) / static_cast<double>(total)});
        }
    }
    io::write_csv(ctx.file("chain_summary.csv"), {"k2", "k3", "frac_app2_better"}, summary_rows);
}

// ---------------------------- mc-validate ---------------------------

struct McValidateParams {
    double lambda = 20.0;
    double theta = 0.3;
    double beta = 1.0;
    SimConfig sim;
    LagSpec lags{2.0, 40};
};

McValidateParams parse_mc_validate(const json& cfg) {
    io::check_keys(cfg, "mc-validate", {"experiment"},
                   {"output_path", "lambda", "theta", "beta", "sim", "lags"});
    McValidateParams p;
    p.lambda = get_num(cfg, "lambda", p.lambda);
    p.theta = get_num(cfg, "theta", p.theta);
    p.beta = get_num(cfg, "beta", p.beta);
    p.sim.base_seed = 20240601;
    Vector q0(2);
    q0 << 5.0, -4.0;
    p.sim.q0 = q0;
    if (cfg.contains("sim")) {
        SimConfig parsed = io::parse_sim_config(cfg.at("sim"), "sim");
        if (!cfg.at("sim").contains("q0")) parsed.q0 = p.sim.q0;
        if (!cfg.at("sim").contains("base_seed")) parsed.base_seed = p.sim.base_seed;
        p.sim = parsed;
    }
    p.lags = parse_lag_spec(cfg, "lags", p.lags);
    return p;
}

void run_mc_validate(const McValidateParams& p, RunContext& ctx, bool paper_scale) {
    auto [sys, cg] = build_2d(TwoDSpec{p.lambda, p.theta}, p.beta);
    const std::vector<double> lags = uniform_lags(p.lags.max, p.lags.count);

    SimConfig cfg = p.sim;
    if (paper_scale) cfg.n_samples = kPaperScaleSamples;
    cfg.threads = ctx.threads;
    cfg.stride = stride_for_lags(lags, cfg.dt);
    ctx.base_seed = cfg.base_seed;
    ctx.resolved = {{"n_samples", cfg.n_samples},
                    {"dt", cfg.dt},
                    {"t_total", cfg.t_total},
                    {"burn_in_fraction", cfg.burn_in_fraction},
                    {"q0", std::vector<double>(cfg.q0.data(), cfg.q0.data() + cfg.q0.size())},
                    {"lambda", p.lambda},
                    {"theta", p.theta},
                    {"beta", p.beta}};

    const AcfCurve an_full = acf_full(sys, cg, lags, ctx.threads);
    const BlockDecomposition bd = block_decompose(sys, cg);
    const Vector xi0 = cg.phi * cfg.q0;
    const Vector zeta0 = default_zeta0(bd, xi0);
    const ReducedModel m1 = build_reduced(sys, cg, Approach::one, zeta0);
    const ReducedModel m2 = build_reduced(sys, cg, Approach::two, zeta0);
    const AcfCurve an_r1 = acf_reduced(m1, lags, ctx.threads);
    const AcfCurve an_r2 = acf_reduced(m2, lags, ctx.threads);

    const Ensemble ens_full = simulate_full(sys, cg, cfg);
    SimConfig cfg_reduced = cfg;
    cfg_reduced.q0 = xi0;
    cfg_reduced.base_seed = cfg.base_seed + 1;
    const Ensemble ens_r1 = simulate_reduced(m1, cfg_reduced);
    cfg_reduced.base_seed = cfg.base_seed + 2;
    const Ensemble ens_r2 = simulate_reduced(m2, cfg_reduced);

    const AcfCurve s_full = sample_acf(ens_full, lags);
    const AcfCurve s_r1 = sample_acf(ens_r1, lags);
    const AcfCurve s_r2 = sample_acf(ens_r2, lags);
    const std::vector<double> se_full = standard_error(ens_full, lags);
    const std::vector<double> se_r1 = standard_error(ens_r1, lags);
    const std::vector<double> se_r2 = standard_error(ens_r2, lags);

    io::write_ensemble_csv(ctx.file("mc_validate_sample_full.csv"), s_full, se_full);
    io::write_ensemble_csv(ctx.file("mc_validate_sample_app1.csv"), s_r1, se_r1);
    io::write_ensemble_csv(ctx.file("mc_validate_sample_app2.csv"), s_r2, se_r2);

    std::vector<std::vector<double>> rows(lags.size());
    std::vector<std::vector<double>> log_rows(lags.size());
    std::array<long, 3> covered{0, 0, 0};
    for (std::size_t i = 0; i < lags.size(); ++i) {
        const double af = an_full.values[i].m(0, 0);
        const double a1 = an_r1.values[i].m(0, 0);
        const double a2 = an_r2.values[i].m(0, 0);
        const double sf = s_full.values[i].m(0, 0);
        const double s1 = s_r1.values[i].m(0, 0);
        const double s2 = s_r2.values[i].m(0, 0);
        rows[i] = {lags[i], af, sf, se_full[i], a1, s1, se_r1[i], a2, s2, se_r2[i]};
        log_rows[i] = {lags[i],        std::log10(af), std::log10(sf), std::log10(a1),
                       std::log10(s1), std::log10(a2), std::log10(s2)};
        covered[0] += std::abs(sf - af) <= 3.0 * se_full[i] ? 1 : 0;
        covered[1] += std::abs(s1 - a1) <= 3.0 * se_r1[i] ? 1 : 0;
        covered[2] += std::abs(s2 - a2) <= 3.0 * se_r2[i] ? 1 : 0;
    }
    io::write_csv(ctx.file("mc_validate.csv"),
                  {"tau", "full_analytic", "full_sample", "full_stderr", "app1_analytic",
                   "app1_sample", "app1_stderr", "app2_analytic", "app2_sample", "app2_stderr"},
                  rows);
    io::write_csv(ctx.file("mc_validate_log.csv"),
                  {"tau", "log10_full_analytic", "log10_full_sample", "log10_app1_analytic",
                   "log10_app1_sample", "log10_app2_analytic", "log10_app2_sample"},
                  log_rows);
    const double n_lags = static_cast<double>(lags.size());
    io::write_csv(ctx.file("mc_validate_coverage.csv"),
                  {"full_frac_within_3se", "app1_frac_within_3se", "app2_frac_within_3se"},
                  {{covered[0] / n_lags, covered[1] / n_lags, covered[2] / n_lags}});
}

// ---------------------------- bounds-check --------------------------

struct BoundsCheckParams {
    int dim = 6;
    int n_cg = 1;
    std::uint64_t seed = 1;
    double beta = 1.0;
    LagSpec lags{5.0, 200};
    double tol = 1e-9;
};

BoundsCheckParams parse_bounds_check(const json& cfg) {
    io::check_keys(cfg, "bounds-check", {"experiment"},
                   {"output_path", "dim", "n_cg", "seed", "beta", "lags", "tol"});
    BoundsCheckParams p;
    p.dim = get_int(cfg, "dim", p.dim);
    p.n_cg = get_int(cfg, "n_cg", p.n_cg);
    p.seed = static_cast<std::uint64_t>(get_int(cfg, "seed", static_cast<int>(p.seed)));
    p.beta = get_num(cfg, "beta", p.beta);
    p.lags = parse_lag_spec(cfg, "lags", p.lags);
    p.tol = get_num(cfg, "tol", p.tol);
    if (p.dim < 2 || p.n_cg < 1 || p.n_cg >= p.dim) {
        throw io::ConfigError("dim", "bounds-check: need 1 <= n_cg < dim");
    }
    return p;
}

void run_bounds_check(const BoundsCheckParams& p, RunContext& ctx) {
    std::mt19937_64 rng(p.seed);
    ctx.base_seed = p.seed;
    const SystemSpec sys = make_system(random_spd(p.dim, rng), p.beta);
    const CoarseGrainingMap cg = normalize_map(random_orthonormal_rows(p.n_cg, p.dim, rng));
    const std::vector<double> lags = uniform_lags(p.lags.max, p.lags.count);
    const BoundMargins margins = check_bounds(sys, cg, lags, p.tol);
    std::vector<std::vector<double>> rows(lags.size());
    for (std::size_t i = 0; i < lags.size(); ++i) {
        rows[i] = {lags[i], margins.app1_lower[i], margins.app1_upper[i], margins.app2_lower[i],
                   margins.app2_upper[i], margins.pass[i] ? 1.0 : 0.0};
    }
    io::write_csv(ctx.file("bounds_margins.csv"),
                  {"tau", "app1_lower", "app1_upper", "app2_lower", "app2_upper", "pass"}, rows);
}

// ------------------------------ dispatch ----------------------------

std::string experiment_name(const json& config) {
    if (!config.is_object() || !config.contains("experiment")) {
        throw io::ConfigError("experiment", "config needs an \"experiment\" key");
    }
    if (!config.at("experiment").is_string()) {
        throw io::ConfigError("experiment", "\"experiment\" must be a string");
    }
    return config.at("experiment").get<std::string>();
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{
        "acf-2d",  "sweep-lambda", "abs-vs-tau", "tridiag-progressive",
        "chain", "mc-validate", "bounds-check"};
    return names;
}

void validate_config(const io::json& config) {
    const std::string name = experiment_name(config);
    if (name == "acf-2d") {
        parse_acf_2d(config);
    } else if (name == "sweep-lambda") {
        parse_sweep_lambda(config);
    } else if (name == "abs-vs-tau") {
        parse_abs_vs_tau(config);
    } else if (name == "tridiag-progressive") {
        parse_tridiag_progressive(config);
    } else if (name == "chain") {
        parse_chain(config);
    } else if (name == "mc-validate") {
        parse_mc_validate(config);
    } else if (name == "bounds-check") {
        parse_bounds_check(config);
    } else {
        throw io::ConfigError("experiment", "unknown experiment \"" + name + "\"");
    }
    if (config.contains("output_path") && !config.at("output_path").is_string()) {
        throw io::ConfigError("output_path", "output_path must be a string");
    }
}

RunResult run_experiment(const io::json& config, const RunOptions& opts) {
    validate_config(config);
    const std::string name = experiment_name(config);

    fs::path out_dir = opts.out_dir;
    if (out_dir.empty()) {
        out_dir = config.contains("output_path") ? fs::path(config.at("output_path").get<std::string>())
                                                 : fs::path("out");
    }
    const bool created = !fs::exists(out_dir);
    fs::create_directories(out_dir);

    RunContext ctx;
    ctx.dir = out_dir;
    ctx.threads = opts.threads > 0 ? opts.threads : 1;

    const auto start = std::chrono::steady_clock::now();
    if (name == "acf-2d") {
        run_acf_2d(parse_acf_2d(config), ctx);
    } else if (name == "sweep-lambda") {
        run_sweep_lambda(parse_sweep_lambda(config), ctx);
    } else if (name == "abs-vs-tau") {
        run_abs_vs_tau(parse_abs_vs_tau(config), ctx);
    } else if (name == "tridiag-progressive") {
        run_tridiag_progressive(parse_tridiag_progressive(config), ctx);
    } else if (name == "chain") {
        run_chain(parse_chain(config), ctx);
    } else if (name == "mc-validate") {
        run_mc_validate(parse_mc_validate(config), ctx, opts.paper_scale);
    } else if (name == "bounds-check") {
        run_bounds_check(parse_bounds_check(config), ctx);
    }
    const double wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json manifest;
    manifest["experiment"] = name;
    manifest["config"] = config;
    manifest["config_hash"] = io::checksum_hex(io::fnv1a_bytes(config.dump()));
    manifest["base_seed"] = ctx.base_seed;
    manifest["paper_scale"] = opts.paper_scale;
    manifest["threads"] = ctx.threads;
    manifest["resolved"] = ctx.resolved;
    manifest["versions"] = {{"cglangevin", kToolVersion},
                            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                          std::to_string(EIGEN_MINOR_VERSION)}};
    manifest["wall_time_seconds"] = wall_seconds;
    manifest["created_output_dir"] = created;
    json files = json::object();
    for (const fs::path& f : ctx.files) {
        files[f.filename().string()] = io::checksum_hex(io::fnv1a_file(f));
    }
    manifest["files"] = files;

    RunResult result;
    result.experiment = name;
    result.out_dir = out_dir;
    result.files = ctx.files;
    result.manifest_path = out_dir / (name + "_manifest.json");
    std::ofstream out(result.manifest_path);
    if (!out) throw std::runtime_error("cannot write manifest " + result.manifest_path.string());
    out << manifest.dump(2) << "\n";
    return result;
}

}  // namespace cgl
