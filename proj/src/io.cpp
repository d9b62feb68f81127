#include "cgl/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace cgl::io {

void check_keys(const json& obj, const std::string& ctx,
                const std::vector<std::string>& required,
                const std::vector<std::string>& optional) {
    if (!obj.is_object()) throw ConfigError(ctx, ctx + ": expected a JSON object");
    std::set<std::string> allowed(required.begin(), required.end());
    allowed.insert(optional.begin(), optional.end());
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError(item.key(), ctx + ": unknown key \"" + item.key() + "\"");
        }
    }
    for (const std::string& key : required) {
        if (!obj.contains(key)) {
            throw ConfigError(key, ctx + ": missing required key \"" + key + "\"");
        }
    }
}

Matrix parse_matrix(const json& rows, const std::string& ctx) {
    if (!rows.is_array() || rows.empty()) {
        throw ConfigError(ctx, ctx + ": expected a nonempty array of rows");
    }
    const std::size_t n_rows = rows.size();
    std::size_t n_cols = 0;
    Matrix m;
    for (std::size_t i = 0; i < n_rows; ++i) {
        const json& row = rows[i];
        if (!row.is_array() || row.empty()) {
            throw ConfigError(ctx, ctx + ": each row must be a nonempty array");
        }
        if (i == 0) {
            n_cols = row.size();
            m.resize(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
        } else if (row.size() != n_cols) {
            throw ConfigError(ctx, ctx + ": ragged rows");
        }
        for (std::size_t j = 0; j < n_cols; ++j) {
            if (!row[j].is_number()) throw ConfigError(ctx, ctx + ": non-numeric entry");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                row[j].get<double>();
        }
    }
    return m;
}

Vector parse_vector(const json& entries, const std::string& ctx) {
    if (!entries.is_array()) throw ConfigError(ctx, ctx + ": expected an array");
    Vector v(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!entries[i].is_number()) throw ConfigError(ctx, ctx + ": non-numeric entry");
        v(static_cast<Eigen::Index>(i)) = entries[i].get<double>();
    }
    return v;
}

SystemDocument load_system_document(const json& doc) {
    check_keys(doc, "system document", {"A", "beta", "phi_raw"}, {});
    const Matrix a = parse_matrix(doc.at("A"), "A");
    if (!doc.at("beta").is_number()) throw ConfigError("beta", "beta must be a number");
    const double beta = doc.at("beta").get<double>();
    const Matrix raw = parse_matrix(doc.at("phi_raw"), "phi_raw");
    if (raw.cols() != a.rows()) {
        throw ConfigError("phi_raw", "phi_raw column count must match the system dimension");
    }
    SystemDocument out{make_system(SymMatrix(a), beta), normalize_map(raw)};
    return out;
}

SimConfig parse_sim_config(const json& obj, const std::string& ctx) {
    check_keys(obj, ctx, {},
               {"dt", "t_total", "n_samples", "base_seed", "burn_in_fraction", "q0", "stride",
                "threads"});
    SimConfig cfg;
    if (obj.contains("dt")) cfg.dt = obj.at("dt").get<double>();
    if (obj.contains("t_total")) cfg.t_total = obj.at("t_total").get<double>();
    if (obj.contains("n_samples")) cfg.n_samples = obj.at("n_samples").get<int>();
    if (obj.contains("base_seed")) cfg.base_seed = obj.at("base_seed").get<std::uint64_t>();
    if (obj.contains("burn_in_fraction")) {
        cfg.burn_in_fraction = obj.at("burn_in_fraction").get<double>();
    }
    if (obj.contains("q0")) cfg.q0 = parse_vector(obj.at("q0"), ctx + ".q0");
    if (obj.contains("stride")) cfg.stride = obj.at("stride").get<int>();
    if (obj.contains("threads")) cfg.threads = obj.at("threads").get<int>();
    return cfg;
}

SimDocument load_sim_document(const json& doc) {
    check_keys(doc, "simulation document", {"A", "beta", "phi_raw"},
               {"dt", "t_total", "n_samples", "base_seed", "burn_in_fraction", "q0", "stride",
                "threads"});
    json model_part = {{"A", doc.at("A")}, {"beta", doc.at("beta")}, {"phi_raw", doc.at("phi_raw")}};
    json sim_part = doc;
    sim_part.erase("A");
    sim_part.erase("beta");
    sim_part.erase("phi_raw");
    return SimDocument{load_system_document(model_part), parse_sim_config(sim_part, "sim")};
}

BuiltSystem build_from_json(const json& spec, double beta, const std::string& ctx) {
    if (!spec.is_object() || !spec.contains("kind")) {
        throw ConfigError(ctx, ctx + ": system spec needs a \"kind\"");
    }
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "2d") {
        check_keys(spec, ctx, {"kind", "lambda", "theta"}, {});
        TwoDSpec two{spec.at("lambda").get<double>(), spec.at("theta").get<double>()};
        auto [sys, map] = build_2d(two, beta);
        return BuiltSystem{std::move(sys), std::move(map)};
    }
    if (kind == "tridiag") {
        check_keys(spec, ctx, {"kind", "diag", "sigma"}, {"n_select", "phi_raw"});
        TridiagSpec tri{parse_vector(spec.at("diag"), ctx + ".diag"),
                        spec.at("sigma").get<double>()};
        SystemSpec sys = build_tridiag(tri, beta);
        Matrix raw;
        if (spec.contains("phi_raw")) {
            raw = parse_matrix(spec.at("phi_raw"), ctx + ".phi_raw");
        } else {
            const Eigen::Index n_select =
                spec.contains("n_select") ? spec.at("n_select").get<Eigen::Index>() : 1;
            raw = selection_rows(n_select, sys.dim());
        }
        return BuiltSystem{std::move(sys), normalize_map(raw)};
    }
    if (kind == "chain") {
        check_keys(spec, ctx, {"kind", "n_masses", "k1", "k2", "k3"},
                   {"n_select", "phi_raw", "springs"});
        ChainSpec chain;
        chain.n_masses = spec.at("n_masses").get<int>();
        chain.k1 = spec.at("k1").get<double>();
        chain.k2 = spec.at("k2").get<double>();
        chain.k3 = spec.at("k3").get<double>();
        if (spec.contains("springs")) {
            chain.spring_override = spec.at("springs").get<std::vector<double>>();
        }
        SystemSpec sys = build_chain(chain, beta);
        Matrix raw;
        if (spec.contains("phi_raw")) {
            raw = parse_matrix(spec.at("phi_raw"), ctx + ".phi_raw");
        } else {
            const Eigen::Index n_select =
                spec.contains("n_select") ? spec.at("n_select").get<Eigen::Index>() : 2;
            raw = selection_rows(n_select, sys.dim());
        }
        return BuiltSystem{std::move(sys), normalize_map(raw)};
    }
    if (kind == "matrix") {
        check_keys(spec, ctx, {"kind", "A", "phi_raw"}, {});
        json doc = {{"A", spec.at("A")}, {"beta", beta}, {"phi_raw", spec.at("phi_raw")}};
        SystemDocument loaded = load_system_document(doc);
        return BuiltSystem{std::move(loaded.system), std::move(loaded.map)};
    }
    throw ConfigError(ctx, ctx + ": unknown system kind \"" + kind + "\"");
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    }
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << format_value(row[i]) << (i + 1 < row.size() ? "," : "\n");
        }
    }
}

void write_curve_csv(const std::filesystem::path& path, const AcfCurve& curve) {
    const Eigen::Index n = curve.values.empty() ? 0 : curve.values.front().dim();
    std::vector<std::string> header{"tau"};
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            header.push_back("value_" + std::to_string(i) + "_" + std::to_string(j));
        }
    }
    std::vector<std::vector<double>> rows(curve.size());
    for (std::size_t r = 0; r < curve.size(); ++r) {
        rows[r].reserve(1 + static_cast<std::size_t>(n * n));
        rows[r].push_back(curve.lags[r]);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) rows[r].push_back(curve.values[r].m(i, j));
        }
    }
    write_csv(path, header, rows);
}

void write_report_csv(const std::filesystem::path& path, const ErrorReport& report) {
    std::vector<std::vector<double>> rows(report.lags.size());
    for (std::size_t r = 0; r < report.lags.size(); ++r) {
        rows[r] = {report.lags[r], report.abs_err[r], report.rel_err[r], report.l1_mean_abs[r],
                   report.l1_mean_rel[r]};
    }
    write_csv(path, {"tau", "abs", "rel", "l1_abs", "l1_rel"}, rows);
}

void write_ensemble_csv(const std::filesystem::path& path, const AcfCurve& curve,
                        const std::vector<double>& stderr_bands) {
    if (stderr_bands.size() != curve.size()) {
        throw std::invalid_argument("write_ensemble_csv: band/curve length mismatch");
    }
    std::vector<std::vector<double>> rows(curve.size());
    for (std::size_t r = 0; r < curve.size(); ++r) {
        rows[r] = {curve.lags[r], curve.values[r].m(0, 0), stderr_bands[r]};
    }
    write_csv(path, {"tau", "acf_hat", "stderr"}, rows);
}

std::uint64_t fnv1a_bytes(const std::string& bytes) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string() + " for checksum");
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a_bytes(ss.str());
}

std::string checksum_hex(std::uint64_t value) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, value);
    return buf;
}

}  // namespace cgl::io
