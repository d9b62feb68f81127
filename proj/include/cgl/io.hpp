// io.hpp — JSON ingestion of systems, maps and simulation settings, CSV
// export of curves and reports, and run manifests with checksums.

#pragma once

#include "cgl/mc.hpp"
#include "cgl/systems.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cgl::io {

using json = nlohmann::json;

// Raised for schema problems; `where` names the offending key or path.
struct ConfigError : std::runtime_error {
    std::string where;
    ConfigError(std::string where_, const std::string& what_)
        : std::runtime_error(what_), where(std::move(where_)) {}
};

// Rejects keys outside required+optional and missing required keys.
void check_keys(const json& obj, const std::string& ctx,
                const std::vector<std::string>& required,
                const std::vector<std::string>& optional);

Matrix parse_matrix(const json& rows, const std::string& ctx);
Vector parse_vector(const json& entries, const std::string& ctx);

// Flat document {"A": [[...]], "beta": r, "phi_raw": [[...]]} describing a
// system plus its coarse-graining map; matrices row-major.
struct SystemDocument {
    SystemSpec system;
    CoarseGrainingMap map;
};

SystemDocument load_system_document(const json& doc);

// The same document extended with {"dt","t_total","n_samples","base_seed",
// "burn_in_fraction","q0"}; unlisted simulation keys keep their defaults.
struct SimDocument {
    SystemDocument model;
    SimConfig sim;
};

SimDocument load_sim_document(const json& doc);

// Simulation block parser shared with experiment configs.
SimConfig parse_sim_config(const json& obj, const std::string& ctx);

// Builder spec {"kind": "2d"|"tridiag"|"chain"|"matrix", ...}.
struct BuiltSystem {
    SystemSpec system;
    CoarseGrainingMap map;
};

BuiltSystem build_from_json(const json& spec, double beta, const std::string& ctx);

// 17-significant-digit decimal formatting used by every CSV column.
std::string format_value(double v);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Curve columns: tau,value_i_j row-major. Report columns:
// tau,abs,rel,l1_abs,l1_rel. Ensemble summary: tau,acf_hat,stderr with
// acf_hat the leading entry of the symmetrized estimate.
void write_curve_csv(const std::filesystem::path& path, const AcfCurve& curve);
void write_report_csv(const std::filesystem::path& path, const ErrorReport& report);
void write_ensemble_csv(const std::filesystem::path& path, const AcfCurve& curve,
                        const std::vector<double>& stderr_bands);

std::uint64_t fnv1a_file(const std::filesystem::path& path);
std::uint64_t fnv1a_bytes(const std::string& bytes);
std::string checksum_hex(std::uint64_t value);

}  // namespace cgl::io
