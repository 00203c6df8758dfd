#pragma once

// File formats: density matrices and integrator configs as JSON, sweep and
// comparison tables as versioned CSV or JSON.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qreact/baselines.hpp"

namespace qreact::io {

/// File could not be read or written.
class IoError : public Error {
  public:
    using Error::Error;
};

inline constexpr const char *csv_schema_line = "# qreact-csv v1";
inline constexpr const char *json_schema = "qreact-json v1";

/// {dim_qubits, entries: [[re, im], ...] row-major}
DensityMatrix<double> density_matrix_from_json(const nlohmann::json &j);
nlohmann::json density_matrix_to_json(const DensityMatrix<double> &rho);
DensityMatrix<double> load_density_matrix(const std::filesystem::path &path);

/// {method: "grid"|"mc", points, samples, seed, fix_first_detector}; missing
/// keys keep the values already in `base`.
IntegratorConfig integrator_config_from_json(const nlohmann::json &j, IntegratorConfig base = {});
nlohmann::json integrator_config_to_json(const IntegratorConfig &cfg);
IntegratorConfig load_integrator_config(const std::filesystem::path &path, IntegratorConfig base = {});

IntegrationMethod parse_method(const std::string &name);
std::string to_string(IntegrationMethod m);

nlohmann::json entropy_table_to_json(const EntropyTable<double> &t);
nlohmann::json geometry_report_to_json(const GeometryReport<double> &g);

/// Shortest round-trip decimal form; "nan" and "inf" for non-finite values.
std::string format_number(double v);

struct SweepRow {
    double lambda = 0;
    ReactivityResult<double> result;
    std::optional<double> normalized;
};

std::string sweep_csv(const std::vector<SweepRow> &rows);
nlohmann::json sweep_json(const std::vector<SweepRow> &rows);
std::string comparison_csv(const std::vector<ComparisonRow<double>> &rows);
nlohmann::json comparison_json(const std::vector<ComparisonRow<double>> &rows);

/// Writes via a temporary file and rename so a failed run leaves no partial output.
void write_file_atomic(const std::filesystem::path &path, const std::string &contents);

}  // namespace qreact::io
