#pragma once

// Subcommand implementations behind the qreact executable. Each returns the
// process exit status: 0 success, 1 usage or config error, 2 I/O error.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qreact/io.hpp"

namespace qreact::cli {

enum ExitCode : int { ok = 0, usage_error = 1, io_error = 2 };

enum class OutputFormat { csv, json };

OutputFormat parse_format(const std::string &name);

struct SweepSpec {
    std::string family = "werner2";
    double lambda_start = 0.0;
    double lambda_end = 1.0;
    int steps = 21;
    IntegratorConfig integrator;
    bool normalize = false;
    std::filesystem::path output_path;
    OutputFormat format = OutputFormat::csv;

    void validate() const;
};

/// start + i (end - start) / (steps - 1), with the last entry exactly `end`.
std::vector<double> lambda_grid(double start, double end, int steps);

/// "t1,p1;t2,p2;..." -> one detector per ';'-separated pair.
MeasurementSetting<double> parse_angles(const std::string &text);

int cmd_sweep(const SweepSpec &spec, std::ostream &out, std::ostream &err);

struct GeometryRequest {
    std::optional<std::string> family;
    double lambda = 1.0;
    std::optional<std::filesystem::path> state_file;
    std::string angles;
};

int cmd_geometry(const GeometryRequest &req, std::ostream &out, std::ostream &err);

struct CompareRequest {
    std::vector<double> lambdas;
    DiscordConfig discord;
    IntegratorConfig integrator = IntegratorConfig::default_for(2);
    std::filesystem::path output_path;
    OutputFormat format = OutputFormat::csv;
};

/// Default comparison grid: 21 evenly spaced values plus lambda = 1/3.
std::vector<double> default_compare_lambdas();

int cmd_compare(const CompareRequest &req, std::ostream &out, std::ostream &err);

struct SchumacherRequest {
    bool search = true;
    std::optional<std::string> family;
    double lambda = 1.0;
    std::optional<std::filesystem::path> state_file;
    /// Explicit "A1;A2;B1;B2" detector angles when search is off.
    std::string angles;
    int grid_points = 16;
};

int cmd_schumacher(const SchumacherRequest &req, std::ostream &out, std::ostream &err);

/// Parses argv and dispatches; used by the executable and the CLI tests.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace qreact::cli
