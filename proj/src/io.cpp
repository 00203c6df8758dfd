#include "qreact/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace qreact::io {

using nlohmann::json;

DensityMatrix<double> density_matrix_from_json(const json &j) {
    try {
        const int d = j.at("dim_qubits").get<int>();
        if (d < 1 || d > max_qubits) throw InvalidArgument("dim_qubits out of range: " + std::to_string(d));
        const auto n = static_cast<Eigen::Index>(pow2(d));
        const json &entries = j.at("entries");
        if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != n * n)
            throw InvalidArgument("entries must hold " + std::to_string(n * n) + " [re, im] pairs");
        CMatrix<double> m(n, n);
        for (Eigen::Index k = 0; k < n * n; ++k) {
            const json &e = entries[static_cast<std::size_t>(k)];
            if (!e.is_array() || e.size() != 2) throw InvalidArgument("each entry must be a [re, im] pair");
            m(k / n, k % n) = {e[0].get<double>(), e[1].get<double>()};
        }
        return DensityMatrix<double>(std::move(m));
    } catch (const json::exception &e) {
        throw InvalidArgument(std::string("malformed density matrix JSON: ") + e.what());
    }
}

json density_matrix_to_json(const DensityMatrix<double> &rho) {
    json entries = json::array();
    for (Eigen::Index i = 0; i < rho.dim(); ++i)
        for (Eigen::Index k = 0; k < rho.dim(); ++k) entries.push_back({rho.matrix()(i, k).real(), rho.matrix()(i, k).imag()});
    return {{"dim_qubits", rho.num_qubits()}, {"entries", std::move(entries)}};
}

static std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path.string());
    return ss.str();
}

static json parse_json(const std::string &text, const std::filesystem::path &path) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw InvalidArgument("invalid JSON in " + path.string() + ": " + e.what());
    }
}

DensityMatrix<double> load_density_matrix(const std::filesystem::path &path) {
    return density_matrix_from_json(parse_json(read_file(path), path));
}

IntegrationMethod parse_method(const std::string &name) {
    if (name == "grid") return IntegrationMethod::grid;
    if (name == "mc" || name == "monte_carlo") return IntegrationMethod::monte_carlo;
    throw InvalidArgument("unknown integration method: " + name);
}

std::string to_string(IntegrationMethod m) { return m == IntegrationMethod::grid ? "grid" : "mc"; }

IntegratorConfig integrator_config_from_json(const json &j, IntegratorConfig base) {
    if (!j.is_object()) throw InvalidArgument("integrator config must be a JSON object");
    try {
        if (j.contains("method")) base.method = parse_method(j["method"].get<std::string>());
        if (j.contains("points")) base.grid_points_per_angle = j["points"].get<int>();
        if (j.contains("samples")) base.mc_samples = j["samples"].get<std::int64_t>();
        if (j.contains("seed")) base.rng_seed = j["seed"].get<std::uint64_t>();
        if (j.contains("fix_first_detector")) base.fix_first_detector = j["fix_first_detector"].get<bool>();
    } catch (const json::exception &e) {
        throw InvalidArgument(std::string("malformed integrator config: ") + e.what());
    }
    base.validate();
    return base;
}

json integrator_config_to_json(const IntegratorConfig &cfg) {
    return {{"method", to_string(cfg.method)},
            {"points", cfg.grid_points_per_angle},
            {"samples", cfg.mc_samples},
            {"seed", cfg.rng_seed},
            {"fix_first_detector", cfg.fix_first_detector}};
}

IntegratorConfig load_integrator_config(const std::filesystem::path &path, IntegratorConfig base) {
    return integrator_config_from_json(parse_json(read_file(path), path), base);
}

json entropy_table_to_json(const EntropyTable<double> &t) {
    json out = json::object();
    for (std::uint32_t m = 1; m < pow2(t.num_vars()); ++m) out[observer_label(VarSet(m))] = t(VarSet(m));
    return out;
}

json geometry_report_to_json(const GeometryReport<double> &g) {
    auto measures = [](const std::vector<SimplexMeasure<double>> &v) {
        json o = json::object();
        for (const auto &m : v) o[observer_label(m.vars)] = m.value;
        return o;
    };
    json out = {{"num_observers", g.num_vars},
                {"distances", measures(g.distances)},
                {"areas", measures(g.areas)},
                {"volumes", measures(g.volumes)},
                {"perimeter", g.perimeter},
                {"surface", g.surface},
                {"volume_total", g.volume_total}};
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

static json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string sweep_csv(const std::vector<SweepRow> &rows) {
    std::string out = std::string(csv_schema_line) + "\n";
    out += "lambda,reactivity_raw,reactivity_norm,numerator_mean,denominator_mean,stderr,samples,degenerate_flag\n";
    for (const auto &r : rows) {
        out += format_number(r.lambda) + ',' + format_number(r.result.reactivity) + ',' +
               (r.normalized ? format_number(*r.normalized) : std::string()) + ',' +
               format_number(r.result.mean_numerator) + ',' + format_number(r.result.mean_denominator) + ',' +
               format_number(r.result.stderr_estimate) + ',' + std::to_string(r.result.samples_used) + ',' +
               (r.result.degenerate ? "1" : "0") + '\n';
    }
    return out;
}

json sweep_json(const std::vector<SweepRow> &rows) {
    json arr = json::array();
    for (const auto &r : rows)
        arr.push_back({{"lambda", r.lambda},
                       {"reactivity_raw", number_or_null(r.result.reactivity)},
                       {"reactivity_norm", r.normalized ? number_or_null(*r.normalized) : json(nullptr)},
                       {"numerator_mean", r.result.mean_numerator},
                       {"denominator_mean", r.result.mean_denominator},
                       {"stderr", r.result.stderr_estimate},
                       {"samples", r.result.samples_used},
                       {"degenerate_flag", r.result.degenerate}});
    return {{"schema", json_schema}, {"rows", std::move(arr)}};
}

std::string comparison_csv(const std::vector<ComparisonRow<double>> &rows) {
    std::string out = std::string(csv_schema_line) + "\n";
    out += "lambda,concurrence,discord,reactivity_norm,reactivity_raw\n";
    for (const auto &r : rows)
        out += format_number(r.lambda) + ',' + format_number(r.concurrence) + ',' + format_number(r.discord) + ',' +
               format_number(r.reactivity_normalized) + ',' + format_number(r.reactivity_raw) + '\n';
    return out;
}

json comparison_json(const std::vector<ComparisonRow<double>> &rows) {
    json arr = json::array();
    for (const auto &r : rows)
        arr.push_back({{"lambda", r.lambda},
                       {"concurrence", r.concurrence},
                       {"discord", r.discord},
                       {"reactivity_norm", r.reactivity_normalized},
                       {"reactivity_raw", r.reactivity_raw}});
    return {{"schema", json_schema}, {"rows", std::move(arr)}};
}

void write_file_atomic(const std::filesystem::path &path, const std::string &contents) {
    std::filesystem::path tmp = path;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + path.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("failed writing " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at " + path.string());
    }
}

}  // namespace qreact::io
