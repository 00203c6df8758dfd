#include "qreact/cli.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

namespace qreact::cli {

using nlohmann::json;

OutputFormat parse_format(const std::string &name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw InvalidArgument("unknown output format: " + name);
}

void SweepSpec::validate() const {
    parse_state_family(family);
    if (steps < 2) throw InvalidArgument("steps must be >= 2");
    if (!(lambda_start >= 0.0 && lambda_start < lambda_end && lambda_end <= 1.0))
        throw InvalidArgument("need 0 <= lambda_start < lambda_end <= 1");
    if (output_path.empty()) throw InvalidArgument("an output path is required");
    integrator.validate();
}

std::vector<double> lambda_grid(double start, double end, int steps) {
    if (steps < 2) throw InvalidArgument("steps must be >= 2");
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = start + (end - start) * i / (steps - 1);
    out.front() = start;
    out.back() = end;
    return out;
}

MeasurementSetting<double> parse_angles(const std::string &text) {
    std::vector<DetectorAngles<double>> angles;
    std::stringstream detectors(text);
    std::string item;
    while (std::getline(detectors, item, ';')) {
        const auto comma = item.find(',');
        if (comma == std::string::npos) throw InvalidArgument("detector angles must be 'theta,phi': " + item);
        try {
            std::size_t used = 0;
            const std::string t = item.substr(0, comma), p = item.substr(comma + 1);
            const double theta = std::stod(t, &used);
            if (t.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(t);
            const double phi = std::stod(p, &used);
            if (p.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(p);
            angles.push_back({theta, phi});
        } catch (const std::logic_error &) {
            throw InvalidArgument("cannot parse detector angles: " + item);
        }
    }
    if (angles.empty()) throw InvalidArgument("no detector angles given");
    return MeasurementSetting<double>(std::move(angles));
}

namespace {

template <typename Fn>
int guarded(std::ostream &err, Fn &&fn) {
    try {
        return fn();
    } catch (const io::IoError &e) {
        err << "qreact: " << e.what() << '\n';
        return io_error;
    } catch (const Error &e) {
        err << "qreact: " << e.what() << '\n';
        return usage_error;
    }
}

DensityMatrix<double> resolve_state(const std::optional<std::string> &family, double lambda,
                                    const std::optional<std::filesystem::path> &state_file, const char *fallback) {
    if (family && state_file) throw InvalidArgument("give either a state family or a state file, not both");
    if (state_file) return io::load_density_matrix(*state_file);
    return make_state<double>(family ? *family : std::string(fallback), lambda);
}

void emit(const std::filesystem::path &path, OutputFormat fmt, const std::string &csv, const json &js, std::ostream &out) {
    const std::string text = fmt == OutputFormat::csv ? csv : js.dump(2) + "\n";
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    io::write_file_atomic(path, text);
}

}  // namespace

int cmd_sweep(const SweepSpec &spec, std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
        spec.validate();
        const StateFamily family = parse_state_family(spec.family);
        const std::vector<double> lambdas = lambda_grid(spec.lambda_start, spec.lambda_end, spec.steps);
        const auto results = reactivity_sweep<double>(family, lambdas, spec.integrator);

        std::vector<io::SweepRow> rows;
        for (std::size_t i = 0; i < lambdas.size(); ++i) rows.push_back({lambdas[i], results[i], std::nullopt});
        if (spec.normalize) {
            std::vector<std::pair<double, double>> curve;
            for (const auto &r : rows) curve.emplace_back(r.lambda, r.result.reactivity);
            try {
                const auto norm = normalize_curve(curve);
                for (std::size_t i = 0; i < rows.size(); ++i)
                    if (!rows[i].result.degenerate) rows[i].normalized = norm[i].second;
            } catch (const InvalidArgument &e) {
                err << "qreact: normalization skipped: " << e.what() << '\n';
            }
        }
        for (const auto &r : rows)
            if (r.result.degenerate) err << "qreact: degenerate geometry at lambda = " << r.lambda << '\n';
        emit(spec.output_path, spec.format, io::sweep_csv(rows), io::sweep_json(rows), out);
        return int(ok);
    });
}

int cmd_geometry(const GeometryRequest &req, std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
        const auto rho = resolve_state(req.family, req.lambda, req.state_file, "werner2");
        const auto setting = parse_angles(req.angles);
        const auto table = entropy_table(joint_distribution(rho, setting));
        json angles = json::array();
        for (const auto &a : setting.angles()) angles.push_back({a.theta, a.phi});
        const json report = {{"setting", std::move(angles)},
                             {"entropies", io::entropy_table_to_json(table)},
                             {"geometry", io::geometry_report_to_json(geometry_report(table))}};
        out << report.dump(2) << '\n';
        return int(ok);
    });
}

std::vector<double> default_compare_lambdas() {
    std::vector<double> l = lambda_grid(0.0, 1.0, 21);
    l.push_back(1.0 / 3.0);
    std::sort(l.begin(), l.end());
    return l;
}

int cmd_compare(const CompareRequest &req, std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
        req.integrator.validate();
        const std::vector<double> lambdas = req.lambdas.empty() ? default_compare_lambdas() : req.lambdas;
        const auto rows = comparison_sweep<double>(lambdas, req.discord, req.integrator);
        emit(req.output_path, req.format, io::comparison_csv(rows), io::comparison_json(rows), out);
        return int(ok);
    });
}

int cmd_schumacher(const SchumacherRequest &req, std::ostream &out, std::ostream &err) {
    return guarded(err, [&] {
        const auto rho = resolve_state(req.family, req.lambda, req.state_file, "singlet");
        DetectorAngles<double> a1, a2, b1, b2;
        QuadrilateralResult<double> q;
        if (req.search) {
            const auto s = schumacher_search(rho, req.grid_points);
            a1 = s.a1, a2 = s.a2, b1 = s.b1, b2 = s.b2;
            q = s.best;
        } else {
            const auto setting = parse_angles(req.angles);
            if (setting.size() != 4) throw InvalidArgument("explicit mode needs four detectors: A1;A2;B1;B2");
            a1 = setting[0], a2 = setting[1], b1 = setting[2], b2 = setting[3];
            q = schumacher_quadrilateral(rho, a1, a2, b1, b2);
        }
        auto pair = [](const DetectorAngles<double> &a) { return json::array({a.theta, a.phi}); };
        const json report = {{"search", req.search},
                             {"detectors", {{"A1", pair(a1)}, {"A2", pair(a2)}, {"B1", pair(b1)}, {"B2", pair(b2)}}},
                             {"edges",
                              {{"A1B1", q.edges[0]}, {"B1A2", q.edges[1]}, {"A2B2", q.edges[2]}, {"A1B2", q.edges[3]}}},
                             {"violation", q.violation}};
        out << report.dump(2) << '\n';
        return int(ok);
    });
}

namespace {

struct IntegratorFlags {
    std::string method;
    int grid_points = 0;
    std::int64_t mc_samples = 0;
    std::uint64_t seed = 0;
    bool no_fix_first = false;
    std::string config;
    CLI::Option *method_opt = nullptr, *points_opt = nullptr, *samples_opt = nullptr, *seed_opt = nullptr;

    void add_to(CLI::App &app) {
        method_opt = app.add_option("--method", method, "Integration method: grid or mc");
        points_opt = app.add_option("--grid-points", grid_points, "Grid points per angle");
        samples_opt = app.add_option("--mc-samples", mc_samples, "Monte Carlo sample count");
        seed_opt = app.add_option("--seed", seed, "Monte Carlo seed");
        app.add_flag("--no-fix-first", no_fix_first, "Let the first detector vary as well");
        app.add_option("--config", config, "Integrator config JSON (flags override it)");
    }

    // Flags override the config file, which overrides the defaults.
    IntegratorConfig resolve(IntegratorConfig base) const {
        if (!config.empty()) base = io::load_integrator_config(config, base);
        if (method_opt->count()) base.method = io::parse_method(method);
        if (points_opt->count()) base.grid_points_per_angle = grid_points;
        if (samples_opt->count()) base.mc_samples = mc_samples;
        if (seed_opt->count()) base.rng_seed = seed;
        if (no_fix_first) base.fix_first_detector = false;
        base.validate();
        return base;
    }
};

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"qreact: entropic reactivity of multi-qubit states"};
    app.require_subcommand(1);

    // sweep
    SweepSpec sweep;
    std::string sweep_format = "csv", sweep_output;
    IntegratorFlags sweep_flags;
    auto *sub_sweep = app.add_subcommand("sweep", "Reactivity over a lambda grid for one state family");
    sub_sweep->add_option("--family", sweep.family, "State family")->required();
    sub_sweep->add_option("--lambda-start", sweep.lambda_start);
    sub_sweep->add_option("--lambda-end", sweep.lambda_end);
    sub_sweep->add_option("--steps", sweep.steps);
    sub_sweep->add_flag("--normalize", sweep.normalize, "Affine-normalize so R(0)=0 and R(1)=1");
    sub_sweep->add_option("--output", sweep_output, "Output file ('-' for stdout)")->required();
    sub_sweep->add_option("--format", sweep_format, "csv or json");
    sweep_flags.add_to(*sub_sweep);

    // geometry
    GeometryRequest geom;
    std::string geom_family, geom_state;
    auto *sub_geom = app.add_subcommand("geometry", "Entropies, distances, areas and volumes at one setting");
    auto *geom_family_opt = sub_geom->add_option("--family", geom_family);
    sub_geom->add_option("--lambda", geom.lambda);
    auto *geom_state_opt = sub_geom->add_option("--state-file", geom_state);
    sub_geom->add_option("--angles", geom.angles, "theta1,phi1;theta2,phi2;...")->required();

    // compare
    CompareRequest cmp;
    std::string cmp_format = "csv", cmp_output;
    std::vector<double> cmp_lambdas;
    double cmp_start = 0.0, cmp_end = 1.0;
    int cmp_steps = 0;
    IntegratorFlags cmp_flags;
    auto *sub_cmp = app.add_subcommand("compare", "Concurrence, discord and normalized reactivity for werner2");
    sub_cmp->add_option("--lambdas", cmp_lambdas, "Explicit lambda values")->delimiter(',');
    sub_cmp->add_option("--lambda-start", cmp_start);
    sub_cmp->add_option("--lambda-end", cmp_end);
    auto *cmp_steps_opt = sub_cmp->add_option("--steps", cmp_steps);
    sub_cmp->add_option("--discord-theta", cmp.discord.n_theta);
    sub_cmp->add_option("--discord-phi", cmp.discord.n_phi);
    sub_cmp->add_option("--discord-passes", cmp.discord.refine_iterations);
    sub_cmp->add_option("--output", cmp_output, "Output file ('-' for stdout)")->required();
    sub_cmp->add_option("--format", cmp_format, "csv or json");
    cmp_flags.add_to(*sub_cmp);

    // schumacher
    SchumacherRequest sch;
    std::string sch_family, sch_state;
    auto *sub_sch = app.add_subcommand("schumacher", "Schumacher quadrilateral on a two-qubit state");
    sub_sch->add_flag("--search,!--no-search", sch.search, "Grid search for the largest violation");
    auto *sch_family_opt = sub_sch->add_option("--family", sch_family);
    sub_sch->add_option("--lambda", sch.lambda);
    auto *sch_state_opt = sub_sch->add_option("--state-file", sch_state);
    sub_sch->add_option("--angles", sch.angles, "A1;A2;B1;B2 as theta,phi pairs");
    sub_sch->add_option("--grid-points", sch.grid_points);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError &e) {
        err << "qreact: " << e.what() << '\n';
        return usage_error;
    }

    if (sub_sweep->parsed()) {
        const int code = guarded(err, [&] {
            sweep.format = parse_format(sweep_format);
            sweep.output_path = sweep_output;
            sweep.integrator = sweep_flags.resolve(IntegratorConfig::default_for(family_qubits(parse_state_family(sweep.family))));
            return int(ok);
        });
        return code != ok ? code : cmd_sweep(sweep, out, err);
    }
    if (sub_geom->parsed()) {
        if (geom_family_opt->count()) geom.family = geom_family;
        if (geom_state_opt->count()) geom.state_file = geom_state;
        return cmd_geometry(geom, out, err);
    }
    if (sub_cmp->parsed()) {
        const int code = guarded(err, [&] {
            cmp.format = parse_format(cmp_format);
            cmp.output_path = cmp_output;
            cmp.integrator = cmp_flags.resolve(IntegratorConfig::default_for(2));
            if (!cmp_lambdas.empty()) {
                cmp.lambdas = cmp_lambdas;
            } else if (cmp_steps_opt->count()) {
                cmp.lambdas = lambda_grid(cmp_start, cmp_end, cmp_steps);
            }
            return int(ok);
        });
        return code != ok ? code : cmd_compare(cmp, out, err);
    }
    if (sub_sch->parsed()) {
        if (sch_family_opt->count()) sch.family = sch_family;
        if (sch_state_opt->count()) sch.state_file = sch_state;
        if (!sch.angles.empty() && !sub_sch->get_option("--search")->count()) sch.search = false;
        return cmd_schumacher(sch, out, err);
    }
    return usage_error;
}

}  // namespace qreact::cli
