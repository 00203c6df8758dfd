#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles/oracles.hpp"
#include "qreact/cli.hpp"

using namespace qreact;
using nlohmann::json;
using oracle::pi;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "qreact");
    std::vector<const char *> argv;
    for (const auto &a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("qreact_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    fs::path operator/(const std::string &name) const { return path / name; }
};

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path &p, const std::string &s) { std::ofstream(p, std::ios::binary) << s; }

std::vector<std::vector<std::string>> csv_rows(const std::string &text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.starts_with("#")) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (line.ends_with(",")) cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("density matrix JSON: round trip and validation") {
    const auto rho = make_state<double>("werner3_w", 0.4);
    const json j = io::density_matrix_to_json(rho);
    CHECK(j["dim_qubits"] == 3);
    const auto back = io::density_matrix_from_json(j);
    CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() == 0.0);

    json bad = j;
    bad["entries"].erase(0);
    CHECK_THROWS_AS(io::density_matrix_from_json(bad), InvalidArgument);
    bad = j;
    bad["dim_qubits"] = 9;
    CHECK_THROWS_AS(io::density_matrix_from_json(bad), InvalidArgument);
    // Non-Hermitian input.
    json skew = io::density_matrix_to_json(make_state<double>("singlet"));
    skew["entries"][1] = json::array({0.3, 0.0});
    CHECK_THROWS_AS(io::density_matrix_from_json(skew), qreact::Error);
    CHECK_THROWS_AS(io::density_matrix_from_json(json{{"entries", json::array()}}), InvalidArgument);
    CHECK_THROWS_AS(io::load_density_matrix("/nonexistent/state.json"), io::IoError);
}

TEST_CASE("integrator config JSON: keys, defaults and errors") {
    const auto c = io::integrator_config_from_json(json{{"method", "mc"}, {"samples", 123}, {"seed", 7}});
    CHECK(c.method == IntegrationMethod::monte_carlo);
    CHECK(c.mc_samples == 123);
    CHECK(c.rng_seed == 7);
    CHECK(c.grid_points_per_angle == IntegratorConfig{}.grid_points_per_angle);
    const auto rt = io::integrator_config_from_json(io::integrator_config_to_json(c));
    CHECK(rt.method == c.method);
    CHECK(rt.mc_samples == c.mc_samples);
    CHECK(rt.rng_seed == c.rng_seed);
    CHECK(rt.fix_first_detector == c.fix_first_detector);
    CHECK_THROWS_AS(io::integrator_config_from_json(json{{"method", "simpson"}}), InvalidArgument);
    CHECK_THROWS_AS(io::integrator_config_from_json(json{{"points", 1}}), InvalidArgument);
}

TEST_CASE("format_number is shortest round-trip") {
    CHECK(io::format_number(0.1) == "0.1");
    CHECK(io::format_number(2.0) == "2");
    CHECK(std::stod(io::format_number(1.0 / 3)) == 1.0 / 3);
    CHECK(io::format_number(std::nan("")) == "nan");
}

TEST_CASE("lambda_grid and parse_angles") {
    const auto g = cli::lambda_grid(0.0, 1.0, 21);
    REQUIRE(g.size() == 21);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK(g[10] == 0.5);
    CHECK_THROWS_AS(cli::lambda_grid(0.0, 1.0, 1), InvalidArgument);
    const auto s = cli::parse_angles("0,0;0.5,1.25");
    REQUIRE(s.size() == 2);
    CHECK(s[1].theta == 0.5);
    CHECK(s[1].phi == 1.25);
    CHECK_THROWS_AS(cli::parse_angles("0;1"), InvalidArgument);
    CHECK_THROWS_AS(cli::parse_angles("0,x"), InvalidArgument);
    CHECK_THROWS_AS(cli::parse_angles("4,0"), InvalidArgument);
    const auto d = cli::default_compare_lambdas();
    CHECK(d.size() == 22);
    CHECK(std::find(d.begin(), d.end(), 1.0 / 3) != d.end());
}

TEST_CASE("sweep: schema line, header, normalized endpoints") {
    const auto r = run_cli({"sweep", "--family", "werner2", "--steps", "21", "--normalize", "--grid-points", "16",
                            "--output", "-"});
    REQUIRE(r.code == 0);
    CHECK(r.out.starts_with("# qreact-csv v1\n"));
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 22);
    CHECK(rows[0] == std::vector<std::string>{"lambda", "reactivity_raw", "reactivity_norm", "numerator_mean",
                                              "denominator_mean", "stderr", "samples", "degenerate_flag"});
    CHECK(rows[1][0] == "0");
    CHECK(rows[1][2] == "0");
    CHECK(rows[21][0] == "1");
    CHECK(rows[21][2] == "1");
    CHECK(std::stod(rows[1][1]) == doctest::Approx(0.5).epsilon(1e-12));
    for (std::size_t i = 2; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][1]) > std::stod(rows[i - 1][1]));
        CHECK(rows[i][6] == "256");
        CHECK(rows[i][7] == "0");
    }
}

TEST_CASE("sweep: output is byte-identical across runs, JSON carries the schema") {
    TempDir dir;
    const std::vector<std::string> base{"sweep", "--family", "werner3_ghz", "--steps", "4", "--method", "mc",
                                        "--mc-samples", "500", "--seed", "11", "--output"};
    auto a = base, b = base;
    a.push_back((dir / "a.csv").string());
    b.push_back((dir / "b.csv").string());
    REQUIRE(run_cli(a).code == 0);
    REQUIRE(run_cli(b).code == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(!fs::exists(dir / "a.csv.partial"));

    auto j = base;
    j.push_back("-");
    j.insert(j.end(), {"--format", "json"});
    const auto r = run_cli(j);
    REQUIRE(r.code == 0);
    const json parsed = json::parse(r.out);
    CHECK(parsed["schema"] == "qreact-json v1");
    CHECK(parsed["rows"].size() == 4);
    CHECK(parsed["rows"][0]["samples"] == 500);
}

TEST_CASE("sweep: GHZ curve lies above the W curve for a shared seed") {
    auto curve = [](const char *family) {
        const auto r = run_cli({"sweep", "--family", family, "--steps", "6", "--method", "mc", "--mc-samples", "1500",
                                "--seed", "5", "--output", "-"});
        REQUIRE(r.code == 0);
        std::vector<double> v;
        const auto rows = csv_rows(r.out);
        for (std::size_t i = 1; i < rows.size(); ++i) v.push_back(std::stod(rows[i][1]));
        return v;
    };
    const auto ghz = curve("werner3_ghz"), w = curve("werner3_w");
    for (std::size_t i = 0; i < ghz.size(); ++i) CHECK(ghz[i] >= w[i]);
}

TEST_CASE("sweep: flags override the config file, which overrides defaults") {
    TempDir dir;
    spit(dir / "cfg.json", R"({"method": "grid", "points": 4})");
    auto samples = [&](std::vector<std::string> extra) {
        std::vector<std::string> args{"sweep", "--family", "werner2", "--steps", "2", "--output", "-"};
        args.insert(args.end(), extra.begin(), extra.end());
        const auto r = run_cli(args);
        REQUIRE(r.code == 0);
        return csv_rows(r.out)[1][6];
    };
    CHECK(samples({}) == "16384");  // built-in default: 128 x 128 grid
    CHECK(samples({"--config", (dir / "cfg.json").string()}) == "16");
    CHECK(samples({"--config", (dir / "cfg.json").string(), "--grid-points", "8"}) == "64");
    CHECK(samples({"--config", (dir / "cfg.json").string(), "--method", "mc", "--mc-samples", "77"}) == "77");
}

TEST_CASE("exit codes: usage errors give 1, I/O errors give 2") {
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"sweep", "--family", "nope", "--output", "-"}).code == 1);
    CHECK(run_cli({"sweep", "--family", "werner2", "--steps", "1", "--output", "-"}).code == 1);
    CHECK(run_cli({"sweep", "--family", "werner2", "--lambda-start", "0.8", "--lambda-end", "0.2", "--output", "-"}).code ==
          1);
    CHECK(run_cli({"sweep", "--family", "werner2", "--grid-points", "1", "--output", "-"}).code == 1);
    CHECK(run_cli({"sweep", "--family", "werner2", "--format", "xml", "--output", "-"}).code == 1);
    const auto unwritable = run_cli(
        {"sweep", "--family", "werner2", "--steps", "2", "--grid-points", "4", "--output", "/nonexistent/dir/out.csv"});
    CHECK(unwritable.code == 2);
    CHECK(!unwritable.err.empty());
    CHECK(run_cli({"sweep", "--family", "werner2", "--config", "/nonexistent/cfg.json", "--output", "-"}).code == 2);
    TempDir dir;
    spit(dir / "broken.json", "{not json");
    CHECK(run_cli({"sweep", "--family", "werner2", "--config", (dir / "broken.json").string(), "--output", "-"}).code == 1);
    CHECK(run_cli({"geometry", "--state-file", "/nonexistent/state.json", "--angles", "0,0;0,0"}).code == 2);
}

TEST_CASE("geometry: GHZ at the pole and maximally mixed pairs") {
    auto geometry = [](std::vector<std::string> args) {
        args.insert(args.begin(), "geometry");
        const auto r = run_cli(args);
        REQUIRE(r.code == 0);
        return json::parse(r.out);
    };
    const auto g = geometry({"--family", "ghz3", "--angles", "0,0;0,0;0,0"});
    for (const char *k : {"AB", "AC", "BC"}) CHECK(std::abs(g["geometry"]["distances"][k].get<double>()) < 1e-15);

    const auto w = geometry({"--family", "werner2", "--lambda", "0", "--angles", "0,0;1.3,2.2"});
    CHECK(w["geometry"]["distances"]["AB"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));

    const auto q = geometry({"--family", "ghz3", "--angles", "0,0;0.7853981633974483,0;0.7853981633974483,0"});
    const oracle::GhzClosedForm cf(pi / 4, pi / 4);
    CHECK(q["entropies"]["AB"].get<double>() == doctest::Approx(cf.h_ab()).epsilon(1e-10));
    CHECK(q["entropies"]["BC"].get<double>() == doctest::Approx(cf.h_bc()).epsilon(1e-10));
    CHECK(q["entropies"]["ABC"].get<double>() == doctest::Approx(cf.h_abc()).epsilon(1e-10));
    CHECK(q["geometry"]["areas"]["ABC"].get<double>() == doctest::Approx(cf.area()).epsilon(1e-10));

    const auto v = geometry({"--family", "ghz4", "--angles", "0,0;0.7,1.1;1.9,4.0;2.6,0.3"});
    CHECK(v["geometry"]["volumes"]["ABCE"].get<double>() == doctest::Approx(0.39969957345939333).epsilon(1e-10));

    // Three detectors for a two-qubit state.
    CHECK(run_cli({"geometry", "--family", "werner2", "--angles", "0,0;0,0;0,0"}).code == 1);
    TempDir dir;
    spit(dir / "state.json", io::density_matrix_to_json(make_state<double>("singlet")).dump());
    const auto f = geometry({"--state-file", (dir / "state.json").string(), "--angles", "0,0;0,0"});
    CHECK(std::abs(f["geometry"]["distances"]["AB"].get<double>()) < 1e-12);
    CHECK(run_cli({"geometry", "--family", "ghz3", "--state-file", (dir / "state.json").string(), "--angles", "0,0"}).code ==
          1);
}

TEST_CASE("compare: separability row and endpoints") {
    TempDir dir;
    const auto path = dir / "cmp.csv";
    const auto r = run_cli({"compare", "--lambdas", "0,0.3333333333333333,0.6,1", "--grid-points", "16", "--output",
                            path.string()});
    REQUIRE(r.code == 0);
    const std::string text = slurp(path);
    CHECK(text.starts_with("# qreact-csv v1\nlambda,concurrence,discord,reactivity_norm,reactivity_raw\n"));
    const auto rows = csv_rows(text);
    REQUIRE(rows.size() == 5);
    CHECK(rows[1][1] == "0");
    CHECK(rows[1][2] == "0");
    CHECK(rows[1][3] == "0");
    CHECK(rows[2][1] == "0");
    CHECK(std::stod(rows[2][2]) > 0);
    CHECK(std::stod(rows[2][3]) > 0);
    CHECK(rows[4][3] == "1");
    for (int c = 1; c <= 3; ++c)
        for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][c]) >= std::stod(rows[i - 1][c]));
    CHECK(run_cli({"compare", "--lambdas", "0.2,1", "--grid-points", "8", "--output", "-"}).code == 1);
    CHECK(run_cli({"compare", "--lambdas", "0,1", "--grid-points", "8", "--output", (dir / "no/such.csv").string()}).code ==
          2);
    CHECK(!fs::exists(dir / "no"));
}

TEST_CASE("schumacher: search, explicit angles, product state") {
    const auto s = run_cli({"schumacher"});
    REQUIRE(s.code == 0);
    const json j = json::parse(s.out);
    CHECK(j["search"] == true);
    CHECK(j["violation"].get<double>() > 0.01);

    const auto e = run_cli({"schumacher", "--angles", "1,2;1,2;1,2;1,2"});
    REQUIRE(e.code == 0);
    CHECK(json::parse(e.out)["violation"].get<double>() <= 0.0);

    const auto p = run_cli({"schumacher", "--family", "product_zero", "--grid-points", "8"});
    REQUIRE(p.code == 0);
    CHECK(json::parse(p.out)["violation"].get<double>() <= 1e-12);
    CHECK(run_cli({"schumacher", "--angles", "1,2;1,2"}).code == 1);
}

TEST_CASE("the installed executable reports exit codes to the shell") {
    const std::string tool = QREACT_TOOL_PATH;
    auto status = [&](const std::string &args) {
        const int raw = std::system((tool + " " + args + " > /dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status("--help") == 0);
    CHECK(status("geometry --family werner2 --angles '0,0;1,1'") == 0);
    CHECK(status("bogus") == 1);
    CHECK(status("sweep --family werner2 --steps 2 --grid-points 4 --output /nonexistent/x.csv") == 2);
}
