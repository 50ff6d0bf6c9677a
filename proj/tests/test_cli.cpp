#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfgclaw/commands.hpp"
#include "mfgclaw/errors.hpp"

using namespace mfgclaw;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("mfgclaw_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write_config(const fs::path& dir, const std::string& name, const Json& body) {
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << body.dump(2);
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json burgers_model_json() {
    return Json{{"hamiltonian", {{"kind", "quadratic"}, {"dim", 1}}},
                {"terminal_cost", {{"kind", "linear"}, {"f_coeffs", {{0.0, 1.0}}}}},
                {"sigma0",
                 {{"kind", "mean_profile"},
                  {"profile",
                   {{"kind", "step"}, {"left", 0.0}, {"right", 1.0}, {"x_jump", 0.0}}}}},
                {"flux", {{"kind", "poly"}, {"coeffs", {0.0, 1.0}}}},
                {"zeta", {1.0}}};
}

Json cubic_model_json() {
    Json j = burgers_model_json();
    j["flux"]["coeffs"] = {0.0, 0.0, 1.0};
    j["terminal_cost"]["f_coeffs"] = {{0.0, 0.0, 1.0}};
    j["sigma0"]["profile"]["left"] = -1.0;
    return j;
}

} // namespace

TEST_CASE("model_from_json round trips the presets") {
    auto bm = model_from_json(burgers_model_json());
    CHECK(bm.reduced());
    CHECK(bm.flux->fbar(0.7) == doctest::Approx(0.7));
    CHECK(bm.sigma0.profile().is_step());

    Json case1{{"hamiltonian", {{"kind", "quadratic"}, {"dim", 1}}},
               {"terminal_cost",
                {{"kind", "separable"},
                 {"phi", {{"kind", "quadratic"}}},
                 {"G", {{"kind", "one_plus_exp"}}}}},
               {"sigma0", {{"kind", "moment"}, {"psi", {{"kind", "arctan_sq"}}}}}};
    auto c1 = model_from_json(case1);
    CHECK(c1.cost.kind() == TerminalCost::Kind::SeparableG);
    CHECK(c1.sigma0.kind() == SigmaFunctional::Kind::Moment);

    Json from_hf = burgers_model_json();
    from_hf["flux"] = {{"kind", "from_hf"}};
    auto hf = model_from_json(from_hf);
    CHECK(hf.flux->fbar(0.3) == doctest::Approx(0.3).epsilon(1e-12));

    Json bad = burgers_model_json();
    bad["hamiltonian"]["kind"] = "mystery";
    CHECK_THROWS_AS(model_from_json(bad), ConfigError);
}

TEST_CASE("cmd riemann: cubic fan JSON carries the shock speed 1/4") {
    auto dir = fresh_dir("riemann");
    Json cfg{{"schema_version", 1}, {"model", cubic_model_json()},
             {"sigma_l", -1.0},    {"sigma_r", 1.0},
             {"T", 1.0},           {"n_cells", 400},
             {"domain", {-2.0, 2.0}}};
    CliOptions opts{write_config(dir, "cfg.json", cfg), dir.string(), 0, false};
    CHECK(run_command("riemann", opts) == kExitOk);

    Json fan = Json::parse(slurp(dir / "fan.json"));
    REQUIRE(fan["waves"].size() == 2);
    CHECK(fan["waves"][0]["type"] == "SHOCK");
    CHECK(fan["waves"][0]["speed_lo"].get<double>() == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(fs::exists(dir / "field.csv"));
    CHECK(fs::exists(dir / "manifest.json"));

    Json manifest = Json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["command"] == "riemann");
    CHECK(manifest["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("cmd riemann: Burgers single rarefaction and equal states") {
    auto dir = fresh_dir("riemann_b");
    Json cfg{{"schema_version", 1}, {"model", burgers_model_json()},
             {"sigma_l", 0.0},     {"sigma_r", 1.0},
             {"T", 1.0},           {"n_cells", 200},
             {"domain", {-2.0, 2.0}}};
    CliOptions opts{write_config(dir, "cfg.json", cfg), dir.string(), 0, false};
    REQUIRE(run_command("riemann", opts) == kExitOk);
    Json fan = Json::parse(slurp(dir / "fan.json"));
    REQUIRE(fan["waves"].size() == 1);
    CHECK(fan["waves"][0]["type"] == "RAREFACTION");
    CHECK(fan["waves"][0]["speed_lo"].get<double>() == doctest::Approx(0.0));
    CHECK(fan["waves"][0]["speed_hi"].get<double>() == doctest::Approx(1.0));

    Json cfg2 = cfg;
    cfg2["sigma_l"] = 0.4;
    cfg2["sigma_r"] = 0.4;
    CliOptions opts2{write_config(dir, "cfg2.json", cfg2), (dir / "eq").string(), 0, false};
    REQUIRE(run_command("riemann", opts2) == kExitOk);
    Json fan2 = Json::parse(slurp(dir / "eq" / "fan.json"));
    CHECK(fan2["waves"].empty());
}

TEST_CASE("cmd select: Burgers preset reproduces the NO_EQUILIBRIUM region") {
    auto dir = fresh_dir("select");
    Json cfg{{"schema_version", 1},
             {"model", burgers_model_json()},
             {"T", 1.0},
             {"x_grid", {{"lo", -0.5}, {"hi", 1.5}, {"n", 81}}}};
    CliOptions opts{write_config(dir, "cfg.json", cfg), dir.string(), 0, false};
    REQUIRE(run_command("select", opts) == kExitOk);

    Json rep = Json::parse(slurp(dir / "selection.json"));
    int none_count = 0;
    for (const auto& e : rep["entries"]) {
        const double x = e["x"].get<double>();
        const std::string c = e["classification"].get<std::string>();
        if (x > 0.05 && x < 0.95) CHECK(c == "NO_EQUILIBRIUM");
        if (c == "NO_EQUILIBRIUM") ++none_count;
    }
    CHECK(none_count >= 30);
    CHECK(fs::exists(dir / "selection.csv"));
}

TEST_CASE("cmd monotonicity: the Case 1 worked example is MONOTONE") {
    auto dir = fresh_dir("mono");
    Json cfg{{"schema_version", 1},
             {"model",
              {{"hamiltonian", {{"kind", "quadratic"}, {"dim", 1}}},
               {"terminal_cost",
                {{"kind", "separable"},
                 {"phi", {{"kind", "quadratic"}}},
                 {"G", {{"kind", "one_plus_exp"}}}}},
               {"sigma0", {{"kind", "moment"}, {"psi", {{"kind", "arctan_sq"}}}}}}},
             {"c0", 0.0},
             {"T", 1.0},
             {"n_sigma", 9},
             {"n_t", 5},
             {"n_measures", 3},
             {"atoms_per_measure", 5}};
    CliOptions opts{write_config(dir, "cfg.json", cfg), dir.string(), 7, false};
    REQUIRE(run_command("monotonicity", opts) == kExitOk);
    Json rep = Json::parse(slurp(dir / "monotonicity.json"));
    CHECK(rep["verdict"] == "MONOTONE");
    CHECK(rep["sup_dSigma0"].get<double>() <= 0.0);
}

TEST_CASE("cmd equilibrium and nproj") {
    auto dir = fresh_dir("eq");
    Json cfg{{"schema_version", 1},
             {"model", cubic_model_json()},
             {"t", 1.0},
             {"measure", {{"atoms", {{0.5}}}}},
             {"sigma_range", {-2.0, 2.0}}};
    CliOptions opts{write_config(dir, "cfg.json", cfg), dir.string(), 0, false};
    REQUIRE(run_command("equilibrium", opts) == kExitOk);
    Json rep = Json::parse(slurp(dir / "equilibrium.json"));
    CHECK(rep["classification"] == "UNIQUE");
    CHECK(rep["roots"][0]["sigma"].get<double>() == doctest::Approx(-1.0).epsilon(1e-8));

    Json smooth_model{{"hamiltonian", {{"kind", "quadratic"}, {"dim", 1}}},
                      {"terminal_cost", {{"kind", "linear"}, {"f_coeffs", {{0.0, 1.0}}}}},
                      {"sigma0",
                       {{"kind", "mean_profile"},
                        {"profile",
                         {{"kind", "tanh"}, {"a", 0.5}, {"b", 0.3}, {"c", 1.0}, {"x0", 0.0}}}}},
                      {"flux", {{"kind", "poly"}, {"coeffs", {0.0, 1.0}}}},
                      {"zeta", {1.0}}};
    Json ncfg{{"schema_version", 1},
              {"model", smooth_model},
              {"t", 0.4},
              {"atoms", {{0.3}, {-0.8}, {1.1}}},
              {"x", {0.5}},
              {"h_fd", 1e-4}};
    CliOptions nopts{write_config(dir, "ncfg.json", ncfg), (dir / "np").string(), 0, false};
    REQUIRE(run_command("nproj", nopts) == kExitOk);
    Json nrep = Json::parse(slurp(dir / "np" / "nproj.json"));
    CHECK(std::abs(nrep["nplayer_residual"].get<double>()) <= 1e-5);
    CHECK(std::abs(nrep["master_residual"].get<double>()) <= 1e-4);
}

TEST_CASE("determinism: identical config and seed give byte-identical outputs") {
    auto dir = fresh_dir("determinism");
    Json cfg{{"schema_version", 1},
             {"model", burgers_model_json()},
             {"T", 1.0},
             {"x_grid", {{"lo", -0.2}, {"hi", 1.2}, {"n", 29}}}};
    const std::string cfg_path = write_config(dir, "cfg.json", cfg);
    CliOptions a{cfg_path, (dir / "a").string(), 42, false};
    CliOptions b{cfg_path, (dir / "b").string(), 42, false};
    REQUIRE(run_command("select", a) == kExitOk);
    REQUIRE(run_command("select", b) == kExitOk);
    CHECK(slurp(dir / "a" / "selection.json") == slurp(dir / "b" / "selection.json"));
    CHECK(slurp(dir / "a" / "selection.csv") == slurp(dir / "b" / "selection.csv"));
    CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));
}

TEST_CASE("exit codes: config errors are 2 with machine-readable details") {
    auto dir = fresh_dir("errors");
    CliOptions missing{(dir / "nope.json").string(), dir.string(), 0, false};
    CHECK(run_command("riemann", missing) == kExitConfig);

    Json cfg{{"schema_version", 99}};
    CliOptions badschema{write_config(dir, "bad.json", cfg), dir.string(), 0, false};
    CHECK(run_command("riemann", badschema) == kExitConfig);
    Json err = Json::parse(slurp(dir / "error.json"));
    CHECK(err["error"] == "config");

    Json okcfg{{"schema_version", 1}, {"model", burgers_model_json()}};
    CliOptions unknown{write_config(dir, "ok.json", okcfg), dir.string(), 0, false};
    CHECK(run_command("wat", unknown) == kExitConfig);

    // Solver-level failures exit 3: a two-point scan violates the grid
    // contract of find_equilibria.
    Json solvercfg{{"schema_version", 1},
                   {"model", burgers_model_json()},
                   {"t", 1.0},
                   {"measure", {{"atoms", {{0.5}}}}},
                   {"sigma_range", {-1.0, 2.0}},
                   {"n_scan", 2}};
    CliOptions badscan{write_config(dir, "scan.json", solvercfg), dir.string(), 0, false};
    CHECK(run_command("equilibrium", badscan) == kExitSolver);
    Json serr = Json::parse(slurp(dir / "error.json"));
    CHECK(serr["error"] == "solver");
}

TEST_CASE("cmd select under --strict exits 4 on boundary-ambiguous points") {
    auto dir = fresh_dir("strict");
    // With a coarse tolerance the wedge residual 0.5 lands inside the
    // ambiguity band [tol/2, 2 tol].
    Json cfg{{"schema_version", 1},
             {"model", burgers_model_json()},
             {"T", 1.0},
             {"x_grid", {{"lo", 0.3}, {"hi", 0.7}, {"n", 5}}},
             {"tol", 0.3}};
    CliOptions opts{write_config(dir, "cfg.json", cfg), dir.string(), 0, true};
    CHECK(run_command("select", opts) == kExitAmbiguous);
}

TEST_CASE("cmd viscosity writes the convergence table") {
    auto dir = fresh_dir("visc");
    Json cfg{{"schema_version", 1},
             {"model", burgers_model_json()},
             {"T", 0.5},
             {"eps_list", {0.1, 0.05}},
             {"domain", {-1.5, 1.5}},
             {"n_cells", 150}};
    CliOptions opts{write_config(dir, "cfg.json", cfg), dir.string(), 0, false};
    REQUIRE(run_command("viscosity", opts) == kExitOk);
    const std::string csv = slurp(dir / "viscosity.csv");
    CHECK(csv.rfind("epsilon,l1_distance,runtime_ms\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
