#include "mfgclaw/commands.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "mfgclaw/errors.hpp"

namespace mfgclaw {

namespace {

constexpr int kSchemaVersion = 1;
constexpr const char* kVersion = "0.1.0";

Json load_config(const std::string& path, std::string& raw_bytes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    raw_bytes = ss.str();
    Json j = Json::parse(raw_bytes, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config is not valid JSON: " + path);
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != kSchemaVersion)
        throw ConfigError("config schema_version must be 1");
    return j;
}

ScalarFn scalar_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "poly") return poly_scalar(j.at("coeffs").get<std::vector<double>>());
    if (kind == "one_plus_exp") return one_plus_exp_scalar();
    throw ConfigError("unknown scalar function kind: " + kind);
}

FieldFn field_from_json(const Json& j, std::size_t dim) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "quadratic") return quadratic_field(dim);
    if (kind == "arctan_sq") return arctan_sq_field(dim);
    throw ConfigError("unknown field function kind: " + kind);
}

} // namespace

Profile1D profile_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "step")
        return Profile1D::step(j.at("left").get<double>(), j.at("right").get<double>(),
                               j.value("x_jump", 0.0));
    if (kind == "tanh")
        return Profile1D::tanh_profile(j.value("a", 0.0), j.value("b", 1.0),
                                       j.value("c", 1.0), j.value("x0", 0.0));
    if (kind == "section433")
        return build_section433_profile(j.value("xi", 2.0), j.value("n_cells", 8000)).profile;
    throw ConfigError("unknown profile kind: " + kind);
}

GameModel model_from_json(const Json& jm) {
    const Json& jh = jm.at("hamiltonian");
    const std::string hkind = jh.at("kind").get<std::string>();
    const std::size_t dim = jh.value("dim", 1);
    HamiltonianModel H = HamiltonianModel::quadratic(dim);
    if (hkind == "quadratic") {
        // default
    } else if (hkind == "custom_1d") {
        H = HamiltonianModel::custom_1d(scalar_from_json(jh.at("H")),
                                        jh.value("p_lo", -6.0), jh.value("p_hi", 6.0));
    } else {
        throw ConfigError("unknown hamiltonian kind: " + hkind);
    }

    Vec zeta = jm.value("zeta", Vec{1.0});
    if (zeta.size() != dim) throw ConfigError("zeta dimension does not match the model");

    const Json& jc = jm.at("terminal_cost");
    const std::string ckind = jc.at("kind").get<std::string>();
    TerminalCost cost = TerminalCost::linear(poly_curve({{0.0, 1.0}}));
    if (ckind == "linear") {
        auto per_comp = jc.at("f_coeffs").get<std::vector<std::vector<double>>>();
        if (per_comp.size() != dim)
            throw ConfigError("terminal_cost.f_coeffs must have one list per dimension");
        cost = TerminalCost::linear(poly_curve(per_comp));
    } else if (ckind == "separable") {
        cost = TerminalCost::separable(field_from_json(jc.at("phi"), dim),
                                       scalar_from_json(jc.at("G")));
    } else if (ckind == "separable_id") {
        cost = TerminalCost::separable_id(field_from_json(jc.at("phi"), dim));
    } else {
        throw ConfigError("unknown terminal_cost kind: " + ckind);
    }

    const Json& js = jm.at("sigma0");
    const std::string skind = js.at("kind").get<std::string>();
    SigmaFunctional sigma0 = SigmaFunctional::moment(quadratic_field(dim));
    if (skind == "mean_profile") {
        sigma0 = SigmaFunctional::mean_profile(profile_from_json(js.at("profile")), zeta);
    } else if (skind == "moment") {
        sigma0 = SigmaFunctional::moment(field_from_json(js.at("psi"), dim));
    } else if (skind == "composed") {
        sigma0 = SigmaFunctional::composed(field_from_json(js.at("psi"), dim),
                                           scalar_from_json(js.at("G")));
    } else {
        throw ConfigError("unknown sigma0 kind: " + skind);
    }

    std::optional<ReducedFlux> flux;
    if (jm.contains("flux") && !jm["flux"].is_null()) {
        const Json& jf = jm["flux"];
        const std::string fkind = jf.at("kind").get<std::string>();
        std::pair<double, double> working{jf.value("working_lo", -4.0),
                                          jf.value("working_hi", 4.0)};
        if (fkind == "poly") {
            flux = ReducedFlux::polynomial(jf.at("coeffs").get<std::vector<double>>(), zeta,
                                           working);
        } else if (fkind == "from_hf") {
            if (ckind != "linear")
                throw ConfigError("flux kind from_hf requires a linear terminal cost");
            flux = ReducedFlux::from_model(H, cost.linear_f(), zeta, working);
        } else {
            throw ConfigError("unknown flux kind: " + fkind);
        }
    }

    return GameModel{std::move(H), std::move(cost), std::move(sigma0), std::move(flux), dim};
}

namespace {

EmpiricalMeasure measure_from_json(const Json& j) {
    if (j.contains("csv")) return load_measure_csv(j.at("csv").get<std::string>());
    auto atoms = j.at("atoms").get<std::vector<Vec>>();
    if (j.contains("weights"))
        return EmpiricalMeasure(std::move(atoms), j.at("weights").get<std::vector<double>>());
    return EmpiricalMeasure::uniform(std::move(atoms));
}

std::vector<double> grid_from_json(const Json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    const double lo = j.at("lo").get<double>();
    const double hi = j.at("hi").get<double>();
    const int n = j.at("n").get<int>();
    if (n < 1) throw ConfigError("grid needs n >= 1");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = (n == 1) ? lo : lo + (hi - lo) * i / (n - 1);
    return g;
}

std::vector<EmpiricalMeasure> random_measures(std::uint64_t seed, std::size_t count,
                                              std::size_t atoms, std::size_t dim) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    std::vector<EmpiricalMeasure> out;
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<Vec> a(atoms, Vec(dim));
        for (auto& v : a)
            for (auto& c : v) c = pos(rng);
        out.push_back(EmpiricalMeasure::uniform(std::move(a)));
    }
    return out;
}

void write_manifest(const CliOptions& opts, const std::string& command,
                    const std::string& raw_config, const Json& tolerances) {
    Json manifest{{"schema_version", kSchemaVersion},
                  {"version", kVersion},
                  {"command", command},
                  {"config_hash", fnv1a_hex(raw_config)},
                  {"seed", opts.seed},
                  {"strict", opts.strict},
                  {"tolerances", tolerances}};
    write_text_file((std::filesystem::path(opts.out_dir) / "manifest.json").string(),
                    manifest.dump(2) + "\n");
}

int cmd_riemann(const Json& cfg, const CliOptions& opts) {
    const GameModel model = model_from_json(cfg.at("model"));
    if (!model.flux) throw ConfigError("riemann command needs a flux");
    const double sl = cfg.at("sigma_l").get<double>();
    const double sr = cfg.at("sigma_r").get<double>();
    const double T = cfg.value("T", 1.0);
    const int n_cells = cfg.value("n_cells", 1000);
    const Vec dom = cfg.value("domain", Vec{-2.0, 2.0});
    const double cfl = cfg.value("cfl", 0.9);

    const RiemannFan fan = riemann_fan(*model.flux, sl, sr);
    write_text_file((std::filesystem::path(opts.out_dir) / "fan.json").string(),
                    to_json(fan).dump(2) + "\n");

    Grid1D grid(dom[0], dom[1], n_cells);
    Profile1D init = Profile1D::step(sl, sr, 0.0);
    std::vector<double> record;
    for (int k = 0; k <= 4; ++k) record.push_back(T * k / 4.0);
    const EntropyField field =
        godunov(*model.flux, grid, cell_averages(init, grid), T, cfl, record);
    write_text_file((std::filesystem::path(opts.out_dir) / "field.csv").string(),
                    field_csv(field));
    return kExitOk;
}

int cmd_characteristics(const Json& cfg, const CliOptions& opts) {
    const double xi = cfg.value("xi", 2.0);
    const int n_cells = cfg.value("n_cells", 8000);
    const int n_seeds = cfg.value("n_seeds", 48);

    const Section433Profile sp = build_section433_profile(xi, n_cells);
    write_text_file((std::filesystem::path(opts.out_dir) / "landmarks.json").string(),
                    to_json(sp.landmarks).dump(2) + "\n");

    const double t_max = sp.landmarks.t_star + 1.5;
    Grid1D grid(-3.0, xi + 1.5, n_cells);
    std::vector<double> record;
    for (double t = 0.0; t <= t_max + 1e-9; t += 0.02) record.push_back(t);
    const EntropyField field =
        godunov(sp.flux, grid, cell_averages(sp.profile, grid), t_max, 0.9, record);

    std::vector<double> seeds;
    for (int i = 0; i < n_seeds; ++i)
        seeds.push_back(-1.5 + (xi + 1.0 + 1.5) * i / (n_seeds - 1));
    std::vector<RarefactionWedge> wedges;
    if (sp.landmarks.sigma_star < sp.landmarks.r1) {
        wedges.push_back({sp.landmarks.t_star, 0.0, sp.flux.fbar(sp.landmarks.sigma_star),
                          sp.landmarks.s3_speed});
    }
    const CharacteristicsDiagram diag =
        trace_characteristics(sp.profile, sp.flux, field, seeds, wedges);
    write_text_file((std::filesystem::path(opts.out_dir) / "diagram.json").string(),
                    to_json(diag).dump(2) + "\n");
    return kExitOk;
}

int cmd_equilibrium(const Json& cfg, const CliOptions& opts) {
    const GameModel model = model_from_json(cfg.at("model"));
    const double t = cfg.at("t").get<double>();
    const EmpiricalMeasure m = measure_from_json(cfg.at("measure"));
    std::pair<double, double> range = default_sigma_range(model);
    if (cfg.contains("sigma_range")) {
        const Vec r = cfg["sigma_range"].get<Vec>();
        range = {r[0], r[1]};
    }
    const int n_scan = cfg.value("n_scan", 2001);
    const EquilibriumReport rep = find_equilibria(model, t, m, range, n_scan);
    write_text_file((std::filesystem::path(opts.out_dir) / "equilibrium.json").string(),
                    to_json(rep).dump(2) + "\n");
    return kExitOk;
}

int cmd_monotonicity(const Json& cfg, const CliOptions& opts) {
    const GameModel model = model_from_json(cfg.at("model"));
    const double c0 = cfg.value("c0", 0.0);
    const double T = cfg.value("T", 1.0);
    const int n_sigma = cfg.value("n_sigma", 41);
    const int n_t = cfg.value("n_t", 21);
    const std::size_t n_measures = cfg.value("n_measures", 10);
    const std::size_t atoms = cfg.value("atoms_per_measure", 8);

    auto [slo, shi] = default_sigma_range(model);
    std::vector<double> sigma_grid(n_sigma), t_grid(n_t);
    for (int i = 0; i < n_sigma; ++i)
        sigma_grid[i] = slo + (shi - slo) * i / std::max(1, n_sigma - 1);
    for (int i = 0; i < n_t; ++i) t_grid[i] = T * i / std::max(1, n_t - 1);
    const auto measures = random_measures(opts.seed, n_measures, atoms, model.dim);

    const MonotonicityReport rep =
        check_monotonicity(model, sigma_grid, t_grid, measures, c0);
    write_text_file((std::filesystem::path(opts.out_dir) / "monotonicity.json").string(),
                    to_json(rep).dump(2) + "\n");
    return kExitOk;
}

int cmd_select(const Json& cfg, const CliOptions& opts) {
    const GameModel model = model_from_json(cfg.at("model"));
    const double T = cfg.at("T").get<double>();
    const std::vector<double> x_grid = grid_from_json(cfg.at("x_grid"));
    const double tol = cfg.value("tol", 0.0);
    const int n_scan = cfg.value("n_scan", 2001);

    SelectionReport rep = region_scan(model, T, x_grid, tol, n_scan);
    rep.model_id = fnv1a_hex(cfg.at("model").dump());
    write_text_file((std::filesystem::path(opts.out_dir) / "selection.json").string(),
                    to_json(rep).dump(2) + "\n");
    write_text_file((std::filesystem::path(opts.out_dir) / "selection.csv").string(),
                    selection_csv(rep));

    if (opts.strict)
        for (const auto& e : rep.entries)
            if (e.boundary_flag) return kExitAmbiguous;
    return kExitOk;
}

int cmd_viscosity(const Json& cfg, const CliOptions& opts) {
    const GameModel model = model_from_json(cfg.at("model"));
    if (!model.flux) throw ConfigError("viscosity command needs a flux");
    const Profile1D profile = model.sigma0.kind() == SigmaFunctional::Kind::MeanProfile
                                  ? model.sigma0.profile()
                                  : profile_from_json(cfg.at("profile"));
    const double T = cfg.value("T", 1.0);
    const auto eps_list = cfg.at("eps_list").get<std::vector<double>>();
    const Vec dom = cfg.value("domain", Vec{-2.0, 2.0});
    const int n_cells = cfg.value("n_cells", 400);

    Grid1D grid(dom[0], dom[1], n_cells);
    const auto rows = vanishing_viscosity_study(*model.flux, profile, eps_list, T, grid);
    write_text_file((std::filesystem::path(opts.out_dir) / "viscosity.csv").string(),
                    viscosity_csv(rows));
    return kExitOk;
}

int cmd_nproj(const Json& cfg, const CliOptions& opts) {
    const GameModel model = model_from_json(cfg.at("model"));
    const double t = cfg.at("t").get<double>();
    const auto atoms = cfg.at("atoms").get<std::vector<Vec>>();
    const double h_fd = cfg.value("h_fd", 1e-4);

    Json out;
    out["t"] = t;
    out["h_fd"] = h_fd;
    out["nplayer_residual"] = nplayer_residual(model, t, atoms, h_fd);
    if (cfg.contains("x")) {
        const Vec x = cfg["x"].get<Vec>();
        out["master_residual"] = master_residual(model, t, x, atoms, h_fd);
    }
    write_text_file((std::filesystem::path(opts.out_dir) / "nproj.json").string(),
                    out.dump(2) + "\n");
    return kExitOk;
}

} // namespace

int run_command(const std::string& command, const CliOptions& opts) {
    std::string raw;
    try {
        const Json cfg = load_config(opts.config_path, raw);
        std::filesystem::create_directories(opts.out_dir);

        Json tolerances{{"root_residual", 1e-8},
                        {"newton_residual", 1e-10},
                        {"selection_tol_default", 1e-6}};
        int rc = kExitConfig;
        if (command == "riemann") {
            rc = cmd_riemann(cfg, opts);
        } else if (command == "characteristics") {
            rc = cmd_characteristics(cfg, opts);
        } else if (command == "equilibrium") {
            rc = cmd_equilibrium(cfg, opts);
        } else if (command == "monotonicity") {
            rc = cmd_monotonicity(cfg, opts);
        } else if (command == "select") {
            rc = cmd_select(cfg, opts);
        } else if (command == "viscosity") {
            rc = cmd_viscosity(cfg, opts);
        } else if (command == "nproj") {
            rc = cmd_nproj(cfg, opts);
        } else {
            throw ConfigError("unknown command: " + command);
        }
        write_manifest(opts, command, raw, tolerances);
        return rc;
    } catch (const ConfigError& e) {
        Json err{{"error", "config"}, {"message", e.what()}};
        try {
            std::filesystem::create_directories(opts.out_dir);
            write_text_file((std::filesystem::path(opts.out_dir) / "error.json").string(),
                            err.dump(2) + "\n");
        } catch (...) {
        }
        return kExitConfig;
    } catch (const std::exception& e) {
        Json err{{"error", "solver"}, {"message", e.what()}};
        try {
            std::filesystem::create_directories(opts.out_dir);
            write_text_file((std::filesystem::path(opts.out_dir) / "error.json").string(),
                            err.dump(2) + "\n");
        } catch (...) {
        }
        return kExitSolver;
    }
}

} // namespace mfgclaw
