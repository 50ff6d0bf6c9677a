#include "mfgclaw/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "mfgclaw/errors.hpp"

namespace mfgclaw {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string to_string(EquilibriumClass c) {
    switch (c) {
    case EquilibriumClass::Unique: return "UNIQUE";
    case EquilibriumClass::Multiple: return "MULTIPLE";
    case EquilibriumClass::None: return "NONE";
    }
    return "?";
}

std::string to_string(MonotonicityVerdict v) {
    switch (v) {
    case MonotonicityVerdict::Monotone: return "MONOTONE";
    case MonotonicityVerdict::AntiMonotone: return "ANTI_MONOTONE";
    case MonotonicityVerdict::Neither: return "NEITHER";
    }
    return "?";
}

std::string to_string(Selection s) {
    switch (s) {
    case Selection::Selected: return "SELECTED";
    case Selection::NoEquilibrium: return "NO_EQUILIBRIUM";
    case Selection::NotSelected: return "NOT_SELECTED";
    }
    return "?";
}

Json to_json(const EquilibriumReport& rep) {
    Json roots = Json::array();
    for (const auto& r : rep.roots)
        roots.push_back({{"sigma", r.sigma}, {"residual", r.residual}, {"dSigma0", r.dSigma0}});
    Json jumps = Json::array();
    for (const auto& j : rep.jump_crossings) jumps.push_back({j.first, j.second});
    return Json{{"t", rep.t},
                {"mean", rep.mean},
                {"roots", roots},
                {"jump_crossings", jumps},
                {"classification", to_string(rep.classification)},
                {"scan_range", {rep.scan_range.first, rep.scan_range.second}},
                {"range_warning", rep.range_warning}};
}

Json to_json(const MonotonicityReport& rep) {
    Json samples = Json::array();
    for (const auto& s : rep.sample_values)
        samples.push_back({{"sigma", s.sigma},
                           {"t", s.t},
                           {"measure", s.measure_index},
                           {"value", s.value}});
    Json j{{"sup_dSigma0", rep.sup_dSigma0},
           {"inf_dSigma0", rep.inf_dSigma0},
           {"verdict", to_string(rep.verdict)},
           {"c0", rep.c0},
           {"samples", rep.samples},
           {"sigma_grid", rep.sigma_grid},
           {"t_grid", rep.t_grid},
           {"sample_values", samples}};
    if (rep.pointwise_criterion_sup)
        j["pointwise_criterion_sup"] = *rep.pointwise_criterion_sup;
    return j;
}

Json to_json(const SelectionReport& rep) {
    Json entries = Json::array();
    for (const auto& e : rep.entries)
        entries.push_back({{"T", e.T},
                           {"x", e.x},
                           {"sigma_entropy", e.sigma_entropy},
                           {"residual", e.selection_residual},
                           {"classification", to_string(e.classification)},
                           {"equilibria", e.equilibria},
                           {"boundary_flag", e.boundary_flag}});
    return Json{{"entries", entries}, {"tol", rep.tol}, {"model_id", rep.model_id}};
}

Json to_json(const RiemannFan& fan) {
    Json waves = Json::array();
    for (const auto& w : fan.waves) {
        Json jw{{"type", w.type == Wave::Type::Shock ? "SHOCK" : "RAREFACTION"},
                {"speed_lo", w.speed_lo},
                {"speed_hi", w.speed_hi},
                {"state_lo", w.state_lo},
                {"state_hi", w.state_hi}};
        waves.push_back(jw);
    }
    return Json{{"sigma_l", fan.sigma_l}, {"sigma_r", fan.sigma_r}, {"waves", waves}};
}

Json to_json(const CharacteristicsDiagram& diagram) {
    // Plot-ready arrays: [x0, slope, t_end] per line, [t, x] pairs per shock
    // curve; the measured states behind each curve ride along separately.
    Json chars = Json::array();
    for (const auto& c : diagram.characteristics)
        chars.push_back({c.x0, c.slope, c.t_end});
    Json shocks = Json::array();
    Json shock_states = Json::array();
    for (const auto& s : diagram.shocks) {
        Json pts = Json::array();
        for (std::size_t i = 0; i < s.t.size(); ++i) pts.push_back({s.t[i], s.x[i]});
        shocks.push_back(pts);
        shock_states.push_back({{"sigma_minus", s.sigma_minus},
                                {"sigma_plus", s.sigma_plus},
                                {"rh_speed", s.rh_speed}});
    }
    Json fans = Json::array();
    for (const auto& r : diagram.rarefactions)
        fans.push_back({{"apex", {r.apex_t, r.apex_x}},
                        {"speed_lo", r.speed_lo},
                        {"speed_hi", r.speed_hi}});
    return Json{{"characteristics", chars},
                {"shocks", shocks},
                {"rarefactions", fans},
                {"shock_states", shock_states}};
}

Json to_json(const Section433Landmarks& lm) {
    return Json{{"xi", lm.xi_param},
                {"t_xi", lm.t_xi},
                {"focusing", {lm.focusing_x, lm.focusing_t}},
                {"t_star", lm.t_star},
                {"x_star", lm.x_star},
                {"sigma_star", lm.sigma_star},
                {"r1", lm.r1},
                {"s1_initial_speed", lm.s1_initial_speed},
                {"s2_initial_speed", lm.s2_initial_speed},
                {"s3_speed", lm.s3_speed}};
}

std::string field_csv(const EntropyField& field) {
    std::string out = "t,x,sigma\n";
    for (std::size_t k = 0; k < field.times.size(); ++k)
        for (int i = 0; i < field.grid.n_cells; ++i)
            out += fmt(field.times[k]) + "," + fmt(field.grid.center(i)) + "," +
                   fmt(field.values[k][i]) + "\n";
    return out;
}

std::string field_csv(const ViscousField& field) {
    std::string out = "t,x,sigma\n";
    for (std::size_t k = 0; k < field.times.size(); ++k)
        for (int i = 0; i < field.grid.n_cells; ++i)
            out += fmt(field.times[k]) + "," + fmt(field.grid.center(i)) + "," +
                   fmt(field.values[k][i]) + "\n";
    return out;
}

std::string selection_csv(const SelectionReport& rep) {
    std::string out = "T,x,sigma_entropy,residual,classification,equilibria\n";
    for (const auto& e : rep.entries) {
        out += fmt(e.T) + "," + fmt(e.x) + "," + fmt(e.sigma_entropy) + "," +
               fmt(e.selection_residual) + "," + to_string(e.classification) + ",";
        for (std::size_t i = 0; i < e.equilibria.size(); ++i) {
            if (i) out += ";";
            out += fmt(e.equilibria[i]);
        }
        out += "\n";
    }
    return out;
}

std::string viscosity_csv(const std::vector<ViscosityStudyRow>& rows) {
    std::string out = "epsilon,l1_distance,runtime_ms\n";
    for (const auto& r : rows)
        out += fmt(r.epsilon) + "," + fmt(r.l1_distance) + "," + fmt(r.runtime_ms) + "\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw BadInput("cannot open for writing: " + path);
    out << body;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

} // namespace mfgclaw
