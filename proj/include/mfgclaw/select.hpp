#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mfgclaw/claw.hpp"
#include "mfgclaw/equilibrium.hpp"

namespace mfgclaw {

enum class Selection { Selected, NoEquilibrium, NotSelected };

struct SelectionEntry {
    double T = 0.0;
    double x = 0.0;            // mean coordinate along zeta
    double sigma_entropy = 0.0;
    double selection_residual = 0.0;
    Selection classification = Selection::NotSelected;
    std::vector<double> equilibria;
    bool boundary_flag = false; // residual within 2x of the threshold
};

struct SelectionReport {
    std::vector<SelectionEntry> entries;
    double tol = 0.0;
    std::string model_id;
};

/// Region summary: maximal runs of equal classification along the x grid.
struct SelectionRegion {
    Selection classification = Selection::Selected;
    double x_lo = 0.0;
    double x_hi = 0.0;
};

/// Entropy value sigma(T, x) for the reduced model. Step profiles use the
/// exact Riemann fan; smooth profiles with a uniformly convex flux use
/// Lax-Oleinik. Callers with other wave structures supply their own
/// evaluator to classify_point.
std::function<double(double, double)> default_entropy_evaluator(const GameModel& model);

/// Classify one initializing measure: does the entropy solution at (T, mean)
/// reproduce a fixed point of Sigma0? Requires the reduced regime.
/// `tol` <= 0 picks max(1e-6, 10 h_eff Lip(s0)) with h_eff = 0 for the exact
/// evaluators.
SelectionEntry classify_point(const GameModel& model, double T, const EmpiricalMeasure& m,
                              const std::function<double(double, double)>& entropy_value,
                              double tol = 0.0, int n_scan = 2001);
SelectionEntry classify_point(const GameModel& model, double T, const EmpiricalMeasure& m,
                              double tol = 0.0, int n_scan = 2001);

SelectionReport region_scan(const GameModel& model, double T,
                            const std::vector<double>& x_grid,
                            const std::function<double(double, double)>& entropy_value,
                            double tol = 0.0, int n_scan = 2001);
SelectionReport region_scan(const GameModel& model, double T,
                            const std::vector<double>& x_grid, double tol = 0.0,
                            int n_scan = 2001);

std::vector<SelectionRegion> summarize_regions(const SelectionReport& report);

} // namespace mfgclaw
