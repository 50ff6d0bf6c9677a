#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mfgclaw/hjb.hpp"

namespace mfgclaw {

enum class EquilibriumClass { Unique, Multiple, None };

struct EquilibriumRoot {
    double sigma = 0.0;
    double residual = 0.0; // |sigma - Sigma0(sigma, t, m)|
    double dSigma0 = 0.0;  // d/dsigma Sigma0 at the root (NaN if not available)
};

struct EquilibriumReport {
    std::vector<EquilibriumRoot> roots; // ascending, pairwise distinct by > 1e-6
    // Sign changes of rho = sigma - Sigma0 across a discontinuity with no
    // root; the stored pair is the final bisection bracket.
    std::vector<std::pair<double, double>> jump_crossings;
    EquilibriumClass classification = EquilibriumClass::None;
    std::pair<double, double> scan_range{0.0, 0.0};
    double t = 0.0;
    Vec mean;
    bool range_warning = false; // scan window does not cover range(sigma0)
};

/// Sigma0(sigma, t, m) = sigma0( x*(t,.,sigma,0)_# m ).
double sigma_map(const GameModel& model, double sigma, double t,
                 const EmpiricalMeasure& m);

/// Scan window derived from range(sigma0) padded by 10%.
std::pair<double, double> default_sigma_range(const GameModel& model);

EquilibriumReport find_equilibria(const GameModel& model, double t,
                                  const EmpiricalMeasure& m,
                                  std::pair<double, double> sigma_range, int n_scan = 2001);

struct NashCheck {
    bool ok = false;
    double residual = 0.0;       // |sigma* - sigma0(image measure)|
    double optimality_gap = 0.0; // worst |cost(y_i) - v(t, x_i, sigma*)|
};

NashCheck verify_nash(const GameModel& model, double t, const EmpiricalMeasure& m,
                      double sigma_star);

/// u(t, x, m) = v(t, x, sigma(t, m)) at the selected equilibrium root. When
/// several roots exist the caller must pick one explicitly.
double master_field(const GameModel& model, double t, const Vec& x,
                    const EmpiricalMeasure& m, std::optional<int> root_index = std::nullopt,
                    std::optional<std::pair<double, double>> sigma_range = std::nullopt,
                    int n_scan = 2001);

/// Track a root of rho(sigma) = sigma - Sigma0 from an initial guess.
/// max_wander bounds how far the iteration may drift from sigma_init before
/// it is declared off-branch; finite-difference stencils pass a tight bound
/// to stay on one solution branch.
double solve_sigma_near(const GameModel& model, double t, const EmpiricalMeasure& m,
                        double sigma_init, double max_wander = 1e9);

/// Residual of the N-player projection d_t sigma_N + div(F_N(sigma_N)) at a
/// uniform empirical measure, with the wave speed DH(D_x v) evaluated through
/// the optimal points so that nonlinear (Case 1/2) presets are covered too.
/// All derivatives are relative central differences of step h_fd.
double nplayer_residual(const GameModel& model, double t, const std::vector<Vec>& atoms,
                        double h_fd = 1e-4,
                        std::optional<std::pair<double, double>> sigma_range = std::nullopt,
                        int n_scan = 2001);

/// Finite-difference residual of the master equation at (t, x, m^N).
double master_residual(const GameModel& model, double t, const Vec& x,
                       const std::vector<Vec>& atoms, double h_fd = 1e-4,
                       std::optional<std::pair<double, double>> sigma_range = std::nullopt,
                       int n_scan = 2001);

} // namespace mfgclaw
