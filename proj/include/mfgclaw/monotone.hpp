#pragma once

#include <optional>
#include <vector>

#include "mfgclaw/equilibrium.hpp"

namespace mfgclaw {

enum class MonotonicityVerdict { Monotone, AntiMonotone, Neither };

struct MonotonicitySample {
    double sigma = 0.0;
    double t = 0.0;
    std::size_t measure_index = 0;
    double value = 0.0; // d/dsigma Sigma0 at this sample
};

struct MonotonicityReport {
    double sup_dSigma0 = 0.0;
    double inf_dSigma0 = 0.0;
    MonotonicityVerdict verdict = MonotonicityVerdict::Neither;
    double c0 = 0.0; // bound attached to the verdict (requested or realized)
    std::size_t samples = 0;
    std::optional<double> pointwise_criterion_sup; // pointwise kernel certificate
    std::vector<MonotonicitySample> sample_values;
    std::vector<double> sigma_grid;
    std::vector<double> t_grid;
};

/// d/dsigma Sigma0(sigma, t, m), by central differences and (for the
/// MOMENT/COMPOSED presets) by the chain rule through d x*/d sigma. The two
/// paths agree within 1e-5 where both exist; `value` prefers the chain one.
struct DsigmaPaths {
    double value = 0.0;
    double fd = 0.0;
    std::optional<double> chain;
};

DsigmaPaths dsigma_sigma_map(const GameModel& model, double sigma, double t,
                             const EmpiricalMeasure& m);

MonotonicityReport check_monotonicity(const GameModel& model,
                                      const std::vector<double>& sigma_grid,
                                      const std::vector<double>& t_grid,
                                      const std::vector<EmpiricalMeasure>& measures,
                                      double c0);

/// Pointwise certificate Dpsi(y) . G'(sigma) M(t, y, sigma) Dphi(y) for the
/// Case 1/2 presets. For Case 2 the sigma argument is also used as the point
/// where G' is evaluated; check_monotonicity sweeps it over the whole grid.
double pointwise_criterion(const GameModel& model, const Vec& y, double t, double sigma);

} // namespace mfgclaw
