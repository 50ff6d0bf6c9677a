#pragma once

#include "mfgclaw/model.hpp"

namespace mfgclaw {

/// Solution of the implicit equation x* + t DH(D_x g(x*, sigma)) = x.
struct OptimalPointResult {
    Vec x_star;
    double value = 0.0;   // Hopf-Lax minimum t L((x - x*)/t) + g(x*, sigma)
    Mat jacobian_dx;      // D_x x* = (I + t D2H D2g)^{-1}
    int newton_iterations = 0;
    double residual = 0.0;
};

/// v(t, x, sigma) = min_y { t L((x - y)/t) + g(y, sigma) }; g(x, sigma) at t = 0.
double hopf_lax_value(const GameModel& model, double t, const Vec& x, double sigma);

OptimalPointResult optimal_point(const GameModel& model, double t, const Vec& x,
                                 double sigma);

/// M(t, z, sigma) = -t (I + t D2H D2g)^{-1} D2H, the sigma-sensitivity kernel.
Mat sensitivity_matrix(const GameModel& model, double t, const Vec& z, double sigma);

/// d x*/d sigma = M(t, x*, sigma) . d_sigma D_x g(x*, sigma).
Vec dsigma_optimal(const GameModel& model, double t, const Vec& x, double sigma);

} // namespace mfgclaw
