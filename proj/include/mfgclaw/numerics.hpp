#pragma once

#include <cmath>
#include <functional>

namespace mfgclaw {

/// Maximize a unimodal (concave) function on [lo, hi] by golden-section
/// search; returns the abscissa of the maximum.
double golden_max(const std::function<double(double)>& g, double lo, double hi,
                  int iters = 220);

/// Bisection for a sign change of f on [lo, hi]; requires f(lo)*f(hi) <= 0.
/// Returns the midpoint of the final bracket of width <= xtol.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol = 1e-14, int max_iter = 200);

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12, int max_depth = 40);

/// Relative finite-difference step: h * (1 + |x|).
inline double fd_step(double x, double h = 1e-6) { return h * (1.0 + std::abs(x)); }

} // namespace mfgclaw
