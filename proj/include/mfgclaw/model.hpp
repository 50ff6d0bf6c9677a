#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "mfgclaw/linalg.hpp"
#include "mfgclaw/measure.hpp"

namespace mfgclaw {

// ---------------------------------------------------------------------------
// Function bundles. Presets carry analytic derivatives so downstream Newton
// solves and sensitivity formulas stay exact.
// ---------------------------------------------------------------------------

/// Scalar function R -> R with first and second derivative.
struct ScalarFn {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> d2f;
};

/// Field R^d -> R with gradient and Hessian (used for phi and psi).
struct FieldFn {
    std::function<double(const Vec&)> f;
    std::function<Vec(const Vec&)> grad;
    std::function<Mat(const Vec&)> hess;
    bool convex = false;
    // Optional range hint [lo, hi] of f over the regions of interest; used
    // for default sigma scan windows.
    std::optional<std::pair<double, double>> range;
};

/// Curve R -> R^d with derivative (the f(sigma) of a linear terminal cost).
struct CurveFn {
    std::function<Vec(double)> f;
    std::function<Vec(double)> df;
};

ScalarFn poly_scalar(std::vector<double> coeffs);
ScalarFn one_plus_exp_scalar(); // G(s) = 1 + e^s
FieldFn quadratic_field(std::size_t dim); // phi(x) = |x|^2 / 2
FieldFn arctan_sq_field(std::size_t dim); // psi(y) = arctan(|y|^2)
CurveFn poly_curve(std::vector<std::vector<double>> coeffs_per_component);

// ---------------------------------------------------------------------------
// 1-D initial profiles s0 used by the mean-profile sigma0 and the reduced
// conservation law. Profiles know their breakpoints and carry an exact or
// tabulated antiderivative Phi0(x) = int_0^x s0, normalized to Phi0(0) = 0.
// ---------------------------------------------------------------------------

class Profile1D {
public:
    static Profile1D step(double left, double right, double x_jump = 0.0);
    /// Smooth profile with a numeric antiderivative tabulated on [lo, hi].
    static Profile1D smooth(std::function<double(double)> fn, double lo, double hi);
    /// Smooth profile with a caller-provided exact antiderivative.
    static Profile1D smooth_with_antiderivative(std::function<double(double)> fn,
                                                std::function<double(double)> anti);
    /// a + b * tanh(c (x - x0)); antiderivative in closed form.
    static Profile1D tanh_profile(double a = 0.0, double b = 1.0, double c = 1.0,
                                  double x0 = 0.0);
    /// Piecewise profile: fn may jump at the listed breakpoints; the numeric
    /// antiderivative is split there so quadrature never straddles a kink.
    static Profile1D piecewise(std::function<double(double)> fn,
                               std::vector<double> breakpoints, double lo, double hi);

    double operator()(double x) const;
    double left_limit(double x) const;
    double right_limit(double x) const;
    double antiderivative(double x) const;

    bool is_step() const { return step_; }
    double step_left() const { return step_left_; }
    double step_right() const { return step_right_; }
    double step_jump_location() const { return step_jump_; }

    const std::vector<double>& breakpoints() const { return breaks_; }

    /// [min, max] of the profile over [lo, hi], by sampling plus one-sided
    /// limits at breakpoints.
    std::pair<double, double> value_range(double lo, double hi) const;

    /// Largest sampled difference quotient away from breakpoints.
    double lipschitz_estimate(double lo, double hi) const;

private:
    std::function<double(double)> fn_;
    std::function<double(double)> anti_;
    std::vector<double> breaks_;
    bool step_ = false;
    double step_left_ = 0.0, step_right_ = 0.0, step_jump_ = 0.0;
};

// ---------------------------------------------------------------------------
// Hamiltonian with Lagrangian L = H*.
// ---------------------------------------------------------------------------

class HamiltonianModel {
public:
    /// H(p) = |p|^2 / 2 in any dimension, L(q) = |q|^2 / 2.
    static HamiltonianModel quadratic(std::size_t dim);
    /// User-supplied convex 1-D Hamiltonian; L computed by numerical
    /// Legendre transform over [p_lo, p_hi].
    static HamiltonianModel custom_1d(ScalarFn H, double p_lo, double p_hi);

    std::size_t dim() const { return dim_; }
    bool is_quadratic() const { return quadratic_; }

    double H(const Vec& p) const;
    Vec grad(const Vec& p) const;
    Mat hess(const Vec& p) const;
    double L(const Vec& q) const;
    Vec L_grad(const Vec& q) const;

private:
    std::size_t dim_ = 1;
    bool quadratic_ = true;
    ScalarFn h1d_;
    double p_lo_ = 0.0, p_hi_ = 0.0;
};

// ---------------------------------------------------------------------------
// Terminal cost g(x, sigma).
// ---------------------------------------------------------------------------

class TerminalCost {
public:
    enum class Kind { Linear, SeparableG, SeparableId };

    static TerminalCost linear(CurveFn f);                    // g = f(sigma) . x
    static TerminalCost separable(FieldFn phi, ScalarFn G);   // g = phi(x) G(sigma)
    static TerminalCost separable_id(FieldFn phi);            // g = phi(x) sigma

    Kind kind() const { return kind_; }

    double g(const Vec& x, double sigma) const;
    Vec grad_x(const Vec& x, double sigma) const;
    Mat hess_x(const Vec& x, double sigma) const;
    Vec dsigma_grad_x(const Vec& x, double sigma) const;
    double dsigma_g(const Vec& x, double sigma) const;

    /// Whether the preset declares g(., sigma) convex at this sigma. Linear
    /// costs always qualify; separable ones need phi convex and a sign
    /// condition on the sigma factor.
    bool convex_in_x(double sigma) const;

    const CurveFn& linear_f() const;
    const FieldFn& phi() const;
    const ScalarFn& G() const; // SeparableG only

private:
    Kind kind_ = Kind::Linear;
    CurveFn f_;
    FieldFn phi_;
    ScalarFn G_;
    bool has_G_ = false;
};

// ---------------------------------------------------------------------------
// sigma0 functional of the terminal distribution.
// ---------------------------------------------------------------------------

class SigmaFunctional {
public:
    enum class Kind { Moment, Composed, MeanProfile };

    static SigmaFunctional moment(FieldFn psi);                 // int psi dm
    static SigmaFunctional composed(FieldFn psi, ScalarFn G);   // G(int psi dm)
    static SigmaFunctional mean_profile(Profile1D s0, Vec zeta);

    Kind kind() const { return kind_; }

    double evaluate(const EmpiricalMeasure& m) const;
    /// MeanProfile only: value as a function of the mean coordinate x . zeta.
    double evaluate_reduced(double x_along_zeta) const;

    bool differentiable() const; // false for step profiles

    const FieldFn& psi() const;
    const ScalarFn& G() const;
    const Profile1D& profile() const;
    const Vec& zeta() const;

    /// Estimated [min, max] of sigma0, for scan windows and grid defaults.
    std::pair<double, double> value_range_hint() const;

private:
    Kind kind_ = Kind::Moment;
    FieldFn psi_;
    ScalarFn G_;
    bool has_G_ = false;
    std::shared_ptr<const Profile1D> profile_;
    Vec zeta_;
};

// ---------------------------------------------------------------------------
// Legendre transform, flux primitives and envelopes.
// ---------------------------------------------------------------------------

/// Conjugate evaluator for a convex scalar function on [lo, hi]:
/// F*(a) = sup_u (a u - F(u)). Construction verifies convexity by sampled
/// second differences and throws NonconvexFlux otherwise.
class LegendreTransform {
public:
    LegendreTransform(std::function<double(double)> F, double lo, double hi,
                      int n_check = 2001);
    double operator()(double alpha) const;
    /// Maximizer u attaining the sup (the derivative of F* where smooth).
    double argmax(double alpha) const;

private:
    std::function<double(double)> F_;
    double lo_, hi_;
};

LegendreTransform legendre_1d(std::function<double(double)> F, double lo, double hi);

/// Antiderivative with F(0) = 0 by adaptive Simpson quadrature.
std::function<double(double)> flux_primitive(std::function<double(double)> fbar,
                                             double abs_tol = 1e-12);

/// Piecewise-linear-over-samples lower convex envelope of F on [a, b].
/// Hull vertices are polished to the exact tangency condition
/// slope(chord) = F'(endpoint) whenever a chord departs from the graph, so
/// tangency abscissas are resolved far below the sample spacing.
struct EnvelopeResult {
    std::vector<double> u;     // hull vertex abscissas, ascending
    std::vector<double> value; // envelope values at the vertices
    // Per-edge flag: true when the edge is a chord bridging over the graph
    // of F (a shock in Riemann terms), false when it follows the graph.
    std::vector<bool> is_gap;
};

EnvelopeResult convex_envelope(const std::function<double(double)>& F, double a, double b,
                               int n_samples,
                               const std::function<double(double)>* dF = nullptr);
EnvelopeResult concave_envelope(const std::function<double(double)>& F, double a, double b,
                                int n_samples,
                                const std::function<double(double)>* dF = nullptr);

// ---------------------------------------------------------------------------
// Reduced flux fbar with primitive F, conjugate F* and direction zeta.
// ---------------------------------------------------------------------------

class ReducedFlux {
public:
    /// fbar given by polynomial coefficients (ascending powers); primitive in
    /// closed form.
    static ReducedFlux polynomial(std::vector<double> fbar_coeffs, Vec zeta,
                                  std::pair<double, double> working = {-4.0, 4.0});
    /// fbar(u) = DH(f(u)) . zeta; requires DH(f(u)) collinear with zeta on the
    /// working interval (checked on samples).
    static ReducedFlux from_model(const HamiltonianModel& H, const CurveFn& f, Vec zeta,
                                  std::pair<double, double> working = {-4.0, 4.0});
    static ReducedFlux custom(std::function<double(double)> fbar, Vec zeta,
                              std::pair<double, double> working = {-4.0, 4.0});

    double fbar(double u) const;
    double fbar_prime(double u) const;
    double primitive(double u) const; // F(u) = int_0^u fbar
    double conjugate(double alpha) const; // F*
    const Vec& zeta() const { return zeta_; }
    std::pair<double, double> working_interval() const { return working_; }

    /// Roots of fbar in [lo, hi] (stationary points of F), by scan+bisection.
    std::vector<double> stationary_points(double lo, double hi) const;
    // Two distinct structural conditions appear downstream: uniform convexity
    // of F (min fbar' > 0, required by the Lax-Oleinik route) and positivity
    // of the wave speed itself (min fbar > 0). Both are reported separately.
    double min_fbar_prime(double lo, double hi) const;
    double min_fbar(double lo, double hi) const;
    double max_abs_fbar(double lo, double hi) const;
    /// Invert fbar on the monotone branch [u_lo, u_hi]; clamps outside range.
    double invert_fbar(double xi, double u_lo, double u_hi) const;

    bool is_polynomial() const { return poly_; }
    const std::vector<double>& fbar_coeffs() const { return coeffs_; }

private:
    std::function<double(double)> fbar_;
    std::function<double(double)> dfbar_;
    std::function<double(double)> F_;
    Vec zeta_;
    std::pair<double, double> working_{-4.0, 4.0};
    bool poly_ = false;
    std::vector<double> coeffs_;
};

// ---------------------------------------------------------------------------
// Full problem bundle.
// ---------------------------------------------------------------------------

struct GameModel {
    HamiltonianModel hamiltonian;
    TerminalCost cost;
    SigmaFunctional sigma0;
    std::optional<ReducedFlux> flux; // present in the reduced regime
    std::size_t dim = 1;

    bool reduced() const {
        return flux.has_value() && cost.kind() == TerminalCost::Kind::Linear &&
               sigma0.kind() == SigmaFunctional::Kind::MeanProfile;
    }
};

/// Worked example setups used by the tests and the CLI presets.
GameModel make_burgers_step_model(); // fbar(r) = r, s0 = 0/1 step
GameModel make_cubic_step_model();   // fbar(r) = r^2, s0 = -1/1 step
GameModel make_linear_profile_model(std::vector<double> fbar_coeffs, Profile1D s0);
GameModel make_case1_model(FieldFn phi, FieldFn psi, ScalarFn G, std::size_t dim);
GameModel make_case2_model(FieldFn phi, FieldFn psi, ScalarFn G, std::size_t dim);

} // namespace mfgclaw
