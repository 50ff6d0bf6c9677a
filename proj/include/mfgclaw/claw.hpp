#pragma once

#include <functional>
#include <vector>

#include "mfgclaw/model.hpp"

namespace mfgclaw {

struct Grid1D {
    double x_min = 0.0;
    double x_max = 1.0;
    int n_cells = 2;

    Grid1D() = default;
    Grid1D(double lo, double hi, int n);

    double h() const { return (x_max - x_min) / n_cells; }
    double center(int i) const { return x_min + (i + 0.5) * h(); }
    double left_edge(int i) const { return x_min + i * h(); }
    int cell_of(double x) const;
};

enum class ClawMethod { RiemannExact, LaxOleinik, Godunov };

struct EntropyField {
    Grid1D grid;
    std::vector<double> times;
    std::vector<std::vector<double>> values; // per time, cell averages
    ClawMethod method = ClawMethod::Godunov;

    const std::vector<double>& at_time_index(std::size_t k) const { return values[k]; }
    std::size_t nearest_time_index(double t) const;
    double value_at(double t, double x) const;
};

struct Wave {
    enum class Type { Shock, Rarefaction };
    Type type = Type::Shock;
    double speed_lo = 0.0; // == speed_hi for shocks
    double speed_hi = 0.0;
    double state_lo = 0.0; // state on the slow (left) side
    double state_hi = 0.0; // state on the fast (right) side
};

/// Self-similar solution structure of a Riemann problem, built from the
/// convex (sigma_l < sigma_r) or concave (sigma_l > sigma_r) flux envelope.
struct RiemannFan {
    double sigma_l = 0.0;
    double sigma_r = 0.0;
    std::vector<Wave> waves; // speeds non-decreasing

    double value(const ReducedFlux& flux, double xi) const;
};

RiemannFan riemann_fan(const ReducedFlux& flux, double sigma_l, double sigma_r,
                       int n_samples = 4001);

/// Entropy solution of the Riemann problem at similarity coordinate xi = x/t.
double riemann_exact(const ReducedFlux& flux, double sigma_l, double sigma_r, double xi);

/// Lax-Oleinik value for a uniformly convex flux (fbar' >= c0 > 0): the
/// entropy solution sigma(t, x) recovered from the minimizer of
/// t F*((x-y)/t) + Phi0(y). Pre-shock the first-order condition is polished
/// so smooth-data values carry full double precision.
double lax_oleinik(const ReducedFlux& flux, const Profile1D& s0, double t, double x);

/// Cell averages of a profile via its antiderivative (exact for steps).
std::vector<double> cell_averages(const Profile1D& s0, const Grid1D& grid);

/// First-order Godunov finite volume scheme. The interface flux is the exact
/// Riemann flux at xi = 0, evaluated in min/max form over the flux stationary
/// points (cross-checked against riemann_exact in the tests). Boundary cells
/// extrapolate constantly. record_times defaults to {0, T}.
EntropyField godunov(const ReducedFlux& flux, const Grid1D& grid,
                     const std::vector<double>& init, double T, double cfl = 0.9,
                     std::vector<double> record_times = {});

/// Godunov numerical flux (exact Riemann value at xi = 0).
double godunov_interface_flux(const ReducedFlux& flux, double u_left, double u_right,
                              const std::vector<double>& stationary_pts);

double total_variation(const std::vector<double>& cells);
double l1_distance(const std::vector<double>& a, const std::vector<double>& b, double h);
double l1_distance_to(const std::vector<double>& cells, const Grid1D& grid,
                      const std::function<double(double)>& ref, double win_lo,
                      double win_hi);

// ---------------------------------------------------------------------------
// Shock-front tracking and characteristic tracing
// ---------------------------------------------------------------------------

struct FrontTrack {
    std::vector<double> t;
    std::vector<double> x;           // sub-cell positions from mass conservation
    std::vector<double> sigma_minus; // sampled a few cells left of the front
    std::vector<double> sigma_plus;
    std::vector<double> rh_speed;    // (F(s+) - F(s-)) / (s+ - s-)
};

std::vector<FrontTrack> track_fronts(const EntropyField& field, const ReducedFlux& flux,
                                     double jump_factor = 5.0);

/// Least-squares slope of x(t) over samples with t in [t0, t0 + window].
double front_speed_at(const FrontTrack& track, double t0, double window,
                      bool quadratic = true);

struct CharacteristicLine {
    double x0 = 0.0;
    double slope = 0.0; // fbar(s0(x0))
    double t_end = 0.0; // termination on a shock curve, or t_max
};

struct RarefactionWedge {
    double apex_t = 0.0;
    double apex_x = 0.0;
    double speed_lo = 0.0;
    double speed_hi = 0.0;
};

struct CharacteristicsDiagram {
    std::vector<CharacteristicLine> characteristics;
    std::vector<FrontTrack> shocks;
    std::vector<RarefactionWedge> rarefactions;
};

/// Straight characteristics x0 + t fbar(s0(x0)) clipped against the shock
/// curves tracked in the Godunov field; rarefaction wedges are passed in by
/// the callers that know the wave structure (Riemann fans, landmark reports).
CharacteristicsDiagram trace_characteristics(const Profile1D& s0, const ReducedFlux& flux,
                                             const EntropyField& field,
                                             const std::vector<double>& seeds,
                                             std::vector<RarefactionWedge> wedges = {});

// ---------------------------------------------------------------------------
// Backward reachability
// ---------------------------------------------------------------------------

enum class ReachabilityKind { Reached, Rarefaction, Ambiguous };

struct ReachabilityResult {
    ReachabilityKind kind = ReachabilityKind::Ambiguous;
    std::vector<double> origins; // characteristic feet when Reached
    double residual = 0.0;       // |sigma_e - s0(x0)| (jump-aware)
};

/// Decide whether the entropy value sigma_e at (T, x) is carried by a genuine
/// characteristic from the initial data or sits inside a rarefaction fan.
ReachabilityResult backward_reachability(const Profile1D& s0, const ReducedFlux& flux,
                                         double T, double x, double sigma_e,
                                         const std::vector<RarefactionWedge>& fans,
                                         double tol);

// ---------------------------------------------------------------------------
// The quartic-flux construction with two inflection points
// ---------------------------------------------------------------------------

struct Section433Landmarks {
    double xi_param = 2.0;
    double t_xi = 0.0;        // (3/2)(xi - 1), birth time of the left-moving shock
    double focusing_x = 0.0;  // characteristics from [-2/3, 2/3] meet here
    double focusing_t = 1.0;
    double t_star = 0.0;      // collision time of the two shocks (from the field)
    double x_star = 0.0;      // -2 t* / (1 + 2 t*)
    double sigma_star = 0.0;  // s0(x*)
    double r1 = 0.0;          // tangency state of the post-collision fan
    double s1_initial_speed = 0.0;
    double s2_initial_speed = 0.0; // Rankine-Hugoniot of (sqrt 3, 1)
    double s3_speed = 0.0;         // F'(r1)
};

struct Section433Profile {
    Profile1D profile;
    ReducedFlux flux; // fbar(r) = r^3/3 - r
    Section433Landmarks landmarks;
};

/// Build the continuous initial profile whose entropy solution focuses at
/// (0, 1), forms two shocks that collide at t*, and opens a rarefaction fan
/// afterwards. t* is located from a Godunov run at the given resolution.
Section433Profile build_section433_profile(double xi_param, int n_cells = 8000);

} // namespace mfgclaw
