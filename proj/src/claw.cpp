#include "mfgclaw/claw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfgclaw/errors.hpp"
#include "mfgclaw/numerics.hpp"

namespace mfgclaw {

// ---------------------------------------------------------------------------
// Grid / field basics
// ---------------------------------------------------------------------------

Grid1D::Grid1D(double lo, double hi, int n) : x_min(lo), x_max(hi), n_cells(n) {
    if (!(lo < hi) || n < 2) throw BadInput("Grid1D: need x_min < x_max and n_cells >= 2");
}

int Grid1D::cell_of(double x) const {
    int i = static_cast<int>(std::floor((x - x_min) / h()));
    return std::clamp(i, 0, n_cells - 1);
}

std::size_t EntropyField::nearest_time_index(double t) const {
    std::size_t best = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double d = std::abs(times[k] - t);
        if (d < gap) {
            gap = d;
            best = k;
        }
    }
    return best;
}

double EntropyField::value_at(double t, double x) const {
    return values[nearest_time_index(t)][grid.cell_of(x)];
}

// ---------------------------------------------------------------------------
// Riemann fan via flux envelopes
// ---------------------------------------------------------------------------

namespace {

// Wave list for sigma_l < sigma_r from the lower convex envelope; chord edges
// are shocks, graph edges merge into rarefaction arcs.
std::vector<Wave> increasing_fan(const std::function<double(double)>& F,
                                 const std::function<double(double)>& fbar, double a,
                                 double b, int n_samples) {
    std::function<double(double)> dF = fbar;
    const EnvelopeResult env = convex_envelope(F, a, b, n_samples, &dF);

    std::vector<Wave> waves;
    const double tiny = 1e-12 * (1.0 + std::abs(a) + std::abs(b));
    std::size_t k = 0;
    while (k < env.is_gap.size()) {
        if (env.is_gap[k]) {
            const double p = env.u[k], q = env.u[k + 1];
            Wave w;
            w.type = Wave::Type::Shock;
            w.state_lo = p;
            w.state_hi = q;
            w.speed_lo = w.speed_hi = (F(q) - F(p)) / (q - p);
            waves.push_back(w);
            ++k;
        } else {
            // Merge the maximal run of graph edges into one arc.
            const double p = env.u[k];
            std::size_t j = k;
            while (j < env.is_gap.size() && !env.is_gap[j]) ++j;
            const double q = env.u[j];
            if (q - p > tiny) {
                Wave w;
                w.type = Wave::Type::Rarefaction;
                w.state_lo = p;
                w.state_hi = q;
                w.speed_lo = fbar(p);
                w.speed_hi = std::max(w.speed_lo, fbar(q));
                waves.push_back(w);
            }
            k = j;
        }
    }
    return waves;
}

} // namespace

RiemannFan riemann_fan(const ReducedFlux& flux, double sigma_l, double sigma_r,
                       int n_samples) {
    RiemannFan fan;
    fan.sigma_l = sigma_l;
    fan.sigma_r = sigma_r;
    if (std::abs(sigma_l - sigma_r) < 1e-14 * (1.0 + std::abs(sigma_l))) return fan;

    if (sigma_l < sigma_r) {
        auto F = [&flux](double u) { return flux.primitive(u); };
        auto fb = [&flux](double u) { return flux.fbar(u); };
        fan.waves = increasing_fan(F, fb, sigma_l, sigma_r, n_samples);
    } else {
        // Mirror trick: w = -sigma solves the law with flux G(w) = -F(-w),
        // same x, and its Riemann data is increasing.
        auto G = [&flux](double w) { return -flux.primitive(-w); };
        auto gb = [&flux](double w) { return flux.fbar(-w); };
        fan.waves = increasing_fan(G, gb, -sigma_l, -sigma_r, n_samples);
        for (Wave& w : fan.waves) {
            w.state_lo = -w.state_lo;
            w.state_hi = -w.state_hi;
        }
    }
    return fan;
}

double RiemannFan::value(const ReducedFlux& flux, double xi) const {
    if (waves.empty()) return sigma_l;
    double current = sigma_l;
    for (const Wave& w : waves) {
        if (xi < w.speed_lo) return current;
        if (w.type == Wave::Type::Rarefaction && xi <= w.speed_hi) {
            const double lo = std::min(w.state_lo, w.state_hi);
            const double hi = std::max(w.state_lo, w.state_hi);
            return flux.invert_fbar(xi, lo, hi);
        }
        current = w.state_hi;
    }
    return sigma_r;
}

double riemann_exact(const ReducedFlux& flux, double sigma_l, double sigma_r, double xi) {
    return riemann_fan(flux, sigma_l, sigma_r).value(flux, xi);
}

// ---------------------------------------------------------------------------
// Lax-Oleinik
// ---------------------------------------------------------------------------

double lax_oleinik(const ReducedFlux& flux, const Profile1D& s0, double t, double x) {
    if (t <= 1e-14) return s0(x);

    // Profile range over the spatial window any characteristic foot can
    // occupy; wider is safe, narrower would truncate the bracket.
    const double reach = 10.0 * (1.0 + t);
    auto [s_min, s_max] = s0.value_range(x - reach, x + reach);
    if (s_max - s_min < 1e-12) {
        s_min -= 0.5;
        s_max += 0.5;
    }
    if (flux.min_fbar_prime(s_min - 0.1, s_max + 0.1) <= 1e-12)
        throw NonconvexFlux("lax_oleinik: flux is not uniformly convex on the data range");

    const double a_lo = flux.fbar(s_min), a_hi = flux.fbar(s_max);
    double y_lo = x - t * a_hi - 1e-9 * (1.0 + std::abs(x));
    double y_hi = x - t * a_lo + 1e-9 * (1.0 + std::abs(x));

    auto J = [&](double y) {
        return t * flux.conjugate((x - y) / t) + s0.antiderivative(y);
    };

    // Global scan, then golden-section refinement of the best bracket.
    const int n = 1200;
    double best_y = y_lo, best_v = J(y_lo);
    for (int i = 1; i <= n; ++i) {
        const double y = y_lo + (y_hi - y_lo) * i / n;
        const double v = J(y);
        if (v < best_v) {
            best_v = v;
            best_y = y;
        }
    }
    const double step = (y_hi - y_lo) / n;
    auto negJ = [&J](double y) { return -J(y); };
    double y_star = golden_max(negJ, std::max(y_lo, best_y - step),
                               std::min(y_hi, best_y + step));

    // Polish through the characteristic equation y + t fbar(s0(y)) = x when
    // the foot is away from profile kinks (s0 is smooth there, possibly
    // piecewise constant).
    bool near_break = false;
    for (double bp : s0.breakpoints())
        if (std::abs(y_star - bp) < 10.0 * step) near_break = true;
    if (!near_break) {
        auto char_res = [&](double y) { return y + t * flux.fbar(s0(y)) - x; };
        double lo = y_star - 2.0 * step, hi = y_star + 2.0 * step;
        if (char_res(lo) * char_res(hi) <= 0.0) {
            const double y_root = bisect(char_res, lo, hi, 1e-15 * (1.0 + std::abs(x)));
            if (std::abs(J(y_root) - J(y_star)) <= 1e-9 * (1.0 + std::abs(best_v)))
                return s0(y_root);
        }
    }
    return flux.invert_fbar((x - y_star) / t, s_min - 0.1, s_max + 0.1);
}

// ---------------------------------------------------------------------------
// Godunov
// ---------------------------------------------------------------------------

std::vector<double> cell_averages(const Profile1D& s0, const Grid1D& grid) {
    std::vector<double> u(grid.n_cells);
    for (int i = 0; i < grid.n_cells; ++i) {
        const double a = grid.left_edge(i), b = grid.left_edge(i + 1);
        u[i] = (s0.antiderivative(b) - s0.antiderivative(a)) / (b - a);
    }
    return u;
}

double godunov_interface_flux(const ReducedFlux& flux, double u_left, double u_right,
                              const std::vector<double>& stationary_pts) {
    if (u_left == u_right) return flux.primitive(u_left);
    if (u_left < u_right) {
        double m = std::min(flux.primitive(u_left), flux.primitive(u_right));
        for (double r : stationary_pts)
            if (r > u_left && r < u_right) m = std::min(m, flux.primitive(r));
        return m;
    }
    double m = std::max(flux.primitive(u_left), flux.primitive(u_right));
    for (double r : stationary_pts)
        if (r > u_right && r < u_left) m = std::max(m, flux.primitive(r));
    return m;
}

EntropyField godunov(const ReducedFlux& flux, const Grid1D& grid,
                     const std::vector<double>& init, double T, double cfl,
                     std::vector<double> record_times) {
    if (static_cast<int>(init.size()) != grid.n_cells)
        throw BadInput("godunov: init size does not match the grid");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw BadInput("godunov: cfl must be in (0, 1]");
    for (double v : init)
        if (!std::isfinite(v)) throw BadInput("godunov: non-finite initial data");
    if (T < 0.0) throw BadInput("godunov: negative final time");

    double mn = init[0], mx = init[0];
    for (double v : init) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    const double pad = 1e-9 * (1.0 + std::abs(mn) + std::abs(mx));
    const std::vector<double> stats = flux.stationary_points(mn - pad, mx + pad);
    const double lambda = flux.max_abs_fbar(mn - pad, mx + pad);

    if (record_times.empty()) record_times = {0.0, T};
    record_times.push_back(0.0);
    record_times.push_back(T);
    std::sort(record_times.begin(), record_times.end());
    record_times.erase(std::unique(record_times.begin(), record_times.end(),
                                   [](double a, double b) { return std::abs(a - b) < 1e-13; }),
                       record_times.end());

    // Local flux evaluation; polynomial presets bypass std::function in the
    // hot loop.
    std::vector<double> prim_coeffs;
    if (flux.is_polynomial()) {
        const auto& c = flux.fbar_coeffs();
        prim_coeffs.assign(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i)
            prim_coeffs[i + 1] = c[i] / static_cast<double>(i + 1);
    }
    auto Feval = [&](double u) {
        if (!prim_coeffs.empty()) {
            double v = 0.0;
            for (std::size_t i = prim_coeffs.size(); i-- > 0;) v = v * u + prim_coeffs[i];
            return v;
        }
        return flux.primitive(u);
    };
    auto iflux = [&](double ul, double ur) {
        if (ul == ur) return Feval(ul);
        if (ul < ur) {
            double m = std::min(Feval(ul), Feval(ur));
            for (double r : stats)
                if (r > ul && r < ur) m = std::min(m, Feval(r));
            return m;
        }
        double m = std::max(Feval(ul), Feval(ur));
        for (double r : stats)
            if (r > ur && r < ul) m = std::max(m, Feval(r));
        return m;
    };

    const int n = grid.n_cells;
    const double h = grid.h();
    const double dt_base = (lambda > 1e-300) ? cfl * h / lambda : T;

    EntropyField field;
    field.grid = grid;
    field.method = ClawMethod::Godunov;

    std::vector<double> u = init;
    std::vector<double> fluxes(n + 1);
    double t = 0.0;
    std::size_t next_rec = 0;
    auto maybe_record = [&]() {
        while (next_rec < record_times.size() &&
               std::abs(record_times[next_rec] - t) < 1e-12 * (1.0 + T)) {
            field.times.push_back(t);
            field.values.push_back(u);
            ++next_rec;
        }
    };
    maybe_record();

    while (t < T - 1e-13 * (1.0 + T)) {
        double dt = std::min(dt_base, T - t);
        if (next_rec < record_times.size())
            dt = std::min(dt, record_times[next_rec] - t);
        if (dt <= 0.0) break;

        for (int i = 0; i <= n; ++i) {
            const double ul = (i == 0) ? u[0] : u[i - 1];
            const double ur = (i == n) ? u[n - 1] : u[i];
            fluxes[i] = iflux(ul, ur);
        }
        const double lam = dt / h;
        for (int i = 0; i < n; ++i) u[i] -= lam * (fluxes[i + 1] - fluxes[i]);
        t += dt;
        maybe_record();
    }
    if (field.times.empty() || std::abs(field.times.back() - t) > 1e-12 * (1.0 + T)) {
        field.times.push_back(t);
        field.values.push_back(u);
    }
    return field;
}

// ---------------------------------------------------------------------------
// Norm helpers
// ---------------------------------------------------------------------------

double total_variation(const std::vector<double>& cells) {
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) tv += std::abs(cells[i + 1] - cells[i]);
    return tv;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b, double h) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s * h;
}

double l1_distance_to(const std::vector<double>& cells, const Grid1D& grid,
                      const std::function<double(double)>& ref, double win_lo,
                      double win_hi) {
    double s = 0.0;
    for (int i = 0; i < grid.n_cells; ++i) {
        const double x = grid.center(i);
        if (x < win_lo || x > win_hi) continue;
        s += std::abs(cells[i] - ref(x));
    }
    return s * grid.h();
}

// ---------------------------------------------------------------------------
// Front tracking
// ---------------------------------------------------------------------------

namespace {

struct FrontCandidate {
    double x = 0.0;
    double sigma_minus = 0.0;
    double sigma_plus = 0.0;
};

std::vector<FrontCandidate> detect_fronts(const std::vector<double>& u, const Grid1D& grid,
                                          double jump_factor) {
    const int n = static_cast<int>(u.size());
    const double h = grid.h();
    std::vector<double> d(n - 1);
    for (int i = 0; i + 1 < n; ++i) d[i] = u[i + 1] - u[i];

    // A front is an interface jump that dominates the jumps a few cells away
    // (smooth steep regions have comparable jumps everywhere, smeared shocks
    // concentrate theirs in 2-3 cells).
    std::vector<int> cand;
    for (int i = 0; i < n - 1; ++i) {
        const double di = std::abs(d[i]);
        if (di <= jump_factor * h) continue;
        double nb = 0.0;
        for (int k : {i - 6, i - 5, i + 5, i + 6})
            if (k >= 0 && k < n - 1) nb = std::max(nb, std::abs(d[k]));
        if (di <= jump_factor * std::max(h, nb)) continue;
        bool local_max = true;
        for (int k = std::max(0, i - 4); k <= std::min(n - 2, i + 4); ++k)
            if (k != i && std::abs(d[k]) > di) local_max = false;
        if (!local_max) continue;
        if (!cand.empty() && i - cand.back() <= 2 && d[i] * d[cand.back()] < 0.0 &&
            std::abs(d[i]) < 2.0 * std::abs(d[cand.back()]) &&
            std::abs(d[cand.back()]) < 2.0 * std::abs(d[i]))
            throw RefineGrid("front detection: two opposing fronts in one cell");
        if (!cand.empty() && i - cand.back() < 5) {
            if (di > std::abs(d[cand.back()])) cand.back() = i;
            continue;
        }
        cand.push_back(i);
    }

    std::vector<FrontCandidate> out;
    const int K = 6;
    for (int i : cand) {
        const int j0 = std::max(0, i - K);
        const int j1 = std::min(n - 1, i + 1 + K);
        const double sm = u[j0], sp = u[j1];
        if (std::abs(sp - sm) < jump_factor * h) continue;
        double mass = 0.0;
        for (int k = j0; k <= j1; ++k) mass += u[k] * h;
        const double x_lo = grid.left_edge(j0), x_hi = grid.left_edge(j1 + 1);
        // Sub-cell position from mass conservation against a sharp step.
        const double pos = (mass + sm * x_lo - sp * x_hi) / (sm - sp);
        if (pos < x_lo || pos > x_hi) continue;
        out.push_back({pos, sm, sp});
    }
    return out;
}

} // namespace

std::vector<FrontTrack> track_fronts(const EntropyField& field, const ReducedFlux& flux,
                                     double jump_factor) {
    std::vector<FrontTrack> done;
    struct Active {
        FrontTrack track;
        int missed = 0;
    };
    std::vector<Active> active;

    const double h = field.grid.h();
    for (std::size_t k = 0; k < field.times.size(); ++k) {
        const double t = field.times[k];
        auto cands = detect_fronts(field.values[k], field.grid, jump_factor);

        const double dt_rec = (k > 0) ? (field.times[k] - field.times[k - 1]) : 0.0;
        double lambda = 0.0;
        for (const auto& c : cands)
            lambda = std::max(lambda,
                              std::max(std::abs(flux.fbar(c.sigma_minus)),
                                       std::abs(flux.fbar(c.sigma_plus))));
        const double radius = 2.0 * lambda * dt_rec + 12.0 * h;

        std::vector<bool> used(cands.size(), false);
        for (auto& a : active) {
            int best = -1;
            double best_d = radius;
            for (std::size_t c = 0; c < cands.size(); ++c) {
                if (used[c]) continue;
                const double d = std::abs(cands[c].x - a.track.x.back());
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            if (best >= 0) {
                used[best] = true;
                const auto& c = cands[best];
                a.track.t.push_back(t);
                a.track.x.push_back(c.x);
                a.track.sigma_minus.push_back(c.sigma_minus);
                a.track.sigma_plus.push_back(c.sigma_plus);
                a.track.rh_speed.push_back(
                    (flux.primitive(c.sigma_plus) - flux.primitive(c.sigma_minus)) /
                    (c.sigma_plus - c.sigma_minus));
                a.missed = 0;
            } else {
                ++a.missed;
            }
        }
        for (std::size_t c = 0; c < cands.size(); ++c) {
            if (used[c]) continue;
            Active a;
            a.track.t.push_back(t);
            a.track.x.push_back(cands[c].x);
            a.track.sigma_minus.push_back(cands[c].sigma_minus);
            a.track.sigma_plus.push_back(cands[c].sigma_plus);
            a.track.rh_speed.push_back(
                (flux.primitive(cands[c].sigma_plus) - flux.primitive(cands[c].sigma_minus)) /
                (cands[c].sigma_plus - cands[c].sigma_minus));
            active.push_back(std::move(a));
        }
        // Retire stale tracks.
        for (std::size_t a = active.size(); a-- > 0;) {
            if (active[a].missed > 2) {
                done.push_back(std::move(active[a].track));
                active.erase(active.begin() + static_cast<std::ptrdiff_t>(a));
            }
        }
    }
    for (auto& a : active) done.push_back(std::move(a.track));
    // One- or two-sample hits are detection transients (the t = 0 jump of
    // fan data, birth flicker), not curves.
    done.erase(std::remove_if(done.begin(), done.end(),
                              [](const FrontTrack& tr) { return tr.t.size() < 3; }),
               done.end());
    std::sort(done.begin(), done.end(),
              [](const FrontTrack& a, const FrontTrack& b) { return a.t.front() < b.t.front(); });
    return done;
}

double front_speed_at(const FrontTrack& track, double t0, double window, bool quadratic) {
    std::vector<double> ts, xs;
    for (std::size_t i = 0; i < track.t.size(); ++i) {
        if (track.t[i] >= t0 - 1e-12 && track.t[i] <= t0 + window) {
            ts.push_back(track.t[i] - t0);
            xs.push_back(track.x[i]);
        }
    }
    if (ts.size() < 3) throw BadInput("front_speed_at: not enough samples in the window");

    // Least squares for x = a + b s (+ c s^2); the speed at t0 is b.
    const std::size_t m = ts.size();
    if (!quadratic || m < 5) {
        double st = 0, sx = 0, stt = 0, stx = 0;
        for (std::size_t i = 0; i < m; ++i) {
            st += ts[i];
            sx += xs[i];
            stt += ts[i] * ts[i];
            stx += ts[i] * xs[i];
        }
        const double denom = m * stt - st * st;
        return (m * stx - st * sx) / denom;
    }
    double s0 = static_cast<double>(m), s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    double b0 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double s = ts[i];
        s1 += s;
        s2 += s * s;
        s3 += s * s * s;
        s4 += s * s * s * s;
        b0 += xs[i];
        b1 += s * xs[i];
        b2 += s * s * xs[i];
    }
    Mat A(3, 3);
    A(0, 0) = s0;
    A(0, 1) = s1;
    A(0, 2) = s2;
    A(1, 0) = s1;
    A(1, 1) = s2;
    A(1, 2) = s3;
    A(2, 0) = s2;
    A(2, 1) = s3;
    A(2, 2) = s4;
    const Vec coef = A.solve({b0, b1, b2});
    return coef[1];
}

// ---------------------------------------------------------------------------
// Characteristics
// ---------------------------------------------------------------------------

CharacteristicsDiagram trace_characteristics(const Profile1D& s0, const ReducedFlux& flux,
                                             const EntropyField& field,
                                             const std::vector<double>& seeds,
                                             std::vector<RarefactionWedge> wedges) {
    CharacteristicsDiagram diag;
    diag.shocks = track_fronts(field, flux);
    diag.rarefactions = std::move(wedges);
    const double t_max = field.times.back();

    for (double x0 : seeds) {
        CharacteristicLine line;
        line.x0 = x0;
        line.slope = flux.fbar(s0(x0));
        line.t_end = t_max;
        for (const FrontTrack& shock : diag.shocks) {
            for (std::size_t i = 0; i + 1 < shock.t.size(); ++i) {
                const double ta = shock.t[i], tb = shock.t[i + 1];
                const double ga = (x0 + line.slope * ta) - shock.x[i];
                const double gb = (x0 + line.slope * tb) - shock.x[i + 1];
                if (ga == 0.0 || ga * gb < 0.0) {
                    const double frac = (ga == gb) ? 0.0 : ga / (ga - gb);
                    const double tc = ta + frac * (tb - ta);
                    if (tc > 1e-12 && tc < line.t_end) line.t_end = tc;
                    break;
                }
            }
        }
        diag.characteristics.push_back(line);
    }
    return diag;
}

// ---------------------------------------------------------------------------
// Backward reachability
// ---------------------------------------------------------------------------

ReachabilityResult backward_reachability(const Profile1D& s0, const ReducedFlux& flux,
                                         double T, double x, double sigma_e,
                                         const std::vector<RarefactionWedge>& fans,
                                         double tol) {
    ReachabilityResult out;
    const double x0 = x - T * flux.fbar(sigma_e);

    // Jump-aware distance of sigma_e to the initial datum at the foot.
    double r = std::abs(sigma_e - s0(x0));
    for (double bp : s0.breakpoints()) {
        if (std::abs(x0 - bp) <= 10.0 * tol * (1.0 + std::abs(bp))) {
            r = std::min(r, std::abs(sigma_e - s0.left_limit(bp)));
            r = std::min(r, std::abs(sigma_e - s0.right_limit(bp)));
        }
    }
    out.residual = r;
    if (r <= tol) {
        out.kind = ReachabilityKind::Reached;
        out.origins = {x0};
        return out;
    }
    for (const RarefactionWedge& fan : fans) {
        if (T <= fan.apex_t) continue;
        const double xi = (x - fan.apex_x) / (T - fan.apex_t);
        if (xi < fan.speed_lo - tol || xi > fan.speed_hi + tol) continue;
        if (std::abs(flux.fbar(sigma_e) - xi) <= tol) {
            out.kind = ReachabilityKind::Rarefaction;
            return out;
        }
    }
    out.kind = ReachabilityKind::Ambiguous;
    return out;
}

// ---------------------------------------------------------------------------
// The quartic construction
// ---------------------------------------------------------------------------

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

// F'(r) = r^3/3 - r inverted on one of its three monotone branches.
double invert_fprime(double v, double r_lo, double r_hi) {
    auto g = [v](double r) { return r * r * r / 3.0 - r - v; };
    const double glo = g(r_lo), ghi = g(r_hi);
    if (glo == 0.0) return r_lo;
    if (ghi == 0.0) return r_hi;
    if (glo * ghi > 0.0) {
        // Clamp values that fall off the branch by rounding.
        return std::abs(glo) < std::abs(ghi) ? r_lo : r_hi;
    }
    return bisect(g, r_lo, r_hi, 1e-15);
}

Profile1D make_section433_profile(double xi, double x_star) {
    auto fn = [xi, x_star](double x) {
        // Seam values are exact algebraic landmarks; the bisection loses
        // accuracy right at them because F'' vanishes there.
        if (x == -2.0 / 3.0) return -1.0;
        if (x == 2.0 / 3.0) return 1.0;
        if (x == 1.0) return kSqrt3;
        if (x <= x_star) return invert_fprime(2.0 * x_star + 2.0, -kSqrt3, -1.0);
        if (x < -2.0 / 3.0) return invert_fprime(2.0 * x + 2.0, -kSqrt3, -1.0);
        if (x <= 2.0 / 3.0) return invert_fprime(-x, -1.0, 1.0);
        if (x < 1.0) return invert_fprime(2.0 * x - 2.0, 1.0, kSqrt3);
        if (x < xi) return invert_fprime(-(2.0 / 3.0) * (x - 1.0) / (xi - 1.0), 1.0, kSqrt3);
        return 1.0;
    };
    return Profile1D::piecewise(fn, {x_star, -2.0 / 3.0, 2.0 / 3.0, 1.0, xi},
                                std::min(-4.0, x_star - 2.0), xi + 3.0);
}

} // namespace

Section433Profile build_section433_profile(double xi_param, int n_cells) {
    if (!(xi_param > 1.0))
        throw BadInput("build_section433_profile: xi must exceed 1");

    ReducedFlux flux = ReducedFlux::polynomial({0.0, -1.0, 0.0, 1.0 / 3.0}, {1.0},
                                               {-2.0, 2.0});

    Section433Landmarks lm;
    lm.xi_param = xi_param;
    lm.t_xi = 1.5 * (xi_param - 1.0);
    lm.s1_initial_speed = 0.0; // F even, states -1 / +1
    const double F1 = flux.primitive(1.0);
    const double Fs3 = flux.primitive(kSqrt3);
    lm.s2_initial_speed = (F1 - Fs3) / (1.0 - kSqrt3);

    // Stage 1: provisional profile with x* parked next to -1 (its own
    // characteristic is then far too slow to disturb the collision).
    const double x_star_prov = -0.999;
    Profile1D provisional = make_section433_profile(xi_param, x_star_prov);

    const double domain_lo = -3.0;
    const double domain_hi = xi_param + 1.5;
    const double t_run = lm.t_xi + 3.0;
    Grid1D grid(domain_lo, domain_hi, n_cells);
    std::vector<double> rec;
    for (double t = 0.0; t <= t_run + 1e-9; t += 0.02) rec.push_back(t);
    EntropyField field =
        godunov(flux, grid, cell_averages(provisional, grid), t_run, 0.9, rec);

    // Identify s1 (parked at x ~ 0 from t ~ 1) and s2 (born near x = 1 at
    // t ~ t_xi, moving left), then extrapolate their gap to zero.
    auto tracks = track_fronts(field, flux);
    const FrontTrack* s1 = nullptr;
    const FrontTrack* s2 = nullptr;
    for (const auto& tr : tracks) {
        if (tr.t.size() < 5) continue;
        if (!s1 && std::abs(tr.x.front()) < 0.2 && tr.t.front() < 1.5) s1 = &tr;
        if (!s2 && tr.x.front() > 0.5 && tr.t.front() > lm.t_xi - 0.5) s2 = &tr;
    }
    if (!s1 || !s2)
        throw ProfileConstructionFailed(
            "build_section433_profile: could not identify both shocks in the field");

    // Clean samples of s2: those still well separated from s1.
    std::vector<double> ts, xs;
    for (std::size_t i = 0; i < s2->t.size(); ++i) {
        if (s2->x[i] > 0.08 && s2->x[i] < 0.9) {
            ts.push_back(s2->t[i]);
            xs.push_back(s2->x[i]);
        }
    }
    if (ts.size() < 6)
        throw ProfileConstructionFailed("build_section433_profile: s2 track too short");
    // Quadratic fit of the tail of the track, extrapolated to x = 0.
    const std::size_t tail = std::min<std::size_t>(ts.size(), 25);
    FrontTrack tail_track;
    for (std::size_t i = ts.size() - tail; i < ts.size(); ++i) {
        tail_track.t.push_back(ts[i]);
        tail_track.x.push_back(xs[i]);
    }
    const double t_ref = tail_track.t.front();
    const double v_ref = front_speed_at(tail_track, t_ref, tail_track.t.back() - t_ref + 1e-9,
                                        true);
    // x(t) ~ x_ref + v_ref (t - t_ref) + 0.5 a (t - t_ref)^2; recover a from
    // the end point and solve for the crossing of x = 0.
    const double span = tail_track.t.back() - t_ref;
    const double x_ref = tail_track.x.front();
    const double a2 =
        2.0 * (tail_track.x.back() - x_ref - v_ref * span) / (span * span);
    double t_star = t_ref - x_ref / v_ref; // linear seed
    for (int it = 0; it < 50; ++it) {
        const double s = t_star - t_ref;
        const double val = x_ref + v_ref * s + 0.5 * a2 * s * s;
        const double der = v_ref + a2 * s;
        if (std::abs(der) < 1e-12) break;
        t_star -= val / der;
    }
    if (!(t_star > lm.t_xi))
        throw ProfileConstructionFailed("build_section433_profile: t* <= t_xi");

    lm.t_star = t_star;
    lm.x_star = -2.0 * t_star / (1.0 + 2.0 * t_star);
    lm.sigma_star = invert_fprime(2.0 * lm.x_star + 2.0, -kSqrt3, -1.0);

    // Tangency state of the chord to 1 on the lower envelope of F; a
    // property of the flux alone.
    {
        const RiemannFan fan = riemann_fan(flux, -kSqrt3, 1.0);
        lm.r1 = fan.waves.front().state_hi;
        for (const Wave& w : fan.waves)
            if (w.type == Wave::Type::Rarefaction) lm.r1 = w.state_hi;
    }
    lm.s3_speed = flux.fbar(lm.r1);

    Section433Profile out{make_section433_profile(xi_param, lm.x_star), std::move(flux), lm};
    return out;
}

} // namespace mfgclaw
