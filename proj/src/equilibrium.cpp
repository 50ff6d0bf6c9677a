#include "mfgclaw/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfgclaw/errors.hpp"
#include "mfgclaw/numerics.hpp"

namespace mfgclaw {

double sigma_map(const GameModel& model, double sigma, double t,
                 const EmpiricalMeasure& m) {
    if (t == 0.0) return model.sigma0.evaluate(m);
    std::vector<Vec> images(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        try {
            images[i] = optimal_point(model, t, m.atom(i), sigma).x_star;
        } catch (const NewtonDiverged& e) {
            throw NewtonDiverged("sigma_map: atom " + std::to_string(i) + ": " + e.what());
        }
    }
    return model.sigma0.evaluate(EmpiricalMeasure(std::move(images), m.weights()));
}

std::pair<double, double> default_sigma_range(const GameModel& model) {
    auto [lo, hi] = model.sigma0.value_range_hint();
    const double w = std::max(hi - lo, 1.0);
    return {lo - 0.1 * w, hi + 0.1 * w};
}

namespace {

double rho(const GameModel& model, double sigma, double t, const EmpiricalMeasure& m) {
    return sigma - sigma_map(model, sigma, t, m);
}

// Central difference of Sigma0 in sigma; NaN when it cannot be formed.
double dsigma0_fd(const GameModel& model, double sigma, double t,
                  const EmpiricalMeasure& m) {
    const double h = fd_step(sigma, 1e-5);
    try {
        return (sigma_map(model, sigma + h, t, m) - sigma_map(model, sigma - h, t, m)) /
               (2.0 * h);
    } catch (const SolverError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

} // namespace

EquilibriumReport find_equilibria(const GameModel& model, double t,
                                  const EmpiricalMeasure& m,
                                  std::pair<double, double> sigma_range, int n_scan) {
    if (n_scan < 3) throw BadScan("find_equilibria: scan grid needs at least 3 points");
    const auto [lo, hi] = sigma_range;
    if (!(lo < hi)) throw BadScan("find_equilibria: empty sigma range");

    EquilibriumReport rep;
    rep.scan_range = sigma_range;
    rep.t = t;
    rep.mean = m.mean();
    const auto hint = model.sigma0.value_range_hint();
    rep.range_warning = hint.first < lo - 1e-12 || hint.second > hi + 1e-12;

    std::vector<double> grid(n_scan), val(n_scan);
    for (int i = 0; i < n_scan; ++i) {
        grid[i] = lo + (hi - lo) * i / (n_scan - 1);
        val[i] = rho(model, grid[i], t, m);
    }

    auto rho_here = [&](double s) { return rho(model, s, t, m); };

    std::vector<EquilibriumRoot> roots;
    for (int i = 0; i + 1 < n_scan; ++i) {
        double a = grid[i], b = grid[i + 1];
        double fa = val[i], fb = val[i + 1];
        if (fa == 0.0) {
            roots.push_back({a, 0.0, 0.0});
            continue;
        }
        if (fa * fb >= 0.0) continue;

        // Bisect the bracket down to 1e-10.
        while (b - a > 1e-10) {
            const double mid = 0.5 * (a + b);
            const double fm = rho_here(mid);
            if (fm == 0.0) {
                a = b = mid;
                fa = fb = 0.0;
                break;
            }
            if (fa * fm < 0.0) {
                b = mid;
                fb = fm;
            } else {
                a = mid;
                fa = fm;
            }
        }
        double s = 0.5 * (a + b);
        double fs = rho_here(s);
        // Secant polish.
        double s_prev = a, f_prev = fa;
        for (int k = 0; k < 30 && std::abs(fs) > 1e-15 * (1.0 + std::abs(s)); ++k) {
            const double denom = fs - f_prev;
            if (denom == 0.0) break;
            const double s_next = s - fs * (s - s_prev) / denom;
            if (!std::isfinite(s_next) || s_next < a - 1e-9 || s_next > b + 1e-9) break;
            s_prev = s;
            f_prev = fs;
            s = s_next;
            fs = rho_here(s);
        }
        if (std::abs(fs) <= 1e-8) {
            roots.push_back({s, std::abs(fs), 0.0});
        } else {
            rep.jump_crossings.emplace_back(a, b);
        }
    }
    if (val[n_scan - 1] == 0.0) roots.push_back({grid[n_scan - 1], 0.0, 0.0});

    std::sort(roots.begin(), roots.end(),
              [](const EquilibriumRoot& x, const EquilibriumRoot& y) {
                  return x.sigma < y.sigma;
              });
    // Merge roots closer than 1e-6, keeping the smaller residual.
    for (const auto& r : roots) {
        if (!rep.roots.empty() && r.sigma - rep.roots.back().sigma <= 1e-6) {
            if (r.residual < rep.roots.back().residual) rep.roots.back() = r;
        } else {
            rep.roots.push_back(r);
        }
    }
    for (auto& r : rep.roots) r.dSigma0 = dsigma0_fd(model, r.sigma, t, m);

    rep.classification = rep.roots.empty()
                             ? EquilibriumClass::None
                             : (rep.roots.size() == 1 ? EquilibriumClass::Unique
                                                      : EquilibriumClass::Multiple);
    return rep;
}

NashCheck verify_nash(const GameModel& model, double t, const EmpiricalMeasure& m,
                      double sigma_star) {
    NashCheck out;
    if (!std::isfinite(sigma_star)) throw BadInput("verify_nash: sigma* not finite");

    std::vector<Vec> images(m.size());
    double gap = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const OptimalPointResult opt = optimal_point(model, t, m.atom(i), sigma_star);
        images[i] = opt.x_star;
        const double v = hopf_lax_value(model, t, m.atom(i), sigma_star);
        gap = std::max(gap, std::abs(opt.value - v));
    }
    const EmpiricalMeasure image_measure(std::move(images), m.weights());
    out.residual = std::abs(sigma_star - model.sigma0.evaluate(image_measure));
    out.optimality_gap = gap;
    out.ok = out.residual <= 1e-8 && gap <= 1e-8;
    return out;
}

double master_field(const GameModel& model, double t, const Vec& x,
                    const EmpiricalMeasure& m, std::optional<int> root_index,
                    std::optional<std::pair<double, double>> sigma_range, int n_scan) {
    const auto range = sigma_range ? *sigma_range : default_sigma_range(model);
    const EquilibriumReport rep = find_equilibria(model, t, m, range, n_scan);
    if (rep.classification == EquilibriumClass::None)
        throw NoEquilibrium("master_field: no equilibrium at this (t, m)");
    std::size_t idx = 0;
    if (rep.classification == EquilibriumClass::Multiple) {
        if (!root_index)
            throw MultipleEquilibria(
                "master_field: multiple equilibria; an explicit root index is required");
        if (*root_index < 0 || static_cast<std::size_t>(*root_index) >= rep.roots.size())
            throw BadInput("master_field: root index out of range");
        idx = static_cast<std::size_t>(*root_index);
    }
    return hopf_lax_value(model, t, x, rep.roots[idx].sigma);
}

double solve_sigma_near(const GameModel& model, double t, const EmpiricalMeasure& m,
                        double sigma_init, double max_wander) {
    double s0 = sigma_init;
    double s1 = sigma_init + 1e-7 * (1.0 + std::abs(sigma_init));
    double f0 = rho(model, s0, t, m);
    double f1 = rho(model, s1, t, m);
    const double wander = max_wander;
    for (int k = 0; k < 80; ++k) {
        if (std::abs(f1) <= 1e-14 * (1.0 + std::abs(s1))) return s1;
        const double denom = f1 - f0;
        if (denom == 0.0) break;
        double s2 = s1 - f1 * (s1 - s0) / denom;
        if (!std::isfinite(s2)) break;
        if (std::abs(s2 - sigma_init) > wander)
            throw StencilCrossesSingularity(
                "solve_sigma_near: root iteration left the local branch");
        s0 = s1;
        f0 = f1;
        s1 = s2;
        f1 = rho(model, s1, t, m);
    }
    if (std::abs(f1) <= 1e-10 * (1.0 + std::abs(s1))) return s1;
    throw StencilCrossesSingularity("solve_sigma_near: no convergence near sigma_init");
}

namespace {

// Branch-tracked sigma evaluation for finite-difference stencils: the full
// scan runs once at the stencil center, perturbed points follow that root.
struct SigmaStencil {
    const GameModel& model;
    double base_sigma;

    double at(double t, const std::vector<Vec>& atoms) const {
        const EmpiricalMeasure m = EmpiricalMeasure::uniform(atoms);
        return solve_sigma_near(model, t, m, base_sigma,
                                0.5 * (1.0 + std::abs(base_sigma)));
    }
};

// Second-order time derivative that stays inside t >= 0.
double time_derivative(const std::function<double(double)>& f, double t, double h) {
    if (t >= h) return (f(t + h) - f(t - h)) / (2.0 * h);
    return (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h);
}

} // namespace

double nplayer_residual(const GameModel& model, double t, const std::vector<Vec>& atoms,
                        double h_fd, std::optional<std::pair<double, double>> sigma_range,
                        int n_scan) {
    if (atoms.empty()) throw BadInput("nplayer_residual: no atoms");
    const auto range = sigma_range ? *sigma_range : default_sigma_range(model);
    const EmpiricalMeasure m = EmpiricalMeasure::uniform(atoms);
    const EquilibriumReport rep = find_equilibria(model, t, m, range, n_scan);
    if (rep.classification != EquilibriumClass::Unique)
        throw StencilCrossesSingularity(
            "nplayer_residual: equilibrium not unique at the stencil center");
    const double sigma_c = rep.roots.front().sigma;

    SigmaStencil st{model, sigma_c};
    const std::size_t N = atoms.size();
    const std::size_t d = atoms.front().size();

    const double ht = fd_step(t, h_fd);
    const double dt =
        time_derivative([&](double tt) { return st.at(tt, atoms); }, t, ht);

    // Wave speed per atom: DH(D_x v(t, x_i, sigma)) = DH(D_x g(x*_i, sigma)).
    double advect = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const Vec xs = optimal_point(model, t, atoms[i], sigma_c).x_star;
        const Vec speed = model.hamiltonian.grad(model.cost.grad_x(xs, sigma_c));
        for (std::size_t j = 0; j < d; ++j) {
            const double hx = fd_step(atoms[i][j], h_fd);
            std::vector<Vec> plus = atoms, minus = atoms;
            plus[i][j] += hx;
            minus[i][j] -= hx;
            advect += speed[j] * (st.at(t, plus) - st.at(t, minus)) / (2.0 * hx);
        }
    }
    return dt + advect;
}

double master_residual(const GameModel& model, double t, const Vec& x,
                       const std::vector<Vec>& atoms, double h_fd,
                       std::optional<std::pair<double, double>> sigma_range, int n_scan) {
    if (atoms.empty()) throw BadInput("master_residual: no atoms");
    const auto range = sigma_range ? *sigma_range : default_sigma_range(model);
    const EmpiricalMeasure m = EmpiricalMeasure::uniform(atoms);
    const EquilibriumReport rep = find_equilibria(model, t, m, range, n_scan);
    if (rep.classification != EquilibriumClass::Unique)
        throw StencilCrossesSingularity(
            "master_residual: equilibrium not unique at the stencil center");
    const double sigma_c = rep.roots.front().sigma;

    SigmaStencil st{model, sigma_c};
    const std::size_t N = atoms.size();
    const std::size_t d = atoms.front().size();

    auto u_eval = [&](double tt, const Vec& xx, const std::vector<Vec>& aa) {
        return hopf_lax_value(model, tt, xx, st.at(tt, aa));
    };

    const double ht = fd_step(t, h_fd);
    const double ut =
        time_derivative([&](double tt) { return u_eval(tt, x, atoms); }, t, ht);

    Vec du(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        const double hx = fd_step(x[j], h_fd);
        Vec xp = x, xm = x;
        xp[j] += hx;
        xm[j] -= hx;
        du[j] = (u_eval(t, xp, atoms) - u_eval(t, xm, atoms)) / (2.0 * hx);
    }

    // Integral term via the empirical projection D_m u(m^N)(x_i) = N D_{x_i} u_N.
    double interaction = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        // D_x u(t, x_i, m) with sigma frozen at the center root.
        Vec du_at_atom(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
            const double hx = fd_step(atoms[i][j], h_fd);
            Vec xp = atoms[i], xm = atoms[i];
            xp[j] += hx;
            xm[j] -= hx;
            du_at_atom[j] = (hopf_lax_value(model, t, xp, sigma_c) -
                             hopf_lax_value(model, t, xm, sigma_c)) /
                            (2.0 * hx);
        }
        const Vec speed = model.hamiltonian.grad(du_at_atom);
        for (std::size_t j = 0; j < d; ++j) {
            const double hx = fd_step(atoms[i][j], h_fd);
            std::vector<Vec> plus = atoms, minus = atoms;
            plus[i][j] += hx;
            minus[i][j] -= hx;
            interaction +=
                speed[j] * (u_eval(t, x, plus) - u_eval(t, x, minus)) / (2.0 * hx);
        }
    }

    return ut + model.hamiltonian.H(du) + interaction;
}

} // namespace mfgclaw
