#include "mfgclaw/hjb.hpp"

#include <cmath>
#include <limits>

#include "mfgclaw/errors.hpp"
#include "mfgclaw/numerics.hpp"

namespace mfgclaw {

namespace {

Vec implicit_residual(const GameModel& model, double t, const Vec& x, double sigma,
                      const Vec& y) {
    return sub(add(y, scale(t, model.hamiltonian.grad(model.cost.grad_x(y, sigma)))), x);
}

Mat implicit_jacobian(const GameModel& model, double t, double sigma, const Vec& y) {
    const Vec p = model.cost.grad_x(y, sigma);
    const Mat d2h = model.hamiltonian.hess(p);
    const Mat d2g = model.cost.hess_x(y, sigma);
    return Mat::identity(y.size()) + (d2h * d2g).scaled(t);
}

double cost_at(const GameModel& model, double t, const Vec& x, double sigma, const Vec& y) {
    if (t <= 0.0) return model.cost.g(y, sigma);
    return t * model.hamiltonian.L(scale(1.0 / t, sub(x, y))) + model.cost.g(y, sigma);
}

// Bracketed grid search fallback when Newton stalls (nonsmooth or barely
// convex data). 1-D only gets a fine scan, higher d a coarse box scan
// followed by a short polish.
Vec grid_minimize(const GameModel& model, double t, const Vec& x, double sigma) {
    const std::size_t d = x.size();
    const double radius =
        10.0 * (1.0 + norm(x)) + 10.0 * t * (1.0 + norm(model.cost.grad_x(x, sigma)));
    Vec best = x;
    double best_val = cost_at(model, t, x, sigma, x);
    if (d == 1) {
        const int n = 40001;
        for (int i = 0; i <= n; ++i) {
            Vec y = {x[0] - radius + 2.0 * radius * i / n};
            const double v = cost_at(model, t, x, sigma, y);
            if (v < best_val) {
                best_val = v;
                best = y;
            }
        }
        const double h = 2.0 * radius / n;
        auto obj = [&](double yy) { return -cost_at(model, t, x, sigma, {yy}); };
        best = {golden_max(obj, best[0] - h, best[0] + h)};
    } else {
        const int n = 21;
        Vec y(d);
        std::vector<int> idx(d, 0);
        for (;;) {
            for (std::size_t j = 0; j < d; ++j)
                y[j] = x[j] - radius + 2.0 * radius * idx[j] / (n - 1);
            const double v = cost_at(model, t, x, sigma, y);
            if (v < best_val) {
                best_val = v;
                best = y;
            }
            std::size_t j = 0;
            while (j < d && ++idx[j] == n) idx[j++] = 0;
            if (j == d) break;
        }
    }
    return best;
}

} // namespace

OptimalPointResult optimal_point(const GameModel& model, double t, const Vec& x,
                                 double sigma) {
    OptimalPointResult out;
    if (t < 0.0) throw BadInput("optimal_point: t must be nonnegative");
    if (t == 0.0) {
        out.x_star = x;
        out.value = model.cost.g(x, sigma);
        out.jacobian_dx = Mat::identity(x.size());
        out.residual = 0.0;
        return out;
    }

    const double tol = 1e-13 * (1.0 + norm(x));
    Vec y = x;
    Vec r = implicit_residual(model, t, x, sigma, y);
    double rn = norm(r);
    int iter = 0;
    bool stalled = false;
    while (rn > tol && iter < 100) {
        Mat J = implicit_jacobian(model, t, sigma, y);
        Vec step;
        try {
            step = J.solve(r);
        } catch (const SingularSensitivity&) {
            stalled = true;
            break;
        }
        // Damping: halve until the residual actually decreases.
        double lambda = 1.0;
        Vec y_next = sub(y, step);
        Vec r_next = implicit_residual(model, t, x, sigma, y_next);
        double rn_next = norm(r_next);
        int halvings = 0;
        while (rn_next >= rn && halvings < 60) {
            lambda *= 0.5;
            y_next = sub(y, scale(lambda, step));
            r_next = implicit_residual(model, t, x, sigma, y_next);
            rn_next = norm(r_next);
            ++halvings;
        }
        if (rn_next >= rn) {
            stalled = true;
            break;
        }
        y = y_next;
        r = r_next;
        rn = rn_next;
        ++iter;
    }

    if (rn > tol || stalled) {
        y = grid_minimize(model, t, x, sigma);
        // One clean-up Newton pass from the grid point.
        for (int k = 0; k < 50; ++k) {
            r = implicit_residual(model, t, x, sigma, y);
            rn = norm(r);
            if (rn <= tol) break;
            Mat J = implicit_jacobian(model, t, sigma, y);
            y = sub(y, J.solve(r));
        }
        r = implicit_residual(model, t, x, sigma, y);
        rn = norm(r);
        if (rn > 1e-10 * (1.0 + norm(x)))
            throw NewtonDiverged("optimal_point: no convergence after grid fallback");
    }

    out.x_star = y;
    out.value = cost_at(model, t, x, sigma, y);
    out.newton_iterations = iter;
    out.residual = rn;
    out.jacobian_dx = implicit_jacobian(model, t, sigma, y).inverse();
    return out;
}

double hopf_lax_value(const GameModel& model, double t, const Vec& x, double sigma) {
    if (t == 0.0) return model.cost.g(x, sigma);
    try {
        return optimal_point(model, t, x, sigma).value;
    } catch (const NewtonDiverged&) {
        throw MinimizationFailed("hopf_lax_value: minimizer search failed");
    }
}

Mat sensitivity_matrix(const GameModel& model, double t, const Vec& z, double sigma) {
    const std::size_t d = z.size();
    if (t == 0.0) return Mat(d, d);
    const Vec p = model.cost.grad_x(z, sigma);
    const Mat d2h = model.hamiltonian.hess(p);
    const Mat d2g = model.cost.hess_x(z, sigma);
    const Mat A = Mat::identity(d) + (d2h * d2g).scaled(t);
    return (A.inverse() * d2h).scaled(-t);
}

Vec dsigma_optimal(const GameModel& model, double t, const Vec& x, double sigma) {
    if (t == 0.0) return Vec(x.size(), 0.0);
    const OptimalPointResult opt = optimal_point(model, t, x, sigma);
    const Mat M = sensitivity_matrix(model, t, opt.x_star, sigma);
    return M * model.cost.dsigma_grad_x(opt.x_star, sigma);
}

} // namespace mfgclaw
