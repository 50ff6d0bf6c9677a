#include "mfgclaw/viscous.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mfgclaw/errors.hpp"

namespace mfgclaw {

double ViscousField::value_at(double t, double x) const {
    std::size_t best = 0;
    double gap = std::abs(times[0] - t);
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double d = std::abs(times[k] - t);
        if (d < gap) {
            gap = d;
            best = k;
        }
    }
    return values[best][grid.cell_of(x)];
}

ViscousField viscous_solve(const ReducedFlux& flux, const Profile1D& s0, double eps,
                           double T, const Grid1D& grid, std::vector<double> record_times) {
    if (!(eps > 0.0)) throw BadInput("viscous_solve: eps must be positive");

    // Pad the requested window so boundary layers stay outside it.
    auto [s_min, s_max] = s0.value_range(grid.x_min - 1.0, grid.x_max + 1.0);
    const double lambda = flux.max_abs_fbar(s_min - 1e-9, s_max + 1e-9);
    const double pad = lambda * T + 4.0 * std::sqrt(std::max(eps * T, 0.0)) + 2.0 * grid.h();
    const int pad_cells = static_cast<int>(std::ceil(pad / grid.h()));
    Grid1D wide(grid.x_min - pad_cells * grid.h(), grid.x_max + pad_cells * grid.h(),
                grid.n_cells + 2 * pad_cells);
    const double h = wide.h();

    const double dt = 0.9 / (lambda / h + 2.0 * eps / (h * h));
    if (!(dt > 1e-12 * (1.0 + T)))
        throw StiffnessError("viscous_solve: time step underflow; refine eps or the grid");

    if (record_times.empty()) record_times = {0.0, T};
    record_times.push_back(0.0);
    record_times.push_back(T);
    std::sort(record_times.begin(), record_times.end());
    record_times.erase(std::unique(record_times.begin(), record_times.end(),
                                   [](double a, double b) { return std::abs(a - b) < 1e-13; }),
                       record_times.end());

    const std::vector<double> stats = flux.stationary_points(s_min - 1e-9, s_max + 1e-9);
    std::vector<double> u = cell_averages(s0, wide);
    const int n = wide.n_cells;

    ViscousField out;
    out.grid = wide;
    out.epsilon = eps;

    double t = 0.0;
    std::size_t next_rec = 0;
    auto maybe_record = [&]() {
        while (next_rec < record_times.size() &&
               std::abs(record_times[next_rec] - t) < 1e-12 * (1.0 + T)) {
            out.times.push_back(t);
            out.values.push_back(u);
            ++next_rec;
        }
    };
    maybe_record();

    std::vector<double> fluxes(n + 1);
    while (t < T - 1e-13 * (1.0 + T)) {
        double step = std::min(dt, T - t);
        if (next_rec < record_times.size()) step = std::min(step, record_times[next_rec] - t);
        if (step <= 0.0) break;

        for (int i = 0; i <= n; ++i) {
            const double ul = (i == 0) ? u[0] : u[i - 1];
            const double ur = (i == n) ? u[n - 1] : u[i];
            fluxes[i] = godunov_interface_flux(flux, ul, ur, stats);
        }
        std::vector<double> next(n);
        const double lam = step / h;
        const double mu = eps * step / (h * h);
        for (int i = 0; i < n; ++i) {
            const double um = (i == 0) ? u[0] : u[i - 1];
            const double up = (i == n - 1) ? u[n - 1] : u[i + 1];
            next[i] = u[i] - lam * (fluxes[i + 1] - fluxes[i]) + mu * (up - 2.0 * u[i] + um);
        }
        u.swap(next);
        t += step;
        maybe_record();
    }
    if (out.times.empty() || std::abs(out.times.back() - t) > 1e-12 * (1.0 + T)) {
        out.times.push_back(t);
        out.values.push_back(u);
    }
    return out;
}

std::vector<ViscosityStudyRow> vanishing_viscosity_study(const ReducedFlux& flux,
                                                         const Profile1D& s0,
                                                         const std::vector<double>& eps_list,
                                                         double T, const Grid1D& grid) {
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            throw BadInput("vanishing_viscosity_study: eps list must decrease");

    // Entropy reference: Godunov at twice the resolution on the padded domain.
    auto [s_min, s_max] = s0.value_range(grid.x_min - 1.0, grid.x_max + 1.0);
    const double lambda = flux.max_abs_fbar(s_min - 1e-9, s_max + 1e-9);
    const double eps_max = eps_list.empty() ? 0.0 : eps_list.front();
    const double pad =
        lambda * T + 4.0 * std::sqrt(std::max(eps_max * T, 0.0)) + 2.0 * grid.h();
    const int pad_cells = static_cast<int>(std::ceil(pad / grid.h()));
    Grid1D wide(grid.x_min - pad_cells * grid.h(), grid.x_max + pad_cells * grid.h(),
                grid.n_cells + 2 * pad_cells);
    Grid1D fine(wide.x_min, wide.x_max, 2 * wide.n_cells);
    EntropyField ref = godunov(flux, fine, cell_averages(s0, fine), T);
    const std::vector<double>& ref_u = ref.values.back();
    auto ref_at = [&](double x) { return ref_u[fine.cell_of(x)]; };

    // Central 80% of the padded domain.
    const double span = wide.x_max - wide.x_min;
    const double win_lo = wide.x_min + 0.1 * span;
    const double win_hi = wide.x_max - 0.1 * span;

    std::vector<ViscosityStudyRow> rows;
    for (double eps : eps_list) {
        const auto start = std::chrono::steady_clock::now();
        const ViscousField vf = viscous_solve(flux, s0, eps, T, grid);
        const auto stop = std::chrono::steady_clock::now();
        ViscosityStudyRow row;
        row.epsilon = eps;
        row.l1_distance =
            l1_distance_to(vf.values.back(), vf.grid, ref_at, win_lo, win_hi);
        row.runtime_ms =
            std::chrono::duration_cast<std::chrono::microseconds>(stop - start).count() /
            1000.0;
        rows.push_back(row);
    }
    return rows;
}

} // namespace mfgclaw
