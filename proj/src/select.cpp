#include "mfgclaw/select.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "mfgclaw/errors.hpp"

namespace mfgclaw {

namespace {

void require_reduced(const GameModel& model, const char* who) {
    if (!model.reduced())
        throw ReducedRegimeRequired(std::string(who) +
                                    ": needs LINEAR cost + MEAN-PROFILE sigma0 + flux");
}

// Distance of sigma_e to the initial datum at the characteristic foot,
// measured against the nearest one-sided limit when the foot lands on a jump.
double jump_aware_residual(const Profile1D& s0, double foot, double sigma_e, double tol) {
    double r = std::abs(sigma_e - s0(foot));
    const double window = std::max(1e-8 * (1.0 + std::abs(foot)), tol);
    for (double bp : s0.breakpoints()) {
        if (std::abs(foot - bp) <= window) {
            r = std::min(r, std::abs(sigma_e - s0.left_limit(bp)));
            r = std::min(r, std::abs(sigma_e - s0.right_limit(bp)));
        }
    }
    return r;
}

} // namespace

std::function<double(double, double)> default_entropy_evaluator(const GameModel& model) {
    require_reduced(model, "default_entropy_evaluator");
    const Profile1D& s0 = model.sigma0.profile();
    const ReducedFlux& flux = *model.flux;

    if (s0.is_step()) {
        auto fan = std::make_shared<RiemannFan>(
            riemann_fan(flux, s0.step_left(), s0.step_right()));
        const double x_jump = s0.step_jump_location();
        ReducedFlux flux_copy = flux;
        Profile1D s0_copy = s0;
        return [fan, x_jump, flux_copy, s0_copy](double t, double x) {
            if (t <= 0.0) return s0_copy(x);
            return fan->value(flux_copy, (x - x_jump) / t);
        };
    }
    auto [lo, hi] = s0.value_range(-20.0, 20.0);
    if (flux.min_fbar_prime(lo - 0.1, hi + 0.1) > 1e-12) {
        ReducedFlux flux_copy = flux;
        Profile1D s0_copy = s0;
        return [flux_copy, s0_copy](double t, double x) {
            return lax_oleinik(flux_copy, s0_copy, t, x);
        };
    }
    throw ReducedRegimeRequired(
        "default_entropy_evaluator: nonconvex flux with smooth data; supply a "
        "field-based evaluator");
}

SelectionEntry classify_point(const GameModel& model, double T, const EmpiricalMeasure& m,
                              const std::function<double(double, double)>& entropy_value,
                              double tol, int n_scan) {
    require_reduced(model, "classify_point");
    const Profile1D& s0 = model.sigma0.profile();
    const ReducedFlux& flux = *model.flux;

    // Default threshold: the exact evaluators have no grid smearing, so the
    // h-dependent part of max(1e-6, 10 h Lip(s0)) vanishes. Field-based
    // callers pass their own tol.
    if (tol <= 0.0) tol = 1e-6;

    SelectionEntry e;
    e.T = T;
    e.x = dot(m.mean(), model.sigma0.zeta());
    e.sigma_entropy = entropy_value(T, e.x);

    const double foot = e.x - T * flux.fbar(e.sigma_entropy);
    e.selection_residual = jump_aware_residual(s0, foot, e.sigma_entropy, tol);

    EquilibriumReport rep =
        find_equilibria(model, T, m, default_sigma_range(model), n_scan);
    for (const auto& r : rep.roots) e.equilibria.push_back(r.sigma);

    // A jump crossing whose value matches a one-sided limit marks the
    // randomization boundary of the two extremal equilibria; flag only.
    for (const auto& jc : rep.jump_crossings) {
        const double s = 0.5 * (jc.first + jc.second);
        const double ft = e.x - T * flux.fbar(s);
        if (jump_aware_residual(s0, ft, s, tol) <= tol) e.boundary_flag = true;
    }

    if (e.selection_residual <= tol) {
        // The entropy value is a fixed point; make sure the scan did not
        // miss it as a listed root.
        bool listed = false;
        for (double r : e.equilibria)
            if (std::abs(r - e.sigma_entropy) <= std::max(tol, 1e-6)) listed = true;
        if (!listed) {
            try {
                const double polished =
                    solve_sigma_near(model, T, m, e.sigma_entropy,
                                     0.5 * (1.0 + std::abs(e.sigma_entropy)));
                e.equilibria.push_back(polished);
                std::sort(e.equilibria.begin(), e.equilibria.end());
                listed = true;
            } catch (const SolverError&) {
            }
        }
        e.classification = listed ? Selection::Selected
                                  : (e.equilibria.empty() ? Selection::NoEquilibrium
                                                          : Selection::NotSelected);
    } else {
        e.classification =
            e.equilibria.empty() ? Selection::NoEquilibrium : Selection::NotSelected;
    }

    if (e.selection_residual >= 0.5 * tol && e.selection_residual <= 2.0 * tol)
        e.boundary_flag = true;
    return e;
}

SelectionEntry classify_point(const GameModel& model, double T, const EmpiricalMeasure& m,
                              double tol, int n_scan) {
    return classify_point(model, T, m, default_entropy_evaluator(model), tol, n_scan);
}

SelectionReport region_scan(const GameModel& model, double T,
                            const std::vector<double>& x_grid,
                            const std::function<double(double, double)>& entropy_value,
                            double tol, int n_scan) {
    require_reduced(model, "region_scan");
    SelectionReport rep;
    rep.tol = tol > 0.0 ? tol : 1e-6;
    const Vec& zeta = model.sigma0.zeta();
    for (double x : x_grid) {
        const EmpiricalMeasure m = EmpiricalMeasure::dirac(scale(x, zeta));
        rep.entries.push_back(classify_point(model, T, m, entropy_value, tol, n_scan));
    }
    return rep;
}

SelectionReport region_scan(const GameModel& model, double T,
                            const std::vector<double>& x_grid, double tol, int n_scan) {
    return region_scan(model, T, x_grid, default_entropy_evaluator(model), tol, n_scan);
}

std::vector<SelectionRegion> summarize_regions(const SelectionReport& report) {
    std::vector<SelectionRegion> regions;
    for (const auto& e : report.entries) {
        if (!regions.empty() && regions.back().classification == e.classification) {
            regions.back().x_hi = e.x;
        } else {
            regions.push_back({e.classification, e.x, e.x});
        }
    }
    return regions;
}

} // namespace mfgclaw
