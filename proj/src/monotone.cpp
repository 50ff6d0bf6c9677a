#include "mfgclaw/monotone.hpp"

#include <cmath>
#include <limits>

#include "mfgclaw/errors.hpp"
#include "mfgclaw/numerics.hpp"

namespace mfgclaw {

namespace {

bool is_case1(const GameModel& model) {
    return model.cost.kind() == TerminalCost::Kind::SeparableG &&
           model.sigma0.kind() == SigmaFunctional::Kind::Moment;
}

bool is_case2(const GameModel& model) {
    return model.cost.kind() == TerminalCost::Kind::SeparableId &&
           model.sigma0.kind() == SigmaFunctional::Kind::Composed;
}

} // namespace

DsigmaPaths dsigma_sigma_map(const GameModel& model, double sigma, double t,
                             const EmpiricalMeasure& m) {
    if (!model.sigma0.differentiable())
        throw NonDifferentiableSigma0(
            "dsigma_sigma_map: sigma0 has a step profile; no derivative at jumps");

    DsigmaPaths out;
    const double h = fd_step(sigma, 1e-4);
    out.fd =
        (sigma_map(model, sigma + h, t, m) - sigma_map(model, sigma - h, t, m)) / (2.0 * h);
    out.value = out.fd;

    const bool moment = model.sigma0.kind() == SigmaFunctional::Kind::Moment;
    const bool composed = model.sigma0.kind() == SigmaFunctional::Kind::Composed;
    if (moment || composed) {
        // Chain rule: int D_m sigma0(m_{t,sigma})(x*) . d_sigma x* dm.
        const FieldFn& psi = model.sigma0.psi();
        double integral = 0.0;
        double pushed_moment = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            const Vec xs = optimal_point(model, t, m.atom(i), sigma).x_star;
            const Vec ds = dsigma_optimal(model, t, m.atom(i), sigma);
            integral += m.weight(i) * dot(psi.grad(xs), ds);
            pushed_moment += m.weight(i) * psi.f(xs);
        }
        if (composed) integral *= model.sigma0.G().df(pushed_moment);
        out.chain = integral;
        out.value = integral;
    }
    return out;
}

double pointwise_criterion(const GameModel& model, const Vec& y, double t, double sigma) {
    const bool c1 = is_case1(model);
    const bool c2 = is_case2(model);
    if (!c1 && !c2)
        throw PresetRequired("pointwise_criterion: needs a Case 1 or Case 2 preset");
    const FieldFn& psi = model.sigma0.psi();
    const FieldFn& phi = model.cost.phi();
    const ScalarFn& G = c1 ? model.cost.G() : model.sigma0.G();
    const Mat M = sensitivity_matrix(model, t, y, sigma);
    return G.df(sigma) * dot(psi.grad(y), M * phi.grad(y));
}

MonotonicityReport check_monotonicity(const GameModel& model,
                                      const std::vector<double>& sigma_grid,
                                      const std::vector<double>& t_grid,
                                      const std::vector<EmpiricalMeasure>& measures,
                                      double c0) {
    if (sigma_grid.empty() || t_grid.empty() || measures.empty())
        throw BadInput("check_monotonicity: empty sample grid");

    MonotonicityReport rep;
    rep.sigma_grid = sigma_grid;
    rep.t_grid = t_grid;
    rep.sup_dSigma0 = -std::numeric_limits<double>::infinity();
    rep.inf_dSigma0 = std::numeric_limits<double>::infinity();

    for (std::size_t mi = 0; mi < measures.size(); ++mi) {
        for (double t : t_grid) {
            for (double s : sigma_grid) {
                const DsigmaPaths d = dsigma_sigma_map(model, s, t, measures[mi]);
                rep.sample_values.push_back({s, t, mi, d.value});
                rep.sup_dSigma0 = std::max(rep.sup_dSigma0, d.value);
                rep.inf_dSigma0 = std::min(rep.inf_dSigma0, d.value);
            }
        }
    }
    rep.samples = rep.sample_values.size();

    if (is_case1(model) || is_case2(model)) {
        double sup = -std::numeric_limits<double>::infinity();
        for (const auto& m : measures)
            for (std::size_t i = 0; i < m.size(); ++i)
                for (double t : t_grid)
                    for (double s : sigma_grid)
                        sup = std::max(sup, pointwise_criterion(model, m.atom(i), t, s));
        rep.pointwise_criterion_sup = sup;
    }

    if (c0 < 1.0 && rep.sup_dSigma0 <= c0) {
        rep.verdict = MonotonicityVerdict::Monotone;
        rep.c0 = c0;
    } else if (c0 > 1.0 && rep.inf_dSigma0 >= c0) {
        rep.verdict = MonotonicityVerdict::AntiMonotone;
        rep.c0 = c0;
    } else if (rep.sup_dSigma0 < 1.0) {
        rep.verdict = MonotonicityVerdict::Monotone;
        rep.c0 = rep.sup_dSigma0;
    } else if (rep.inf_dSigma0 > 1.0) {
        rep.verdict = MonotonicityVerdict::AntiMonotone;
        rep.c0 = rep.inf_dSigma0;
    } else {
        rep.verdict = MonotonicityVerdict::Neither;
        rep.c0 = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

} // namespace mfgclaw
