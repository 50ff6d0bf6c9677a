#include "mfgclaw/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfgclaw/errors.hpp"
#include "mfgclaw/numerics.hpp"

namespace mfgclaw {

// ---------------------------------------------------------------------------
// Polynomial helpers (ascending coefficients).
// ---------------------------------------------------------------------------

namespace {

double poly_eval(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
    return d;
}

std::vector<double> poly_antiderivative(const std::vector<double>& c) {
    std::vector<double> a(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) a[i + 1] = c[i] / static_cast<double>(i + 1);
    return a;
}

} // namespace

ScalarFn poly_scalar(std::vector<double> coeffs) {
    auto d1 = poly_derivative(coeffs);
    auto d2 = poly_derivative(d1);
    ScalarFn s;
    s.f = [coeffs](double x) { return poly_eval(coeffs, x); };
    s.df = [d1](double x) { return poly_eval(d1, x); };
    s.d2f = [d2](double x) { return poly_eval(d2, x); };
    return s;
}

ScalarFn one_plus_exp_scalar() {
    ScalarFn s;
    s.f = [](double x) { return 1.0 + std::exp(x); };
    s.df = [](double x) { return std::exp(x); };
    s.d2f = [](double x) { return std::exp(x); };
    return s;
}

FieldFn quadratic_field(std::size_t dim) {
    FieldFn f;
    f.f = [](const Vec& x) { return 0.5 * dot(x, x); };
    f.grad = [](const Vec& x) { return x; };
    f.hess = [dim](const Vec&) { return Mat::identity(dim); };
    f.convex = true;
    return f;
}

FieldFn arctan_sq_field(std::size_t dim) {
    FieldFn f;
    f.f = [](const Vec& y) { return std::atan(dot(y, y)); };
    f.grad = [](const Vec& y) {
        const double r2 = dot(y, y);
        return scale(2.0 / (1.0 + r2 * r2), y);
    };
    f.hess = [dim](const Vec& y) {
        const double r2 = dot(y, y);
        const double den = 1.0 + r2 * r2;
        Mat h(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                double v = -8.0 * r2 * y[i] * y[j] / (den * den);
                if (i == j) v += 2.0 / den;
                h(i, j) = v;
            }
        }
        return h;
    };
    f.convex = false;
    f.range = std::make_pair(0.0, std::atan(std::numeric_limits<double>::infinity()));
    return f;
}

CurveFn poly_curve(std::vector<std::vector<double>> coeffs_per_component) {
    std::vector<std::vector<double>> d1(coeffs_per_component.size());
    for (std::size_t i = 0; i < coeffs_per_component.size(); ++i)
        d1[i] = poly_derivative(coeffs_per_component[i]);
    CurveFn c;
    c.f = [coeffs_per_component](double s) {
        Vec v(coeffs_per_component.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = poly_eval(coeffs_per_component[i], s);
        return v;
    };
    c.df = [d1](double s) {
        Vec v(d1.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = poly_eval(d1[i], s);
        return v;
    };
    return c;
}

// ---------------------------------------------------------------------------
// Profile1D
// ---------------------------------------------------------------------------

namespace {

// Tabulated antiderivative: prefix sums of per-cell Simpson, cells never
// straddling a breakpoint. Evaluations outside the table extend linearly
// with the boundary value (profiles are constant far out in every preset).
struct CumulativeTable {
    std::vector<double> knots;
    std::vector<double> prefix;
    std::function<double(double)> fn;

    double eval(double x) const {
        if (x <= knots.front())
            return prefix.front() + fn(knots.front()) * (x - knots.front());
        if (x >= knots.back())
            return prefix.back() + fn(knots.back()) * (x - knots.back());
        const auto it = std::upper_bound(knots.begin(), knots.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
        const double a = knots[i];
        // Partial Simpson on [a, x]; cells are small so this is plenty.
        const double m = 0.5 * (a + x);
        return prefix[i] + (x - a) / 6.0 * (fn(a) + 4.0 * fn(m) + fn(x));
    }
};

std::function<double(double)> build_cumulative(std::function<double(double)> fn,
                                               const std::vector<double>& breaks, double lo,
                                               double hi) {
    auto table = std::make_shared<CumulativeTable>();
    table->fn = fn;
    std::vector<double> seg_bounds = {lo};
    for (double b : breaks)
        if (b > lo && b < hi) seg_bounds.push_back(b);
    seg_bounds.push_back(hi);
    std::sort(seg_bounds.begin(), seg_bounds.end());

    const double target_h = (hi - lo) / 8192.0;
    for (std::size_t s = 0; s + 1 < seg_bounds.size(); ++s) {
        const double a = seg_bounds[s], b = seg_bounds[s + 1];
        const int n = std::max(2, static_cast<int>(std::ceil((b - a) / target_h)));
        for (int k = 0; k <= n; ++k)
            table->knots.push_back(a + (b - a) * k / n);
    }
    table->knots.erase(std::unique(table->knots.begin(), table->knots.end()),
                       table->knots.end());

    table->prefix.resize(table->knots.size(), 0.0);
    for (std::size_t i = 1; i < table->knots.size(); ++i) {
        const double a = table->knots[i - 1], b = table->knots[i];
        const double m = 0.5 * (a + b);
        // Shrink evaluation points slightly inside the cell so one-sided
        // values are used next to a jump.
        const double ea = a + 1e-12 * (b - a), eb = b - 1e-12 * (b - a);
        table->prefix[i] =
            table->prefix[i - 1] + (b - a) / 6.0 * (fn(ea) + 4.0 * fn(m) + fn(eb));
    }

    // Normalize so that the antiderivative vanishes at 0 when representable.
    double offset = 0.0;
    if (lo <= 0.0 && 0.0 <= hi) offset = table->eval(0.0);
    return [table, offset](double x) { return table->eval(x) - offset; };
}

} // namespace

Profile1D Profile1D::step(double left, double right, double x_jump) {
    Profile1D p;
    p.step_ = true;
    p.step_left_ = left;
    p.step_right_ = right;
    p.step_jump_ = x_jump;
    p.breaks_ = {x_jump};
    p.fn_ = [left, right, x_jump](double x) { return x < x_jump ? left : right; };
    // Exact piecewise-linear antiderivative with Phi(0) = 0.
    p.anti_ = [left, right, x_jump](double x) {
        auto ramp = [left, right, x_jump](double y) {
            return y < x_jump ? left * (y - x_jump) : right * (y - x_jump);
        };
        return ramp(x) - ramp(0.0);
    };
    return p;
}

Profile1D Profile1D::smooth(std::function<double(double)> fn, double lo, double hi) {
    Profile1D p;
    p.fn_ = fn;
    p.anti_ = build_cumulative(fn, {}, lo, hi);
    return p;
}

Profile1D Profile1D::smooth_with_antiderivative(std::function<double(double)> fn,
                                                std::function<double(double)> anti) {
    Profile1D p;
    p.fn_ = std::move(fn);
    p.anti_ = std::move(anti);
    return p;
}

Profile1D Profile1D::tanh_profile(double a, double b, double c, double x0) {
    auto fn = [a, b, c, x0](double x) { return a + b * std::tanh(c * (x - x0)); };
    auto anti_raw = [a, b, c, x0](double x) {
        return a * x + (b / c) * std::log(std::cosh(c * (x - x0)));
    };
    const double off = anti_raw(0.0);
    return smooth_with_antiderivative(fn, [anti_raw, off](double x) { return anti_raw(x) - off; });
}

Profile1D Profile1D::piecewise(std::function<double(double)> fn,
                               std::vector<double> breakpoints, double lo, double hi) {
    Profile1D p;
    p.fn_ = fn;
    std::sort(breakpoints.begin(), breakpoints.end());
    p.breaks_ = breakpoints;
    p.anti_ = build_cumulative(fn, breakpoints, lo, hi);
    return p;
}

double Profile1D::operator()(double x) const { return fn_(x); }

double Profile1D::left_limit(double x) const {
    if (step_ && x == step_jump_) return step_left_;
    const double h = 1e-9 * (1.0 + std::abs(x));
    return fn_(x - h);
}

double Profile1D::right_limit(double x) const {
    if (step_ && x == step_jump_) return step_right_;
    const double h = 1e-9 * (1.0 + std::abs(x));
    return fn_(x + h);
}

double Profile1D::antiderivative(double x) const { return anti_(x); }

std::pair<double, double> Profile1D::value_range(double lo, double hi) const {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    const int n = 2001;
    for (int i = 0; i <= n; ++i) {
        const double v = fn_(lo + (hi - lo) * i / n);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    for (double b : breaks_) {
        if (b < lo || b > hi) continue;
        for (double v : {left_limit(b), right_limit(b)}) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
    }
    return {mn, mx};
}

double Profile1D::lipschitz_estimate(double lo, double hi) const {
    const int n = 4001;
    const double h = (hi - lo) / n;
    double lip = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = lo + i * h, b = a + h;
        bool straddles = false;
        for (double brk : breaks_)
            if (a <= brk && brk <= b) straddles = true;
        if (straddles) continue;
        lip = std::max(lip, std::abs(fn_(b) - fn_(a)) / h);
    }
    return lip;
}

// ---------------------------------------------------------------------------
// HamiltonianModel
// ---------------------------------------------------------------------------

HamiltonianModel HamiltonianModel::quadratic(std::size_t dim) {
    HamiltonianModel h;
    h.dim_ = dim;
    h.quadratic_ = true;
    return h;
}

HamiltonianModel HamiltonianModel::custom_1d(ScalarFn H, double p_lo, double p_hi) {
    HamiltonianModel h;
    h.dim_ = 1;
    h.quadratic_ = false;
    h.h1d_ = std::move(H);
    h.p_lo_ = p_lo;
    h.p_hi_ = p_hi;
    // Fenchel's machinery below assumes convexity; verify it up front.
    const int n = 801;
    for (int i = 0; i <= n; ++i) {
        const double p = p_lo + (p_hi - p_lo) * i / n;
        if (h.h1d_.d2f(p) < -1e-10)
            throw NonconvexFlux("custom_1d Hamiltonian is not convex at p = " +
                                std::to_string(p));
    }
    return h;
}

double HamiltonianModel::H(const Vec& p) const {
    if (quadratic_) return 0.5 * dot(p, p);
    return h1d_.f(p[0]);
}

Vec HamiltonianModel::grad(const Vec& p) const {
    if (quadratic_) return p;
    return {h1d_.df(p[0])};
}

Mat HamiltonianModel::hess(const Vec& p) const {
    if (quadratic_) return Mat::identity(dim_);
    Mat m(1, 1);
    m(0, 0) = h1d_.d2f(p[0]);
    return m;
}

double HamiltonianModel::L(const Vec& q) const {
    if (quadratic_) return 0.5 * dot(q, q);
    // L(q) = sup_p (p q - H(p)); the argument is concave in p.
    const double q0 = q[0];
    auto obj = [this, q0](double p) { return p * q0 - h1d_.f(p); };
    const double p_star = golden_max(obj, p_lo_, p_hi_);
    return obj(p_star);
}

Vec HamiltonianModel::L_grad(const Vec& q) const {
    if (quadratic_) return q;
    // DL(q) is the maximizer of p q - H(p).
    const double q0 = q[0];
    auto obj = [this, q0](double p) { return p * q0 - h1d_.f(p); };
    return {golden_max(obj, p_lo_, p_hi_)};
}

// ---------------------------------------------------------------------------
// TerminalCost
// ---------------------------------------------------------------------------

TerminalCost TerminalCost::linear(CurveFn f) {
    TerminalCost c;
    c.kind_ = Kind::Linear;
    c.f_ = std::move(f);
    return c;
}

TerminalCost TerminalCost::separable(FieldFn phi, ScalarFn G) {
    TerminalCost c;
    c.kind_ = Kind::SeparableG;
    c.phi_ = std::move(phi);
    c.G_ = std::move(G);
    c.has_G_ = true;
    return c;
}

TerminalCost TerminalCost::separable_id(FieldFn phi) {
    TerminalCost c;
    c.kind_ = Kind::SeparableId;
    c.phi_ = std::move(phi);
    return c;
}

double TerminalCost::g(const Vec& x, double sigma) const {
    switch (kind_) {
    case Kind::Linear: return dot(f_.f(sigma), x);
    case Kind::SeparableG: return phi_.f(x) * G_.f(sigma);
    case Kind::SeparableId: return phi_.f(x) * sigma;
    }
    return 0.0;
}

Vec TerminalCost::grad_x(const Vec& x, double sigma) const {
    switch (kind_) {
    case Kind::Linear: return f_.f(sigma);
    case Kind::SeparableG: return scale(G_.f(sigma), phi_.grad(x));
    case Kind::SeparableId: return scale(sigma, phi_.grad(x));
    }
    return {};
}

Mat TerminalCost::hess_x(const Vec& x, double sigma) const {
    switch (kind_) {
    case Kind::Linear: return Mat(x.size(), x.size());
    case Kind::SeparableG: return phi_.hess(x).scaled(G_.f(sigma));
    case Kind::SeparableId: return phi_.hess(x).scaled(sigma);
    }
    return {};
}

Vec TerminalCost::dsigma_grad_x(const Vec& x, double sigma) const {
    switch (kind_) {
    case Kind::Linear: return f_.df(sigma);
    case Kind::SeparableG: return scale(G_.df(sigma), phi_.grad(x));
    case Kind::SeparableId: return phi_.grad(x);
    }
    return {};
}

double TerminalCost::dsigma_g(const Vec& x, double sigma) const {
    switch (kind_) {
    case Kind::Linear: return dot(f_.df(sigma), x);
    case Kind::SeparableG: return phi_.f(x) * G_.df(sigma);
    case Kind::SeparableId: return phi_.f(x);
    }
    return 0.0;
}

bool TerminalCost::convex_in_x(double sigma) const {
    switch (kind_) {
    case Kind::Linear: return true;
    case Kind::SeparableG: return phi_.convex && G_.f(sigma) >= 0.0;
    case Kind::SeparableId: return phi_.convex && sigma >= 0.0;
    }
    return false;
}

const CurveFn& TerminalCost::linear_f() const {
    if (kind_ != Kind::Linear) throw PresetRequired("terminal cost is not LINEAR");
    return f_;
}

const FieldFn& TerminalCost::phi() const {
    if (kind_ == Kind::Linear) throw PresetRequired("terminal cost has no phi factor");
    return phi_;
}

const ScalarFn& TerminalCost::G() const {
    if (!has_G_) throw PresetRequired("terminal cost has no G factor");
    return G_;
}

// ---------------------------------------------------------------------------
// SigmaFunctional
// ---------------------------------------------------------------------------

SigmaFunctional SigmaFunctional::moment(FieldFn psi) {
    SigmaFunctional s;
    s.kind_ = Kind::Moment;
    s.psi_ = std::move(psi);
    return s;
}

SigmaFunctional SigmaFunctional::composed(FieldFn psi, ScalarFn G) {
    SigmaFunctional s;
    s.kind_ = Kind::Composed;
    s.psi_ = std::move(psi);
    s.G_ = std::move(G);
    s.has_G_ = true;
    return s;
}

SigmaFunctional SigmaFunctional::mean_profile(Profile1D s0, Vec zeta) {
    const double nz = norm(zeta);
    if (std::abs(nz - 1.0) > 1e-12) throw BadInput("mean_profile: |zeta| must be 1");
    SigmaFunctional s;
    s.kind_ = Kind::MeanProfile;
    s.profile_ = std::make_shared<Profile1D>(std::move(s0));
    s.zeta_ = std::move(zeta);
    return s;
}

double SigmaFunctional::evaluate(const EmpiricalMeasure& m) const {
    switch (kind_) {
    case Kind::Moment: {
        double v = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) v += m.weight(i) * psi_.f(m.atom(i));
        return v;
    }
    case Kind::Composed: {
        double v = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) v += m.weight(i) * psi_.f(m.atom(i));
        return G_.f(v);
    }
    case Kind::MeanProfile: return (*profile_)(dot(m.mean(), zeta_));
    }
    return 0.0;
}

double SigmaFunctional::evaluate_reduced(double x_along_zeta) const {
    if (kind_ != Kind::MeanProfile)
        throw PresetRequired("evaluate_reduced requires the MEAN-PROFILE preset");
    return (*profile_)(x_along_zeta);
}

bool SigmaFunctional::differentiable() const {
    if (kind_ == Kind::MeanProfile) return !profile_->is_step();
    return true;
}

const FieldFn& SigmaFunctional::psi() const {
    if (kind_ == Kind::MeanProfile) throw PresetRequired("sigma0 has no psi");
    return psi_;
}

const ScalarFn& SigmaFunctional::G() const {
    if (!has_G_) throw PresetRequired("sigma0 has no G");
    return G_;
}

const Profile1D& SigmaFunctional::profile() const {
    if (kind_ != Kind::MeanProfile) throw PresetRequired("sigma0 has no profile");
    return *profile_;
}

const Vec& SigmaFunctional::zeta() const {
    if (kind_ != Kind::MeanProfile) throw PresetRequired("sigma0 carries no zeta");
    return zeta_;
}

std::pair<double, double> SigmaFunctional::value_range_hint() const {
    switch (kind_) {
    case Kind::Moment:
        if (psi_.range) return *psi_.range;
        return {-2.0, 2.0};
    case Kind::Composed: {
        auto r = psi_.range ? *psi_.range : std::make_pair(-2.0, 2.0);
        const double a = G_.f(r.first), b = G_.f(r.second);
        return {std::min(a, b), std::max(a, b)};
    }
    case Kind::MeanProfile: return profile_->value_range(-50.0, 50.0);
    }
    return {-2.0, 2.0};
}

// ---------------------------------------------------------------------------
// Legendre transform
// ---------------------------------------------------------------------------

LegendreTransform::LegendreTransform(std::function<double(double)> F, double lo, double hi,
                                     int n_check)
    : F_(std::move(F)), lo_(lo), hi_(hi) {
    if (!(lo < hi)) throw EmptyInterval("legendre_1d: degenerate domain");
    double scale = 1.0;
    std::vector<double> vals(n_check + 1);
    for (int i = 0; i <= n_check; ++i) {
        vals[i] = F_(lo + (hi - lo) * i / n_check);
        scale = std::max(scale, std::abs(vals[i]));
    }
    for (int i = 1; i < n_check; ++i) {
        const double second = vals[i - 1] - 2.0 * vals[i] + vals[i + 1];
        if (second < -1e-10 * scale)
            throw NonconvexFlux("legendre_1d: input is not convex on the domain");
    }
}

double LegendreTransform::operator()(double alpha) const {
    auto obj = [this, alpha](double u) { return alpha * u - F_(u); };
    return obj(golden_max(obj, lo_, hi_));
}

double LegendreTransform::argmax(double alpha) const {
    auto obj = [this, alpha](double u) { return alpha * u - F_(u); };
    return golden_max(obj, lo_, hi_);
}

LegendreTransform legendre_1d(std::function<double(double)> F, double lo, double hi) {
    return LegendreTransform(std::move(F), lo, hi);
}

std::function<double(double)> flux_primitive(std::function<double(double)> fbar,
                                             double abs_tol) {
    return [fbar, abs_tol](double u) { return adaptive_simpson(fbar, 0.0, u, abs_tol); };
}

// ---------------------------------------------------------------------------
// Convex / concave envelopes with tangency polish
// ---------------------------------------------------------------------------

namespace {

// Solve slope-matching F'(r)(other - r) = F(other) - F(r) for the tangency
// abscissa r near the sampled guess. Derivative by central differences when
// dF is absent. Falls back to the guess if no sign change materializes.
double polish_tangency(const std::function<double(double)>& F,
                       const std::function<double(double)>* dF, double guess, double other,
                       double bracket_halfwidth, double dom_lo, double dom_hi) {
    auto deriv = [&](double r) {
        if (dF) return (*dF)(r);
        const double h = fd_step(r, 1e-7);
        return (F(r + h) - F(r - h)) / (2.0 * h);
    };
    auto g = [&](double r) { return deriv(r) * (other - r) - (F(other) - F(r)); };

    double lo = std::max(dom_lo, guess - bracket_halfwidth);
    double hi = std::min(dom_hi, guess + bracket_halfwidth);
    for (int widen = 0; widen < 6; ++widen) {
        if (g(lo) * g(hi) <= 0.0) {
            return bisect(g, lo, hi, 1e-15 * (1.0 + std::abs(guess)));
        }
        const double w = hi - lo;
        lo = std::max(dom_lo, lo - w);
        hi = std::min(dom_hi, hi + w);
    }
    return guess;
}

EnvelopeResult lower_envelope_impl(const std::function<double(double)>& F, double a,
                                   double b, int n_samples,
                                   const std::function<double(double)>* dF) {
    if (!(a < b)) throw EmptyInterval("convex_envelope: degenerate interval");
    if (n_samples < 3) throw EmptyInterval("convex_envelope: need at least 3 samples");

    const int n = n_samples;
    std::vector<double> u(n), y(n);
    for (int i = 0; i < n; ++i) {
        u[i] = a + (b - a) * i / (n - 1);
        y[i] = F(u[i]);
    }

    // Monotone-chain lower hull over the sample indices.
    std::vector<int> hull;
    for (int i = 0; i < n; ++i) {
        while (hull.size() >= 2) {
            const int p = hull[hull.size() - 2], q = hull[hull.size() - 1];
            const double cross =
                (u[q] - u[p]) * (y[i] - y[p]) - (y[q] - y[p]) * (u[i] - u[p]);
            if (cross <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }

    EnvelopeResult res;
    res.u.reserve(hull.size());
    res.value.reserve(hull.size());
    for (int idx : hull) {
        res.u.push_back(u[idx]);
        res.value.push_back(y[idx]);
    }
    for (std::size_t k = 0; k + 1 < hull.size(); ++k)
        res.is_gap.push_back(hull[k + 1] - hull[k] > 1);

    // Polish interior tangency points of every gap edge.
    const double grid_h = (b - a) / (n - 1);
    for (std::size_t k = 0; k + 1 < res.u.size(); ++k) {
        if (!res.is_gap[k]) continue;
        double& p = res.u[k];
        double& q = res.u[k + 1];
        const bool p_interior = k > 0 || p > a + 0.5 * grid_h;
        const bool q_interior = (k + 2 < res.u.size()) || q < b - 0.5 * grid_h;
        for (int pass = 0; pass < 8; ++pass) {
            double moved = 0.0;
            if (p_interior) {
                const double pn = polish_tangency(F, dF, p, q, 2.0 * grid_h, a, b);
                moved = std::max(moved, std::abs(pn - p));
                p = pn;
            }
            if (q_interior) {
                const double qn = polish_tangency(F, dF, q, p, 2.0 * grid_h, a, b);
                moved = std::max(moved, std::abs(qn - q));
                q = qn;
            }
            if (moved < 1e-14 * (1.0 + std::abs(p) + std::abs(q))) break;
        }
        res.value[k] = F(res.u[k]);
        res.value[k + 1] = F(res.u[k + 1]);
    }
    return res;
}

} // namespace

EnvelopeResult convex_envelope(const std::function<double(double)>& F, double a, double b,
                               int n_samples, const std::function<double(double)>* dF) {
    return lower_envelope_impl(F, a, b, n_samples, dF);
}

EnvelopeResult concave_envelope(const std::function<double(double)>& F, double a, double b,
                                int n_samples, const std::function<double(double)>* dF) {
    auto negF = [&F](double x) { return -F(x); };
    std::function<double(double)> negF_fn = negF;
    std::function<double(double)> negdF_fn;
    const std::function<double(double)>* negdF_ptr = nullptr;
    if (dF) {
        negdF_fn = [dF](double x) { return -(*dF)(x); };
        negdF_ptr = &negdF_fn;
    }
    EnvelopeResult r = lower_envelope_impl(negF_fn, a, b, n_samples, negdF_ptr);
    for (double& v : r.value) v = -v;
    return r;
}

// ---------------------------------------------------------------------------
// ReducedFlux
// ---------------------------------------------------------------------------

ReducedFlux ReducedFlux::polynomial(std::vector<double> fbar_coeffs, Vec zeta,
                                    std::pair<double, double> working) {
    if (std::abs(norm(zeta) - 1.0) > 1e-12)
        throw BadInput("ReducedFlux: |zeta| must be 1 within 1e-12");
    ReducedFlux r;
    r.poly_ = true;
    r.coeffs_ = fbar_coeffs;
    auto d1 = poly_derivative(fbar_coeffs);
    auto prim = poly_antiderivative(fbar_coeffs);
    r.fbar_ = [fbar_coeffs](double u) { return poly_eval(fbar_coeffs, u); };
    r.dfbar_ = [d1](double u) { return poly_eval(d1, u); };
    r.F_ = [prim](double u) { return poly_eval(prim, u); };
    r.zeta_ = std::move(zeta);
    r.working_ = working;
    return r;
}

ReducedFlux ReducedFlux::from_model(const HamiltonianModel& H, const CurveFn& f, Vec zeta,
                                    std::pair<double, double> working) {
    if (std::abs(norm(zeta) - 1.0) > 1e-12)
        throw BadInput("ReducedFlux: |zeta| must be 1 within 1e-12");
    // DH(f(u)) must stay collinear with zeta, otherwise no scalar reduction.
    for (int i = 0; i <= 64; ++i) {
        const double u = working.first + (working.second - working.first) * i / 64.0;
        const Vec v = H.grad(f.f(u));
        const double along = dot(v, zeta);
        const Vec residual = sub(v, scale(along, zeta));
        if (norm(residual) > 1e-9 * (1.0 + norm(v)))
            throw BadInput("ReducedFlux::from_model: DH(f(u)) is not collinear with zeta");
    }
    ReducedFlux r;
    auto zcopy = zeta;
    r.fbar_ = [H, f, zcopy](double u) { return dot(H.grad(f.f(u)), zcopy); };
    auto fb = r.fbar_;
    r.dfbar_ = [fb](double u) {
        const double h = fd_step(u, 1e-6);
        return (fb(u + h) - fb(u - h)) / (2.0 * h);
    };
    r.F_ = flux_primitive(r.fbar_);
    r.zeta_ = std::move(zeta);
    r.working_ = working;
    return r;
}

ReducedFlux ReducedFlux::custom(std::function<double(double)> fbar, Vec zeta,
                                std::pair<double, double> working) {
    if (std::abs(norm(zeta) - 1.0) > 1e-12)
        throw BadInput("ReducedFlux: |zeta| must be 1 within 1e-12");
    ReducedFlux r;
    r.fbar_ = std::move(fbar);
    auto fb = r.fbar_;
    r.dfbar_ = [fb](double u) {
        const double h = fd_step(u, 1e-6);
        return (fb(u + h) - fb(u - h)) / (2.0 * h);
    };
    r.F_ = flux_primitive(r.fbar_);
    r.zeta_ = std::move(zeta);
    r.working_ = working;
    return r;
}

double ReducedFlux::fbar(double u) const { return fbar_(u); }
double ReducedFlux::fbar_prime(double u) const { return dfbar_(u); }
double ReducedFlux::primitive(double u) const { return F_(u); }

double ReducedFlux::conjugate(double alpha) const {
    LegendreTransform leg(F_, working_.first, working_.second);
    return leg(alpha);
}

std::vector<double> ReducedFlux::stationary_points(double lo, double hi) const {
    std::vector<double> roots;
    const int n = 4000;
    double prev = fbar_(lo);
    for (int i = 1; i <= n; ++i) {
        const double u = lo + (hi - lo) * i / n;
        const double cur = fbar_(u);
        if (prev == 0.0) roots.push_back(lo + (hi - lo) * (i - 1) / n);
        if (prev * cur < 0.0)
            roots.push_back(bisect(fbar_, lo + (hi - lo) * (i - 1) / n, u, 1e-14));
        prev = cur;
    }
    if (prev == 0.0) roots.push_back(hi);
    return roots;
}

double ReducedFlux::min_fbar_prime(double lo, double hi) const {
    double mn = std::numeric_limits<double>::infinity();
    const int n = 2001;
    for (int i = 0; i <= n; ++i) mn = std::min(mn, dfbar_(lo + (hi - lo) * i / n));
    return mn;
}

double ReducedFlux::min_fbar(double lo, double hi) const {
    double mn = std::numeric_limits<double>::infinity();
    const int n = 2001;
    for (int i = 0; i <= n; ++i) mn = std::min(mn, fbar_(lo + (hi - lo) * i / n));
    return mn;
}

double ReducedFlux::max_abs_fbar(double lo, double hi) const {
    double mx = 0.0;
    const int n = 2001;
    for (int i = 0; i <= n; ++i) mx = std::max(mx, std::abs(fbar_(lo + (hi - lo) * i / n)));
    for (double r : stationary_points(lo, hi)) mx = std::max(mx, std::abs(fbar_(r)));
    return mx;
}

double ReducedFlux::invert_fbar(double xi, double u_lo, double u_hi) const {
    const double flo = fbar_(u_lo), fhi = fbar_(u_hi);
    if (xi <= std::min(flo, fhi)) return flo <= fhi ? u_lo : u_hi;
    if (xi >= std::max(flo, fhi)) return flo <= fhi ? u_hi : u_lo;
    auto g = [this, xi](double u) { return fbar_(u) - xi; };
    return bisect(g, u_lo, u_hi, 1e-14 * (1.0 + std::abs(u_lo) + std::abs(u_hi)));
}

// ---------------------------------------------------------------------------
// Preset bundles
// ---------------------------------------------------------------------------

GameModel make_linear_profile_model(std::vector<double> fbar_coeffs, Profile1D s0) {
    GameModel g{HamiltonianModel::quadratic(1),
                TerminalCost::linear(poly_curve({fbar_coeffs})),
                SigmaFunctional::mean_profile(std::move(s0), {1.0}),
                ReducedFlux::polynomial(std::move(fbar_coeffs), {1.0}),
                1};
    return g;
}

GameModel make_burgers_step_model() {
    return make_linear_profile_model({0.0, 1.0}, Profile1D::step(0.0, 1.0));
}

GameModel make_cubic_step_model() {
    return make_linear_profile_model({0.0, 0.0, 1.0}, Profile1D::step(-1.0, 1.0));
}

GameModel make_case1_model(FieldFn phi, FieldFn psi, ScalarFn G, std::size_t dim) {
    GameModel g{HamiltonianModel::quadratic(dim),
                TerminalCost::separable(std::move(phi), G),
                SigmaFunctional::moment(std::move(psi)),
                std::nullopt,
                dim};
    return g;
}

GameModel make_case2_model(FieldFn phi, FieldFn psi, ScalarFn G, std::size_t dim) {
    GameModel g{HamiltonianModel::quadratic(dim),
                TerminalCost::separable_id(std::move(phi)),
                SigmaFunctional::composed(std::move(psi), std::move(G)),
                std::nullopt,
                dim};
    return g;
}

} // namespace mfgclaw
