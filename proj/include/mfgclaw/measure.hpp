#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mfgclaw/linalg.hpp"

namespace mfgclaw {

/// Finitely supported probability measure on R^d with nonnegative weights
/// summing to one. Immutable after construction: all operations return new
/// values, so instances can be shared freely across threads.
class EmpiricalMeasure {
public:
    // Weights within 1e-9 of unit sum are renormalized; anything further off
    // is rejected. Exact-zero weights are allowed, negative ones are not.
    EmpiricalMeasure(std::vector<Vec> atoms, std::vector<double> weights);

    static EmpiricalMeasure dirac(Vec x);
    static EmpiricalMeasure uniform(std::vector<Vec> atoms);

    std::size_t size() const { return atoms_.size(); }
    std::size_t dim() const { return atoms_.front().size(); }
    const Vec& atom(std::size_t i) const { return atoms_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<Vec>& atoms() const { return atoms_; }
    const std::vector<double>& weights() const { return weights_; }

    Vec mean() const;

private:
    std::vector<Vec> atoms_;
    std::vector<double> weights_;
};

/// Pair (mean, centered part) of a measure: m = (tau_mean)_# centered.
struct MeanDecomposition {
    Vec mean;
    EmpiricalMeasure centered;
};

MeanDecomposition decompose(const EmpiricalMeasure& m);
EmpiricalMeasure recompose(const MeanDecomposition& d);

EmpiricalMeasure translate(const EmpiricalMeasure& m, const Vec& b);

/// Image measure under a pointwise map; weights carry over unchanged.
/// Throws NonFiniteImage if the map produces a NaN/inf at any atom.
EmpiricalMeasure pushforward(const EmpiricalMeasure& m,
                             const std::function<Vec(const Vec&)>& map);

/// Exact 2-Wasserstein distance between two measures on R^1, computed by the
/// sorted quantile coupling. Throws UnsupportedDimension unless d = 1.
double wasserstein2_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

// CSV persistence: columns x_1..x_d,weight with a mandatory header row.
EmpiricalMeasure load_measure_csv(const std::string& path);
void save_measure_csv(const EmpiricalMeasure& m, const std::string& path);

} // namespace mfgclaw
