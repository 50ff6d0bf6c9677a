#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "mfgclaw/measure.hpp"

namespace mfgtest {

inline std::mt19937_64 rng(std::uint64_t seed = 20240611ull) { return std::mt19937_64(seed); }

inline mfgclaw::EmpiricalMeasure random_measure_1d(std::mt19937_64& gen, std::size_t atoms,
                                                   double lo = -2.0, double hi = 2.0) {
    std::uniform_real_distribution<double> pos(lo, hi);
    std::uniform_real_distribution<double> wgt(0.1, 1.0);
    std::vector<mfgclaw::Vec> a(atoms);
    std::vector<double> w(atoms);
    double total = 0.0;
    for (std::size_t i = 0; i < atoms; ++i) {
        a[i] = {pos(gen)};
        w[i] = wgt(gen);
        total += w[i];
    }
    for (double& v : w) v /= total;
    return mfgclaw::EmpiricalMeasure(std::move(a), std::move(w));
}

/// Characteristics oracle for smooth monotone data: the classical solution
/// solves sigma = s0(x - t fbar(sigma)).
template <class Profile, class Fbar>
double characteristic_solution(const Profile& s0, const Fbar& fbar, double t, double x,
                               double sig_lo, double sig_hi) {
    auto g = [&](double s) { return s - s0(x - t * fbar(s)); };
    double a = sig_lo, b = sig_hi;
    double ga = g(a);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (a + b);
        if (ga * g(mid) <= 0.0)
            b = mid;
        else {
            a = mid;
            ga = g(a);
        }
    }
    return 0.5 * (a + b);
}

} // namespace mfgtest
