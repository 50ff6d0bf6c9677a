#include "mfgclaw/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mfgclaw/errors.hpp"

namespace mfgclaw {

EmpiricalMeasure::EmpiricalMeasure(std::vector<Vec> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.empty()) throw BadInput("EmpiricalMeasure: atom list is empty");
    if (atoms_.size() != weights_.size())
        throw BadInput("EmpiricalMeasure: atoms/weights length mismatch");
    const std::size_t d = atoms_.front().size();
    if (d == 0) throw BadInput("EmpiricalMeasure: zero-dimensional atom");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i].size() != d)
            throw BadInput("EmpiricalMeasure: inconsistent atom dimensions");
        if (!all_finite(atoms_[i])) throw BadInput("EmpiricalMeasure: non-finite atom");
        if (!(weights_[i] >= 0.0))
            throw BadInput("EmpiricalMeasure: negative or NaN weight");
        total += weights_[i];
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw BadInput("EmpiricalMeasure: weights sum to " + std::to_string(total));
    if (std::abs(total - 1.0) > 1e-12) {
        for (double& w : weights_) w /= total;
    }
}

EmpiricalMeasure EmpiricalMeasure::dirac(Vec x) {
    return EmpiricalMeasure({std::move(x)}, {1.0});
}

EmpiricalMeasure EmpiricalMeasure::uniform(std::vector<Vec> atoms) {
    std::vector<double> w(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
    return EmpiricalMeasure(std::move(atoms), std::move(w));
}

Vec EmpiricalMeasure::mean() const {
    Vec m(dim(), 0.0);
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) m[j] += weights_[i] * atoms_[i][j];
    return m;
}

MeanDecomposition decompose(const EmpiricalMeasure& m) {
    Vec mu = m.mean();
    std::vector<Vec> centered(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) centered[i] = sub(m.atom(i), mu);
    return {std::move(mu), EmpiricalMeasure(std::move(centered), m.weights())};
}

EmpiricalMeasure recompose(const MeanDecomposition& d) {
    return translate(d.centered, d.mean);
}

EmpiricalMeasure translate(const EmpiricalMeasure& m, const Vec& b) {
    if (b.size() != m.dim()) throw BadInput("translate: dimension mismatch");
    if (!all_finite(b)) throw BadInput("translate: non-finite shift");
    std::vector<Vec> atoms(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) atoms[i] = add(m.atom(i), b);
    return EmpiricalMeasure(std::move(atoms), m.weights());
}

EmpiricalMeasure pushforward(const EmpiricalMeasure& m,
                             const std::function<Vec(const Vec&)>& map) {
    std::vector<Vec> atoms(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        atoms[i] = map(m.atom(i));
        if (!all_finite(atoms[i]))
            throw NonFiniteImage("pushforward: map produced a non-finite image at atom " +
                                 std::to_string(i));
    }
    return EmpiricalMeasure(std::move(atoms), m.weights());
}

double wasserstein2_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    if (a.dim() != 1 || b.dim() != 1)
        throw UnsupportedDimension("wasserstein2_1d: supports d = 1 only");

    auto sorted = [](const EmpiricalMeasure& m) {
        std::vector<std::pair<double, double>> pw(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) pw[i] = {m.atom(i)[0], m.weight(i)};
        std::sort(pw.begin(), pw.end());
        return pw;
    };
    auto pa = sorted(a);
    auto pb = sorted(b);

    // Walk matching quantile chunks of the two staircase CDFs.
    double cost = 0.0;
    std::size_t i = 0, j = 0;
    double ra = pa[0].second, rb = pb[0].second;
    while (i < pa.size() && j < pb.size()) {
        const double chunk = std::min(ra, rb);
        const double dx = pa[i].first - pb[j].first;
        cost += chunk * dx * dx;
        ra -= chunk;
        rb -= chunk;
        if (ra <= 1e-15) {
            ++i;
            if (i < pa.size()) ra = pa[i].second;
        }
        if (rb <= 1e-15) {
            ++j;
            if (j < pb.size()) rb = pb[j].second;
        }
    }
    return std::sqrt(std::max(cost, 0.0));
}

EmpiricalMeasure load_measure_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadInput("cannot open measure file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw BadInput("measure file is empty: " + path);

    // Header must read x_1,...,x_d,weight.
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) header.push_back(tok);
    }
    if (header.size() < 2 || header.back() != "weight")
        throw BadInput("measure file header must be x_1,..,x_d,weight: " + path);
    const std::size_t d = header.size() - 1;

    std::vector<Vec> atoms;
    std::vector<double> weights;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        Vec x;
        while (std::getline(ss, tok, ',')) x.push_back(std::stod(tok));
        if (x.size() != d + 1)
            throw BadInput("measure file row has wrong arity: " + line);
        weights.push_back(x.back());
        x.pop_back();
        atoms.push_back(std::move(x));
    }
    return EmpiricalMeasure(std::move(atoms), std::move(weights));
}

void save_measure_csv(const EmpiricalMeasure& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw BadInput("cannot write measure file: " + path);
    for (std::size_t j = 0; j < m.dim(); ++j) out << "x_" << (j + 1) << ",";
    out << "weight\n";
    out.precision(17);
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.dim(); ++j) out << m.atom(i)[j] << ",";
        out << m.weight(i) << "\n";
    }
}

} // namespace mfgclaw
