#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "awlm/model.hpp"
#include "awlm/types.hpp"

namespace testutil {

inline awlm::Universe make_universe(int n) {
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.emplace_back(1, static_cast<char>('a' + i));
    return awlm::Universe(std::move(labels));
}

inline awlm::IndexSet range_set(int lo, int hi) {
    awlm::IndexSet out;
    for (int i = lo; i < hi; ++i) out.push_back(i);
    return out;
}

/// Interior random simplex point with every mass at least `floor`.
inline std::vector<double> random_simplex(std::mt19937_64& rng, size_t n, double floor = 0.02) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n);
    double total = 0.0;
    for (double& x : v) {
        x = -std::log(1.0 - u(rng));
        total += x;
    }
    for (double& x : v) x = floor + (1.0 - floor * static_cast<double>(n)) * x / total;
    // kill the last-digit drift so Dist construction never trips
    double s = 0.0;
    for (double x : v) s += x;
    v.back() += 1.0 - s;
    return v;
}

/// Exposure with prescribed within-feasible composition and feasible share;
/// the aspirational remainder sits uniformly on I \ S.
inline awlm::Dist make_exposure(const awlm::IndexSet& S, const std::vector<double>& composition,
                                double share, const awlm::IndexSet& I) {
    awlm::IndexSet support;
    std::vector<double> mass;
    awlm::IndexSet outside;
    for (int x : I) {
        if (!std::binary_search(S.begin(), S.end(), x)) outside.push_back(x);
    }
    size_t si = 0;
    for (int x : I) {
        if (std::binary_search(S.begin(), S.end(), x)) {
            support.push_back(x);
            mass.push_back(share * composition[si++]);
        } else {
            support.push_back(x);
            mass.push_back((1.0 - share) / static_cast<double>(outside.size()));
        }
    }
    return awlm::Dist(std::move(support), std::move(mass));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

/// Closed-form induced choice computed inline, independent of the library
/// code path. Serves as the oracle for derived expected values.
inline std::vector<double> closed_form_choice(const std::vector<double>& p0,
                                              const std::vector<double>& q_restriction,
                                              double q_S, double alpha) {
    const double D = (1.0 - alpha) + alpha * q_S;
    std::vector<double> out(p0.size());
    for (size_t i = 0; i < out.size(); ++i) {
        out[i] = ((1.0 - alpha) * p0[i] + alpha * q_restriction[i]) / D;
    }
    return out;
}

} // namespace testutil
