#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "awlm/errors.hpp"

namespace awlm {

/// Simplex construction tolerance: masses must sum to 1 within this bound.
inline constexpr double kSimplexTol = 1e-12;
/// Negative masses in [-kMassClampTol, 0) are clamped to zero; anything
/// more negative is rejected.
inline constexpr double kMassClampTol = 1e-15;

/// Finite, ordered set of alternatives. The ordering is canonical: it fixes
/// the coordinate layout of every vector and matrix downstream, including
/// which alternative is "last" for selector reductions.
class Universe {
public:
    explicit Universe(std::vector<std::string> labels);

    int size() const { return static_cast<int>(labels_.size()); }
    const std::string& label(int index) const;
    /// Throws ValidationError for unknown labels.
    int index_of(const std::string& label) const;
    bool contains(const std::string& label) const;
    const std::vector<std::string>& labels() const { return labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> index_;
};

/// Sorted, duplicate-free universe indices. All subset arguments in this
/// library are expected in this form.
using IndexSet = std::vector<int>;

/// Validates that `subset` is sorted, duplicate-free and within [0, universe_size).
void validate_subset(std::span<const int> subset, int universe_size, const char* what);

/// Feasible set S nested in the influencer menu I.
class MenuPair {
public:
    MenuPair(const Universe& universe, IndexSet feasible, IndexSet influencer);
    MenuPair(const Universe& universe,
             const std::vector<std::string>& feasible_labels,
             const std::vector<std::string>& influencer_labels);

    const IndexSet& feasible() const { return feasible_; }
    const IndexSet& influencer() const { return influencer_; }
    int universe_size() const { return universe_size_; }

private:
    IndexSet feasible_;
    IndexSet influencer_;
    int universe_size_ = 0;
};

/// Probability distribution over a subset of the universe. Off-support mass
/// is implicitly zero; the zero-extension to the full universe is never
/// materialized.
class Dist {
public:
    /// `support` must be sorted and duplicate-free; `mass` is aligned with it.
    /// Masses must be >= -kMassClampTol (tiny negatives are clamped to 0) and
    /// sum to 1 within kSimplexTol.
    Dist(IndexSet support, std::vector<double> mass);

    const IndexSet& support() const { return support_; }
    const std::vector<double>& masses() const { return mass_; }

    /// Mass at a universe index; 0 when off support.
    double mass(int universe_index) const;

    /// Total mass on S (the feasible share when S is a feasible set).
    double sum_over(std::span<const int> S) const;

    /// Masses restricted to S, in S's canonical coordinate order.
    std::vector<double> restrict_to(std::span<const int> S) const;

private:
    IndexSet support_;
    std::vector<double> mass_;
};

/// Strictly positive Luce weights over the whole universe. Scale-free: only
/// ratios matter.
class LuceWeights {
public:
    explicit LuceWeights(std::vector<double> weights);

    int size() const { return static_cast<int>(weights_.size()); }
    double weight(int universe_index) const { return weights_.at(static_cast<size_t>(universe_index)); }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<double> weights_;
};

/// Influence strength and idiosyncratic weights. Alpha is strictly interior;
/// the limits 0 and 1 are served by the pure functions that remain
/// well-defined there.
struct ModelParams {
    double alpha;
    LuceWeights weights;

    ModelParams(double alpha_, LuceWeights weights_);
};

} // namespace awlm
