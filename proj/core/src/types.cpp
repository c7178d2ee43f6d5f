#include "awlm/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace awlm {

Universe::Universe(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) {
        throw ValidationError("universe needs at least two alternatives");
    }
    for (int i = 0; i < static_cast<int>(labels_.size()); ++i) {
        if (labels_[static_cast<size_t>(i)].empty()) {
            throw ValidationError("universe labels must be non-empty");
        }
        auto [it, inserted] = index_.emplace(labels_[static_cast<size_t>(i)], i);
        if (!inserted) {
            throw ValidationError("duplicate universe label: " + labels_[static_cast<size_t>(i)]);
        }
    }
}

const std::string& Universe::label(int index) const {
    if (index < 0 || index >= size()) {
        throw ValidationError("universe index out of range");
    }
    return labels_[static_cast<size_t>(index)];
}

int Universe::index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) {
        throw ValidationError("unknown alternative label: " + label);
    }
    return it->second;
}

bool Universe::contains(const std::string& label) const {
    return index_.count(label) > 0;
}

void validate_subset(std::span<const int> subset, int universe_size, const char* what) {
    for (size_t i = 0; i < subset.size(); ++i) {
        if (subset[i] < 0 || subset[i] >= universe_size) {
            throw ValidationError(std::string(what) + ": index out of range");
        }
        if (i > 0 && subset[i] <= subset[i - 1]) {
            throw ValidationError(std::string(what) + ": indices must be strictly increasing");
        }
    }
}

namespace {

bool includes_sorted(const IndexSet& big, const IndexSet& small) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

IndexSet labels_to_indices(const Universe& universe, const std::vector<std::string>& labels) {
    IndexSet out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.push_back(universe.index_of(l));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

MenuPair::MenuPair(const Universe& universe, IndexSet feasible, IndexSet influencer)
    : feasible_(std::move(feasible)), influencer_(std::move(influencer)), universe_size_(universe.size()) {
    validate_subset(feasible_, universe_size_, "feasible set");
    validate_subset(influencer_, universe_size_, "influencer menu");
    if (feasible_.empty()) {
        throw ValidationError("feasible set must be nonempty");
    }
    if (!includes_sorted(influencer_, feasible_)) {
        throw ValidationError("feasible set must be contained in the influencer menu");
    }
}

MenuPair::MenuPair(const Universe& universe,
                   const std::vector<std::string>& feasible_labels,
                   const std::vector<std::string>& influencer_labels)
    : MenuPair(universe,
               labels_to_indices(universe, feasible_labels),
               labels_to_indices(universe, influencer_labels)) {}

Dist::Dist(IndexSet support, std::vector<double> mass)
    : support_(std::move(support)), mass_(std::move(mass)) {
    if (support_.empty()) {
        throw ValidationError("distribution support must be nonempty");
    }
    if (support_.size() != mass_.size()) {
        throw ValidationError("distribution support/mass size mismatch");
    }
    for (size_t i = 1; i < support_.size(); ++i) {
        if (support_[i] <= support_[i - 1]) {
            throw ValidationError("distribution support must be strictly increasing");
        }
    }
    double total = 0.0;
    for (double& m : mass_) {
        if (!std::isfinite(m)) {
            throw ValidationError("distribution mass must be finite");
        }
        if (m < 0.0) {
            if (m < -kMassClampTol) {
                throw ValidationError("distribution mass is negative beyond clamp tolerance");
            }
            m = 0.0;
        }
        total += m;
    }
    if (std::abs(total - 1.0) > kSimplexTol) {
        throw ValidationError("distribution masses must sum to 1 within 1e-12");
    }
}

double Dist::mass(int universe_index) const {
    auto it = std::lower_bound(support_.begin(), support_.end(), universe_index);
    if (it == support_.end() || *it != universe_index) return 0.0;
    return mass_[static_cast<size_t>(it - support_.begin())];
}

double Dist::sum_over(std::span<const int> S) const {
    double total = 0.0;
    for (int idx : S) total += mass(idx);
    return total;
}

std::vector<double> Dist::restrict_to(std::span<const int> S) const {
    std::vector<double> out;
    out.reserve(S.size());
    for (int idx : S) out.push_back(mass(idx));
    return out;
}

LuceWeights::LuceWeights(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) {
        throw ValidationError("Luce weights must be nonempty");
    }
    for (double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw ValidationError("Luce weights must be strictly positive and finite");
        }
    }
}

ModelParams::ModelParams(double alpha_, LuceWeights weights_)
    : alpha(alpha_), weights(std::move(weights_)) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError("influence strength must lie strictly in (0,1)");
    }
}

} // namespace awlm
