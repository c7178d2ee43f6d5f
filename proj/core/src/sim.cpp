#include "awlm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "awlm/model.hpp"

namespace awlm::sim {

std::uint64_t substream_seed(std::uint64_t seed, std::size_t regime_index) {
    // splitmix64 finalizer over the combined word.
    std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(regime_index) + 1));
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SimConfig::SimConfig(ModelParams params_, MenuPair menu_, Dist exposure_, std::int64_t n_draws_,
                     FailureRule rule_, double retry_prob_, std::int64_t max_attempts_)
    : params(std::move(params_)), menu(std::move(menu_)), exposure(std::move(exposure_)),
      n_draws(n_draws_), rule(rule_), retry_prob(retry_prob_), max_attempts(max_attempts_) {
    if (n_draws < 1) throw ValidationError("simulation needs n_draws >= 1");
    if (max_attempts < 1) throw ValidationError("simulation needs max_attempts >= 1");
    if (!(retry_prob >= 0.0 && retry_prob <= 1.0)) {
        throw ValidationError("retry probability must lie in [0,1]");
    }
    // Exposure must live on the influencer menu.
    const auto& I = menu.influencer();
    for (size_t i = 0; i < exposure.support().size(); ++i) {
        if (exposure.masses()[i] > 0.0 &&
            !std::binary_search(I.begin(), I.end(), exposure.support()[i])) {
            throw ValidationError("exposure places mass outside the influencer menu");
        }
    }
}

namespace {

// Cumulative-sum sampler over (index, mass) pairs.
struct CdfSampler {
    IndexSet indices;
    std::vector<double> cdf;

    CdfSampler(const IndexSet& idx, const std::vector<double>& mass) : indices(idx) {
        cdf.resize(mass.size());
        double acc = 0.0;
        for (size_t i = 0; i < mass.size(); ++i) {
            acc += mass[i];
            cdf[i] = acc;
        }
        if (!cdf.empty()) cdf.back() = std::max(cdf.back(), 1.0);
    }

    int draw(Rng& rng) const {
        const double u = uniform01(rng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const size_t k = std::min(static_cast<size_t>(it - cdf.begin()), cdf.size() - 1);
        return indices[k];
    }
};

struct RegimeSampler {
    CdfSampler attempt;    // attempt target M over its support
    CdfSampler fallback;   // p0(.|S), used by revert/retry failure branches
    std::vector<bool> feasible_mask; // per universe index
    double infeasible_mass;

    RegimeSampler(const SimConfig& config)
        : attempt(make_attempt(config)),
          fallback(make_fallback(config)),
          feasible_mask(make_mask(config)),
          infeasible_mass(compute_infeasible(config)) {}

    static Dist attempt_dist(const SimConfig& config) {
        const Dist p0 = luce_choice(config.params.weights, config.menu.feasible());
        return attempt_target(p0, config.exposure, config.params.alpha);
    }

    static CdfSampler make_attempt(const SimConfig& config) {
        const Dist m = attempt_dist(config);
        return CdfSampler(m.support(), m.masses());
    }

    static CdfSampler make_fallback(const SimConfig& config) {
        const Dist p0 = luce_choice(config.params.weights, config.menu.feasible());
        return CdfSampler(p0.support(), p0.masses());
    }

    static std::vector<bool> make_mask(const SimConfig& config) {
        std::vector<bool> mask(static_cast<size_t>(config.menu.universe_size()), false);
        for (int x : config.menu.feasible()) mask[static_cast<size_t>(x)] = true;
        return mask;
    }

    static double compute_infeasible(const SimConfig& config) {
        const Dist m = attempt_dist(config);
        return 1.0 - m.sum_over(config.menu.feasible());
    }

    int draw(const SimConfig& config, Rng& rng, std::int64_t* attempts) const {
        for (std::int64_t attempt_no = 1; attempt_no <= config.max_attempts; ++attempt_no) {
            const int y = attempt.draw(rng);
            if (feasible_mask[static_cast<size_t>(y)]) {
                if (attempts) *attempts = attempt_no;
                return y;
            }
            switch (config.rule) {
                case FailureRule::persist:
                    break; // redraw
                case FailureRule::revert:
                    if (attempts) *attempts = attempt_no;
                    return fallback.draw(rng);
                case FailureRule::retry:
                    if (uniform01(rng) < config.retry_prob) break; // redraw
                    if (attempts) *attempts = attempt_no;
                    return fallback.draw(rng);
            }
        }
        throw Error("non-termination guard tripped after " + std::to_string(config.max_attempts) +
                    " attempts (infeasible-run probability <= (" + std::to_string(infeasible_mass) +
                    ")^max_attempts)");
    }
};

} // namespace

int draw_once(const SimConfig& config, Rng& rng, std::int64_t* attempts) {
    return RegimeSampler(config).draw(config, rng, attempts);
}

ChoiceCounts simulate_regime(const SimConfig& config, Rng& rng) {
    const RegimeSampler sampler(config);
    const IndexSet& S = config.menu.feasible();
    ChoiceCounts out;
    out.alternatives = S;
    out.counts.assign(S.size(), 0);
    out.total = config.n_draws;
    for (std::int64_t i = 0; i < config.n_draws; ++i) {
        std::int64_t attempts = 0;
        const int x = sampler.draw(config, rng, &attempts);
        out.total_attempts += attempts;
        const auto it = std::lower_bound(S.begin(), S.end(), x);
        ++out.counts[static_cast<size_t>(it - S.begin())];
    }
    return out;
}

std::vector<double> ChoiceCounts::shares() const {
    std::vector<double> out(counts.size());
    for (size_t i = 0; i < counts.size(); ++i) {
        out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    return out;
}

Dataset simulate_dataset(const ModelParams& params, const std::vector<RegimeSpec>& regimes,
                         std::uint64_t seed) {
    if (regimes.empty()) {
        throw ValidationError("simulate_dataset: empty regime list");
    }
    const int universe_size = regimes.front().menu.universe_size();
    for (const auto& r : regimes) {
        if (r.menu.universe_size() != universe_size) {
            throw ValidationError("simulate_dataset: regimes on mismatched universes");
        }
    }
    Dataset out;
    out.regimes = regimes;
    out.counts.reserve(regimes.size());
    for (size_t i = 0; i < regimes.size(); ++i) {
        const auto& r = regimes[i];
        SimConfig config(params, r.menu, r.exposure, r.n_draws, r.rule, r.retry_prob);
        Rng rng(substream_seed(seed, i));
        out.counts.push_back(simulate_regime(config, rng));
    }
    return out;
}

} // namespace awlm::sim
