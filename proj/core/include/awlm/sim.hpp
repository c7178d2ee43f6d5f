#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "awlm/types.hpp"

namespace awlm::sim {

/// All randomness flows through std::mt19937_64; uniforms are produced by the
/// 53-bit shift trick so draw sequences are identical across platforms for a
/// given seed.
using Rng = std::mt19937_64;

/// Uniform double in [0,1) from the top 53 bits of one generator word.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Deterministic per-regime seed: mixing (seed, regime_index) through
/// splitmix64 so appending a regime never perturbs earlier streams.
std::uint64_t substream_seed(std::uint64_t seed, std::size_t regime_index);

enum class FailureRule {
    persist, ///< redraw from the attempt target until a feasible draw (r = 1)
    revert,  ///< one attempt, then fall back to the idiosyncratic rule (r = 0)
    retry,   ///< retry with probability r, otherwise fall back to idiosyncratic
};

struct SimConfig {
    ModelParams params;
    MenuPair menu;
    Dist exposure;
    std::int64_t n_draws = 1;
    FailureRule rule = FailureRule::persist;
    double retry_prob = 1.0; ///< only read when rule == retry
    std::int64_t max_attempts = 1'000'000;

    SimConfig(ModelParams params_, MenuPair menu_, Dist exposure_, std::int64_t n_draws_,
              FailureRule rule_ = FailureRule::persist, double retry_prob_ = 1.0,
              std::int64_t max_attempts_ = 1'000'000);
};

struct ChoiceCounts {
    IndexSet alternatives;            ///< feasible set, canonical order
    std::vector<std::int64_t> counts; ///< aligned with alternatives
    std::int64_t total = 0;
    std::int64_t total_attempts = 0;  ///< attempt-target draws consumed overall

    std::vector<double> shares() const;
};

/// One choice: sample the attempt target until feasibility resolves per the
/// failure rule. Returns the chosen universe index (always in S). Throws
/// Error when max_attempts is exhausted. When `attempts` is non-null it
/// receives the number of attempt-target draws consumed (the stopping time).
int draw_once(const SimConfig& config, Rng& rng, std::int64_t* attempts = nullptr);

/// n_draws independent choices, tallied on S.
ChoiceCounts simulate_regime(const SimConfig& config, Rng& rng);

struct RegimeSpec {
    MenuPair menu;
    Dist exposure;
    std::int64_t n_draws;
    FailureRule rule = FailureRule::persist;
    double retry_prob = 1.0;
};

struct Dataset {
    std::vector<RegimeSpec> regimes;
    std::vector<ChoiceCounts> counts;
};

/// One ChoiceCounts per regime, each on its own substream of `seed`.
/// All regimes must live on the same universe.
Dataset simulate_dataset(const ModelParams& params, const std::vector<RegimeSpec>& regimes,
                         std::uint64_t seed);

} // namespace awlm::sim
