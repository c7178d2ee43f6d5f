#pragma once

#include <span>
#include <vector>

#include "awlm/types.hpp"

namespace awlm {

/// Uninfluenced Luce choice on S: p0(x|S) = u(x) / sum_{y in S} u(y).
Dist luce_choice(const LuceWeights& weights, const IndexSet& S);

/// Total exposure mass on S.
double feasible_share(const Dist& q, std::span<const int> S);

/// Exposure restricted to S and renormalized. Requires positive feasible share.
Dist conditional_composition(const Dist& q, const IndexSet& S);

/// Attempt target on the universe: (1-alpha) * zero-extension(p0) + alpha * q.
/// Accepts alpha in [0,1].
Dist attempt_target(const Dist& p0, const Dist& q, double alpha);

/// Induced feasible choice:
///   p(x|S) = [(1-alpha) p0(x) + alpha q(x)] / [(1-alpha) + alpha q_S].
/// Accepts alpha in [0,1]; alpha = 1 with q_S = 0 is undefined and throws.
Dist awlm_choice(const Dist& p0, const Dist& q, double alpha, const IndexSet& S);

/// Outcome-level effective weight beta = alpha q_S / [(1-alpha) + alpha q_S].
/// Increasing in both arguments, bounded by alpha.
double effective_weight(double alpha, double q_S);

/// Same choice distribution as awlm_choice, built as the beta-mixture
/// (1-beta) p0 + beta q(.|S). Requires q_S > 0.
Dist mixture_decomposition(const Dist& p0, const Dist& q, double alpha, const IndexSet& S);

/// Choice shift p(.|S;q') - p(.|S;q) when q and q' share their within-feasible
/// composition. Cross-checked against the scalar form
/// (beta(q'_S) - beta(q_S)) * (q(.|S) - p0) to 1e-12; compositions differing
/// by more than 1e-12 are rejected.
std::vector<double> dampening_shift(const Dist& p0, const Dist& q, const Dist& q_prime,
                                    double alpha, const IndexSet& S);

/// Effective weight when an infeasible draw is retried with probability r:
///   beta_r = alpha q_S / [1 - alpha r (1 - q_S)].
/// r = 1 reproduces effective_weight, r = 0 gives alpha * q_S.
double retry_effective_weight(double alpha, double q_S, double r);

} // namespace awlm
