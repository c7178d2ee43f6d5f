#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "awlm/types.hpp"

namespace awlm::axioms {

/// One observed exposure/choice pair on a fixed feasible set.
struct QPPoint {
    Dist q; ///< exposure on the influencer menu
    Dist P; ///< induced choice, supported exactly on S
};

/// Observations sharing one feasible share mu (grouped by the caller; two
/// exposures count as the same level when their shares agree within 1e-9).
struct LevelSlice {
    MenuPair menu;
    double mu = 0.0;
    std::vector<QPPoint> points;
};

struct CheckReport {
    std::string name;
    bool pass = true;
    double worst_violation = 0.0;
    std::string location; ///< coordinates / pair indices of the worst violation
};

struct LambdaFit {
    double lambda = 0.0;
    std::vector<double> intercept; ///< a(S,mu), in S coordinate order
    double residual = 0.0;         ///< worst pairwise deviation from the pooled lambda
};

struct LeverageEntry {
    double mu = 0.0;
    double lambda = 0.0;
    std::vector<double> intercept;
};

struct LeverageProfile {
    MenuPair menu;
    std::vector<LeverageEntry> entries;
};

struct LeverageCheck {
    double kappa = 0.0;
    CheckReport report;
};

struct PerMenuRecovery {
    MenuPair menu;
    double kappa = 0.0;
    double alpha_S = 0.0;
    Dist p0_S;
    /// keys: "leverage_line", "intercept_stability", "negativity"
    std::map<std::string, double> residual_report;
};

/// Choice invariance under reallocation of exposure off S. Each pair must
/// satisfy q|_S = q'|_S within 1e-9 (violating pairs are rejected, not
/// flagged); the check then flags any pair with a choice gap above tol.
CheckReport check_intra_aspiration(std::span<const std::pair<QPPoint, QPPoint>> pairs,
                                   const IndexSet& S, double tol);

/// Collinearity of choice shifts with feasible-exposure shifts at a common
/// feasible share: all 2x2 cross-products of (P1-P2, q1|_S - q2|_S) within tol.
CheckReport check_proportional_response(const Dist& q1, const Dist& P1,
                                        const Dist& q2, const Dist& P2,
                                        const IndexSet& S, double tol);

/// Pooled least-squares fit of choice shifts on exposure shifts within one
/// level. Fails with DegenerateError when every point shares one restriction.
LambdaFit estimate_lambda(const LevelSlice& slice);

/// estimate_lambda over each slice, assembled into a profile sorted by mu.
LeverageProfile build_leverage_profile(const std::vector<LevelSlice>& slices);

/// Unit-slope law across levels: 1/lambda(mu1) - 1/lambda(mu2) = mu1 - mu2,
/// with 1/lambda(mu) > mu throughout. Returns kappa = mean(1/lambda - mu).
LeverageCheck check_leverage_line(const LeverageProfile& profile, double tol);

/// Collinearity of choices with the common within-feasible composition when
/// only the feasible share moves.
CheckReport check_radial_consistency(const Dist& q1, const Dist& P1,
                                     const Dist& q2, const Dist& P2,
                                     const IndexSet& S, double tol);

/// Per-menu parameter recovery: alpha_S = 1/(1+kappa) and p0 from the
/// normalized level intercepts, which must share one direction across levels.
/// Menus with fewer than three alternatives are rejected (they only support
/// consistency checks, not recovery).
PerMenuRecovery recover_per_menu(const LeverageProfile& profile, double tol);

/// Cross-menu odds consistency of recovered idiosyncratic distributions.
/// Each element's support is its menu; all must be interior.
CheckReport check_luce_consistency(const std::vector<Dist>& family, double tol);

/// One weight vector reproducing every family member by normalization,
/// anchored at u(first universe alternative) = 1. Noisy families are fit by
/// least squares on log odds. The menus must jointly cover the universe and
/// overlap into a single connected component.
LuceWeights fit_global_weights(const std::vector<Dist>& family, int universe_size);

/// Default tolerance for noisy-share checks: 3 * sqrt(max_x P(x)(1-P(x)) / n).
double default_noise_tol(std::span<const double> shares, std::int64_t n);

} // namespace awlm::axioms
