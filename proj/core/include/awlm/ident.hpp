#pragma once

#include <optional>
#include <string>
#include <vector>

#include "awlm/numeric.hpp"
#include "awlm/types.hpp"

namespace awlm::ident {

/// Two exposure regimes observed on one feasible set.
struct ExposurePair {
    MenuPair menu;
    Dist q1;
    Dist q2;
    Dist P1; ///< on menu.feasible()
    Dist P2;

    ExposurePair(MenuPair menu_, Dist q1_, Dist q2_, Dist P1_, Dist P2_);
};

/// The observable sides of the two-exposure identity Delta = alpha * A:
///   Delta = P2 - P1,
///   A     = (q2 - q1)|_S + (1 - q2_S) P2 - (1 - q1_S) P1.
struct DeltaA {
    std::vector<double> delta;
    std::vector<double> A;
};

DeltaA delta_and_A(const ExposurePair& pair);

struct IdentResult {
    bool degenerate = false;   ///< A vanished: the pair carries no information
    bool out_of_class = false; ///< recovered ratio falls outside (0,1)
    std::optional<double> alpha;
    std::optional<Dist> p0;
    /// Delta(x)/A(x) per S coordinate; empty slots where |A(x)| <= tol.
    std::vector<std::optional<double>> coordinate_ratios;
};

/// Reads alpha off the most informative coordinate and treats the remaining
/// ratios as consistency checks; disagreement beyond tol means the pair is
/// not AWLM-generated and throws ModelViolationError.
IdentResult recover_alpha_pair(const ExposurePair& pair, double tol = 1e-10);

/// alpha = lambda / (1 + lambda (1 - q_S)), the inverse of the level
/// multiplier map.
double alpha_from_lambda(double lambda, double q_S);

struct EqualShareFit {
    double lambda = 0.0;
    double alpha = 0.0;
};

/// Shortcut for pairs with equal feasible shares: the per-coordinate ratio
/// (P2-P1)/(q2-q1) is a single multiplier, inverted to alpha.
EqualShareFit equal_share_lambda(const ExposurePair& pair);

/// Inverts the pre-normalization identity at a known alpha:
///   p0(x) = [D(alpha) P(x) - alpha q(x)] / (1 - alpha).
/// Coordinates below -tol mean the data are not rationalizable at this alpha.
Dist recover_p0(double alpha, const Dist& q, const Dist& P, const IndexSet& S,
                double tol = 1e-9);

struct Regime {
    Dist q;
    Dist P;
};

struct RationalizabilityResult {
    bool rationalizable = false;
    bool underdetermined = false; ///< every pair degenerate: A == 0 throughout
    std::optional<double> alpha;
    std::optional<Dist> p0;
    std::vector<std::string> violations;
};

/// Searches for one (alpha, p0) reproducing every regime: all pairwise
/// identities within tol and a common nonnegative recovered idiosyncratic
/// vector. Failure is reported, never thrown.
RationalizabilityResult rationalizability_check(const std::vector<Regime>& regimes,
                                                const IndexSet& S, double tol);

/// Pooled least squares through the origin: sum<Delta,A> / sum<A,A>.
double ls_alpha(const std::vector<DeltaA>& pairs);

struct LsP0 {
    Dist p0;
    bool projected = false; ///< the Euclidean simplex projection was needed
};

/// Average of the per-regime recovered vectors b_i(alpha)/(1-alpha),
/// projected onto the simplex when sampling noise pushes it outside.
LsP0 ls_p0(double alpha, const std::vector<Regime>& regimes, const IndexSet& S);

/// Exposure profile used for design diagnostics.
struct Design {
    MenuPair menu;
    std::vector<Dist> exposures;

    Design(MenuPair menu_, std::vector<Dist> exposures_);
};

/// Jacobian of the stacked forward map (alpha, p0) -> (P_1, ..., P_K), with
/// K*|S| rows. Column 0 differentiates in alpha; columns 1..|S|-1 span the
/// simplex tangent directions e_j - e_last.
Matrix phi_jacobian(double alpha, const Dist& p0, const Design& design);

struct GenericityReport {
    bool applicable = false; ///< false when K < 3
    bool generic = false;    ///< feasible restrictions not affinely collinear
    int rank = 0;            ///< rank of the difference matrix [v_i - v_1]
    std::string note;
    /// When collinear: universe index of the coordinate whose perturbation
    /// breaks the common line.
    std::optional<int> perturb_coordinate;
};

/// Detects affine collinearity of the feasible restrictions {q_i|_S}.
GenericityReport design_genericity_check(const Design& design);

} // namespace awlm::ident
