#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "awlm/numeric.hpp"
#include "awlm/types.hpp"

namespace awlm::gmm {

struct RegimeData {
    std::vector<double> exposure_restriction; ///< q_i|_S in S coordinate order
    std::vector<double> shares;               ///< empirical choice shares on S
    std::int64_t n = 1;                       ///< observations behind the shares
};

struct GmmDataset {
    MenuPair menu;
    std::vector<RegimeData> regimes;

    GmmDataset(MenuPair menu_, std::vector<RegimeData> regimes_);

    int m() const { return static_cast<int>(menu.feasible().size()); }
    int K() const { return static_cast<int>(regimes.size()); }
    std::int64_t total_n() const;
};

/// Weight families for the minimum-distance criterion, expressed on the
/// reduced (last-coordinate-dropped) moments. identity and proportional are
/// the (pi_i-scaled) identity on the *full* moment vector; because the full
/// moments sum to zero, that weight carries to reduced space as I + 11^T.
enum class WeightKind { identity, proportional, optimal };

struct WeightSpec {
    WeightKind kind = WeightKind::identity;
    double ridge = 0.0; ///< 0 = automatic (1e-10 * trace/(m-1)) when near-singular
    /// Evaluate the alpha block of the Jacobian at the model-implied choice
    /// instead of the empirical shares when forming standard errors.
    bool model_implied_jacobian = false;
};

struct SearchConfig {
    int grid_points = 200;
    double alpha_lo = 1e-4;
    double alpha_hi = 1.0 - 1e-4;
    double alpha_tol = 1e-10; ///< golden-section termination width
};

struct GmmEstimate {
    double alpha_hat = 0.0;
    std::vector<double> p0_hat; ///< all m coordinates; last = 1 - sum(rest)
    double se_alpha = 0.0;
    std::vector<double> se_p0;  ///< m entries; the dropped coordinate by the delta method
    double J_stat = 0.0;
    int df = 0;
    double p_value = 1.0;
    double criterion_min = 0.0;
    std::vector<std::pair<double, double>> criterion_trace; ///< grid (alpha, Q)
    WeightKind weight_kind = WeightKind::identity;
    bool ridge_used = false;
    bool boundary = false; ///< alpha_hat pinned at a search boundary
};

/// Pre-normalization residual on S:
///   m_i = D_i(alpha) P_hat_i - (1-alpha) p0 - alpha q_i|_S,
/// with D_i(alpha) = (1-alpha) + alpha sum(q_i|_S).
std::vector<double> moment(double alpha, std::span<const double> p0,
                           std::span<const double> P_hat,
                           std::span<const double> exposure_restriction);

/// Drops the last coordinate (the selector H under the canonical ordering).
std::vector<double> reduce(std::span<const double> v);

/// Reduced multinomial covariance H (diag(P) - P P^T) H^T, with a ridge added
/// when the smallest eigenvalue falls below 1e-12.
Matrix multinomial_cov(std::span<const double> P, double ridge = 0.0,
                       bool* ridge_used = nullptr);

/// GLS closed form for the idiosyncratic block at fixed alpha:
///   p0~(alpha) = (1/(1-alpha)) (sum W_i)^-1 sum W_i H(D_i P_hat_i - alpha q_i|_S).
std::vector<double> concentrate_p0(double alpha, const GmmDataset& dataset,
                                   const std::vector<Matrix>& W);

/// N * m~(theta)^T W m~(theta) at theta = (alpha, p0~(alpha)).
double concentrated_criterion(double alpha, const GmmDataset& dataset,
                              const std::vector<Matrix>& W);

/// Grid-then-golden-section minimum-distance estimation, two-step for
/// WeightKind::optimal; reports the efficient-weight J statistic, closed-form
/// Jacobian standard errors, and the chi-square p-value.
GmmEstimate estimate(const GmmDataset& dataset, const WeightSpec& spec = {},
                     const SearchConfig& search = {});

/// Jacobian of the stacked reduced mean moments in theta = (alpha, p0~):
/// the alpha column is H((q_iS - 1) P_i + p0 - q_i|_S); the p0~ block is
/// -(1-alpha) I. P_i is the empirical share by default; set model_implied to
/// evaluate at the model-induced choice instead.
Matrix jacobian_G(double alpha, std::span<const double> p0, const GmmDataset& dataset,
                  bool model_implied = false);

/// Survival function of the chi-square distribution via the regularized
/// incomplete gamma (series + continued fraction), absolute error <= 1e-10.
/// df = 0 is the point mass at zero.
double chi2_upper_tail(double x, int df);

/// The reduced-space weight blocks behind each WeightKind. For optimal, the
/// plug-in covariance is evaluated at alpha_for_omega.
std::vector<Matrix> weight_blocks(const GmmDataset& dataset, WeightKind kind,
                                  double alpha_for_omega, double ridge,
                                  bool* ridge_used);

} // namespace awlm::gmm
