#include "awlm/gmm.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace awlm::gmm {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd e(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
    return e;
}

Matrix from_eigen(const Eigen::MatrixXd& e) {
    Matrix m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) m(i, j) = e(i, j);
    return m;
}

double share_sum(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

} // namespace

GmmDataset::GmmDataset(MenuPair menu_, std::vector<RegimeData> regimes_)
    : menu(std::move(menu_)), regimes(std::move(regimes_)) {
    if (regimes.empty()) {
        throw ValidationError("a GMM dataset needs at least one regime");
    }
    const size_t m_sz = menu.feasible().size();
    for (const auto& r : regimes) {
        if (r.exposure_restriction.size() != m_sz || r.shares.size() != m_sz) {
            throw ValidationError("regime vectors must match the feasible set size");
        }
        if (r.n < 1) {
            throw ValidationError("regime sample size must be at least 1");
        }
    }
}

std::int64_t GmmDataset::total_n() const {
    std::int64_t total = 0;
    for (const auto& r : regimes) total += r.n;
    return total;
}

std::vector<double> moment(double alpha, std::span<const double> p0,
                           std::span<const double> P_hat,
                           std::span<const double> exposure_restriction) {
    const double D = (1.0 - alpha) + alpha * share_sum(exposure_restriction);
    std::vector<double> out(P_hat.size());
    for (size_t i = 0; i < out.size(); ++i) {
        out[i] = D * P_hat[i] - (1.0 - alpha) * p0[i] - alpha * exposure_restriction[i];
    }
    return out;
}

std::vector<double> reduce(std::span<const double> v) {
    if (v.empty()) return {};
    return std::vector<double>(v.begin(), v.end() - 1);
}

Matrix multinomial_cov(std::span<const double> P, double ridge, bool* ridge_used) {
    const int m = static_cast<int>(P.size());
    Eigen::MatrixXd sigma(m - 1, m - 1);
    for (int i = 0; i < m - 1; ++i) {
        for (int j = 0; j < m - 1; ++j) {
            sigma(i, j) = (i == j ? P[static_cast<size_t>(i)] : 0.0) -
                          P[static_cast<size_t>(i)] * P[static_cast<size_t>(j)];
        }
    }
    if (ridge_used) *ridge_used = false;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    if (es.eigenvalues().minCoeff() < 1e-12) {
        const double r = ridge > 0.0 ? ridge : 1e-10 * sigma.trace() / (m - 1);
        sigma += r * Eigen::MatrixXd::Identity(m - 1, m - 1);
        if (ridge_used) *ridge_used = true;
    }
    return from_eigen(sigma);
}

std::vector<Matrix> weight_blocks(const GmmDataset& dataset, WeightKind kind,
                                  double alpha_for_omega, double ridge, bool* ridge_used) {
    const int r = dataset.m() - 1;
    const double total_n = static_cast<double>(dataset.total_n());
    if (ridge_used) *ridge_used = false;
    std::vector<Matrix> W;
    W.reserve(static_cast<size_t>(dataset.K()));
    // Reduced image of the full-moment identity: I + 11^T.
    Eigen::MatrixXd full_identity =
        Eigen::MatrixXd::Identity(r, r) + Eigen::MatrixXd::Ones(r, r);
    for (const auto& regime : dataset.regimes) {
        const double pi = static_cast<double>(regime.n) / total_n;
        switch (kind) {
            case WeightKind::identity:
                W.push_back(from_eigen(full_identity));
                break;
            case WeightKind::proportional:
                W.push_back(from_eigen((pi * full_identity).eval()));
                break;
            case WeightKind::optimal: {
                bool flag = false;
                const Matrix cov = multinomial_cov(regime.shares, ridge, &flag);
                if (flag && ridge_used) *ridge_used = true;
                const double D = (1.0 - alpha_for_omega) +
                                 alpha_for_omega * share_sum(regime.exposure_restriction);
                const Eigen::MatrixXd omega = (D * D / pi) * to_eigen(cov);
                W.push_back(from_eigen(omega.inverse()));
                break;
            }
        }
    }
    return W;
}

std::vector<double> concentrate_p0(double alpha, const GmmDataset& dataset,
                                   const std::vector<Matrix>& W) {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw ValidationError("concentration needs alpha in [0,1)");
    }
    const int r = dataset.m() - 1;
    Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(r, r);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(r);
    for (int i = 0; i < dataset.K(); ++i) {
        const auto& regime = dataset.regimes[static_cast<size_t>(i)];
        const double D = (1.0 - alpha) + alpha * share_sum(regime.exposure_restriction);
        Eigen::VectorXd h(r);
        for (int c = 0; c < r; ++c) {
            h(c) = D * regime.shares[static_cast<size_t>(c)] -
                   alpha * regime.exposure_restriction[static_cast<size_t>(c)];
        }
        const Eigen::MatrixXd wi = to_eigen(W[static_cast<size_t>(i)]);
        sw += wi;
        acc += wi * h;
    }
    const Eigen::LDLT<Eigen::MatrixXd> solver(sw);
    if (solver.info() != Eigen::Success) {
        throw DegenerateError("singular pooled weight matrix in concentration");
    }
    const Eigen::VectorXd p0t = solver.solve(acc) / (1.0 - alpha);
    return std::vector<double>(p0t.data(), p0t.data() + r);
}

double concentrated_criterion(double alpha, const GmmDataset& dataset,
                              const std::vector<Matrix>& W) {
    const int r = dataset.m() - 1;
    const std::vector<double> p0t = concentrate_p0(alpha, dataset, W);
    double q = 0.0;
    for (int i = 0; i < dataset.K(); ++i) {
        const auto& regime = dataset.regimes[static_cast<size_t>(i)];
        const double D = (1.0 - alpha) + alpha * share_sum(regime.exposure_restriction);
        Eigen::VectorXd mt(r);
        for (int c = 0; c < r; ++c) {
            mt(c) = D * regime.shares[static_cast<size_t>(c)] -
                    alpha * regime.exposure_restriction[static_cast<size_t>(c)] -
                    (1.0 - alpha) * p0t[static_cast<size_t>(c)];
        }
        q += mt.dot(to_eigen(W[static_cast<size_t>(i)]) * mt);
    }
    return static_cast<double>(dataset.total_n()) * q;
}

namespace {

// Grid scan then golden-section refinement of the bracketing interval.
struct LineSearchResult {
    double alpha;
    double value;
    bool boundary;
    std::vector<std::pair<double, double>> trace;
};

LineSearchResult minimize_alpha(const GmmDataset& dataset, const std::vector<Matrix>& W,
                                const SearchConfig& search) {
    const int n = std::max(search.grid_points, 3);
    std::vector<std::pair<double, double>> trace;
    trace.reserve(static_cast<size_t>(n));
    int best = 0;
    for (int k = 0; k < n; ++k) {
        const double a = search.alpha_lo +
                         (search.alpha_hi - search.alpha_lo) * k / static_cast<double>(n - 1);
        const double v = concentrated_criterion(a, dataset, W);
        trace.emplace_back(a, v);
        if (v < trace[static_cast<size_t>(best)].second) best = k;
    }
    double lo = trace[static_cast<size_t>(std::max(best - 1, 0))].first;
    double hi = trace[static_cast<size_t>(std::min(best + 1, n - 1))].first;

    constexpr double inv_phi = 0.6180339887498949;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = concentrated_criterion(x1, dataset, W);
    double f2 = concentrated_criterion(x2, dataset, W);
    while (hi - lo > search.alpha_tol) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = concentrated_criterion(x1, dataset, W);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = concentrated_criterion(x2, dataset, W);
        }
    }
    LineSearchResult out;
    out.alpha = 0.5 * (lo + hi);
    out.value = concentrated_criterion(out.alpha, dataset, W);
    const double spacing = (search.alpha_hi - search.alpha_lo) / static_cast<double>(n - 1);
    out.boundary = (out.alpha - search.alpha_lo < 0.5 * spacing) ||
                   (search.alpha_hi - out.alpha < 0.5 * spacing);
    out.trace = std::move(trace);
    return out;
}

} // namespace

Matrix jacobian_G(double alpha, std::span<const double> p0, const GmmDataset& dataset,
                  bool model_implied) {
    const int m = dataset.m();
    const int r = m - 1;
    Matrix G(dataset.K() * r, m);
    for (int i = 0; i < dataset.K(); ++i) {
        const auto& regime = dataset.regimes[static_cast<size_t>(i)];
        const double s = share_sum(regime.exposure_restriction);
        const double D = (1.0 - alpha) + alpha * s;
        for (int c = 0; c < r; ++c) {
            double P = regime.shares[static_cast<size_t>(c)];
            if (model_implied) {
                P = ((1.0 - alpha) * p0[static_cast<size_t>(c)] +
                     alpha * regime.exposure_restriction[static_cast<size_t>(c)]) / D;
            }
            G(i * r + c, 0) = (s - 1.0) * P + p0[static_cast<size_t>(c)] -
                              regime.exposure_restriction[static_cast<size_t>(c)];
            for (int j = 0; j < r; ++j) {
                G(i * r + c, 1 + j) = (c == j) ? -(1.0 - alpha) : 0.0;
            }
        }
    }
    return G;
}

GmmEstimate estimate(const GmmDataset& dataset, const WeightSpec& spec,
                     const SearchConfig& search) {
    const int m = dataset.m();
    const int K = dataset.K();
    const int df = K * (m - 1) - m;
    if (df < 0) {
        throw DegenerateError("under-identified dataset: K(m-1) < m");
    }

    GmmEstimate out;
    out.weight_kind = spec.kind;
    out.df = df;

    // First pass always runs on the scaled-identity family; the optimal kind
    // re-minimizes under the plug-in inverse covariance.
    const WeightKind first_kind =
        spec.kind == WeightKind::proportional ? WeightKind::proportional : WeightKind::identity;
    std::vector<Matrix> W = weight_blocks(dataset, first_kind, 0.0, spec.ridge, nullptr);
    LineSearchResult line = minimize_alpha(dataset, W, search);

    if (spec.kind == WeightKind::optimal) {
        bool ridge_flag = false;
        W = weight_blocks(dataset, WeightKind::optimal, line.alpha, spec.ridge, &ridge_flag);
        out.ridge_used = ridge_flag;
        line = minimize_alpha(dataset, W, search);
    }

    out.alpha_hat = line.alpha;
    out.criterion_min = line.value;
    out.criterion_trace = std::move(line.trace);
    out.boundary = line.boundary;

    const std::vector<double> p0t = concentrate_p0(out.alpha_hat, dataset, W);
    out.p0_hat = p0t;
    double rest = 0.0;
    for (double x : p0t) rest += x;
    out.p0_hat.push_back(1.0 - rest);

    // J always uses the efficient quadratic form, whatever weight ran the search.
    bool ridge_flag_j = false;
    const std::vector<Matrix> omega_inv =
        weight_blocks(dataset, WeightKind::optimal, out.alpha_hat, spec.ridge, &ridge_flag_j);
    out.ridge_used = out.ridge_used || ridge_flag_j;
    if (spec.kind == WeightKind::optimal) {
        out.J_stat = out.criterion_min;
    } else {
        double q = 0.0;
        const int r = m - 1;
        for (int i = 0; i < K; ++i) {
            const auto& regime = dataset.regimes[static_cast<size_t>(i)];
            const double D = (1.0 - out.alpha_hat) +
                             out.alpha_hat * share_sum(regime.exposure_restriction);
            Eigen::VectorXd mt(r);
            for (int c = 0; c < r; ++c) {
                mt(c) = D * regime.shares[static_cast<size_t>(c)] -
                        out.alpha_hat * regime.exposure_restriction[static_cast<size_t>(c)] -
                        (1.0 - out.alpha_hat) * p0t[static_cast<size_t>(c)];
            }
            q += mt.dot(to_eigen(omega_inv[static_cast<size_t>(i)]) * mt);
        }
        out.J_stat = static_cast<double>(dataset.total_n()) * q;
    }
    out.J_stat = std::max(out.J_stat, 0.0);
    out.p_value = df == 0 ? 1.0 : chi2_upper_tail(out.J_stat, df);

    // Sandwich-free variance under efficient weighting: (G' Omega^-1 G)^-1 / N.
    const Matrix G = jacobian_G(out.alpha_hat, out.p0_hat, dataset, spec.model_implied_jacobian);
    const int r = m - 1;
    Eigen::MatrixXd gtog = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < K; ++i) {
        const Eigen::MatrixXd gi = to_eigen(G).block(i * r, 0, r, m);
        gtog += gi.transpose() * to_eigen(omega_inv[static_cast<size_t>(i)]) * gi;
    }
    const Eigen::MatrixXd V = gtog.inverse() / static_cast<double>(dataset.total_n());
    out.se_alpha = std::sqrt(std::max(V(0, 0), 0.0));
    out.se_p0.resize(static_cast<size_t>(m));
    for (int j = 0; j < r; ++j) {
        out.se_p0[static_cast<size_t>(j)] = std::sqrt(std::max(V(1 + j, 1 + j), 0.0));
    }
    // Dropped coordinate: p0_m = 1 - 1'p0~, so var = 1' V_p0 1.
    double last_var = 0.0;
    for (int a = 0; a < r; ++a) {
        for (int b = 0; b < r; ++b) last_var += V(1 + a, 1 + b);
    }
    out.se_p0[static_cast<size_t>(m - 1)] = std::sqrt(std::max(last_var, 0.0));
    return out;
}

} // namespace awlm::gmm
