#include "awlm/ident.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace awlm::ident {

namespace {

void require_on_feasible(const Dist& P, const IndexSet& S, const char* what) {
    if (P.support() != S) {
        throw ValidationError(std::string(what) + " must be supported exactly on the feasible set");
    }
}

std::vector<double> b_vector(double alpha, const Dist& q, const Dist& P, const IndexSet& S) {
    const double q_S = q.sum_over(S);
    const double D = (1.0 - alpha) + alpha * q_S;
    std::vector<double> b(S.size());
    for (size_t i = 0; i < S.size(); ++i) {
        b[i] = D * P.masses()[i] - alpha * q.mass(S[i]);
    }
    return b;
}

DeltaA delta_and_A_raw(const Dist& q1, const Dist& P1, const Dist& q2, const Dist& P2,
                       const IndexSet& S) {
    const double s1 = q1.sum_over(S);
    const double s2 = q2.sum_over(S);
    DeltaA out;
    out.delta.resize(S.size());
    out.A.resize(S.size());
    for (size_t i = 0; i < S.size(); ++i) {
        out.delta[i] = P2.masses()[i] - P1.masses()[i];
        out.A[i] = (q2.mass(S[i]) - q1.mass(S[i])) + (1.0 - s2) * P2.masses()[i] -
                   (1.0 - s1) * P1.masses()[i];
    }
    return out;
}

} // namespace

ExposurePair::ExposurePair(MenuPair menu_, Dist q1_, Dist q2_, Dist P1_, Dist P2_)
    : menu(std::move(menu_)), q1(std::move(q1_)), q2(std::move(q2_)),
      P1(std::move(P1_)), P2(std::move(P2_)) {
    require_on_feasible(P1, menu.feasible(), "P1");
    require_on_feasible(P2, menu.feasible(), "P2");
}

DeltaA delta_and_A(const ExposurePair& pair) {
    return delta_and_A_raw(pair.q1, pair.P1, pair.q2, pair.P2, pair.menu.feasible());
}

IdentResult recover_alpha_pair(const ExposurePair& pair, double tol) {
    const DeltaA da = delta_and_A(pair);
    IdentResult result;
    result.coordinate_ratios.assign(da.A.size(), std::nullopt);

    size_t best = 0;
    double best_abs = 0.0;
    for (size_t i = 0; i < da.A.size(); ++i) {
        const double a = std::abs(da.A[i]);
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
        if (a > tol) result.coordinate_ratios[i] = da.delta[i] / da.A[i];
    }
    if (best_abs <= tol) {
        result.degenerate = true;
        return result;
    }
    const double alpha = da.delta[best] / da.A[best];
    for (const auto& r : result.coordinate_ratios) {
        if (r && std::abs(*r - alpha) > tol) {
            throw ModelViolationError("ratio inconsistency: coordinate ratios of Delta/A disagree");
        }
    }
    result.alpha = alpha;
    result.out_of_class = !(alpha > 0.0 && alpha < 1.0);
    return result;
}

double alpha_from_lambda(double lambda, double q_S) {
    return lambda / (1.0 + lambda * (1.0 - q_S));
}

EqualShareFit equal_share_lambda(const ExposurePair& pair) {
    const IndexSet& S = pair.menu.feasible();
    const double s1 = pair.q1.sum_over(S);
    const double s2 = pair.q2.sum_over(S);
    if (std::abs(s1 - s2) > 1e-9) {
        throw ValidationError("equal-share shortcut requires equal feasible shares");
    }
    size_t best = 0;
    double best_abs = 0.0;
    for (size_t i = 0; i < S.size(); ++i) {
        const double dq = pair.q2.mass(S[i]) - pair.q1.mass(S[i]);
        if (std::abs(dq) > best_abs) {
            best_abs = std::abs(dq);
            best = i;
        }
    }
    if (best_abs <= 1e-12) {
        throw DegenerateError("equal-share shortcut: no coordinate varies across exposures");
    }
    EqualShareFit fit;
    fit.lambda = (pair.P2.masses()[best] - pair.P1.masses()[best]) /
                 (pair.q2.mass(S[best]) - pair.q1.mass(S[best]));
    fit.alpha = alpha_from_lambda(fit.lambda, s1);
    return fit;
}

Dist recover_p0(double alpha, const Dist& q, const Dist& P, const IndexSet& S, double tol) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError("p0 recovery needs alpha strictly inside (0,1)");
    }
    require_on_feasible(P, S, "P");
    std::vector<double> p0 = b_vector(alpha, q, P, S);
    bool clamped = false;
    for (double& x : p0) {
        x /= (1.0 - alpha);
        if (x < 0.0) {
            if (x < -tol) {
                throw ModelViolationError("not rationalizable at this alpha: negative recovered mass");
            }
            x = 0.0;
            clamped = true;
        }
    }
    if (clamped) {
        double total = 0.0;
        for (double x : p0) total += x;
        for (double& x : p0) x /= total;
    }
    return Dist(S, std::move(p0));
}

RationalizabilityResult rationalizability_check(const std::vector<Regime>& regimes,
                                                const IndexSet& S, double tol) {
    if (regimes.size() < 2) {
        throw ValidationError("rationalizability needs at least two regimes");
    }
    for (const auto& r : regimes) require_on_feasible(r.P, S, "regime choice distribution");

    RationalizabilityResult result;
    const size_t K = regimes.size();

    struct PairInfo {
        size_t i, j;
        DeltaA da;
        double a_norm;
    };
    std::vector<PairInfo> pairs;
    for (size_t i = 0; i < K; ++i) {
        for (size_t j = i + 1; j < K; ++j) {
            DeltaA da = delta_and_A_raw(regimes[i].q, regimes[i].P, regimes[j].q, regimes[j].P, S);
            const double a_norm = sup_norm(da.A);
            pairs.push_back({i, j, std::move(da), a_norm});
        }
    }
    const auto* best = &pairs.front();
    for (const auto& p : pairs) {
        if (p.a_norm > best->a_norm) best = &p;
    }
    if (best->a_norm <= tol) {
        result.underdetermined = true;
        result.violations.push_back("underdetermined: A = 0 for every pair of regimes");
        return result;
    }

    size_t coord = 0;
    for (size_t i = 1; i < best->da.A.size(); ++i) {
        if (std::abs(best->da.A[i]) > std::abs(best->da.A[coord])) coord = i;
    }
    const double alpha = best->da.delta[coord] / best->da.A[coord];
    result.alpha = alpha;
    if (!(alpha > 0.0 && alpha < 1.0)) {
        std::ostringstream os;
        os << "recovered alpha = " << alpha << " lies outside (0,1)";
        result.violations.push_back(os.str());
        return result;
    }

    for (const auto& p : pairs) {
        double worst = 0.0;
        for (size_t i = 0; i < p.da.A.size(); ++i) {
            worst = std::max(worst, std::abs(p.da.delta[i] - alpha * p.da.A[i]));
        }
        if (worst > tol) {
            std::ostringstream os;
            os << "pair (" << p.i << "," << p.j << "): |Delta - alpha A| = " << worst;
            result.violations.push_back(os.str());
        }
    }

    std::vector<std::vector<double>> bs;
    bs.reserve(K);
    for (size_t i = 0; i < K; ++i) {
        bs.push_back(b_vector(alpha, regimes[i].q, regimes[i].P, S));
        for (size_t c = 0; c < S.size(); ++c) {
            if (bs[i][c] < -tol * (1.0 - alpha)) {
                std::ostringstream os;
                os << "regime " << i << ": recovered idiosyncratic mass negative at coordinate " << c;
                result.violations.push_back(os.str());
            }
        }
    }
    std::vector<double> b_mean(S.size(), 0.0);
    for (const auto& b : bs) {
        for (size_t c = 0; c < S.size(); ++c) b_mean[c] += b[c] / static_cast<double>(K);
    }
    for (size_t i = 0; i < K; ++i) {
        double gap = 0.0;
        for (size_t c = 0; c < S.size(); ++c) gap = std::max(gap, std::abs(bs[i][c] - b_mean[c]));
        if (gap / (1.0 - alpha) > tol) {
            std::ostringstream os;
            os << "regime " << i << ": recovered idiosyncratic vector drifts by " << gap / (1.0 - alpha);
            result.violations.push_back(os.str());
        }
    }

    if (result.violations.empty()) {
        std::vector<double> p0(S.size());
        double total = 0.0;
        for (size_t c = 0; c < S.size(); ++c) {
            p0[c] = std::max(b_mean[c] / (1.0 - alpha), 0.0);
            total += p0[c];
        }
        for (double& x : p0) x /= total;
        result.p0 = Dist(S, std::move(p0));
        result.rationalizable = true;
    }
    return result;
}

double ls_alpha(const std::vector<DeltaA>& pairs) {
    double num = 0.0, den = 0.0;
    for (const auto& p : pairs) {
        num += dot(p.delta, p.A);
        den += dot(p.A, p.A);
    }
    if (den <= 1e-20) {
        throw DegenerateError("least-squares alpha: all A vectors vanish");
    }
    return num / den;
}

LsP0 ls_p0(double alpha, const std::vector<Regime>& regimes, const IndexSet& S) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError("ls_p0 needs alpha strictly inside (0,1)");
    }
    std::vector<double> mean(S.size(), 0.0);
    for (const auto& r : regimes) {
        require_on_feasible(r.P, S, "regime choice distribution");
        const auto b = b_vector(alpha, r.q, r.P, S);
        for (size_t c = 0; c < S.size(); ++c) {
            mean[c] += b[c] / ((1.0 - alpha) * static_cast<double>(regimes.size()));
        }
    }
    LsP0 out{Dist(S, std::vector<double>(S.size(), 1.0 / static_cast<double>(S.size()))), false};
    bool outside = false;
    for (double x : mean) {
        if (x < -kMassClampTol) outside = true;
    }
    if (outside) {
        out.p0 = Dist(S, project_to_simplex(mean));
        out.projected = true;
    } else {
        double total = 0.0;
        for (double& x : mean) {
            x = std::max(x, 0.0);
            total += x;
        }
        for (double& x : mean) x /= total;
        out.p0 = Dist(S, std::move(mean));
    }
    return out;
}

Design::Design(MenuPair menu_, std::vector<Dist> exposures_)
    : menu(std::move(menu_)), exposures(std::move(exposures_)) {
    if (exposures.empty()) {
        throw ValidationError("a design needs at least one exposure");
    }
}

Matrix phi_jacobian(double alpha, const Dist& p0, const Design& design) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError("phi_jacobian needs alpha strictly inside (0,1)");
    }
    const IndexSet& S = design.menu.feasible();
    require_on_feasible(p0, S, "p0");
    const int m = static_cast<int>(S.size());
    const int K = static_cast<int>(design.exposures.size());
    Matrix J(K * m, m);
    for (int i = 0; i < K; ++i) {
        const auto v = design.exposures[static_cast<size_t>(i)].restrict_to(S);
        double s = 0.0;
        for (double x : v) s += x;
        const double D = (1.0 - alpha) + alpha * s;
        for (int r = 0; r < m; ++r) {
            const double P = ((1.0 - alpha) * p0.masses()[static_cast<size_t>(r)] +
                              alpha * v[static_cast<size_t>(r)]) / D;
            J(i * m + r, 0) =
                (v[static_cast<size_t>(r)] - p0.masses()[static_cast<size_t>(r)] + (1.0 - s) * P) / D;
            for (int j = 0; j < m - 1; ++j) {
                double delta = 0.0;
                if (r == j) delta = 1.0;
                if (r == m - 1) delta = -1.0;
                J(i * m + r, 1 + j) = (1.0 - alpha) / D * delta;
            }
        }
    }
    return J;
}

GenericityReport design_genericity_check(const Design& design) {
    const IndexSet& S = design.menu.feasible();
    const int K = static_cast<int>(design.exposures.size());
    if (K < 2) {
        throw ValidationError("genericity check needs at least two exposures");
    }
    const int m = static_cast<int>(S.size());
    std::vector<std::vector<double>> v;
    v.reserve(static_cast<size_t>(K));
    for (const auto& q : design.exposures) v.push_back(q.restrict_to(S));

    Matrix diffs(K - 1, m);
    for (int i = 1; i < K; ++i) {
        for (int c = 0; c < m; ++c) {
            diffs(i - 1, c) = v[static_cast<size_t>(i)][static_cast<size_t>(c)] - v[0][static_cast<size_t>(c)];
        }
    }
    GenericityReport report;
    report.rank = numerical_rank(diffs, 1e-10);
    report.applicable = K >= 3;
    report.generic = report.applicable && report.rank >= 2;
    if (!report.applicable) {
        report.note = "K<3: genericity theorem inapplicable";
    } else if (report.generic) {
        report.note = "feasible restrictions span an affine plane";
    } else {
        report.note = "feasible restrictions are affinely collinear";
    }
    if (!report.generic) {
        // Direction of the common line; any coordinate axis off that line
        // breaks collinearity, the most orthogonal one breaks it fastest.
        std::vector<double> d(static_cast<size_t>(m), 0.0);
        for (int i = 0; i < K - 1; ++i) {
            double norm = 0.0;
            for (int c = 0; c < m; ++c) norm += diffs(i, c) * diffs(i, c);
            if (norm > 1e-20) {
                for (int c = 0; c < m; ++c) d[static_cast<size_t>(c)] = diffs(i, c);
                break;
            }
        }
        int coord = 0;
        double best = std::abs(d[0]);
        for (int c = 1; c < m; ++c) {
            if (std::abs(d[static_cast<size_t>(c)]) < best) {
                best = std::abs(d[static_cast<size_t>(c)]);
                coord = c;
            }
        }
        report.perturb_coordinate = S[static_cast<size_t>(coord)];
    }
    return report;
}

} // namespace awlm::ident
