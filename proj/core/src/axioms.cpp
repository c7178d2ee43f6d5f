#include "awlm/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "awlm/numeric.hpp"

namespace awlm::axioms {

namespace {

constexpr double kRestrictionTol = 1e-9; // same-level / same-restriction grouping

std::string coord_pair(int i, int j) {
    std::ostringstream os;
    os << "coordinates (" << i << "," << j << ")";
    return os.str();
}

} // namespace

CheckReport check_intra_aspiration(std::span<const std::pair<QPPoint, QPPoint>> pairs,
                                   const IndexSet& S, double tol) {
    CheckReport report;
    report.name = "intra_aspiration_irrelevance";
    for (size_t k = 0; k < pairs.size(); ++k) {
        const auto& [a, b] = pairs[k];
        const auto ra = a.q.restrict_to(S);
        const auto rb = b.q.restrict_to(S);
        for (size_t i = 0; i < S.size(); ++i) {
            if (std::abs(ra[i] - rb[i]) > kRestrictionTol) {
                throw ValidationError("intra-aspiration pair " + std::to_string(k) +
                                      " does not share its feasible restriction");
            }
        }
        double gap = 0.0;
        for (size_t i = 0; i < S.size(); ++i) {
            gap = std::max(gap, std::abs(a.P.masses()[i] - b.P.masses()[i]));
        }
        if (gap > report.worst_violation) {
            report.worst_violation = gap;
            report.location = "pair " + std::to_string(k);
        }
    }
    report.pass = report.worst_violation <= tol;
    return report;
}

CheckReport check_proportional_response(const Dist& q1, const Dist& P1,
                                        const Dist& q2, const Dist& P2,
                                        const IndexSet& S, double tol) {
    const double s1 = q1.sum_over(S);
    const double s2 = q2.sum_over(S);
    if (std::abs(s1 - s2) > kRestrictionTol) {
        throw ValidationError("proportional response requires equal feasible shares");
    }
    const auto v1 = q1.restrict_to(S);
    const auto v2 = q2.restrict_to(S);
    CheckReport report;
    report.name = "proportional_response";
    for (size_t x = 0; x < S.size(); ++x) {
        for (size_t y = x + 1; y < S.size(); ++y) {
            const double dpx = P1.masses()[x] - P2.masses()[x];
            const double dpy = P1.masses()[y] - P2.masses()[y];
            const double dqx = v1[x] - v2[x];
            const double dqy = v1[y] - v2[y];
            const double cross = std::abs(dpx * dqy - dpy * dqx);
            if (cross > report.worst_violation) {
                report.worst_violation = cross;
                report.location = coord_pair(static_cast<int>(x), static_cast<int>(y));
            }
        }
    }
    report.pass = report.worst_violation <= tol;
    return report;
}

LambdaFit estimate_lambda(const LevelSlice& slice) {
    const IndexSet& S = slice.menu.feasible();
    const auto& pts = slice.points;
    if (pts.size() < 2) {
        throw ValidationError("lambda estimation needs at least two points on the level");
    }
    std::vector<std::vector<double>> v;
    v.reserve(pts.size());
    for (const auto& p : pts) v.push_back(p.q.restrict_to(S));

    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < pts.size(); ++k) {
        for (size_t l = k + 1; l < pts.size(); ++l) {
            for (size_t i = 0; i < S.size(); ++i) {
                const double dv = v[k][i] - v[l][i];
                const double dp = pts[k].P.masses()[i] - pts[l].P.masses()[i];
                num += dp * dv;
                den += dv * dv;
            }
        }
    }
    if (den <= 1e-18) {
        throw DegenerateError("degenerate slice: all feasible restrictions coincide");
    }
    LambdaFit fit;
    fit.lambda = num / den;

    // Every informative pair must agree with the pooled multiplier.
    for (size_t k = 0; k < pts.size(); ++k) {
        for (size_t l = k + 1; l < pts.size(); ++l) {
            double pn = 0.0, pd = 0.0;
            for (size_t i = 0; i < S.size(); ++i) {
                const double dv = v[k][i] - v[l][i];
                pn += (pts[k].P.masses()[i] - pts[l].P.masses()[i]) * dv;
                pd += dv * dv;
            }
            if (pd > 1e-18) {
                fit.residual = std::max(fit.residual, std::abs(pn / pd - fit.lambda));
            }
        }
    }

    fit.intercept.assign(S.size(), 0.0);
    for (size_t k = 0; k < pts.size(); ++k) {
        for (size_t i = 0; i < S.size(); ++i) {
            fit.intercept[i] += pts[k].P.masses()[i] - fit.lambda * v[k][i];
        }
    }
    for (double& a : fit.intercept) a /= static_cast<double>(pts.size());
    return fit;
}

LeverageProfile build_leverage_profile(const std::vector<LevelSlice>& slices) {
    if (slices.empty()) {
        throw ValidationError("leverage profile needs at least one slice");
    }
    LeverageProfile profile{slices.front().menu, {}};
    for (const auto& slice : slices) {
        const LambdaFit fit = estimate_lambda(slice);
        profile.entries.push_back({slice.mu, fit.lambda, fit.intercept});
    }
    std::sort(profile.entries.begin(), profile.entries.end(),
              [](const LeverageEntry& a, const LeverageEntry& b) { return a.mu < b.mu; });
    return profile;
}

LeverageCheck check_leverage_line(const LeverageProfile& profile, double tol) {
    const auto& entries = profile.entries;
    if (entries.size() < 2) {
        throw ValidationError("leverage line needs at least two distinct levels");
    }
    for (const auto& e : entries) {
        if (!(e.lambda > 0.0) || 1.0 / e.lambda <= e.mu) {
            throw ModelViolationError("kappa nonpositive: outside AWLM class");
        }
    }
    LeverageCheck out;
    out.report.name = "leverage_line";
    double kappa_sum = 0.0;
    for (const auto& e : entries) kappa_sum += 1.0 / e.lambda - e.mu;
    out.kappa = kappa_sum / static_cast<double>(entries.size());

    for (size_t i = 0; i < entries.size(); ++i) {
        for (size_t j = i + 1; j < entries.size(); ++j) {
            const double lhs = 1.0 / entries[i].lambda - 1.0 / entries[j].lambda;
            const double rhs = entries[i].mu - entries[j].mu;
            const double viol = std::abs(lhs - rhs);
            if (viol > out.report.worst_violation) {
                out.report.worst_violation = viol;
                std::ostringstream os;
                os << "mu=" << entries[i].mu << " vs mu=" << entries[j].mu;
                out.report.location = os.str();
            }
        }
    }
    out.report.pass = out.report.worst_violation <= tol;
    return out;
}

CheckReport check_radial_consistency(const Dist& q1, const Dist& P1,
                                     const Dist& q2, const Dist& P2,
                                     const IndexSet& S, double tol) {
    const double s1 = q1.sum_over(S);
    const double s2 = q2.sum_over(S);
    if (!(s1 > 0.0) || !(s2 > 0.0)) {
        throw ValidationError("radial consistency needs positive feasible shares");
    }
    const auto r1 = q1.restrict_to(S);
    const auto r2 = q2.restrict_to(S);
    std::vector<double> v(S.size());
    for (size_t i = 0; i < S.size(); ++i) {
        v[i] = r1[i] / s1;
        if (std::abs(v[i] - r2[i] / s2) > kRestrictionTol) {
            throw ValidationError("radial consistency requires a common within-feasible composition");
        }
    }
    CheckReport report;
    report.name = "radial_consistency";
    for (size_t x = 0; x < S.size(); ++x) {
        for (size_t y = x + 1; y < S.size(); ++y) {
            const double ax = P1.masses()[x] - v[x];
            const double ay = P1.masses()[y] - v[y];
            const double bx = P2.masses()[x] - v[x];
            const double by = P2.masses()[y] - v[y];
            const double cross = std::abs(ax * by - ay * bx);
            if (cross > report.worst_violation) {
                report.worst_violation = cross;
                report.location = coord_pair(static_cast<int>(x), static_cast<int>(y));
            }
        }
    }
    report.pass = report.worst_violation <= tol;
    return report;
}

PerMenuRecovery recover_per_menu(const LeverageProfile& profile, double tol) {
    const IndexSet& S = profile.menu.feasible();
    if (S.size() < 3) {
        throw ValidationError("binary menus provide consistency checks only; recovery needs |S| >= 3");
    }
    const LeverageCheck leverage = check_leverage_line(profile, tol);

    // Normalized intercepts, entry by entry; their direction must not move.
    std::vector<std::vector<double>> pis;
    double worst_negative = 0.0;
    for (const auto& e : profile.entries) {
        const double total = std::accumulate(e.intercept.begin(), e.intercept.end(), 0.0);
        if (!(total > 0.0)) {
            throw ModelViolationError("level intercept has nonpositive total mass");
        }
        std::vector<double> pi(e.intercept.size());
        for (size_t i = 0; i < pi.size(); ++i) {
            pi[i] = e.intercept[i] / total;
            worst_negative = std::min(worst_negative, pi[i]);
        }
        pis.push_back(std::move(pi));
    }
    double stability = 0.0;
    for (size_t k = 1; k < pis.size(); ++k) {
        for (size_t i = 0; i < pis[k].size(); ++i) {
            stability = std::max(stability, std::abs(pis[k][i] - pis[0][i]));
        }
    }

    std::vector<double> p0(S.size(), 0.0);
    for (const auto& pi : pis) {
        for (size_t i = 0; i < p0.size(); ++i) p0[i] += pi[i];
    }
    double total = 0.0;
    for (double& x : p0) {
        x = std::max(x / static_cast<double>(pis.size()), 0.0);
        total += x;
    }
    for (double& x : p0) x /= total;

    PerMenuRecovery out{profile.menu, leverage.kappa, 1.0 / (1.0 + leverage.kappa),
                        Dist(S, std::move(p0)), {}};
    out.residual_report["leverage_line"] = leverage.report.worst_violation;
    out.residual_report["intercept_stability"] = stability;
    out.residual_report["negativity"] = -worst_negative;
    return out;
}

CheckReport check_luce_consistency(const std::vector<Dist>& family, double tol) {
    if (family.empty()) {
        throw ValidationError("Luce consistency needs a nonempty family");
    }
    for (const auto& d : family) {
        for (double m : d.masses()) {
            if (!(m > 0.0)) {
                throw ValidationError("Luce consistency needs interior distributions (zero odds denominator)");
            }
        }
    }
    CheckReport report;
    report.name = "luce_consistency";
    for (size_t a = 0; a < family.size(); ++a) {
        for (size_t b = a + 1; b < family.size(); ++b) {
            IndexSet overlap;
            std::set_intersection(family[a].support().begin(), family[a].support().end(),
                                  family[b].support().begin(), family[b].support().end(),
                                  std::back_inserter(overlap));
            for (size_t x = 0; x < overlap.size(); ++x) {
                for (size_t y = x + 1; y < overlap.size(); ++y) {
                    const double ra = family[a].mass(overlap[x]) / family[a].mass(overlap[y]);
                    const double rb = family[b].mass(overlap[x]) / family[b].mass(overlap[y]);
                    const double viol = std::abs(ra - rb);
                    if (viol > report.worst_violation) {
                        report.worst_violation = viol;
                        std::ostringstream os;
                        os << "menus (" << a << "," << b << "), alternatives (" << overlap[x]
                           << "," << overlap[y] << ")";
                        report.location = os.str();
                    }
                }
            }
        }
    }
    report.pass = report.worst_violation <= tol;
    return report;
}

LuceWeights fit_global_weights(const std::vector<Dist>& family, int universe_size) {
    if (family.empty()) {
        throw ValidationError("global weight fit needs a nonempty family");
    }
    // Union-find over alternatives; menus glue their members together.
    std::vector<int> parent(static_cast<size_t>(universe_size));
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<bool> covered(static_cast<size_t>(universe_size), false);
    auto find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    };
    for (const auto& d : family) {
        const auto& S = d.support();
        for (int x : S) covered[static_cast<size_t>(x)] = true;
        for (size_t i = 1; i < S.size(); ++i) {
            parent[static_cast<size_t>(find(S[i]))] = find(S[0]);
        }
        for (double m : d.masses()) {
            if (!(m > 0.0)) {
                throw ValidationError("global weight fit needs interior distributions");
            }
        }
    }
    for (int x = 0; x < universe_size; ++x) {
        if (!covered[static_cast<size_t>(x)] || find(x) != find(0)) {
            throw DegenerateError("u identified only per component: menu overlaps do not connect the universe");
        }
    }

    // Least squares on log odds with log u(reference) = 0 for the first
    // universe alternative.
    int n_rows = 0;
    for (const auto& d : family) {
        const int s = static_cast<int>(d.support().size());
        n_rows += s * (s - 1) / 2;
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_rows, universe_size - 1);
    Eigen::VectorXd rhs(n_rows);
    int row = 0;
    for (const auto& d : family) {
        const auto& S = d.support();
        for (size_t x = 0; x < S.size(); ++x) {
            for (size_t y = x + 1; y < S.size(); ++y) {
                if (S[x] > 0) A(row, S[x] - 1) += 1.0;
                if (S[y] > 0) A(row, S[y] - 1) -= 1.0;
                rhs(row) = std::log(d.masses()[x] / d.masses()[y]);
                ++row;
            }
        }
    }
    const Eigen::VectorXd z = A.colPivHouseholderQr().solve(rhs);
    std::vector<double> u(static_cast<size_t>(universe_size));
    u[0] = 1.0;
    for (int x = 1; x < universe_size; ++x) u[static_cast<size_t>(x)] = std::exp(z(x - 1));
    return LuceWeights(std::move(u));
}

double default_noise_tol(std::span<const double> shares, std::int64_t n) {
    double worst = 0.0;
    for (double p : shares) worst = std::max(worst, p * (1.0 - p));
    return 3.0 * std::sqrt(worst / static_cast<double>(std::max<std::int64_t>(n, 1)));
}

} // namespace awlm::axioms
