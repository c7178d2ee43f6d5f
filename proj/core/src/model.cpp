#include "awlm/model.hpp"

#include <algorithm>
#include <cmath>

#include "awlm/numeric.hpp"

namespace awlm {

namespace {

void require_unit_interval(double alpha, const char* what) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ValidationError(std::string(what) + " must lie in [0,1]");
    }
}

void require_dist_on(const Dist& d, const IndexSet& S, const char* what) {
    if (d.support() != S) {
        throw ValidationError(std::string(what) + " must be supported exactly on S");
    }
}

} // namespace

Dist luce_choice(const LuceWeights& weights, const IndexSet& S) {
    if (S.empty()) {
        throw ValidationError("luce_choice: feasible set is empty");
    }
    validate_subset(S, weights.size(), "luce_choice feasible set");
    double denom = 0.0;
    for (int x : S) denom += weights.weight(x);
    std::vector<double> mass;
    mass.reserve(S.size());
    for (int x : S) mass.push_back(weights.weight(x) / denom);
    return Dist(S, std::move(mass));
}

double feasible_share(const Dist& q, std::span<const int> S) {
    return q.sum_over(S);
}

Dist conditional_composition(const Dist& q, const IndexSet& S) {
    const double share = q.sum_over(S);
    if (!(share > 0.0)) {
        throw ValidationError("conditional_composition: no feasible exposure (q_S = 0)");
    }
    std::vector<double> mass = q.restrict_to(S);
    for (double& m : mass) m /= share;
    return Dist(S, std::move(mass));
}

Dist attempt_target(const Dist& p0, const Dist& q, double alpha) {
    require_unit_interval(alpha, "attempt_target: alpha");
    IndexSet support;
    std::set_union(p0.support().begin(), p0.support().end(),
                   q.support().begin(), q.support().end(),
                   std::back_inserter(support));
    std::vector<double> mass;
    mass.reserve(support.size());
    for (int x : support) {
        mass.push_back((1.0 - alpha) * p0.mass(x) + alpha * q.mass(x));
    }
    return Dist(std::move(support), std::move(mass));
}

Dist awlm_choice(const Dist& p0, const Dist& q, double alpha, const IndexSet& S) {
    require_unit_interval(alpha, "awlm_choice: alpha");
    require_dist_on(p0, S, "awlm_choice: p0");
    const double q_S = q.sum_over(S);
    const double denom = (1.0 - alpha) + alpha * q_S;
    if (!(denom > 0.0)) {
        throw ValidationError("awlm_choice: undefined pure-imitation (alpha = 1 with q_S = 0)");
    }
    std::vector<double> mass;
    mass.reserve(S.size());
    const auto& p0_mass = p0.masses();
    for (size_t i = 0; i < S.size(); ++i) {
        mass.push_back(((1.0 - alpha) * p0_mass[i] + alpha * q.mass(S[i])) / denom);
    }
    return Dist(S, std::move(mass));
}

double effective_weight(double alpha, double q_S) {
    require_unit_interval(alpha, "effective_weight: alpha");
    require_unit_interval(q_S, "effective_weight: q_S");
    const double denom = (1.0 - alpha) + alpha * q_S;
    if (!(denom > 0.0)) {
        throw ValidationError("effective_weight: undefined at alpha = 1 with q_S = 0");
    }
    return alpha * q_S / denom;
}

Dist mixture_decomposition(const Dist& p0, const Dist& q, double alpha, const IndexSet& S) {
    require_unit_interval(alpha, "mixture_decomposition: alpha");
    require_dist_on(p0, S, "mixture_decomposition: p0");
    const double q_S = q.sum_over(S);
    if (!(q_S > 0.0)) {
        throw ValidationError("mixture_decomposition: no feasible exposure (q_S = 0)");
    }
    const double beta = effective_weight(alpha, q_S);
    const Dist comp = conditional_composition(q, S);
    std::vector<double> mass;
    mass.reserve(S.size());
    for (size_t i = 0; i < S.size(); ++i) {
        mass.push_back((1.0 - beta) * p0.masses()[i] + beta * comp.masses()[i]);
    }
    return Dist(S, std::move(mass));
}

std::vector<double> dampening_shift(const Dist& p0, const Dist& q, const Dist& q_prime,
                                    double alpha, const IndexSet& S) {
    const Dist comp = conditional_composition(q, S);
    const Dist comp_prime = conditional_composition(q_prime, S);
    for (size_t i = 0; i < S.size(); ++i) {
        if (std::abs(comp.masses()[i] - comp_prime.masses()[i]) > 1e-12) {
            throw ModelViolationError("dampening_shift: not a pure feasible-share shift");
        }
    }
    const Dist p = awlm_choice(p0, q, alpha, S);
    const Dist p_prime = awlm_choice(p0, q_prime, alpha, S);
    std::vector<double> shift(S.size());
    for (size_t i = 0; i < S.size(); ++i) {
        shift[i] = p_prime.masses()[i] - p.masses()[i];
    }
    // Scalar form of the same shift; both routes must agree.
    const double dbeta = effective_weight(alpha, q_prime.sum_over(S)) - effective_weight(alpha, q.sum_over(S));
    for (size_t i = 0; i < S.size(); ++i) {
        const double predicted = dbeta * (comp.masses()[i] - p0.masses()[i]);
        if (std::abs(shift[i] - predicted) > 1e-12) {
            throw ModelViolationError("dampening_shift: direct and scalar-form shifts disagree");
        }
    }
    return shift;
}

double retry_effective_weight(double alpha, double q_S, double r) {
    require_unit_interval(alpha, "retry_effective_weight: alpha");
    require_unit_interval(q_S, "retry_effective_weight: q_S");
    require_unit_interval(r, "retry_effective_weight: r");
    const double denom = 1.0 - alpha * r * (1.0 - q_S);
    if (!(denom > 0.0)) {
        throw ValidationError("retry_effective_weight: undefined at alpha = r = 1 with q_S = 0");
    }
    return alpha * q_S / denom;
}

} // namespace awlm
