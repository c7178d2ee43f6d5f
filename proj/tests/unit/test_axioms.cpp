#include <doctest.h>

#include <cmath>

#include "awlm/axioms.hpp"
#include "awlm/model.hpp"
#include "helpers.hpp"

using namespace awlm;
using namespace testutil;

namespace {

// Exact model data: universe {a,b,c,d}, S = {a,b,c}, I = X, u = (3,1,1,2).
struct ModelFixture {
    Universe universe = make_universe(4);
    IndexSet S = range_set(0, 3);
    IndexSet I = range_set(0, 4);
    MenuPair menu{universe, S, I};
    LuceWeights u{{3.0, 1.0, 1.0, 2.0}};
    double alpha = 0.4;
    Dist p0 = luce_choice(u, S);

    axioms::QPPoint point(const std::vector<double>& comp, double share) const {
        const Dist q = make_exposure(S, comp, share, I);
        return {q, awlm_choice(p0, q, alpha, S)};
    }

    axioms::LevelSlice slice(double mu, const std::vector<std::vector<double>>& comps) const {
        axioms::LevelSlice s{menu, mu, {}};
        for (const auto& c : comps) s.points.push_back(point(c, mu));
        return s;
    }

    std::vector<std::vector<double>> default_comps() const {
        return {{0.6, 0.2, 0.2}, {0.2, 0.6, 0.2}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, {0.25, 0.5, 0.25}};
    }
};

} // namespace

TEST_CASE("intra-aspiration check") {
    const Universe universe = make_universe(4);
    const IndexSet S = range_set(0, 2);
    const IndexSet I = range_set(0, 4);
    const Dist p0(S, {0.75, 0.25});
    const double share = 0.5;
    const std::vector<double> comp{0.4, 0.6};
    const Dist q1({0, 1, 2, 3}, {share * comp[0], share * comp[1], 0.4, 0.1});
    const Dist q2({0, 1, 2, 3}, {share * comp[0], share * comp[1], 0.1, 0.4});
    const Dist P1 = awlm_choice(p0, q1, 0.4, S);
    const Dist P2 = awlm_choice(p0, q2, 0.4, S);

    std::vector<std::pair<axioms::QPPoint, axioms::QPPoint>> pairs{{{q1, P1}, {q2, P2}}};
    const auto ok = axioms::check_intra_aspiration(pairs, S, 1e-10);
    CHECK(ok.pass);

    const Dist P2_bad(S, {P2.masses()[0] + 0.05, P2.masses()[1] - 0.05});
    pairs[0].second.P = P2_bad;
    const auto bad = axioms::check_intra_aspiration(pairs, S, 1e-10);
    CHECK_FALSE(bad.pass);
    CHECK(bad.worst_violation == doctest::Approx(0.05).epsilon(1e-9));

    // restriction mismatch is a precondition failure, not a finding
    const Dist q3({0, 1, 2, 3}, {0.3, 0.2, 0.4, 0.1});
    pairs[0] = {{q1, P1}, {q3, P2}};
    CHECK_THROWS_AS(axioms::check_intra_aspiration(pairs, S, 1e-10), ValidationError);

    // non-identifiable pair: same restriction and share force P1 = P2
    pairs[0] = {{q1, P1}, {q2, P2}};
    CHECK(max_abs_diff(P1.masses(), P2.masses()) < 1e-15);
}

TEST_CASE("proportional response check") {
    const ModelFixture fx;
    const auto a = fx.point({0.6, 0.2, 0.2}, 0.5);
    const auto b = fx.point({0.2, 0.5, 0.3}, 0.5);
    const auto ok = axioms::check_proportional_response(a.q, a.P, b.q, b.P, fx.S, 1e-12);
    CHECK(ok.pass);

    std::vector<double> perturbed = b.P.masses();
    perturbed[0] += 0.05;
    perturbed[2] -= 0.05;
    const auto bad = axioms::check_proportional_response(a.q, a.P, b.q, Dist(fx.S, perturbed),
                                                         fx.S, 1e-12);
    CHECK_FALSE(bad.pass);

    const auto c = fx.point({0.3, 0.3, 0.4}, 0.7);
    CHECK_THROWS_AS(axioms::check_proportional_response(a.q, a.P, c.q, c.P, fx.S, 1e-12),
                    ValidationError);
}

TEST_CASE("lambda estimation on an exact level") {
    const ModelFixture fx;
    const auto slice = fx.slice(0.5, fx.default_comps());
    const auto fit = axioms::estimate_lambda(slice);
    // alpha / ((1-alpha) + alpha mu) with alpha = 2/5, mu = 1/2
    CHECK(std::abs(fit.lambda - 0.5) < 1e-12);
    CHECK(fit.residual < 1e-12);

    axioms::LevelSlice degenerate{fx.menu, 0.5, {fx.point({0.6, 0.2, 0.2}, 0.5),
                                                 fx.point({0.6, 0.2, 0.2}, 0.5)}};
    CHECK_THROWS_AS(axioms::estimate_lambda(degenerate), DegenerateError);

    axioms::LevelSlice single{fx.menu, 0.5, {fx.point({0.6, 0.2, 0.2}, 0.5)}};
    CHECK_THROWS_AS(axioms::estimate_lambda(single), ValidationError);
}

TEST_CASE("leverage line") {
    const ModelFixture fx;
    std::vector<axioms::LevelSlice> slices;
    for (double mu : {0.3, 0.5, 0.7}) slices.push_back(fx.slice(mu, fx.default_comps()));
    const auto profile = axioms::build_leverage_profile(slices);
    const auto check = axioms::check_leverage_line(profile, 1e-10);
    CHECK(check.report.pass);
    CHECK(std::abs(check.kappa - 1.5) < 1e-10); // (1-alpha)/alpha at alpha = 2/5

    SUBCASE("non-unit slope fails") {
        axioms::LeverageProfile wrong{fx.menu, {}};
        for (double mu : {0.3, 0.5, 0.7}) {
            wrong.entries.push_back({mu, 1.0 / (2.0 * mu + 1.5), std::vector<double>(3, 0.0)});
        }
        const auto bad = axioms::check_leverage_line(wrong, 1e-10);
        CHECK_FALSE(bad.report.pass);
    }
    SUBCASE("single entry is rejected") {
        axioms::LeverageProfile single{fx.menu, {profile.entries.front()}};
        CHECK_THROWS_AS(axioms::check_leverage_line(single, 1e-10), ValidationError);
    }
    SUBCASE("nonpositive kappa is outside the class") {
        axioms::LeverageProfile outside{fx.menu,
                                        {{0.3, 5.0, std::vector<double>(3, 0.0)},
                                         {0.7, 5.0, std::vector<double>(3, 0.0)}}};
        CHECK_THROWS_AS(axioms::check_leverage_line(outside, 1e-10), ModelViolationError);
    }
}

TEST_CASE("radial consistency") {
    const ModelFixture fx;
    const std::vector<double> comp{0.5, 0.3, 0.2};
    const auto a = fx.point(comp, 0.8);
    const auto b = fx.point(comp, 0.4);
    const auto ok = axioms::check_radial_consistency(a.q, a.P, b.q, b.P, fx.S, 1e-12);
    CHECK(ok.pass);

    std::vector<double> perturbed = b.P.masses();
    perturbed[1] += 0.05;
    perturbed[2] -= 0.05;
    const auto bad =
        axioms::check_radial_consistency(a.q, a.P, b.q, Dist(fx.S, perturbed), fx.S, 1e-12);
    CHECK_FALSE(bad.pass);

    SUBCASE("composition equal to p0 collapses both choices onto it") {
        const auto c = fx.point(fx.p0.masses(), 0.9);
        const auto d = fx.point(fx.p0.masses(), 0.2);
        CHECK(max_abs_diff(c.P.masses(), fx.p0.masses()) < 1e-14);
        const auto degenerate = axioms::check_radial_consistency(c.q, c.P, d.q, d.P, fx.S, 1e-12);
        CHECK(degenerate.pass);
        CHECK(degenerate.worst_violation < 1e-15);
    }
    SUBCASE("different compositions are a precondition failure") {
        const auto e = fx.point({0.2, 0.3, 0.5}, 0.4);
        CHECK_THROWS_AS(axioms::check_radial_consistency(a.q, a.P, e.q, e.P, fx.S, 1e-12),
                        ValidationError);
    }
}

TEST_CASE("per-menu recovery") {
    const ModelFixture fx;
    std::vector<axioms::LevelSlice> slices;
    for (double mu : {0.3, 0.5, 0.7}) slices.push_back(fx.slice(mu, fx.default_comps()));
    const auto profile = axioms::build_leverage_profile(slices);
    const auto recovery = axioms::recover_per_menu(profile, 1e-10);
    CHECK(std::abs(recovery.alpha_S - 0.4) < 1e-10);
    CHECK(std::abs(recovery.kappa - 1.5) < 1e-10);
    // u = (3,1,1) on S
    CHECK(std::abs(recovery.p0_S.masses()[0] - 0.6) < 1e-10);
    CHECK(std::abs(recovery.p0_S.masses()[1] - 0.2) < 1e-10);
    CHECK(recovery.residual_report.at("intercept_stability") < 1e-12);

    SUBCASE("kappa alone pins alpha") {
        CHECK(std::abs(1.0 / (1.0 + 1.5) - 0.4) < 1e-15);
    }
    SUBCASE("binary menus are rejected") {
        const MenuPair binary(fx.universe, range_set(0, 2), fx.I);
        axioms::LeverageProfile p2{binary, profile.entries};
        CHECK_THROWS_AS(axioms::recover_per_menu(p2, 1e-10), ValidationError);
    }
    SUBCASE("perturbed intercept direction shows up in the residuals") {
        auto broken = profile;
        broken.entries[2].intercept[0] += 0.05;
        broken.entries[2].intercept[1] -= 0.05;
        const auto rec = axioms::recover_per_menu(broken, 1e-10);
        CHECK(rec.residual_report.at("intercept_stability") > 0.01);
    }
}

TEST_CASE("alpha_S is constant across menus under one global model") {
    const Universe universe = make_universe(5);
    const LuceWeights u({3.0, 1.0, 1.0, 2.0, 1.5});
    const double alpha = 0.55;
    const IndexSet I = range_set(0, 5);
    std::vector<double> alphas;
    for (const IndexSet& S : {IndexSet{0, 1, 2}, IndexSet{0, 1, 3}, IndexSet{1, 2, 4}}) {
        const MenuPair menu(universe, S, I);
        const Dist p0 = luce_choice(u, S);
        std::vector<axioms::LevelSlice> slices;
        for (double mu : {0.35, 0.6, 0.85}) {
            axioms::LevelSlice s{menu, mu, {}};
            for (const auto& comp : {std::vector<double>{0.6, 0.2, 0.2},
                                     std::vector<double>{0.2, 0.6, 0.2},
                                     std::vector<double>{0.25, 0.25, 0.5}}) {
                const Dist q = make_exposure(S, comp, mu, I);
                s.points.push_back({q, awlm_choice(p0, q, alpha, S)});
            }
            slices.push_back(std::move(s));
        }
        alphas.push_back(axioms::recover_per_menu(axioms::build_leverage_profile(slices), 1e-9).alpha_S);
    }
    for (double a : alphas) CHECK(std::abs(a - 0.55) < 1e-10);
}

TEST_CASE("Luce consistency across menus") {
    const Universe universe = make_universe(4);
    const LuceWeights u({3.0, 1.0, 1.0, 2.0});
    const Dist p_abc = luce_choice(u, {0, 1, 2});
    const Dist p_abd = luce_choice(u, {0, 1, 3});
    CHECK(p_abc.mass(0) / p_abc.mass(1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(p_abd.mass(0) / p_abd.mass(1) == doctest::Approx(3.0).epsilon(1e-12));

    const auto ok = axioms::check_luce_consistency({p_abc, p_abd}, 1e-10);
    CHECK(ok.pass);

    // swap two masses in one menu
    const Dist swapped({0, 1, 3}, {p_abd.masses()[1], p_abd.masses()[0], p_abd.masses()[2]});
    const auto bad = axioms::check_luce_consistency({p_abc, swapped}, 1e-10);
    CHECK_FALSE(bad.pass);

    const Dist boundary({0, 1}, {1.0, 0.0});
    CHECK_THROWS_AS(axioms::check_luce_consistency({boundary}, 1e-10), ValidationError);
}

TEST_CASE("global weight fit") {
    SUBCASE("single menu, two alternatives") {
        const Dist p0({0, 1}, {0.75, 0.25});
        const auto u = axioms::fit_global_weights({p0}, 2);
        CHECK(u.weight(0) == doctest::Approx(1.0));
        CHECK(u.weight(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("two overlapping menus recover the generating weights") {
        const LuceWeights truth({3.0, 1.0, 1.0, 2.0});
        const Dist p_abc = luce_choice(truth, {0, 1, 2});
        const Dist p_abd = luce_choice(truth, {0, 1, 3});
        const auto u = axioms::fit_global_weights({p_abc, p_abd}, 4);
        CHECK(u.weight(0) == doctest::Approx(1.0));
        CHECK(u.weight(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(u.weight(2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(u.weight(3) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        // the fitted weights reproduce every family member by normalization
        const Dist back = luce_choice(u, {0, 1, 3});
        CHECK(max_abs_diff(back.masses(), p_abd.masses()) < 1e-12);
    }
    SUBCASE("disconnected families are rejected") {
        const LuceWeights truth({3.0, 1.0, 1.0, 2.0});
        const Dist p_ab = luce_choice(truth, {0, 1});
        const Dist p_cd = luce_choice(truth, {2, 3});
        CHECK_THROWS_AS(axioms::fit_global_weights({p_ab, p_cd}, 4), DegenerateError);
    }
}

TEST_CASE("noise tolerance default") {
    const std::vector<double> shares{0.5, 0.3, 0.2};
    CHECK(axioms::default_noise_tol(shares, 100) == doctest::Approx(3.0 * std::sqrt(0.25 / 100.0)));
}
