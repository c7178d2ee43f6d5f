#include <doctest.h>

#include <random>

#include "awlm/model.hpp"
#include "awlm/numeric.hpp"
#include "helpers.hpp"

using namespace awlm;
using namespace testutil;

namespace {

// Shared reference configuration: universe {a,b,c}, S = {a,b}, u = (3,1), alpha = 2/5.
struct ReferenceFixture {
    Universe universe = make_universe(3);
    IndexSet S{0, 1};
    IndexSet I{0, 1, 2};
    LuceWeights u{{3.0, 1.0, 1.0}};
    double alpha = 0.4;
    Dist q1{{0, 1, 2}, {0.2, 0.3, 0.5}};
    Dist q2_equal{{0, 1, 2}, {0.4, 0.1, 0.5}};
    Dist q2_diff{{0, 1, 2}, {0.3, 0.4, 0.3}};
};

} // namespace

TEST_CASE("universe and menu validation") {
    CHECK_THROWS_AS(Universe({"a"}), ValidationError);
    CHECK_THROWS_AS(Universe({"a", "a"}), ValidationError);
    CHECK_THROWS_AS(Universe({"a", ""}), ValidationError);
    const Universe u = make_universe(3);
    CHECK(u.index_of("c") == 2);
    CHECK_THROWS_AS(u.index_of("z"), ValidationError);
    CHECK_THROWS_AS(MenuPair(u, IndexSet{}, IndexSet{0, 1}), ValidationError);
    CHECK_THROWS_AS(MenuPair(u, IndexSet{0, 2}, IndexSet{0, 1}), ValidationError);
    CHECK_NOTHROW(MenuPair(u, IndexSet{0, 1}, IndexSet{0, 1, 2}));
}

TEST_CASE("distribution construction enforces the simplex") {
    CHECK_THROWS_AS(Dist({0, 1}, {0.6, 0.5}), ValidationError);
    CHECK_THROWS_AS(Dist({0, 1}, {1.1, -0.1}), ValidationError);
    // tiny negatives clamp to zero
    const Dist d({0, 1}, {1.0, -0.5e-15});
    CHECK(d.masses()[1] == 0.0);
    CHECK(d.mass(5) == 0.0);
}

TEST_CASE("luce_choice") {
    const LuceWeights u({3.0, 1.0, 1.0});
    const Dist p = luce_choice(u, {0, 1});
    CHECK(p.masses()[0] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(p.masses()[1] == doctest::Approx(0.25).epsilon(1e-14));

    const LuceWeights uniform({1.0, 1.0, 1.0});
    const Dist p_uniform = luce_choice(uniform, {0, 1, 2});
    for (double m : p_uniform.masses()) {
        CHECK(m == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    }

    const LuceWeights u2({2.0, 1.0, 1.0});
    const Dist p2 = luce_choice(u2, {0, 1, 2});
    CHECK(p2.masses()[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p2.masses()[1] == doctest::Approx(0.25).epsilon(1e-14));

    CHECK_THROWS_AS(luce_choice(u, IndexSet{}), ValidationError);
}

TEST_CASE("feasible_share and conditional_composition") {
    const ReferenceFixture fx;
    CHECK(feasible_share(fx.q1, fx.S) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(feasible_share(fx.q1, fx.I) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(feasible_share(fx.q2_diff, fx.S) == doctest::Approx(0.7).epsilon(1e-14));

    const Dist comp = conditional_composition(fx.q1, fx.S);
    CHECK(comp.masses()[0] == doctest::Approx(0.4).epsilon(1e-13));
    CHECK(comp.masses()[1] == doctest::Approx(0.6).epsilon(1e-13));

    const Dist on_S({0, 1}, {0.25, 0.75});
    const Dist same = conditional_composition(on_S, IndexSet{0, 1});
    CHECK(max_abs_diff(same.masses(), on_S.masses()) < 1e-15);

    const Dist off_S({2}, {1.0});
    CHECK_THROWS_AS(conditional_composition(off_S, IndexSet{0, 1}), ValidationError);
}

TEST_CASE("attempt_target limits and convex combination") {
    const ReferenceFixture fx;
    const Dist p0 = luce_choice(fx.u, fx.S);

    const Dist at0 = attempt_target(p0, fx.q1, 0.0);
    CHECK(at0.mass(0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(at0.mass(2) == doctest::Approx(0.0));

    const Dist at1 = attempt_target(p0, fx.q1, 1.0);
    CHECK(max_abs_diff(at1.restrict_to(fx.I), fx.q1.restrict_to(fx.I)) < 1e-15);

    const Dist at = attempt_target(p0, fx.q1, 0.4);
    CHECK(at.mass(0) == doctest::Approx(0.53).epsilon(1e-13));
    CHECK(at.mass(1) == doctest::Approx(0.27).epsilon(1e-13));
    CHECK(at.mass(2) == doctest::Approx(0.20).epsilon(1e-13));
}

TEST_CASE("awlm_choice reproduces the reference fractions") {
    const ReferenceFixture fx;
    const Dist p0 = luce_choice(fx.u, fx.S);

    const Dist P1 = awlm_choice(p0, fx.q1, fx.alpha, fx.S);
    CHECK(std::abs(P1.masses()[0] - 53.0 / 80.0) < 1e-12);
    CHECK(std::abs(P1.masses()[1] - 27.0 / 80.0) < 1e-12);

    const Dist P2 = awlm_choice(p0, fx.q2_diff, fx.alpha, fx.S);
    CHECK(std::abs(P2.masses()[0] - 57.0 / 88.0) < 1e-12);
    CHECK(std::abs(P2.masses()[1] - 31.0 / 88.0) < 1e-12);

    const Dist no_influence = awlm_choice(p0, fx.q1, 0.0, fx.S);
    CHECK(max_abs_diff(no_influence.masses(), p0.masses()) < 1e-15);

    const Dist infeasible({2}, {1.0});
    CHECK_THROWS_AS(awlm_choice(p0, infeasible, 1.0, fx.S), ValidationError);
}

TEST_CASE("effective weights") {
    CHECK(effective_weight(0.37, 1.0) == doctest::Approx(0.37).epsilon(1e-14));
    CHECK(effective_weight(0.37, 0.0) == doctest::Approx(0.0));
    CHECK(effective_weight(0.5, 0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    // strictly increasing in q_S and in alpha on interior grids
    for (double alpha : {0.1, 0.4, 0.9}) {
        double prev = -1.0;
        for (double s = 0.05; s <= 1.0; s += 0.05) {
            const double b = effective_weight(alpha, s);
            CHECK(b > prev);
            CHECK(b <= alpha + 1e-15);
            prev = b;
        }
    }
    for (double s : {0.2, 0.7}) {
        double prev = -1.0;
        for (double a = 0.05; a < 1.0; a += 0.05) {
            const double b = effective_weight(a, s);
            CHECK(b > prev);
            prev = b;
        }
    }

    CHECK(retry_effective_weight(0.37, 0.6, 1.0) ==
          doctest::Approx(effective_weight(0.37, 0.6)).epsilon(1e-14));
    CHECK(retry_effective_weight(0.5, 0.5, 0.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(retry_effective_weight(0.4, 0.5, 0.5) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("mixture_decomposition matches the closed form") {
    const ReferenceFixture fx;
    const Dist p0 = luce_choice(fx.u, fx.S);

    const Dist mix = mixture_decomposition(p0, fx.q1, fx.alpha, fx.S);
    CHECK(std::abs(mix.masses()[0] - 53.0 / 80.0) < 1e-12);
    CHECK(std::abs(mix.masses()[1] - 27.0 / 80.0) < 1e-12);

    const Dist beta0 = mixture_decomposition(p0, fx.q1, 0.0, fx.S);
    CHECK(max_abs_diff(beta0.masses(), p0.masses()) < 1e-15);

    // q_S = 1: plain convex mixture
    const Dist q_in({0, 1}, {0.3, 0.7});
    const Dist mix1 = mixture_decomposition(p0, q_in, fx.alpha, fx.S);
    for (size_t i = 0; i < 2; ++i) {
        const double expect = (1.0 - fx.alpha) * p0.masses()[i] + fx.alpha * q_in.masses()[i];
        CHECK(std::abs(mix1.masses()[i] - expect) < 1e-14);
    }

    const Dist off_S({2}, {1.0});
    CHECK_THROWS_AS(mixture_decomposition(p0, off_S, fx.alpha, fx.S), ValidationError);
}

TEST_CASE("three routes to the induced choice coincide (property)") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> ua(0.01, 0.99);
    std::uniform_real_distribution<double> us(0.05, 1.0);
    const Universe universe = make_universe(5);
    for (int rep = 0; rep < 1000; ++rep) {
        const IndexSet S = range_set(0, 3);
        const IndexSet I = range_set(0, 5);
        const Dist p0(S, random_simplex(rng, 3));
        const double share = us(rng);
        const Dist q = make_exposure(S, random_simplex(rng, 3), share, I);
        const double alpha = ua(rng);

        const Dist direct = awlm_choice(p0, q, alpha, S);
        const Dist renorm = conditional_composition(attempt_target(p0, q, alpha), S);
        const Dist mix = mixture_decomposition(p0, q, alpha, S);
        CHECK(max_abs_diff(direct.masses(), renorm.masses()) <= 1e-12);
        CHECK(max_abs_diff(direct.masses(), mix.masses()) <= 1e-12);

        double total = 0.0;
        for (double m : direct.masses()) {
            CHECK(m >= 0.0);
            total += m;
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
}

TEST_CASE("reallocations off the feasible set are irrelevant (property)") {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> ua(0.01, 0.99);
    std::uniform_real_distribution<double> us(0.05, 0.95);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const IndexSet S = range_set(0, 2);
    for (int rep = 0; rep < 1000; ++rep) {
        const Dist p0(S, random_simplex(rng, 2));
        const double share = us(rng);
        const auto comp = random_simplex(rng, 2);
        const double split = u01(rng);
        // same restriction to S, arbitrary reallocation between c and d
        const Dist q({0, 1, 2, 3},
                     {share * comp[0], share * comp[1], (1.0 - share) * 0.5, (1.0 - share) * 0.5});
        const Dist q_prime({0, 1, 2, 3},
                           {share * comp[0], share * comp[1], (1.0 - share) * split,
                            (1.0 - share) * (1.0 - split)});
        const double alpha = ua(rng);
        const Dist a = awlm_choice(p0, q, alpha, S);
        const Dist b = awlm_choice(p0, q_prime, alpha, S);
        CHECK(max_abs_diff(a.masses(), b.masses()) <= 1e-12);
    }
}

TEST_CASE("dampening_shift") {
    const IndexSet S{0, 1};
    const IndexSet I{0, 1, 2};
    const Dist p0(S, {0.75, 0.25});
    const std::vector<double> comp{0.4, 0.6};
    const double alpha = 0.4;

    SUBCASE("equal shares give the zero vector") {
        const Dist q = make_exposure(S, comp, 0.6, I);
        const auto shift = dampening_shift(p0, q, q, alpha, S);
        CHECK(sup_norm(shift) < 1e-15);
    }
    SUBCASE("composition equal to p0 is a fixed point") {
        const Dist q = make_exposure(S, {0.75, 0.25}, 0.8, I);
        const Dist q_prime = make_exposure(S, {0.75, 0.25}, 0.3, I);
        const auto shift = dampening_shift(p0, q, q_prime, alpha, S);
        CHECK(sup_norm(shift) < 1e-14);
    }
    SUBCASE("share drop 0.8 -> 0.4 matches the hand-evaluated formula") {
        const Dist q = make_exposure(S, comp, 0.8, I);
        const Dist q_prime = make_exposure(S, comp, 0.4, I);
        const auto shift = dampening_shift(p0, q, q_prime, alpha, S);
        const auto p_hi = closed_form_choice(p0.masses(), q.restrict_to(S), 0.8, alpha);
        const auto p_lo = closed_form_choice(p0.masses(), q_prime.restrict_to(S), 0.4, alpha);
        for (size_t i = 0; i < 2; ++i) {
            CHECK(std::abs(shift[i] - (p_lo[i] - p_hi[i])) < 1e-14);
        }
    }
    SUBCASE("different compositions are rejected") {
        const Dist q = make_exposure(S, comp, 0.8, I);
        const Dist q_prime = make_exposure(S, {0.5, 0.5}, 0.4, I);
        CHECK_THROWS_AS(dampening_shift(p0, q, q_prime, alpha, S), ModelViolationError);
    }
}

TEST_CASE("limit continuity in alpha") {
    const ReferenceFixture fx;
    const Dist p0 = luce_choice(fx.u, fx.S);

    const Dist near0 = awlm_choice(p0, fx.q1, 1e-6, fx.S);
    CHECK(max_abs_diff(near0.masses(), p0.masses()) < 1e-5);

    const Dist near1 = awlm_choice(p0, fx.q1, 1.0 - 1e-6, fx.S);
    const Dist comp = conditional_composition(fx.q1, fx.S);
    CHECK(max_abs_diff(near1.masses(), comp.masses()) < 1e-5);
}

TEST_CASE("model params reject boundary alpha") {
    CHECK_THROWS_AS(ModelParams(0.0, LuceWeights({1.0, 1.0})), ValidationError);
    CHECK_THROWS_AS(ModelParams(1.0, LuceWeights({1.0, 1.0})), ValidationError);
    CHECK_NOTHROW(ModelParams(0.5, LuceWeights({1.0, 1.0})));
    CHECK_THROWS_AS(LuceWeights({1.0, 0.0}), ValidationError);
}
