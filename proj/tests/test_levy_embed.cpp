#include "doctest.h"

#include "subwalk/bernstein.hpp"
#include "subwalk/common.hpp"
#include "subwalk/levy_embed.hpp"
#include "subwalk/scaling.hpp"

#include <cmath>

using namespace subwalk;

namespace {

LatticeDistribution delta_law(int d, const LatticePoint& z, double mass, int radius) {
    LatticeDistribution law(d, radius);
    law.at(z) = mass;
    law.set_captured_mass(mass);
    return law;
}

} // namespace

TEST_CASE("cp triplet: symmetric one-step law has zero beta") {
    const SubordinatePmf one =
        subordinate_step_pmf(step_weights(pure_drift(), 1.0), LatticeWalk::srw(1), 3);
    const LevyTriplet t = cp_triplet_from_jump_law(1.0, one.law);
    CHECK(t.beta[0] == 0.0);
    CHECK(t.nu.at({1}) == doctest::Approx(0.5));
    CHECK(t.nu.at({-1}) == doctest::Approx(0.5));
}

TEST_CASE("cp triplet: eta = delta_1 with q=2 is Poisson-like") {
    const LevyTriplet t = cp_triplet_from_jump_law(2.0, delta_law(1, {1}, 1.0, 2));
    CHECK(t.beta[0] == doctest::Approx(-2.0));
    CHECK(t.nu.at({1}) == doctest::Approx(2.0));
    CHECK(t.nu.total_mass() == doctest::Approx(2.0));
}

TEST_CASE("cp triplet: d=2 srw one-step law") {
    const SubordinatePmf one =
        subordinate_step_pmf(step_weights(pure_drift(), 1.0), LatticeWalk::srw(2), 2);
    const LevyTriplet t = cp_triplet_from_jump_law(1.0, one.law);
    CHECK(t.beta[0] == 0.0);
    CHECK(t.beta[1] == 0.0);
    CHECK(t.nu.at({0, 1}) == doctest::Approx(0.25));
    CHECK(t.nu.at({-1, 0}) == doctest::Approx(0.25));
}

TEST_CASE("triplet_hat: pure drift equals the one-step triplet") {
    const LevyTriplet hat = triplet_hat(pure_drift(), LatticeWalk::srw(1), 1.0, 5);
    CHECK(hat.nu.at({1}) == doctest::Approx(0.5));
    CHECK(hat.nu.at({-1}) == doctest::Approx(0.5));
    CHECK(hat.nu.total_mass() == doctest::Approx(1.0));
    CHECK(hat.unaccounted == doctest::Approx(0.0));
}

TEST_CASE("triplet_hat: stable, beta vanishes and nu matches the series") {
    TripletOptions opts;
    opts.mass_tol = 2e-3;
    opts.M_cap = 250000;
    const BernsteinFunction phi = stable_exponent(0.5);
    const LevyTriplet hat = triplet_hat(phi, LatticeWalk::srw(1), 1.0, 10, opts);
    CHECK(std::fabs(hat.beta[0]) < 1e-12);

    // independent series: q * sum over odd m of w_m P(Z_m = 1)
    StepWeightOptions wopts;
    wopts.mass_tol = opts.mass_tol;
    wopts.M_cap = opts.M_cap;
    const StepDistribution sd = step_weights(phi, 1.0, wopts);
    double series = 0.0;
    for (std::size_t m = 1; m <= sd.M; m += 2)
        series += sd.weights[m - 1] * srw1d_point_pmf(static_cast<std::int64_t>(m), 1);
    CHECK(std::fabs(hat.nu.at({1}) - series) < 1e-10);
}

TEST_CASE("prop-comm: hat and tilde triplets coincide, stable d=1") {
    const BernsteinFunction phi = stable_exponent(0.5);
    TripletOptions opts; // defaults: M_cap 250k, s budget 1e-8 per point
    const int radius = 10;
    const LevyTriplet hat = triplet_hat(phi, LatticeWalk::srw(1), 1.0, radius, opts);
    const LevyTriplet tilde = triplet_tilde(phi, LatticeWalk::srw(1), 1.0, radius, opts);

    for (int z = 1; z <= radius; ++z) {
        INFO("z=", z);
        CHECK(std::fabs(hat.nu.at({z}) - tilde.nu.at({z})) < 1e-6);
    }
    const TripletComparison cmp = compare_triplets(hat, tilde, 1e-6);
    CHECK(cmp.pass);
    CHECK(cmp.beta_distance < 1e-8);
}

TEST_CASE("prop-comm: log-example d=1 and d=2") {
    const BernsteinFunction phi = log_example_exponent();
    TripletOptions opts;
    opts.mass_tol = 1e-4;
    opts.M_cap = 20000;

    const LevyTriplet hat1 = triplet_hat(phi, LatticeWalk::srw(1), 1.0, 10, opts);
    const LevyTriplet tilde1 = triplet_tilde(phi, LatticeWalk::srw(1), 1.0, 10, opts);
    const TripletComparison c1 = compare_triplets(hat1, tilde1, 1e-6);
    CHECK(c1.pass);
    for (int z = 1; z <= 10; ++z)
        CHECK(std::fabs(hat1.nu.at({z}) - tilde1.nu.at({z})) < 1e-6);

    const LevyTriplet hat2 = triplet_hat(phi, LatticeWalk::srw(2), 1.0, 6, opts);
    const LevyTriplet tilde2 = triplet_tilde(phi, LatticeWalk::srw(2), 1.0, 6, opts);
    const TripletComparison c2 = compare_triplets(hat2, tilde2, 1e-6);
    CHECK(c2.pass);
    CHECK(std::fabs(hat2.nu.at({1, 1}) - tilde2.nu.at({1, 1})) < 1e-6);
    CHECK(std::fabs(hat2.nu.at({3, 2}) - tilde2.nu.at({3, 2})) < 1e-6);
}

TEST_CASE("prop-comm invariant across the whole catalog, full radius") {
    // stable:0.5, log-example and drift run at full radius in the acceptance
    // suite; here the remaining catalog entries, whose slow mixture tails are
    // absorbed into the reported unaccounted mass
    struct Cfg {
        const char* id;
        double mass_tol;
        std::size_t m_cap;
    };
    for (const Cfg& cfg : {Cfg{"stable:0.3", 0.02, 300000}, Cfg{"stable:0.8", 1.2e-3, 20000}}) {
        const BernsteinFunction phi = phi_from_id(cfg.id);
        TripletOptions opts;
        opts.mass_tol = cfg.mass_tol;
        opts.M_cap = cfg.m_cap;
        for (int d : {1, 2}) {
            const int radius = d == 1 ? 30 : 12;
            const LatticeWalk walk = LatticeWalk::srw(d);
            const LevyTriplet hat = triplet_hat(phi, walk, 1.0, radius, opts);
            const LevyTriplet tilde = triplet_tilde(phi, walk, 1.0, radius, opts);
            const TripletComparison cmp = compare_triplets(hat, tilde, 1e-6);
            INFO(cfg.id, " d=", d, " tv=", cmp.nu_tv_distance, " unacc=",
                 cmp.mass_unaccounted);
            CHECK(cmp.pass);
            CHECK(cmp.beta_distance <= 1e-12);
            // total nu masses differ by at most the combined losses
            CHECK(std::fabs(hat.nu.total_mass() - tilde.nu.total_mass()) <=
                  cmp.mass_unaccounted + 1e-9);
        }
    }
}

TEST_CASE("triplet_tilde: pure drift reduces to the one-step law") {
    const LevyTriplet tilde = triplet_tilde(pure_drift(), LatticeWalk::srw(1), 1.0, 4);
    CHECK(tilde.nu.at({1}) == doctest::Approx(0.5));
    CHECK(tilde.nu.at({-1}) == doctest::Approx(0.5));
    CHECK(tilde.beta[0] == doctest::Approx(0.0));
}

TEST_CASE("compare_triplets: identical, perturbed, mismatched") {
    const LevyTriplet hat = triplet_hat(pure_drift(), LatticeWalk::srw(1), 1.0, 4);
    const TripletComparison same = compare_triplets(hat, hat, 1e-12);
    CHECK(same.pass);
    CHECK(same.beta_distance == 0.0);
    CHECK(same.nu_tv_distance == 0.0);

    LevyTriplet bumped = hat;
    bumped.nu.at({1}) += 1e-3;
    const TripletComparison diff = compare_triplets(hat, bumped, 1e-6);
    CHECK_FALSE(diff.pass);
    CHECK(diff.nu_tv_distance == doctest::Approx(1e-3));

    LevyTriplet other = triplet_hat(pure_drift(), LatticeWalk::srw(2), 1.0, 4);
    CHECK_THROWS_AS(compare_triplets(hat, other, 1e-6), DomainError);
}

TEST_CASE("chf identity: hat route equals tilde route") {
    SUBCASE("theta = 0 gives 1 exactly") {
        const StepDistribution sd = step_weights(pure_drift(), 1.0);
        const ChfIdentity id =
            chf_exact(sd, pure_drift(), LatticeWalk::srw(1), 1.0, {0.0});
        CHECK(id.hat == 1.0);
        CHECK(id.tilde == 1.0);
    }
    SUBCASE("pure drift at theta = pi/2") {
        const StepDistribution sd = step_weights(pure_drift(), 1.0);
        const ChfIdentity id =
            chf_exact(sd, pure_drift(), LatticeWalk::srw(1), 1.0, {M_PI / 2});
        CHECK(id.hat == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
        CHECK(id.tilde == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    }
    SUBCASE("stable grid |hat - tilde| within budget") {
        const BernsteinFunction phi = stable_exponent(0.5);
        StepWeightOptions wopts;
        wopts.mass_tol = 2e-3;
        wopts.M_cap = 250000;
        const StepDistribution sd = step_weights(phi, 1.0, wopts);
        const LatticeWalk walk = LatticeWalk::srw(1);
        double sup = 0.0;
        double budget = 0.0;
        for (double th = -5.0; th <= 5.0001; th += 0.25) {
            const ChfIdentity id = chf_exact(sd, phi, walk, 1.0, {th});
            sup = std::max(sup, std::fabs(id.hat - id.tilde));
            budget = id.truncation_budget;
        }
        CHECK(sup <= 1e-9 + budget);
    }
}

TEST_CASE("simulate: t=0 keeps every path at the origin") {
    const StepDistribution sd = step_weights(pure_drift(), 1.0);
    for (const auto& z : simulate_hat(sd, LatticeWalk::srw(2), 0.0, 50, Rng(1)))
        CHECK(z == std::vector<std::int64_t>{0, 0});
    for (const auto& z : simulate_tilde(0.5, LatticeWalk::srw(2), 1.0, 0.0, 50, Rng(1)))
        CHECK(z == std::vector<std::int64_t>{0, 0});
}

TEST_CASE("simulate: hat and tilde empirical chfs agree (stable)") {
    const BernsteinFunction phi = stable_exponent(0.5);
    StepWeightOptions wopts;
    wopts.mass_tol = 2e-3;
    wopts.M_cap = 250000;
    const StepDistribution sd = step_weights(phi, 1.0, wopts);
    const LatticeWalk walk = LatticeWalk::srw(1);
    const std::size_t paths = 20000;

    const auto hat_eps = simulate_hat(sd, walk, 1.0, paths, Rng(71));
    const auto tilde_eps = simulate_tilde(0.5, walk, 1.0, 1.0, paths, Rng(72));
    const auto grid = default_theta_grid(1);
    const ChfEvaluation hat = empirical_chf(hat_eps, 1.0, grid);
    const ChfEvaluation tilde = empirical_chf(tilde_eps, 1.0, grid);

    std::size_t ok = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double joint = std::hypot(hat.stderrs[g], tilde.stderrs[g]);
        if (std::abs(hat.values[g] - tilde.values[g]) <= 4.0 * joint + 1e-12) ++ok;
    }
    CHECK(static_cast<double>(ok) >= 0.95 * static_cast<double>(grid.size()));

    // and the hat empirical chf tracks the exact formula
    std::size_t ok2 = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double exact = chf_hat_exact(sd, walk, 1.0, grid[g]);
        if (std::abs(hat.values[g] - exact) <= 4.0 * hat.stderrs[g] + 1e-12) ++ok2;
    }
    CHECK(static_cast<double>(ok2) >= 0.95 * static_cast<double>(grid.size()));
}

TEST_CASE("simulate: determinism given the seed") {
    const StepDistribution sd = step_weights(pure_drift(), 1.0);
    const auto a = simulate_hat(sd, LatticeWalk::srw(1), 2.0, 100, Rng(9));
    const auto b = simulate_hat(sd, LatticeWalk::srw(1), 2.0, 100, Rng(9));
    CHECK(a == b);
}

TEST_CASE("one_minus_chf keeps precision at tiny angles") {
    const LatticeWalk walk = LatticeWalk::srw(1);
    const double th = 1e-9;
    const double v = one_minus_chf(walk, {th});
    CHECK(v == doctest::Approx(th * th / 2.0).epsilon(1e-10));
    CHECK_THROWS_AS(one_minus_chf(LatticeWalk(1, {{{1}, 0.7}, {{-1}, 0.3}}), {1.0}),
                    DomainError);
}
