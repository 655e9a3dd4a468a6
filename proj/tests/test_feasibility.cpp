#include <doctest.h>

#include <cmath>
#include <random>

#include "dcflow/feasibility.hpp"
#include "dcflow/operating_point.hpp"
#include "test_util.hpp"

using namespace dcflow;
using dcflow::testing::grid1;
using dcflow::testing::grid2;
using dcflow::testing::random_demand;
using dcflow::testing::random_grid;
using dcflow::testing::vec;

TEST_CASE("half-space margins on the two-load grid") {
    const GridCore two = grid2();
    const auto at_pmax = halfspace_margin(two, vec({0.5, 0.5}), two.p_max);
    CHECK(std::abs(at_pmax.margin) <= 1e-12);

    const auto at_zero = halfspace_margin(two, vec({0.5, 0.5}), Vector::Zero(2));
    CHECK(at_zero.margin == doctest::Approx(0.25).epsilon(1e-12));

    const auto matched = halfspace_margin(two, vec({0.75, 0.25}), vec({0.375, 0.0}));
    CHECK(std::abs(matched.margin) <= 1e-12);
    CHECK(matched.lambda.lpNorm<1>() == doctest::Approx(1.0));

    CHECK_THROWS_AS(halfspace_margin(two, vec({1, 0}), Vector::Zero(2)), LambdaNotAdmissible);
}

TEST_CASE("certificate verification on the scalar grid") {
    const GridCore one = grid1();
    CHECK(verify_certificate(one, vec({1.0}), vec({0.3})));
    CHECK_FALSE(verify_certificate(one, vec({1.0}), vec({0.25})));
    CHECK(verify_certificate(one, vec({1.0}), vec({0.25}), /*semidefinite=*/true));
    CHECK_FALSE(verify_certificate(one, vec({1.0}), vec({0.2})));
    CHECK_THROWS_AS(verify_certificate(one, vec({-1.0}), vec({0.3})), NonpositiveNu);
}

TEST_CASE("certificate search") {
    const GridCore one = grid1();
    const auto found = find_certificate(one, vec({0.3}));
    REQUIRE(found.has_value());
    CHECK(found->min_eig > 0.0);
    CHECK(verify_certificate(one, found->nu, vec({0.3})));

    CHECK_FALSE(find_certificate(one, vec({0.2})).has_value());

    const GridCore two = grid2();
    const auto heavy = find_certificate(two, vec({1.0, 1.0}));
    REQUIRE(heavy.has_value());
    CHECK(verify_certificate(two, heavy->nu, vec({1.0, 1.0})));
}

TEST_CASE("certificates never coexist with interior verdicts") {
    std::mt19937_64 rng(1515);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    int interior_seen = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const GridCore core = random_grid(rng);
        const Vector p = random_demand(rng, core);
        const ContinuationResult res = solve_desired(core, p);
        if (res.verdict != Verdict::Interior) continue;
        ++interior_seen;
        for (int probe = 0; probe < 20; ++probe) {
            Vector nu(core.n());
            for (Index i = 0; i < core.n(); ++i) nu(i) = u(rng);
            CHECK_FALSE(verify_certificate(core, nu, p));
        }
        CHECK_FALSE(find_certificate(core, p, 500).has_value());
    }
    CHECK(interior_seen >= 8);
}

TEST_CASE("nonnegative simplex decision") {
    const GridCore two = grid2();

    const NonnegDecision boundary = nonneg_decide(two, vec({0.375, 0.0}), 200);
    CHECK(boundary.verdict == NonnegVerdict::Feasible);
    CHECK(std::abs(boundary.min_margin) <= 1e-6);
    CHECK(boundary.worst_nu(0) > 0.95);  // minimizer sits at the (1,0) vertex

    const NonnegDecision interior = nonneg_decide(two, Vector::Zero(2), 50);
    CHECK(interior.verdict == NonnegVerdict::FeasibleInterior);

    const NonnegDecision infeasible = nonneg_decide(two, vec({0.3, 0.3}), 200);
    CHECK(infeasible.verdict == NonnegVerdict::Infeasible);

    CHECK_THROWS_AS(nonneg_decide(two, vec({-0.1, 0.1}), 50), NegativeDemand);
}

TEST_CASE("clamped sufficient condition") {
    const GridCore two = grid2();
    CHECK(sufficient_clamped_nonneg(two, vec({-5.0, 0.2}), 100));
    CHECK(sufficient_clamped_nonneg(two, vec({-1.0, -2.0}), 50));
    CHECK(sufficient_clamped_nonneg(two, vec({0.375, 0.0}), 200));
    CHECK_FALSE(sufficient_clamped_nonneg(two, vec({-5.0, 0.4}), 200));
}

TEST_CASE("polyhedral sufficient condition and tight demands") {
    const GridCore two = grid2();

    const SpResult tight1 = sufficient_simpson_porco(two, vec({0.375, 0.0}));
    CHECK(tight1.tag == SpTag::HoldsTight);
    REQUIRE(tight1.alpha.size() == 1);
    CHECK(tight1.alpha[0] == 0);

    const SpResult tight_all = sufficient_simpson_porco(two, two.p_max);
    CHECK(tight_all.tag == SpTag::HoldsTight);
    CHECK(tight_all.alpha.size() == 2);

    CHECK(sufficient_simpson_porco(two, vec({0.3, 0.3})).tag == SpTag::Fails);
    CHECK(sufficient_simpson_porco(two, vec({0.1, 0.1})).tag == SpTag::Holds);
    // negative entries keep the clamp strictly inside
    CHECK(sufficient_simpson_porco(two, vec({-2.0, 0.375})).tag == SpTag::Holds);
}

TEST_CASE("tight point enumeration") {
    const GridCore two = grid2();
    const auto points = tight_points(two);
    REQUIRE(points.size() == 3);
    CHECK((points[0].demand - vec({0.375, 0.0})).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((points[1].demand - vec({0.0, 0.375})).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((points[2].demand - two.p_max).lpNorm<Eigen::Infinity>() <= 1e-12);

    // every tight point is a boundary demand in both senses
    std::mt19937_64 rng(3131);
    for (int trial = 0; trial < 3; ++trial) {
        const GridCore core = trial == 0 ? two : random_grid(rng, 2, 3);
        for (const auto& tp : tight_points(core)) {
            CHECK(sufficient_simpson_porco(core, tp.demand).tag == SpTag::HoldsTight);
            const ContinuationResult res = solve_desired(core, tp.demand);
            CHECK(res.fold_found);
            CHECK(res.theta_star >= 1.0 - 1e-6);
            CHECK(res.theta_star <= 1.0 + 1e-6);
        }
    }
}

TEST_CASE("tight point enumeration refuses oversized grids") {
    Network net;
    net.n_loads = 17;
    net.n_sources = 1;
    for (Index i = 0; i + 1 < 17; ++i) net.edges.push_back({i, i + 1, 1.0});
    net.edges.push_back({0, 17, 1.0});
    net.source_voltages = Vector::Ones(1);
    const GridCore chain = make_core(build_kirchhoff(net), net.source_voltages);
    CHECK_THROWS_AS(tight_points(chain), TooManySubsets);
}

TEST_CASE("ball condition radii") {
    const GridCore one = grid1();
    CHECK(bolognani_radius(one, 2.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(sufficient_bolognani(one, vec({0.2}), 2.0));
    CHECK_FALSE(sufficient_bolognani(one, vec({0.3}), 2.0));

    const GridCore two = grid2();
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(bolognani_radius(two, inf) == doctest::Approx(0.25).epsilon(1e-12));
    for (double p : {1.0, 2.0, inf}) {
        CHECK(sufficient_bolognani(two, Vector::Zero(2), p));
    }
    CHECK_THROWS_AS(bolognani_radius(two, 0.5), InvalidP);
}

TEST_CASE("ball condition touches the polyhedral one") {
    // the equality demand built from the worst row of the scaled inverse
    std::mt19937_64 rng(1616);
    for (int trial = 0; trial < 15; ++trial) {
        const GridCore core = random_grid(rng, 2, 3);
        const Index n = core.n();
        const Matrix hat_y =
            0.25 * (core.v_star.asDiagonal() * core.y_ll * core.v_star.asDiagonal());
        const Matrix inv = hat_y.inverse();
        Index worst = 0;
        for (Index i = 1; i < n; ++i) {
            if (inv.row(i).norm() > inv.row(worst).norm()) worst = i;
        }
        const Vector row = inv.row(worst).transpose();
        const Vector p_hat = row / row.squaredNorm();  // q = 2 equality point
        const Vector w = inv * p_hat;
        CHECK(std::abs(w(worst) - 1.0) <= 1e-8);
        CHECK(w.maxCoeff() <= 1.0 + 1e-8);
        const double product = row.norm() * p_hat.norm();
        CHECK(std::abs(product - 1.0) <= 1e-8);
        CHECK(std::abs(p_hat.norm() - bolognani_radius(core, 2.0)) <= 1e-8);
    }
}

TEST_CASE("domination") {
    CHECK(dominates(vec({0, 0}), vec({0.25, 0.25})));
    CHECK_FALSE(dominates(vec({0.25, 0.25}), vec({0.25, 0.25})));
    CHECK_FALSE(dominates(vec({0.3, 0.0}), vec({0.25, 0.25})));
}

TEST_CASE("soundness chain on random grids") {
    std::mt19937_64 rng(1717);
    int feasibility_checks = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const GridCore core = random_grid(rng);
        const Vector p = random_demand(rng, core);

        bool bol = false;
        for (double q : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
            bol = bol || sufficient_bolognani(core, p, q);
        }
        const SpResult sp = sufficient_simpson_porco(core, p);
        if (bol) CHECK(sp.tag != SpTag::Fails);

        const ContinuationResult res = solve_desired(core, p);
        const bool near_band = res.fold_found && std::abs(res.theta_star - 1.0) <= 1e-4;
        if (sp.tag != SpTag::Fails && !near_band) {
            ++feasibility_checks;
            CHECK(res.verdict != Verdict::Infeasible);
        }
        if ((p.array() >= 0.0).all() && !near_band) {
            const NonnegDecision dec = nonneg_decide(core, p, 120);
            if (dec.verdict == NonnegVerdict::FeasibleInterior) {
                CHECK(res.verdict == Verdict::Interior);
            }
            if (dec.verdict == NonnegVerdict::Infeasible) {
                CHECK(res.verdict == Verdict::Infeasible);
            }
        }
    }
    CHECK(feasibility_checks >= 5);
}

TEST_CASE("half-space margins are nonnegative over feasible demands") {
    std::mt19937_64 rng(1818);
    std::uniform_real_distribution<double> u(0.3, 1.7);
    int pairs = 0;
    for (int trial = 0; trial < 60 && pairs < 120; ++trial) {
        const GridCore core = random_grid(rng, 2, 3);
        const Vector p = random_demand(rng, core);
        if (solve_desired(core, p).verdict != Verdict::Interior) continue;
        for (int k = 0; k < 8; ++k) {
            Vector lam(core.n());
            for (Index i = 0; i < core.n(); ++i) lam(i) = u(rng);
            lam /= lam.lpNorm<1>();
            if (!in_lambda_set(core, lam)) continue;
            ++pairs;
            CHECK(halfspace_margin(core, lam, p).margin >= -1e-8);
        }
    }
    CHECK(pairs >= 60);
}
