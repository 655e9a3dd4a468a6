#include <doctest.h>

#include <random>

#include "dcflow/boundary.hpp"
#include "dcflow/feasibility.hpp"
#include "dcflow/operating_point.hpp"
#include "test_util.hpp"

using namespace dcflow;
using dcflow::testing::random_grid;
using dcflow::testing::vec;

// The OpenMP kernels fill index-addressed buffers and reduce serially, so
// they must agree with the serial reference bit for bit.

TEST_CASE("simplex scan: serial and parallel agree exactly") {
    std::mt19937_64 rng(2323);
    for (int trial = 0; trial < 6; ++trial) {
        const GridCore core = random_grid(rng, 2, 3);
        Vector p(core.n());
        std::uniform_real_distribution<double> u(0.0, 1.2);
        for (Index i = 0; i < core.n(); ++i) p(i) = u(rng) * core.p_max(i);

        const NonnegDecision serial = nonneg_decide(core, p, 80, Exec::Serial);
        const NonnegDecision parallel = nonneg_decide(core, p, 80, Exec::Parallel);
        CHECK(serial.verdict == parallel.verdict);
        CHECK(serial.min_margin == parallel.min_margin);
        CHECK((serial.worst_nu - parallel.worst_nu).lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("subset enumeration: serial and parallel agree exactly") {
    std::mt19937_64 rng(2424);
    const GridCore core = random_grid(rng, 3, 3);
    const auto serial = tight_points(core, Exec::Serial);
    const auto parallel = tight_points(core, Exec::Parallel);
    REQUIRE(serial.size() == parallel.size());
    for (size_t k = 0; k < serial.size(); ++k) {
        CHECK(serial[k].alpha == parallel[k].alpha);
        CHECK((serial[k].demand - parallel[k].demand).lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("multistart solve: serial and parallel agree exactly") {
    std::mt19937_64 rng(2525);
    for (int trial = 0; trial < 4; ++trial) {
        const GridCore core = random_grid(rng, 2, 3);
        const Vector p = dcflow::testing::random_demand(rng, core);
        const auto serial = multistart_solutions(core, p, 9, Exec::Serial);
        const auto parallel = multistart_solutions(core, p, 9, Exec::Parallel);
        REQUIRE(serial.size() == parallel.size());
        for (size_t k = 0; k < serial.size(); ++k) {
            CHECK((serial[k] - parallel[k]).lpNorm<Eigen::Infinity>() == 0.0);
        }
    }
}

TEST_CASE("boundary sweep: serial and parallel agree exactly") {
    std::mt19937_64 rng(2626);
    const GridCore core = random_grid(rng, 2, 3);
    for (ParamFamily fam : {ParamFamily::Lambda, ParamFamily::Mu, ParamFamily::Nu}) {
        const SweepResult serial = sweep_boundary(core, fam, 25, 42, Exec::Serial);
        const SweepResult parallel = sweep_boundary(core, fam, 25, 42, Exec::Parallel);
        REQUIRE(serial.points.size() == parallel.points.size());
        CHECK(serial.skipped == parallel.skipped);
        for (size_t k = 0; k < serial.points.size(); ++k) {
            CHECK((serial.points[k].param - parallel.points[k].param)
                      .lpNorm<Eigen::Infinity>() == 0.0);
            CHECK((serial.points[k].v_l - parallel.points[k].v_l).lpNorm<Eigen::Infinity>() ==
                  0.0);
            CHECK((serial.points[k].p_c - parallel.points[k].p_c).lpNorm<Eigen::Infinity>() ==
                  0.0);
        }
    }
}
