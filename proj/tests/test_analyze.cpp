#include <doctest.h>

#include <random>

#include "dcflow/analyze.hpp"
#include "dcflow/operating_point.hpp"
#include "test_util.hpp"

using namespace dcflow;
using dcflow::testing::grid2;
using dcflow::testing::random_demand;
using dcflow::testing::random_grid;
using dcflow::testing::vec;

TEST_CASE("auto analysis fast-paths the easy verdicts") {
    const GridCore two = grid2();

    const DemandReport fast = analyze_demand(two, vec({0.1, 0.1}));
    CHECK(fast.verdict == "interior");
    CHECK(fast.decided_by == "simpson_porco");
    REQUIRE(fast.v_l.has_value());
    CHECK(*fast.stability == "stable");

    const DemandReport tight = analyze_demand(two, two.p_max);
    CHECK(tight.verdict == "boundary");
    CHECK(tight.decided_by == "simpson_porco_tight");
    CHECK(tight.v_l.has_value());

    const DemandReport heavy = analyze_demand(two, vec({0.3, 0.3}));
    CHECK(heavy.verdict == "infeasible");
    CHECK(heavy.certificate_status == "found");
}

TEST_CASE("every report carries a point, a certificate, or an explicit flag") {
    std::mt19937_64 rng(2727);
    for (int trial = 0; trial < 25; ++trial) {
        const GridCore core = random_grid(rng);
        const Vector p = random_demand(rng, core);
        for (const char* method : {"auto", "continuation", "nonneg", "lmi"}) {
            if ((method == std::string("nonneg")) && (p.array() < 0.0).any()) continue;
            AnalyzeOptions opts;
            opts.method = method;
            opts.resolution = 80;
            opts.budget = 400;
            const DemandReport rep = analyze_demand(core, p, opts);
            if (rep.verdict == "interior" || rep.verdict == "boundary") {
                CHECK(rep.v_l.has_value());
                CHECK(rep.stability.has_value());
            } else if (rep.verdict == "infeasible" && method != std::string("nonneg")) {
                CHECK((rep.certificate.has_value() ||
                       rep.certificate_status == "not_found_within_budget" ||
                       rep.certificate_status == "not_attempted"));
            } else if (rep.verdict == "undecided") {
                CHECK((rep.certificate_status == "not_found_within_budget" ||
                       rep.decided_by == "clamped_nonneg"));
            }
            CHECK(!rep.decided_by.empty());
        }
    }
}

TEST_CASE("auto verdicts agree with the decisive continuation method") {
    std::mt19937_64 rng(2828);
    int compared = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const GridCore core = random_grid(rng);
        const Vector p = random_demand(rng, core);
        AnalyzeOptions continuation;
        continuation.method = "continuation";
        const DemandReport exact = analyze_demand(core, p, continuation);
        if (exact.theta_star && exact.fold_found && std::abs(*exact.theta_star - 1.0) <= 1e-4) {
            continue;  // boundary band: either verdict is acceptable
        }
        const DemandReport screened = analyze_demand(core, p);
        ++compared;
        CHECK(screened.verdict == exact.verdict);
    }
    CHECK(compared >= 30);
}
