#include "dcflow/analyze.hpp"

#include <chrono>

#include "dcflow/feasibility.hpp"
#include "dcflow/operating_point.hpp"

namespace dcflow {

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void attach_operating_point(const GridCore& core, DemandReport& rep, const Vector& v) {
    rep.v_l = v;
    rep.stability = stability_name(classify(core, v, 1e-6));
    rep.dissipation_w = dissipation(core, v);
}

void run_continuation(const GridCore& core, const Vector& demand, DemandReport& rep,
                      bool decisive) {
    const ContinuationResult res = solve_desired(core, demand);
    rep.theta_star = res.theta_star;
    rep.fold_found = res.fold_found;
    rep.verdict = verdict_name(res.verdict);
    if (res.v_l) attach_operating_point(core, rep, res.v_l->v);
    rep.conditions.push_back({"continuation", rep.verdict});
    if (decisive) rep.decided_by = "continuation";
}

// The screen proved interior feasibility; Newton from the open circuit
// recovers the operating point in most cases, continuation otherwise. A
// semi-stable classification certifies it is the desired point.
void recover_operating_point(const GridCore& core, const Vector& demand, DemandReport& rep) {
    try {
        const OperatingPoint v = newton_refine(core, demand, core.v_star);
        if (classify(core, v.v, 1e-6) != Stability::Outside) {
            attach_operating_point(core, rep, v.v);
        }
    } catch (const Error&) {
    }
    if (!rep.v_l) run_continuation(core, demand, rep, false);
}

}  // namespace

GridSummary summarize(const GridCore& core) {
    return GridSummary{core.n(), core.m(), core.v_star, core.i_star, core.p_max};
}

int default_resolution(Index n) {
    if (n <= 1) return 1;
    if (n <= 3) return 200;
    int res = 1;
    const auto count = [&](int r) {
        double c = 1.0;
        for (Index k = 1; k < n; ++k) c *= static_cast<double>(r + k) / static_cast<double>(k);
        return c;
    };
    while (count(res + 1) <= 2e4 && res < 200) ++res;
    return res;
}

DemandReport analyze_demand(const GridCore& core, const Vector& demand,
                            const AnalyzeOptions& opts) {
    if (demand.size() != core.n()) {
        throw DimensionMismatch("DimensionMismatch: demand length must equal the load count");
    }
    const int resolution = opts.resolution > 0 ? opts.resolution : default_resolution(core.n());

    DemandReport rep;
    rep.demand = demand;
    const double t0 = now_seconds();

    if (opts.method == "continuation") {
        run_continuation(core, demand, rep, true);
    } else if (opts.method == "lmi") {
        const auto cert = find_certificate(core, demand, opts.budget);
        rep.decided_by = "lmi_certificate";
        if (cert) {
            rep.verdict = "infeasible";
            rep.certificate = cert;
            rep.certificate_status = "found";
            rep.conditions.push_back({"lmi_certificate", "found"});
        } else {
            rep.verdict = "undecided";
            rep.certificate_status = "not_found_within_budget";
            rep.conditions.push_back({"lmi_certificate", "not_found_within_budget"});
        }
    } else if (opts.method == "nonneg") {
        if ((demand.array() < 0.0).any()) {
            const bool ok = sufficient_clamped_nonneg(core, demand, resolution);
            rep.conditions.push_back({"clamped_nonneg", ok ? "feasible" : "inconclusive"});
            rep.decided_by = "clamped_nonneg";
            rep.verdict = ok ? "interior" : "undecided";
        } else {
            const NonnegDecision dec = nonneg_decide(core, demand, resolution);
            rep.decided_by = "nonneg_simplex";
            switch (dec.verdict) {
                case NonnegVerdict::FeasibleInterior: rep.verdict = "interior"; break;
                case NonnegVerdict::Feasible: rep.verdict = "boundary"; break;
                case NonnegVerdict::Infeasible: rep.verdict = "infeasible"; break;
            }
            rep.conditions.push_back({"nonneg_simplex", rep.verdict});
        }
        if (rep.verdict == "interior") {
            recover_operating_point(core, demand, rep);
        } else if (rep.verdict == "boundary") {
            run_continuation(core, demand, rep, false);
        }
    } else {  // auto
        const SpResult sp = sufficient_simpson_porco(core, demand);
        rep.conditions.push_back(
            {"simpson_porco", sp.tag == SpTag::Holds
                                  ? "holds"
                                  : sp.tag == SpTag::HoldsTight ? "holds_tight" : "fails"});
        const bool bol = sufficient_bolognani(core, demand, 2.0);
        rep.conditions.push_back({"bolognani_p2", bol ? "holds" : "fails"});
        const bool dom =
            dominates(demand, core.p_max) || dominates(demand, Vector::Zero(core.n()));
        rep.conditions.push_back({"domination", dom ? "holds" : "fails"});

        if (sp.tag == SpTag::Holds) {
            rep.verdict = "interior";
            rep.decided_by = "simpson_porco";
        } else if (sp.tag == SpTag::HoldsTight) {
            rep.verdict = "boundary";
            rep.decided_by = "simpson_porco_tight";
        } else if (bol) {
            rep.verdict = "interior";
            rep.decided_by = "bolognani_p2";
        } else if (dom) {
            rep.verdict = "interior";
            rep.decided_by = "domination";
        } else if ((demand.array() >= 0.0).all()) {
            const NonnegDecision dec = nonneg_decide(core, demand, resolution);
            switch (dec.verdict) {
                case NonnegVerdict::FeasibleInterior: rep.verdict = "interior"; break;
                case NonnegVerdict::Feasible: rep.verdict = "boundary"; break;
                case NonnegVerdict::Infeasible: rep.verdict = "infeasible"; break;
            }
            rep.conditions.push_back({"nonneg_simplex", rep.verdict});
            rep.decided_by = "nonneg_simplex";
        }

        if (rep.decided_by.empty()) {
            run_continuation(core, demand, rep, true);
        } else if (rep.verdict == "interior") {
            recover_operating_point(core, demand, rep);
        } else if (rep.verdict == "boundary") {
            run_continuation(core, demand, rep, false);
        }

        if (rep.verdict == "infeasible") {
            const auto cert = find_certificate(core, demand, opts.budget);
            if (cert) {
                rep.certificate = cert;
                rep.certificate_status = "found";
            } else {
                rep.certificate_status = "not_found_within_budget";
            }
        }
    }
    rep.seconds = now_seconds() - t0;
    return rep;
}

}  // namespace dcflow
