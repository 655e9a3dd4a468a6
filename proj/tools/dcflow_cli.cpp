#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcflow/analyze.hpp"
#include "dcflow/boundary.hpp"
#include "dcflow/feasibility.hpp"
#include "dcflow/io.hpp"
#include "dcflow/operating_point.hpp"

namespace {

using namespace dcflow;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

GridCore load_core(const std::string& path) {
    const GridInput input = load_network_file(path);
    return make_core(input.part, input.v_s);
}

std::string fmt_vec(const Vector& v) {
    std::string s = "(";
    for (Index i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_double(v(i));
    }
    return s + ")";
}

void print_demand_report(const DemandReport& rep) {
    std::cout << "demand " << fmt_vec(rep.demand) << "\n";
    std::cout << "  verdict: " << rep.verdict << " (decided by " << rep.decided_by << ")\n";
    if (rep.theta_star) {
        std::cout << "  theta_star: " << format_double(*rep.theta_star)
                  << (rep.fold_found ? "" : " (lower bound)") << "\n";
    }
    if (rep.v_l) std::cout << "  operating point: " << fmt_vec(*rep.v_l) << "\n";
    if (rep.stability) std::cout << "  stability: " << *rep.stability << "\n";
    if (rep.dissipation_w) {
        std::cout << "  dissipation: " << format_double(*rep.dissipation_w) << " W\n";
    }
    if (rep.certificate) {
        std::cout << "  infeasibility certificate nu: " << fmt_vec(rep.certificate->nu)
                  << " (min eig " << format_double(rep.certificate->min_eig) << ")\n";
    } else if (rep.certificate_status == "not_found_within_budget") {
        std::cout << "  infeasibility certificate: not found within budget\n";
    }
    for (const auto& c : rep.conditions) {
        std::cout << "  condition " << c.name << ": " << c.outcome << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DC power-flow feasibility analyzer"};
    app.require_subcommand(1);

    std::string network_path;
    std::string demand_spec;
    std::string out_path;
    std::string trace_path;
    std::string family = "nu";
    bool as_json = false;
    int samples = 101;
    AnalyzeOptions opts;
    std::uint64_t seed = 42;
    app.add_option("--seed", seed, "Seed for randomized searches");

    auto* validate = app.add_subcommand("validate", "Check a network file");
    validate->add_option("network", network_path)->required();

    auto* feasible = app.add_subcommand("feasible", "Decide feasibility of a demand");
    feasible->add_option("network", network_path)->required();
    feasible->add_option("demand", demand_spec, "Comma-separated watts or JSON array file")
        ->required();
    feasible->add_option("--method", opts.method)
        ->check(CLI::IsMember({"auto", "continuation", "nonneg", "lmi"}));
    feasible->add_option("--resolution", opts.resolution,
                         "Simplex grid subdivisions per edge");
    feasible->add_option("--budget", opts.budget, "LMI evaluation budget");
    feasible->add_flag("--json", as_json);

    auto* op = app.add_subcommand("operating-point",
                                  "Continuation solve for the operating point");
    op->add_option("network", network_path)->required();
    op->add_option("demand", demand_spec)->required();
    op->add_option("--trace", trace_path, "Write the continuation trace CSV here");
    op->add_flag("--json", as_json);

    auto* bnd = app.add_subcommand("boundary", "Sample the feasibility boundary");
    bnd->add_option("network", network_path)->required();
    bnd->add_option("--family", family)->check(CLI::IsMember({"lambda", "mu", "nu"}));
    bnd->add_option("--samples", samples)->check(CLI::PositiveNumber);
    bnd->add_option("--out", out_path, "CSV output path (default stdout)");

    auto* cert = app.add_subcommand("certificate", "Search for an infeasibility certificate");
    cert->add_option("network", network_path)->required();
    cert->add_option("demand", demand_spec)->required();
    cert->add_option("--budget", opts.budget);
    cert->add_flag("--json", as_json);

    auto* tight = app.add_subcommand("tight-points",
                                     "Enumerate the polyhedral boundary demands");
    tight->add_option("network", network_path)->required();
    tight->add_option("--out", out_path, "CSV output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        const GridCore core = load_core(network_path);

        if (validate->parsed()) {
            std::cout << "valid Kirchhoff partition: n=" << core.n() << " m=" << core.m()
                      << "\n";
            std::cout << "  symmetric Z-matrix with zero row sums: yes\n";
            std::cout << "  Y_LL irreducible nonsingular M-matrix: yes\n";
            std::cout << "  I*=" << fmt_vec(core.i_star) << "\n";
            std::cout << "  V*=" << fmt_vec(core.v_star) << "\n";
            std::cout << "  P_max=" << fmt_vec(core.p_max) << "\n";
            return 0;
        }

        if (feasible->parsed()) {
            const Vector demand = parse_demand(demand_spec, core.n());
            const double t0 = now_seconds();
            Report report;
            report.grid = summarize(core);
            report.demands.push_back(analyze_demand(core, demand, opts));
            report.seconds = now_seconds() - t0;
            if (as_json) {
                std::cout << to_json(report).dump(2) << "\n";
            } else {
                print_demand_report(report.demands[0]);
            }
            return verdict_exit_code(report.demands[0].verdict);
        }

        if (op->parsed()) {
            const Vector demand = parse_demand(demand_spec, core.n());
            SolveOptions solve_opts;
            solve_opts.record_trace = !trace_path.empty();
            const double t0 = now_seconds();
            const ContinuationResult res = solve_desired(core, demand, solve_opts);
            DemandReport rep;
            rep.demand = demand;
            rep.verdict = verdict_name(res.verdict);
            rep.theta_star = res.theta_star;
            rep.fold_found = res.fold_found;
            rep.decided_by = "continuation";
            rep.conditions.push_back({"continuation", rep.verdict});
            if (res.v_l) {
                rep.v_l = res.v_l->v;
                rep.stability = stability_name(classify(core, res.v_l->v, 1e-6));
                rep.dissipation_w = dissipation(core, res.v_l->v);
            }
            rep.seconds = now_seconds() - t0;
            if (!trace_path.empty()) {
                std::ofstream out(trace_path);
                if (!out) throw ParseError("ParseError: cannot open " + trace_path);
                write_trace_csv(out, res.trace);
            }
            if ((demand.array() == 0.0).all()) {
                std::cout << "degenerate ray: zero demand is served by the open circuit\n";
            }
            if (as_json) {
                Report report;
                report.grid = summarize(core);
                report.demands.push_back(rep);
                report.seconds = rep.seconds;
                std::cout << to_json(report).dump(2) << "\n";
            } else {
                print_demand_report(rep);
            }
            return verdict_exit_code(rep.verdict);
        }

        if (bnd->parsed()) {
            ParamFamily fam = ParamFamily::Nu;
            if (family == "lambda") fam = ParamFamily::Lambda;
            if (family == "mu") fam = ParamFamily::Mu;
            const SweepResult sweep = sweep_boundary(core, fam, samples, seed);
            if (out_path.empty()) {
                write_boundary_csv(std::cout, sweep);
            } else {
                std::ofstream out(out_path);
                if (!out) throw ParseError("ParseError: cannot open " + out_path);
                write_boundary_csv(out, sweep);
            }
            std::cerr << "emitted " << sweep.points.size() << " boundary points ("
                      << sweep.skipped << " skipped near the parameter-set edge)\n";
            return 0;
        }

        if (cert->parsed()) {
            const Vector demand = parse_demand(demand_spec, core.n());
            const auto found = find_certificate(core, demand, opts.budget);
            if (as_json) {
                nlohmann::json j;
                j["found"] = found.has_value();
                if (found) {
                    j["nu"] = nlohmann::json::array();
                    for (Index i = 0; i < found->nu.size(); ++i) j["nu"].push_back(found->nu(i));
                    j["min_eig"] = found->min_eig;
                    j["verified"] = verify_certificate(core, found->nu, demand);
                }
                std::cout << j.dump(2) << "\n";
            } else if (found) {
                std::cout << "certificate nu=" << fmt_vec(found->nu)
                          << " min_eig=" << format_double(found->min_eig) << "\n";
            } else {
                std::cout << "no certificate found within budget " << opts.budget << "\n";
            }
            return found ? 2 : 4;
        }

        if (tight->parsed()) {
            const auto points = tight_points(core);
            if (out_path.empty()) {
                write_tight_points_csv(std::cout, points);
            } else {
                std::ofstream out(out_path);
                if (!out) throw ParseError("ParseError: cannot open " + out_path);
                write_tight_points_csv(out, points);
            }
            return 0;
        }
    } catch (const dcflow::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
