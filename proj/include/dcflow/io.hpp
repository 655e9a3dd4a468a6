#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcflow/boundary.hpp"
#include "dcflow/feasibility.hpp"
#include "dcflow/network.hpp"
#include "dcflow/operating_point.hpp"

namespace dcflow {

/// Parsed grid description: the partition plus the source voltages.
struct GridInput {
    KirchhoffPartition part;
    Vector v_s;
};

/// Accepts either the edge-list form
///   {"loads": n, "sources": m, "source_voltages": [..],
///    "edges": [{"a": i, "b": j, "g": val}, ..]}
/// (0-based indices, loads first) or the direct form
///   {"Y_LL": [[..]], "Y_LS": [[..]], "V_S": [..]}.
GridInput parse_network_json(const nlohmann::json& j);
GridInput load_network_file(const std::string& path);

/// Demand vector from either a comma-separated inline list of watts or a
/// path to a JSON array file. Length must equal n.
Vector parse_demand(const std::string& spec, Index n);

/// One feasibility condition evaluated on the way to a verdict.
struct ConditionRecord {
    std::string name;
    std::string outcome;
};

struct DemandReport {
    Vector demand;
    std::string verdict;  // interior | boundary | infeasible | undecided
    std::optional<double> theta_star;
    bool fold_found = false;
    std::optional<Vector> v_l;
    std::optional<std::string> stability;
    std::optional<double> dissipation_w;
    std::optional<InfeasibilityCertificate> certificate;
    std::string certificate_status = "not_attempted";  // found | not_found_within_budget
    std::vector<ConditionRecord> conditions;
    std::string decided_by;
    double seconds = 0.0;
};

struct GridSummary {
    Index n = 0;
    Index m = 0;
    Vector v_star;
    Vector i_star;
    Vector p_max;
};

/// Machine-readable analysis report; the JSON form is the source of truth
/// and round-trips exactly. Human-readable text is derived from it.
struct Report {
    GridSummary grid;
    std::vector<DemandReport> demands;
    double seconds = 0.0;
};

nlohmann::json to_json(const GridSummary& s);
nlohmann::json to_json(const DemandReport& d);
nlohmann::json to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

/// 17 significant digits, RFC-4180 friendly.
std::string format_double(double x);

void write_boundary_csv(std::ostream& os, const SweepResult& sweep);
void write_trace_csv(std::ostream& os, const std::vector<TracePoint>& trace);
void write_tight_points_csv(std::ostream& os, const std::vector<TightPoint>& points);

std::string verdict_name(Verdict v);
std::string stability_name(Stability s);

/// Exit code convention shared by the CLI: 0 feasible (interior), 2
/// infeasible, 3 boundary, 4 undecided.
int verdict_exit_code(const std::string& verdict);

}  // namespace dcflow
