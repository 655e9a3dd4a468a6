#pragma once

#include <string>

#include "dcflow/io.hpp"
#include "dcflow/powerflow.hpp"

namespace dcflow {

struct AnalyzeOptions {
    std::string method = "auto";  // auto | continuation | nonneg | lmi
    int resolution = 0;           // simplex subdivisions per edge; 0 picks a default
    int budget = 2000;            // LMI evaluation budget
};

GridSummary summarize(const GridCore& core);

/// Default simplex resolution: 200 per edge at desk scale, capped so the
/// barycentric grid stays near 2e4 nodes for larger grids.
int default_resolution(Index n);

/// Verdict plus provenance for one demand. The auto method screens with the
/// cheap sufficient conditions, applies the exact simplex decision to
/// nonnegative demands, and falls back to continuation, which is decisive.
/// Every feasible verdict carries an operating point; every infeasible one
/// carries a certificate or an explicit not-found-within-budget flag.
DemandReport analyze_demand(const GridCore& core, const Vector& demand,
                            const AnalyzeOptions& opts = {});

}  // namespace dcflow
