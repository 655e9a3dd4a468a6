#pragma once

#include <optional>
#include <vector>

#include "dcflow/parallel.hpp"
#include "dcflow/powerflow.hpp"
#include "dcflow/types.hpp"

namespace dcflow {

enum class Verdict { Interior, Boundary, Infeasible };

enum class Stability { Stable, SemiStableBoundary, Outside };

struct TracePoint {
    double theta;
    Vector v;
    double perron_root;  // of the negated power-flow Jacobian at v
};

struct SolveOptions {
    double abs_tol = 1e-8;          // integrator absolute tolerance
    double rel_tol = 1e-8;          // integrator relative tolerance
    double boundary_band = 1e-6;    // |theta* - 1| <= band => Boundary
    double path_tol = 1e-8;         // projection tolerance, relative to demand scale
    double theta_max = 1e6;         // give up on the ray beyond this parameter
    bool find_theta_star = true;    // continue past theta = 1 to locate the fold
    bool record_trace = false;
    int max_steps = 200000;
};

/// Outcome of the continuation solve. theta_star is the largest t for which
/// t * p_c is known feasible (the ray margin through the origin). When
/// fold_found is set it is the detected singularity parameter; otherwise it
/// is only a verified lower bound (integration stopped at 1, hit theta_max,
/// or the ray is degenerate, in which case it holds the largest double).
struct ContinuationResult {
    double theta_star = 0.0;
    bool fold_found = false;
    Verdict verdict = Verdict::Infeasible;
    std::optional<OperatingPoint> v_l;  // absent iff Infeasible
    std::vector<TracePoint> trace;
};

/// Decide feasibility of p_c and compute the unique long-term voltage
/// semi-stable operating point by integrating
///   dgamma/dtheta = (dP/dV(gamma))^-1 p_c,  gamma(0) = V_L*
/// with singularity (fold) detection on the Perron root of the negated
/// Jacobian. Throws StepFailure when step control cannot proceed.
ContinuationResult solve_desired(const GridCore& core, const Vector& p_c,
                                 const SolveOptions& opts = {});

/// Stability of an operating point: Stable iff the negated Jacobian is a
/// nonsingular M-matrix, SemiStableBoundary iff singular, Outside otherwise.
/// perron_tol < 0 selects the default scale-invariant band.
Stability classify(const GridCore& core, const Vector& v_l, double perron_tol = -1.0);

/// Newton iteration on the residual [v] Y_LL (v - V_L*) + p_c, from v0,
/// to |residual|_inf <= 1e-10 * max(1, |p_c|_inf). 30 iteration cap.
OperatingPoint newton_refine(const GridCore& core, const Vector& p_c, const Vector& v0);

/// All positive solutions of the power-flow equations for n <= 3.
/// n = 1 uses the quadratic formula; n = 2, 3 dense multistart Newton over
/// [eps, 2 max V*]^n with deduplication. Best-effort completeness.
std::vector<Vector> all_solutions_oracle(const GridCore& core, const Vector& p_c,
                                         Exec exec = Exec::Parallel);

/// Multistart kernel behind the oracle, with an adjustable start grid.
std::vector<Vector> multistart_solutions(const GridCore& core, const Vector& p_c,
                                         int starts_per_dim, Exec exec);

}  // namespace dcflow
