#pragma once

#include <optional>
#include <vector>

#include "dcflow/parallel.hpp"
#include "dcflow/powerflow.hpp"
#include "dcflow/types.hpp"

namespace dcflow {

/// Supporting half-space evidence: lambda normalized to unit 1-norm and the
/// margin |phi(lambda)|^2_h(lambda) - lambda^T p_c, nonnegative for every
/// feasible demand and zero exactly at the supported boundary demand.
struct HalfspaceCertificate {
    Vector lambda;
    double margin;
};

/// Witness of infeasibility: a positive nu for which the LMI block is
/// strictly positive definite, together with its smallest eigenvalue.
struct InfeasibilityCertificate {
    Vector nu;
    double min_eig;
};

HalfspaceCertificate halfspace_margin(const GridCore& core, const Vector& lambda,
                                      const Vector& p_c);

/// True iff the LMI block at (nu, p_c) is positive definite, which certifies
/// that p_c is infeasible. With semidefinite = true the tolerance is relaxed
/// to certify p_c outside the interior of the feasible set.
bool verify_certificate(const GridCore& core, const Vector& nu, const Vector& p_c,
                        bool semidefinite = false);

/// Best-effort search for an infeasibility certificate: maximize the smallest
/// eigenvalue of the LMI block over the positive simplex (grid seeds plus
/// Nelder-Mead refinement), capped at `budget` LMI evaluations. Absence of a
/// certificate proves nothing; combine with solve_desired.
std::optional<InfeasibilityCertificate> find_certificate(const GridCore& core,
                                                         const Vector& p_c,
                                                         int budget = 2000);

enum class NonnegVerdict { FeasibleInterior, Feasible, Infeasible };

struct NonnegDecision {
    NonnegVerdict verdict;
    Vector worst_nu;    // minimizer of the margin over the simplex
    double min_margin;  // min over nu of 1/2 nu^T V* - chi(nu)^T p_c
};

/// Exact decision for nonnegative demands: scan the margin
/// m(nu) = 1/2 nu^T V_L* - chi(nu)^T p_c over the unit simplex with a
/// barycentric grid (`resolution` subdivisions per edge) plus Nelder-Mead
/// descent from the five worst nodes. Completeness is resolution-dependent.
NonnegDecision nonneg_decide(const GridCore& core, const Vector& p_c, int resolution,
                             Exec exec = Exec::Parallel);

/// Sufficient test for arbitrary-sign demands: clamp to max(p_c, 0) and
/// decide; true implies p_c is feasible by element-wise domination.
bool sufficient_clamped_nonneg(const GridCore& core, const Vector& p_c, int resolution,
                               Exec exec = Exec::Parallel);

enum class SpTag { Holds, HoldsTight, Fails };

struct SpResult {
    SpTag tag;
    std::vector<Index> alpha;  // tight index set when tag == HoldsTight
};

/// The polyhedral sufficient condition (1/4 [V*] Y_LL [V*])^-1 max(p_c,0) <= 1.
/// Holds implies feasible; HoldsTight flags the demands on the feasibility
/// boundary where the condition is tight. Fails is inconclusive.
SpResult sufficient_simpson_porco(const GridCore& core, const Vector& p_c);

struct TightPoint {
    std::vector<Index> alpha;
    Vector demand;
};

/// The boundary demands where the polyhedral condition is tight, one per
/// nonempty subset alpha: p[alpha] = 1/4 [V*_a] (Y_LL / Y_LL[c,c]) V*_a,
/// p elsewhere zero. Requires n <= 16.
std::vector<TightPoint> tight_points(const GridCore& core, Exec exec = Exec::Parallel);

/// Ball sufficient condition: |p_c|_p < bolognani_radius(core, p) implies
/// p_c is interior-feasible. p in [1, inf], q the Hoelder conjugate.
bool sufficient_bolognani(const GridCore& core, const Vector& p_c, double p);

/// Radius of the largest p-ball around the origin covered by the polyhedral
/// condition: the reciprocal of the max row q-norm of (1/4 [V*] Y_LL [V*])^-1.
double bolognani_radius(const GridCore& core, double p);

/// p_low <= p_high element-wise with p_low != p_high. Combined with a feasible
/// p_high this places p_low in the interior of the feasible set.
bool dominates(const Vector& p_low, const Vector& p_high);

}  // namespace dcflow
