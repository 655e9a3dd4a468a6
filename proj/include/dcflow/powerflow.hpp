#pragma once

#include <Eigen/Cholesky>

#include "dcflow/network.hpp"
#include "dcflow/types.hpp"

namespace dcflow {

/// Immutable analysis context for a fixed grid: the partitioned Kirchhoff
/// matrix, source voltages, and the derived open-circuit quantities
///   I_L* = -Y_LS V_S          (source-injected currents, >= 0, not all 0)
///   V_L* = Y_LL^-1 I_L*       (open-circuit voltages, > 0)
///   P_max = 1/4 [V_L*] I_L*   (maximizing feasible power demand)
/// Safe to share across threads once constructed.
struct GridCore {
    Matrix y_ll;
    Matrix y_ls;
    Matrix y_sl;
    Matrix y_ss;
    Vector v_s;
    Vector i_star;
    Vector v_star;
    Vector p_max;

    Index n() const { return y_ll.rows(); }
    Index m() const { return v_s.size(); }

    /// Solve Y_LL x = rhs against the cached Cholesky factor.
    Vector solve_y_ll(const Vector& rhs) const { return y_ll_llt_.solve(rhs); }

    Eigen::LLT<Matrix> y_ll_llt_;  // Y_LL is symmetric positive definite
};

GridCore make_core(const KirchhoffPartition& part, const Vector& v_s);

/// Power drawn from the grid at each load when the loads sit at v_l:
/// [v_l] Y_LL (V_L* - v_l). Zero exactly at v_l = V_L*.
Vector injected_power(const GridCore& core, const Vector& v_l);

/// Jacobian of the injected power map: [Y_LL (V_L* - v_l)] - [v_l] Y_LL.
/// Defined for any finite v_l; equals [I_L*] - g(v_l).
Matrix jacobian(const GridCore& core, const Vector& v_l);

/// h(lambda) = 1/2 ([lambda] Y_LL + Y_LL [lambda]); symmetric.
Matrix h_of(const GridCore& core, const Vector& lambda);

/// lambda is admissible iff h(lambda) is positive definite.
bool in_lambda_set(const GridCore& core, const Vector& lambda);

/// g(mu) = [mu] Y_LL + [Y_LL mu]; linear in mu, g(mu) v = g(v) mu.
Matrix g_of(const GridCore& core, const Vector& mu);

/// mu is admissible iff g(mu) is a nonsingular M-matrix. Admissible mu are
/// strictly positive; this is asserted.
bool in_m_set(const GridCore& core, const Vector& mu);

/// phi(lambda) = 1/2 h(lambda)^-1 [lambda] I_L*. Scale-invariant in lambda;
/// phi(1) = 1/2 V_L*. Throws LambdaNotAdmissible outside the h-PD cone.
OperatingPoint phi(const GridCore& core, const Vector& lambda);

/// psi(mu) = g(mu)^-1 [mu] I_L* > 0. Scale-invariant in mu. Throws
/// MuNotAdmissible outside the M cone or when g(mu) is numerically singular
/// (reciprocal condition estimate below 1e-12).
OperatingPoint psi(const GridCore& core, const Vector& mu);

/// chi(nu) = [psi(Y_LL^-1 nu)]^-1 Y_LL^-1 nu for nonzero nu >= 0.
/// Well defined because Y_LL^-1 nu always lies in the M cone.
Vector chi(const GridCore& core, const Vector& nu);

/// chi(nu) scaled to unit 1-norm; lies in the admissible lambda set.
Vector chi_normalized(const GridCore& core, const Vector& nu);

/// Total resistive loss V^T Y V with V = (v_l, V_S) stacked.
double dissipation(const GridCore& core, const Vector& v_l);

/// Power supplied by each source: [V_S](Y_SL v_l + Y_SS V_S).
/// Conservation: 1^T source_power - 1^T injected_power = dissipation.
Vector source_power(const GridCore& core, const Vector& v_l);

/// Feasibility-equivalent grid with a single source and unit quantities:
/// Y_LL' = [V*] Y_LL [V*], Y_LS' = -[V*] I_L*, V_S' = 1. Open-circuit
/// voltages of the result are the all-ones vector; demands correspond
/// one-to-one under v_l = [V*] v_l'.
GridCore to_single_source(const GridCore& core);

}  // namespace dcflow
