#pragma once

#include <cstdint>
#include <vector>

#include "dcflow/parallel.hpp"
#include "dcflow/powerflow.hpp"
#include "dcflow/types.hpp"

namespace dcflow {

enum class ParamFamily { Lambda, Mu, Nu };

/// A matched triple on the feasibility boundary: the generating parameter,
/// the operating point on the stability boundary, and the boundary demand.
struct BoundaryPoint {
    ParamFamily family;
    Vector param;  // normalized to unit 1-norm
    Vector v_l;
    Vector p_c;
};

/// v = phi(lambda), p = [phi] [lambda]^-1 Y_LL [lambda] phi; the closed form
/// is cross-checked against injected_power(v) to 1e-9.
BoundaryPoint boundary_from_lambda(const GridCore& core, const Vector& lambda);

/// v = psi(mu), p = [psi]^2 [mu]^-1 Y_LL mu.
BoundaryPoint boundary_from_mu(const GridCore& core, const Vector& mu);

/// Nonnegative-orthant boundary: mu is taken proportional to Y_LL^-1 nu, so
/// the resulting demand is nonnegative and v satisfies Y_LL v <= I_L*.
BoundaryPoint boundary_from_nu(const GridCore& core, const Vector& nu);

/// Duality between the two boundary parametrizations:
///   mu = [lambda] phi(lambda) / (lambda^T phi(lambda))
///   lambda = [psi(mu)]^-1 mu / (1^T [psi(mu)]^-1 mu)
/// Round-trips to identity.
Vector lambda_to_mu(const GridCore& core, const Vector& lambda);
Vector mu_to_lambda(const GridCore& core, const Vector& mu);

/// Interior ray through the stability region: phi(lambda) + r h(lambda)^-1 lambda.
/// r = 0 lands on the boundary, r > 0 strictly inside.
OperatingPoint point_in_d(const GridCore& core, const Vector& lambda, double r);

/// Dual form of the same parametrization: g(mu)^-1 [mu] (I_L* + r 1).
OperatingPoint point_in_d_dual(const GridCore& core, const Vector& mu, double r);

struct SweepResult {
    std::vector<BoundaryPoint> points;  // ordered by first demand coordinate
    int skipped = 0;                    // parameters rejected by the condition guard
};

/// Sample the feasibility boundary through one parameter family. The nu
/// family walks a deterministic simplex grid (complete for the nonnegative
/// part of the boundary); lambda and mu use a dense interval sweep for n = 2
/// and seeded rejection sampling from the simplex for n >= 3.
SweepResult sweep_boundary(const GridCore& core, ParamFamily family, int samples,
                           std::uint64_t seed = 42, Exec exec = Exec::Parallel);

}  // namespace dcflow
