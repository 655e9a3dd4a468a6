#include "dcflow/boundary.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>

#include "dcflow/feasibility.hpp"
#include "dcflow/matrix_analysis.hpp"

namespace dcflow {

namespace {

Vector normalized_l1(const Vector& x) { return x / x.template lpNorm<1>(); }

void cross_check_demand(const GridCore& core, const Vector& v, const Vector& p_closed) {
    const Vector p_direct = v.cwiseProduct(core.y_ll * (core.v_star - v));
    const double scale = std::max(1.0, p_closed.template lpNorm<Eigen::Infinity>());
    if ((p_closed - p_direct).template lpNorm<Eigen::Infinity>() > 1e-9 * scale) {
        throw CoreInvariantViolation(
            "CoreInvariantViolation: boundary demand disagrees with the injected power");
    }
}

}  // namespace

BoundaryPoint boundary_from_lambda(const GridCore& core, const Vector& lambda) {
    const Vector lam = normalized_l1(lambda);
    const OperatingPoint v = phi(core, lam);  // validates admissibility
    const Vector p =
        v.v.cwiseProduct((core.y_ll * lam.cwiseProduct(v.v)).cwiseQuotient(lam));
    cross_check_demand(core, v.v, p);
    return BoundaryPoint{ParamFamily::Lambda, lam, v.v, p};
}

BoundaryPoint boundary_from_mu(const GridCore& core, const Vector& mu) {
    const Vector mu1 = normalized_l1(mu);
    const OperatingPoint v = psi(core, mu1);  // validates admissibility
    const Vector p =
        v.v.cwiseProduct(v.v).cwiseProduct((core.y_ll * mu1).cwiseQuotient(mu1));
    cross_check_demand(core, v.v, p);
    return BoundaryPoint{ParamFamily::Mu, mu1, v.v, p};
}

BoundaryPoint boundary_from_nu(const GridCore& core, const Vector& nu) {
    if (nu.size() != core.n() || !nu.allFinite() || (nu.array() < 0.0).any() ||
        nu.maxCoeff() <= 0.0) {
        throw InvalidNu("InvalidNu: boundary_from_nu requires a nonzero nonnegative vector");
    }
    const Vector nu1 = normalized_l1(nu);
    const Vector mu = normalized_l1(core.solve_y_ll(nu1));
    BoundaryPoint bp = boundary_from_mu(core, mu);
    bp.family = ParamFamily::Nu;
    bp.param = nu1;
    const double tol = 1e-10 * std::max(1.0, core.i_star.template lpNorm<Eigen::Infinity>());
    if (bp.p_c.minCoeff() < -tol ||
        ((core.y_ll * bp.v_l) - core.i_star).maxCoeff() > tol) {
        throw CoreInvariantViolation(
            "CoreInvariantViolation: nu-parametrized point left the nonnegative boundary");
    }
    return bp;
}

Vector lambda_to_mu(const GridCore& core, const Vector& lambda) {
    const OperatingPoint v = phi(core, lambda);
    const Vector scaled = lambda.cwiseProduct(v.v);
    return scaled / lambda.dot(v.v);
}

Vector mu_to_lambda(const GridCore& core, const Vector& mu) {
    const OperatingPoint v = psi(core, mu);
    const Vector scaled = mu.cwiseQuotient(v.v);
    return scaled / scaled.sum();
}

OperatingPoint point_in_d(const GridCore& core, const Vector& lambda, double r) {
    if (!(r >= 0.0)) {
        throw InvalidP("InvalidP: ray parameter r must be >= 0");
    }
    if (!in_lambda_set(core, lambda)) {
        throw LambdaNotAdmissible("LambdaNotAdmissible: h(lambda) is not positive definite");
    }
    Eigen::LLT<Matrix> llt(h_of(core, lambda));
    const Vector base = 0.5 * llt.solve(lambda.cwiseProduct(core.i_star));
    return OperatingPoint(base + r * llt.solve(lambda));
}

OperatingPoint point_in_d_dual(const GridCore& core, const Vector& mu, double r) {
    if (!(r >= 0.0)) {
        throw InvalidP("InvalidP: ray parameter r must be >= 0");
    }
    if (!in_m_set(core, mu)) {
        throw MuNotAdmissible("MuNotAdmissible: g(mu) is not a nonsingular M-matrix");
    }
    Eigen::PartialPivLU<Matrix> lu(g_of(core, mu));
    return OperatingPoint(
        lu.solve(mu.cwiseProduct(core.i_star + r * Vector::Ones(core.n()))));
}

SweepResult sweep_boundary(const GridCore& core, ParamFamily family, int samples,
                           std::uint64_t seed, Exec exec) {
    if (samples < 2) {
        throw InvalidP("InvalidP: sweep requires at least 2 samples");
    }
    const Index n = core.n();

    // Collect parameter candidates per family, then evaluate them in one
    // parallel map; near-singular parameters are skipped and counted.
    std::vector<Vector> params;
    if (n == 1) {
        params.push_back(Vector::Ones(1));
    } else if (family == ParamFamily::Nu) {
        int res = samples - 1;
        if (n > 2) {
            res = 1;
            auto count = [&](int r) {
                double c = 1.0;
                for (Index k = 1; k < n; ++k) c *= static_cast<double>(r + k) / static_cast<double>(k);
                return c;
            };
            while (count(res + 1) <= static_cast<double>(samples) && res < 4096) ++res;
        }
        Vector node = Vector::Zero(n);
        std::function<void(Index, int)> rec = [&](Index pos, int left) {
            if (pos == n - 1) {
                node(pos) = left;
                params.push_back(node / static_cast<double>(res));
                return;
            }
            for (int k = 0; k <= left; ++k) {
                node(pos) = k;
                rec(pos + 1, left - k);
            }
        };
        rec(0, res);
    } else {
        const auto admissible = [&](const Vector& x) {
            return family == ParamFamily::Lambda ? in_lambda_set(core, x) : in_m_set(core, x);
        };
        if (n == 2) {
            // The admissible set cuts an interval out of the segment
            // (t, 1-t); locate its edges by bisection on the indicator.
            const auto at = [](double t) { return (Vector(2) << t, 1.0 - t).finished(); };
            double lo_out = 0.0, lo_in = 0.5;
            double hi_in = 0.5, hi_out = 1.0;
            for (int it = 0; it < 60; ++it) {
                const double lm = 0.5 * (lo_out + lo_in);
                (admissible(at(lm)) ? lo_in : lo_out) = lm;
                const double hm = 0.5 * (hi_in + hi_out);
                (admissible(at(hm)) ? hi_in : hi_out) = hm;
            }
            const double guard = 1e-6 * (hi_in - lo_in);
            for (int k = 0; k < samples; ++k) {
                const double t = (lo_in + guard) +
                                 (hi_in - lo_in - 2 * guard) * k / static_cast<double>(samples - 1);
                params.push_back(at(t));
            }
        } else {
            // Rejection sampling from the simplex; admissible sets are convex
            // so accepted pairs are densified by midpoints when acceptance
            // alone is too slow.
            std::mt19937_64 rng(seed);
            std::exponential_distribution<double> ex(1.0);
            int attempts = 0;
            while (static_cast<int>(params.size()) < samples && attempts < 200 * samples) {
                ++attempts;
                Vector x(n);
                for (Index i = 0; i < n; ++i) x(i) = ex(rng);
                x /= x.sum();
                if (admissible(x)) params.push_back(x);
                if (params.size() >= 2 && static_cast<int>(params.size()) < samples &&
                    attempts > 20 * samples) {
                    std::uniform_int_distribution<size_t> pick(0, params.size() - 1);
                    const Vector mid =
                        normalized_l1(0.5 * (params[pick(rng)] + params[pick(rng)]));
                    if (admissible(mid)) params.push_back(mid);
                }
            }
        }
    }

    std::vector<std::optional<BoundaryPoint>> evaluated(params.size());
    for_each_index(static_cast<std::ptrdiff_t>(params.size()), exec, [&](std::ptrdiff_t i) {
        const size_t k = static_cast<size_t>(i);
        try {
            switch (family) {
                case ParamFamily::Lambda:
                    evaluated[k] = boundary_from_lambda(core, params[k]);
                    break;
                case ParamFamily::Mu:
                    evaluated[k] = boundary_from_mu(core, params[k]);
                    break;
                case ParamFamily::Nu:
                    evaluated[k] = boundary_from_nu(core, params[k]);
                    break;
            }
        } catch (const Error&) {
            evaluated[k] = std::nullopt;  // guard rejection, reported as skipped
        }
    });

    SweepResult result;
    for (auto& e : evaluated) {
        if (e) {
            result.points.push_back(std::move(*e));
        } else {
            ++result.skipped;
        }
    }
    std::sort(result.points.begin(), result.points.end(),
              [](const BoundaryPoint& a, const BoundaryPoint& b) {
                  return a.p_c(0) < b.p_c(0);
              });
    return result;
}

}  // namespace dcflow
