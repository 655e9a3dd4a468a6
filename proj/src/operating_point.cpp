#include "dcflow/operating_point.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "dcflow/matrix_analysis.hpp"

namespace dcflow {

namespace {

// Injected power without the positivity gate; the integrator may probe
// points outside the positive orthant transiently.
Vector demand_of(const GridCore& core, const Vector& v) {
    return v.cwiseProduct(core.y_ll * (core.v_star - v));
}

double perron_root_at(const GridCore& core, const Vector& v) {
    return perron(Matrix(-jacobian(core, v))).root;
}

// Newton projection onto the path manifold {v : P(v) = theta * p}.
bool project_onto_path(const GridCore& core, const Vector& p, double theta, Vector& v,
                       double tol) {
    for (int it = 0; it < 12; ++it) {
        const Vector r = demand_of(core, v) - theta * p;
        if (r.template lpNorm<Eigen::Infinity>() <= tol) return true;
        Eigen::PartialPivLU<Matrix> lu(jacobian(core, v));
        if (lu.rcond() < 1e-14) return false;
        const Vector dv = lu.solve(-r);
        double t = 1.0;
        while (t > 1.0 / 64.0 && ((v + t * dv).array() <= 0.0).any()) t *= 0.5;
        if (((v + t * dv).array() <= 0.0).any()) return false;
        v += t * dv;
        if (!v.allFinite()) return false;
    }
    return (demand_of(core, v) - theta * p).template lpNorm<Eigen::Infinity>() <= tol;
}

struct FoldPoint {
    double theta;
    Vector v;
};

// Bordered (Moore-Spence) system for the fold along the ray: unknowns
// (v, w, theta) with P(v) = theta p, J(v) w = 0, 1^T w = 1. Newton on the
// full system converges quadratically once the Perron root is small.
std::optional<FoldPoint> fold_newton(const GridCore& core, const Vector& p, Vector v,
                                     Vector w, double theta) {
    const Index n = core.n();
    const double p_scale = std::max(1.0, p.template lpNorm<Eigen::Infinity>());
    Vector x(2 * n + 1);
    x << v, w, theta;

    for (int it = 0; it < 60; ++it) {
        v = x.head(n);
        w = x.segment(n, n);
        theta = x(2 * n);
        const Matrix j = jacobian(core, v);

        Vector f(2 * n + 1);
        f.head(n) = demand_of(core, v) - theta * p;
        f.segment(n, n) = j * w;
        f(2 * n) = w.sum() - 1.0;

        Matrix df = Matrix::Zero(2 * n + 1, 2 * n + 1);
        df.topLeftCorner(n, n) = j;
        df.block(0, 2 * n, n, 1) = -p;
        df.block(n, 0, n, n) = -g_of(core, w);
        df.block(n, n, n, n) = j;
        df.block(2 * n, n, 1, n) = Eigen::RowVectorXd::Ones(n);

        Eigen::PartialPivLU<Matrix> lu(df);
        if (lu.rcond() < 1e-15) return std::nullopt;
        const Vector dx = lu.solve(-f);
        if (!dx.allFinite()) return std::nullopt;

        double t = 1.0;
        while (t > 1.0 / 1024.0 && ((x.head(n) + t * dx.head(n)).array() <= 0.0).any()) t *= 0.5;
        x += t * dx;

        if (dx.template lpNorm<Eigen::Infinity>() <=
            1e-13 * std::max(1.0, x.template lpNorm<Eigen::Infinity>())) {
            v = x.head(n);
            w = x.segment(n, n);
            theta = x(2 * n);
            const bool positive = (v.array() > 0.0).all() && (w.array() > -1e-10).all();
            const double res =
                (demand_of(core, v) - theta * p).template lpNorm<Eigen::Infinity>();
            const double rho = perron_root_at(core, v);
            const double y_scale = core.y_ll.cwiseAbs().maxCoeff();
            if (positive && res <= 1e-9 * p_scale && std::abs(rho) <= 1e-7 * y_scale &&
                std::isfinite(theta)) {
                return FoldPoint{theta, v};
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

// Fallback when the bordered solve will not converge: walk theta forward by
// projection until it fails, then bisect the last bracket down to 1e-10.
std::optional<FoldPoint> fold_bisection(const GridCore& core, const Vector& p,
                                        Vector v_lo, double theta_lo, double h0,
                                        double proj_tol, double theta_max) {
    double delta = std::max(h0, 1e-9 * std::max(1.0, theta_lo));
    double theta_hi = -1.0;
    while (theta_lo + delta <= theta_max) {
        Vector probe = v_lo;
        if (project_onto_path(core, p, theta_lo + delta, probe, proj_tol) &&
            perron_root_at(core, probe) >= 0.0) {
            theta_lo += delta;
            v_lo = probe;
            delta *= 2.0;
        } else {
            theta_hi = theta_lo + delta;
            break;
        }
    }
    if (theta_hi < 0.0) return std::nullopt;  // ray feasible up to theta_max
    while (theta_hi - theta_lo > 1e-10 * std::max(1.0, theta_hi)) {
        const double mid = 0.5 * (theta_lo + theta_hi);
        Vector probe = v_lo;
        if (project_onto_path(core, p, mid, probe, proj_tol) &&
            perron_root_at(core, probe) >= 0.0) {
            theta_lo = mid;
            v_lo = probe;
        } else {
            theta_hi = mid;
        }
    }
    return FoldPoint{0.5 * (theta_lo + theta_hi), v_lo};
}

// Dormand-Prince 5(4) pair.
struct RkStep {
    Vector v5;
    double err;  // scaled error estimate, accept when <= 1
};

template <typename Rhs>
std::optional<RkStep> rk45_step(const Rhs& rhs, const Vector& v, double h, double abs_tol,
                                double rel_tol) {
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                        e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

    const auto k1 = rhs(v);
    if (!k1) return std::nullopt;
    const auto k2 = rhs(v + h * a21 * *k1);
    if (!k2) return std::nullopt;
    const auto k3 = rhs(v + h * (a31 * *k1 + a32 * *k2));
    if (!k3) return std::nullopt;
    const auto k4 = rhs(v + h * (a41 * *k1 + a42 * *k2 + a43 * *k3));
    if (!k4) return std::nullopt;
    const auto k5 = rhs(v + h * (a51 * *k1 + a52 * *k2 + a53 * *k3 + a54 * *k4));
    if (!k5) return std::nullopt;
    const auto k6 = rhs(v + h * (a61 * *k1 + a62 * *k2 + a63 * *k3 + a64 * *k4 + a65 * *k5));
    if (!k6) return std::nullopt;
    const Vector v5 = v + h * (b1 * *k1 + b3 * *k3 + b4 * *k4 + b5 * *k5 + b6 * *k6);
    const auto k7 = rhs(v5);
    if (!k7) return std::nullopt;
    const Vector v4 =
        v + h * (e1 * *k1 + e3 * *k3 + e4 * *k4 + e5 * *k5 + e6 * *k6 + e7 * *k7);

    double acc = 0.0;
    for (Index i = 0; i < v.size(); ++i) {
        const double sc = abs_tol + rel_tol * std::max(std::abs(v(i)), std::abs(v5(i)));
        const double e = (v5(i) - v4(i)) / sc;
        acc += e * e;
    }
    return RkStep{v5, std::sqrt(acc / static_cast<double>(v.size()))};
}

}  // namespace

ContinuationResult solve_desired(const GridCore& core, const Vector& p_c,
                                 const SolveOptions& opts) {
    const Index n = core.n();
    if (p_c.size() != n) {
        throw DimensionMismatch("DimensionMismatch: demand length must equal loads");
    }
    if (!p_c.allFinite()) {
        throw ParseError("ParseError: demand must be finite");
    }

    ContinuationResult result;
    if ((p_c.array() == 0.0).all()) {
        // Ray through the origin is degenerate: the open circuit solves it
        // for every scaling.
        result.theta_star = std::numeric_limits<double>::max();
        result.fold_found = false;
        result.verdict = Verdict::Interior;
        result.v_l = OperatingPoint(core.v_star);
        if (opts.record_trace) {
            result.trace.push_back({0.0, core.v_star, perron_root_at(core, core.v_star)});
        }
        return result;
    }

    const double p_scale = std::max(1.0, p_c.template lpNorm<Eigen::Infinity>());
    const double proj_tol = opts.path_tol * p_scale;
    const double band = opts.boundary_band;

    Vector v = core.v_star;
    double theta = 0.0;
    const double rho0 = perron_root_at(core, v);
    double rho = rho0;
    if (opts.record_trace) result.trace.push_back({theta, v, rho});

    auto rhs = [&](const Vector& y) -> std::optional<Vector> {
        Eigen::PartialPivLU<Matrix> lu(jacobian(core, y));
        if (lu.rcond() < 1e-13) return std::nullopt;
        Vector f = lu.solve(p_c);
        if (!f.allFinite()) return std::nullopt;
        return f;
    };

    std::optional<Vector> v_at_1;
    std::optional<FoldPoint> fold;
    double fold_trigger = 0.02;
    bool ray_open = false;  // no fold up to theta_max

    double h = 1e-3;
    {
        const auto f0 = rhs(v);
        if (f0) {
            const double speed = f0->template lpNorm<Eigen::Infinity>();
            h = std::clamp(0.01 * v.template lpNorm<Eigen::Infinity>() / std::max(speed, 1e-12),
                           1e-8, 0.05);
        }
    }

    const auto try_fold = [&](double theta_guess) -> bool {
        const Vector w = perron(Matrix(-jacobian(core, v))).vector;
        auto f = fold_newton(core, p_c, v, w, theta_guess);
        if (f && f->theta >= theta - 1e-9 * std::max(1.0, theta)) {
            fold = f;
            return true;
        }
        return false;
    };

    const double theta_cap = std::max(opts.theta_max, 1.0);
    double prev_theta = theta;
    double prev_rho = rho;
    int steps = 0;
    int stall = 0;

    while (true) {
        if (++steps > opts.max_steps) {
            throw StepFailure("StepFailure: step budget exhausted", theta);
        }

        if (!fold && rho < fold_trigger * rho0) {
            // Extrapolate the fold from the square-root vanishing of rho.
            double guess = theta + 0.1 * std::max(theta, 1.0);
            const double dr = prev_rho * prev_rho - rho * rho;
            if (dr > 0.0 && theta > prev_theta) {
                guess = theta + rho * rho * (theta - prev_theta) / dr;
            }
            if (!try_fold(guess)) fold_trigger *= 0.5;
        }
        if (fold && (v_at_1 || fold->theta <= 1.0 + band)) break;
        if (ray_open) break;

        double h_eff = h;
        const bool hitting_one = theta < 1.0 && theta + h_eff >= 1.0;
        if (hitting_one) h_eff = 1.0 - theta;
        if (theta + h_eff > theta_cap) h_eff = theta_cap - theta;

        const double h_min = 1e-14 * std::max(1.0, theta);
        const auto fail_step = [&](double factor) {
            h = std::max(h_eff * factor, 0.0);
            ++stall;
        };

        bool accepted = false;
        Vector v_new;
        double err = 0.0;
        if (h_eff > h_min) {
            const auto step = rk45_step(rhs, v, h_eff, opts.abs_tol, opts.rel_tol);
            if (!step) {
                fail_step(0.5);
            } else if (step->err > 1.0) {
                fail_step(std::max(0.1, 0.9 * std::pow(step->err, -0.25)));
            } else {
                v_new = step->v5;
                err = step->err;
                if ((v_new.array() <= 0.0).any() ||
                    !project_onto_path(core, p_c, theta + h_eff, v_new, proj_tol) ||
                    (v_new.array() <= 0.0).any()) {
                    fail_step(0.5);
                } else {
                    const double rho_new = perron_root_at(core, v_new);
                    if (rho_new < 0.0) {
                        fail_step(0.25);  // stepped past the fold
                    } else {
                        accepted = true;
                        prev_theta = theta;
                        prev_rho = rho;
                        theta += h_eff;
                        v = v_new;
                        rho = rho_new;
                        stall = 0;
                        if (opts.record_trace) result.trace.push_back({theta, v, rho});
                    }
                }
            }
        }

        if (accepted) {
            if (hitting_one) {
                Vector v1 = v;
                if (project_onto_path(core, p_c, 1.0, v1, 1e-10 * p_scale)) {
                    v_at_1 = v1;
                } else {
                    v_at_1 = v;
                }
                if (fold) break;
                if (!opts.find_theta_star) break;
            }
            if (theta >= theta_cap) {
                ray_open = true;
                break;
            }
            h = h_eff * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
            continue;
        }

        // Step control is stuck. Near a fold that is expected; force the
        // fold solvers. Away from one it is a genuine failure.
        if (h <= h_min || stall > 60) {
            if (rho < 0.5 * rho0) {
                if (try_fold(theta + std::max(h, 1e-8))) continue;
                auto f = fold_bisection(core, p_c, v, theta, std::max(h, 1e-8), proj_tol,
                                        theta_cap);
                if (f) {
                    fold = f;
                    continue;
                }
                ray_open = true;  // projection succeeded all the way to theta_max
                continue;
            }
            throw StepFailure("StepFailure: step size underflow at theta", theta);
        }
    }

    if (fold) {
        result.theta_star = fold->theta;
        result.fold_found = true;
        if (std::abs(fold->theta - 1.0) <= band) {
            result.verdict = Verdict::Boundary;
            result.v_l = OperatingPoint(fold->v);
        } else if (fold->theta < 1.0) {
            result.verdict = Verdict::Infeasible;
        } else {
            result.verdict = Verdict::Interior;
            result.v_l = OperatingPoint(v_at_1.value());
        }
    } else if (ray_open) {
        result.theta_star = std::max(theta, theta_cap);
        result.fold_found = false;
        result.verdict = Verdict::Interior;
        if (!v_at_1) {
            // the bisection fallback can outrun the integrator; recover V(1)
            Vector v1 = v;
            if (!project_onto_path(core, p_c, 1.0, v1, 1e-10 * p_scale)) {
                throw StepFailure("StepFailure: lost the operating point at theta = 1", theta);
            }
            v_at_1 = v1;
        }
        result.v_l = OperatingPoint(v_at_1.value());
    } else {
        // Stopped at theta = 1 without chasing the fold; theta_star is only
        // a verified lower bound.
        result.theta_star = 1.0;
        result.fold_found = false;
        result.verdict = Verdict::Interior;
        result.v_l = OperatingPoint(v_at_1.value());
    }
    return result;
}

Stability classify(const GridCore& core, const Vector& v_l, double perron_tol) {
    if (v_l.size() != core.n() || !v_l.allFinite() || (v_l.array() <= 0.0).any()) {
        throw NonpositiveVoltage("NonpositiveVoltage: classify expects v > 0");
    }
    const MClass cls = classify_m(Matrix(-jacobian(core, v_l)), perron_tol);
    switch (cls.tag) {
        case MTag::NonsingularM:
            return Stability::Stable;
        case MTag::SingularM:
            return Stability::SemiStableBoundary;
        default:
            return Stability::Outside;
    }
}

OperatingPoint newton_refine(const GridCore& core, const Vector& p_c, const Vector& v0) {
    const Index n = core.n();
    if (p_c.size() != n || v0.size() != n) {
        throw DimensionMismatch("DimensionMismatch: newton_refine expects n-vectors");
    }
    const double tol = 1e-10 * std::max(1.0, p_c.template lpNorm<Eigen::Infinity>());
    Vector v = v0;
    for (int it = 0; it < 30; ++it) {
        Eigen::PartialPivLU<Matrix> lu(jacobian(core, v));
        if (lu.rcond() < 1e-14) {
            throw SingularJacobian("SingularJacobian: power-flow Jacobian is singular");
        }
        const Vector r = demand_of(core, v) - p_c;
        if (r.template lpNorm<Eigen::Infinity>() <= tol) {
            return OperatingPoint(v);
        }
        v += lu.solve(-r);
        if (!v.allFinite()) {
            throw NoConvergence("NoConvergence: Newton iterates diverged");
        }
    }
    if ((demand_of(core, v) - p_c).template lpNorm<Eigen::Infinity>() <= tol) {
        return OperatingPoint(v);
    }
    throw NoConvergence("NoConvergence: Newton did not reach tolerance in 30 iterations");
}

std::vector<Vector> multistart_solutions(const GridCore& core, const Vector& p_c,
                                         int starts_per_dim, Exec exec) {
    const Index n = core.n();
    const double v_max = core.v_star.maxCoeff();
    const double lo = 1e-3 * v_max;
    const double hi = 2.0 * v_max;
    const double p_tol = 1e-10 * std::max(1.0, p_c.template lpNorm<Eigen::Infinity>());
    const double pos_floor = 1e-9 * v_max;
    const double dedup = 1e-6 * core.v_star.template lpNorm<Eigen::Infinity>();

    std::ptrdiff_t total = 1;
    for (Index d = 0; d < n; ++d) total *= starts_per_dim;

    std::vector<std::optional<Vector>> found(static_cast<size_t>(total));
    for_each_index(total, exec, [&](std::ptrdiff_t idx) {
        Vector v(n);
        std::ptrdiff_t rem = idx;
        for (Index d = 0; d < n; ++d) {
            const int digit = static_cast<int>(rem % starts_per_dim);
            rem /= starts_per_dim;
            v(d) = lo + (hi - lo) * digit / static_cast<double>(starts_per_dim - 1);
        }
        // Converge in residual AND step size: at boundary (fold) demands the
        // residual is quadratically flat, and stopping on it alone would
        // scatter near-duplicates wider than the dedup radius. Newton still
        // contracts linearly toward a fold, so the extra iterations collapse
        // the cluster.
        const auto accept = [&] {
            if (v.minCoeff() > pos_floor) found[static_cast<size_t>(idx)] = v;
        };
        double step_norm = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 40; ++it) {
            const Vector r = demand_of(core, v) - p_c;
            const bool res_ok = r.template lpNorm<Eigen::Infinity>() <= p_tol;
            if (res_ok && step_norm <= 1e-9 * v_max) {
                accept();
                return;
            }
            Eigen::PartialPivLU<Matrix> lu(jacobian(core, v));
            if (lu.rcond() < 1e-12) {
                if (res_ok) accept();
                return;
            }
            const Vector dv = lu.solve(-r);
            step_norm = dv.template lpNorm<Eigen::Infinity>();
            v += dv;
            if (!v.allFinite() || v.template lpNorm<Eigen::Infinity>() > 50.0 * v_max) return;
        }
        if ((demand_of(core, v) - p_c).template lpNorm<Eigen::Infinity>() <= p_tol) accept();
    });

    std::vector<Vector> out;
    for (const auto& cand : found) {
        if (!cand) continue;
        bool fresh = true;
        for (const Vector& rep : out) {
            if ((rep - *cand).template lpNorm<Eigen::Infinity>() <= dedup) {
                fresh = false;
                break;
            }
        }
        if (fresh) out.push_back(*cand);
    }
    std::sort(out.begin(), out.end(),
              [](const Vector& a, const Vector& b) { return a(0) < b(0); });
    return out;
}

std::vector<Vector> all_solutions_oracle(const GridCore& core, const Vector& p_c, Exec exec) {
    const Index n = core.n();
    if (n > 3) {
        throw Error("all_solutions_oracle supports n <= 3 only");
    }
    if (p_c.size() != n) {
        throw DimensionMismatch("DimensionMismatch: demand length must equal loads");
    }
    if (n == 1) {
        const double y = core.y_ll(0, 0);
        const double vs = core.v_star(0);
        const double p = p_c(0);
        const double disc = vs * vs - 4.0 * p / y;
        const double tol = 1e-12 * std::max(vs * vs, std::abs(4.0 * p / y));
        std::vector<Vector> out;
        if (disc < -tol) return out;
        if (std::abs(disc) <= tol) {
            out.push_back(Vector::Constant(1, 0.5 * vs));
            return out;
        }
        const double s = std::sqrt(disc);
        for (double root : {0.5 * (vs - s), 0.5 * (vs + s)}) {
            if (root > 0.0) out.push_back(Vector::Constant(1, root));
        }
        return out;
    }
    return multistart_solutions(core, p_c, 9, exec);
}

}  // namespace dcflow
