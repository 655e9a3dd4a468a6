#include "dcflow/feasibility.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "dcflow/matrix_analysis.hpp"
#include "dcflow/network.hpp"

namespace dcflow {

namespace {

// All nonnegative integer n-tuples summing to `resolution`, scaled to the
// unit simplex. Lexicographic order, so scans are deterministic.
std::vector<Vector> simplex_grid(Index n, int resolution) {
    std::vector<Vector> nodes;
    Vector current = Vector::Zero(n);
    std::function<void(Index, int)> rec = [&](Index pos, int left) {
        if (pos == n - 1) {
            current(pos) = left;
            nodes.push_back(current / static_cast<double>(resolution));
            return;
        }
        for (int k = 0; k <= left; ++k) {
            current(pos) = k;
            rec(pos + 1, left - k);
        }
    };
    if (n == 1) {
        nodes.push_back(Vector::Ones(1));
    } else {
        rec(0, resolution);
    }
    return nodes;
}

// Euclidean projection onto the unit simplex.
Vector project_to_simplex(const Vector& x) {
    const Index n = x.size();
    std::vector<double> u(x.data(), x.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0;
    double tau = 0.0;
    for (Index i = 0; i < n; ++i) {
        css += u[static_cast<size_t>(i)];
        const double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[static_cast<size_t>(i)] - t > 0.0) tau = t;
    }
    Vector out = (x.array() - tau).cwiseMax(0.0);
    const double s = out.sum();
    if (s <= 0.0) return Vector::Constant(n, 1.0 / static_cast<double>(n));
    return out / s;
}

// Plain Nelder-Mead minimization; every candidate is remapped through
// `feasible` before evaluation. Stops on simplex collapse or max_iter.
Vector nelder_mead(const Vector& start, double scale,
                   const std::function<Vector(const Vector&)>& feasible,
                   const std::function<double(const Vector&)>& f, int max_iter) {
    const Index d = start.size();
    std::vector<Vector> xs;
    std::vector<double> fs;
    xs.push_back(feasible(start));
    fs.push_back(f(xs[0]));
    for (Index i = 0; i < d; ++i) {
        Vector p = start;
        p(i) += scale;
        xs.push_back(feasible(p));
        fs.push_back(f(xs.back()));
    }
    const auto order = [&] {
        std::vector<size_t> idx(xs.size());
        std::iota(idx.begin(), idx.end(), size_t{0});
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return fs[a] < fs[b]; });
        std::vector<Vector> xs2;
        std::vector<double> fs2;
        for (size_t k : idx) {
            xs2.push_back(xs[k]);
            fs2.push_back(fs[k]);
        }
        xs.swap(xs2);
        fs.swap(fs2);
    };
    order();
    for (int it = 0; it < max_iter; ++it) {
        Vector centroid = Vector::Zero(d);
        for (size_t k = 0; k + 1 < xs.size(); ++k) centroid += xs[k];
        centroid /= static_cast<double>(d);
        const Vector& worst = xs.back();
        const Vector refl = feasible(centroid + (centroid - worst));
        const double f_refl = f(refl);
        if (f_refl < fs[0]) {
            const Vector exp_pt = feasible(centroid + 2.0 * (centroid - worst));
            const double f_exp = f(exp_pt);
            xs.back() = f_exp < f_refl ? exp_pt : refl;
            fs.back() = std::min(f_exp, f_refl);
        } else if (f_refl < fs[fs.size() - 2]) {
            xs.back() = refl;
            fs.back() = f_refl;
        } else {
            const Vector contr = feasible(centroid + 0.5 * (worst - centroid));
            const double f_contr = f(contr);
            if (f_contr < fs.back()) {
                xs.back() = contr;
                fs.back() = f_contr;
            } else {
                for (size_t k = 1; k < xs.size(); ++k) {
                    xs[k] = feasible(xs[0] + 0.5 * (xs[k] - xs[0]));
                    fs[k] = f(xs[k]);
                }
            }
        }
        order();
        double diam = 0.0;
        for (size_t k = 1; k < xs.size(); ++k) {
            diam = std::max(diam, (xs[k] - xs[0]).template lpNorm<Eigen::Infinity>());
        }
        if (diam < 1e-12) break;
    }
    return xs[0];
}

double lmi_min_eig(const GridCore& core, const Vector& nu, const Vector& p_c) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(lmi_block(core, nu, p_c), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

HalfspaceCertificate halfspace_margin(const GridCore& core, const Vector& lambda,
                                      const Vector& p_c) {
    if (lambda.size() != core.n() || p_c.size() != core.n()) {
        throw DimensionMismatch("DimensionMismatch: halfspace_margin expects n-vectors");
    }
    if (!in_lambda_set(core, lambda)) {
        throw LambdaNotAdmissible("LambdaNotAdmissible: h(lambda) is not positive definite");
    }
    const Vector lam = lambda / lambda.template lpNorm<1>();
    const Matrix h = h_of(core, lam);
    Eigen::LLT<Matrix> llt(h);
    const Vector phi_lam = 0.5 * llt.solve(lam.cwiseProduct(core.i_star));
    const double margin = phi_lam.dot(h * phi_lam) - lam.dot(p_c);
    return HalfspaceCertificate{lam, margin};
}

bool verify_certificate(const GridCore& core, const Vector& nu, const Vector& p_c,
                        bool semidefinite) {
    const Matrix block = lmi_block(core, nu, p_c);  // validates nu > 0
    const double pd_tol = semidefinite ? -1e-10 * block.cwiseAbs().maxCoeff() : 0.0;
    return is_positive_definite(block, pd_tol);
}

std::optional<InfeasibilityCertificate> find_certificate(const GridCore& core,
                                                         const Vector& p_c, int budget) {
    const Index n = core.n();
    if (p_c.size() != n) {
        throw DimensionMismatch("DimensionMismatch: demand length must equal loads");
    }
    int evals = 0;
    Vector best_nu;
    double best_eig = -std::numeric_limits<double>::infinity();
    const auto eval = [&](const Vector& nu) -> double {
        if (evals >= budget) return -std::numeric_limits<double>::infinity();
        ++evals;
        const double e = lmi_min_eig(core, nu, p_c);
        if (e > best_eig) {
            best_eig = e;
            best_nu = nu;
        }
        return e;
    };

    // Seeds: simplex center, corner-biased points, and a coarse interior grid.
    std::vector<Vector> seeds;
    seeds.push_back(Vector::Constant(n, 1.0 / static_cast<double>(n)));
    for (Index i = 0; i < n; ++i) {
        Vector corner = Vector::Constant(n, n > 1 ? 0.1 / static_cast<double>(n - 1) : 1.0);
        corner(i) = n > 1 ? 0.9 : 1.0;
        seeds.push_back(corner);
    }
    const auto grid_size = [&](int r) {
        double c = 1.0;  // C(r + n - 1, n - 1)
        for (Index k = 1; k < n; ++k) c *= static_cast<double>(r + k) / static_cast<double>(k);
        return c;
    };
    int res = 1;
    while (grid_size(res + 1) <= budget / 4.0 && res < 64) ++res;
    if (n > 1 && res >= 2) {
        for (const Vector& node : simplex_grid(n, res)) {
            Vector inner = (node.array() * static_cast<double>(res) + 0.1).matrix();
            seeds.push_back(inner / inner.sum());
        }
    }

    for (const Vector& s : seeds) {
        if (evals >= budget) break;
        eval(s);
        if (best_eig > 0.0) break;  // strict certificate already in hand
    }

    // Refine through a softmax chart so iterates stay strictly positive.
    const auto to_nu = [](const Vector& x) {
        Vector e = (x.array() - x.maxCoeff()).exp().matrix();
        return Vector(e / e.sum());
    };
    if (best_nu.size() > 0 && n > 1) {
        for (int round = 0; round < 3 && evals < budget && best_eig <= 0.0; ++round) {
            const Vector x0 = best_nu.array().max(1e-12).log().matrix();
            nelder_mead(
                x0, 0.5, [](const Vector& x) { return x; },
                [&](const Vector& x) { return -eval(to_nu(x)); },
                std::max(10, (budget - evals) / 3));
        }
    }

    if (best_nu.size() == 0 || best_eig <= 0.0) return std::nullopt;
    if (!verify_certificate(core, best_nu, p_c)) return std::nullopt;
    return InfeasibilityCertificate{best_nu, best_eig};
}

NonnegDecision nonneg_decide(const GridCore& core, const Vector& p_c, int resolution,
                             Exec exec) {
    const Index n = core.n();
    if (p_c.size() != n) {
        throw DimensionMismatch("DimensionMismatch: demand length must equal loads");
    }
    if (!p_c.allFinite() || (p_c.array() < 0.0).any()) {
        throw NegativeDemand("NegativeDemand: nonneg_decide requires p_c >= 0");
    }
    if (resolution < 1) resolution = 1;

    const auto margin = [&](const Vector& nu) {
        return 0.5 * nu.dot(core.v_star) - chi(core, nu).dot(p_c);
    };

    const std::vector<Vector> nodes = simplex_grid(n, resolution);
    std::vector<double> values(nodes.size());
    for_each_index(static_cast<std::ptrdiff_t>(nodes.size()), exec,
                   [&](std::ptrdiff_t i) { values[static_cast<size_t>(i)] = margin(nodes[static_cast<size_t>(i)]); });

    std::vector<size_t> idx(nodes.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return values[a] < values[b]; });

    Vector worst = nodes[idx[0]];
    double min_margin = values[idx[0]];
    // Polish from the worst grid nodes; the minimizer may sit between nodes
    // or on the simplex boundary.
    const size_t starts = std::min<size_t>(5, nodes.size());
    for (size_t k = 0; k < starts && n > 1; ++k) {
        const Vector polished = nelder_mead(
            nodes[idx[k]], 0.5 / static_cast<double>(resolution),
            [](const Vector& x) { return project_to_simplex(x); }, margin, 200);
        const double val = margin(polished);
        if (val < min_margin) {
            min_margin = val;
            worst = polished;
        }
    }

    const double band = 1e-6 * std::max(1.0, core.v_star.template lpNorm<Eigen::Infinity>());
    NonnegVerdict verdict = NonnegVerdict::Feasible;
    if (min_margin < -band) {
        verdict = NonnegVerdict::Infeasible;
    } else if (min_margin > band) {
        verdict = NonnegVerdict::FeasibleInterior;
    }
    return NonnegDecision{verdict, worst, min_margin};
}

bool sufficient_clamped_nonneg(const GridCore& core, const Vector& p_c, int resolution,
                               Exec exec) {
    const Vector clamped = p_c.cwiseMax(0.0);
    return nonneg_decide(core, clamped, resolution, exec).verdict != NonnegVerdict::Infeasible;
}

SpResult sufficient_simpson_porco(const GridCore& core, const Vector& p_c) {
    const Index n = core.n();
    if (p_c.size() != n) {
        throw DimensionMismatch("DimensionMismatch: demand length must equal loads");
    }
    const Matrix hat_y =
        0.25 * (core.v_star.asDiagonal() * core.y_ll * core.v_star.asDiagonal());
    Eigen::LLT<Matrix> llt(hat_y);
    const Vector w = llt.solve(p_c.cwiseMax(0.0));

    const double eq_tol = 1e-9;
    if ((w.array() > 1.0 + eq_tol).any()) {
        return SpResult{SpTag::Fails, {}};
    }
    std::vector<Index> alpha;
    for (Index i = 0; i < n; ++i) {
        if (w(i) >= 1.0 - eq_tol) alpha.push_back(i);
    }
    bool tight = !alpha.empty() && (p_c.array() >= 0.0).all();
    if (tight) {
        const double p_scale = std::max(1.0, p_c.template lpNorm<Eigen::Infinity>());
        for (Index i = 0; i < n && tight; ++i) {
            const bool in_alpha = std::find(alpha.begin(), alpha.end(), i) != alpha.end();
            if (!in_alpha && std::abs(p_c(i)) > eq_tol * p_scale) tight = false;
        }
    }
    if (tight) return SpResult{SpTag::HoldsTight, alpha};
    return SpResult{SpTag::Holds, {}};
}

std::vector<TightPoint> tight_points(const GridCore& core, Exec exec) {
    const Index n = core.n();
    if (n > 16) {
        throw TooManySubsets("TooManySubsets: tight point enumeration is limited to n <= 16");
    }
    const std::ptrdiff_t count = (std::ptrdiff_t{1} << n) - 1;
    std::vector<TightPoint> out(static_cast<size_t>(count));
    for_each_index(count, exec, [&](std::ptrdiff_t i) {
        const unsigned mask = static_cast<unsigned>(i + 1);
        std::vector<Index> alpha;
        for (Index b = 0; b < n; ++b) {
            if (mask & (1u << b)) alpha.push_back(b);
        }
        const Matrix reduced = kron_reduce(core.y_ll, alpha);
        Vector v_a(static_cast<Index>(alpha.size()));
        for (size_t k = 0; k < alpha.size(); ++k) v_a(static_cast<Index>(k)) = core.v_star(alpha[k]);
        const Vector p_a = 0.25 * v_a.cwiseProduct(reduced * v_a);
        Vector demand = Vector::Zero(n);
        for (size_t k = 0; k < alpha.size(); ++k) demand(alpha[k]) = p_a(static_cast<Index>(k));
        out[static_cast<size_t>(i)] = TightPoint{std::move(alpha), std::move(demand)};
    });
    return out;
}

double bolognani_radius(const GridCore& core, double p) {
    if (std::isnan(p) || p < 1.0) {
        throw InvalidP("InvalidP: Hoelder exponent must lie in [1, inf]");
    }
    const bool p_inf = std::isinf(p);
    const double q = p_inf ? 1.0 : (p == 1.0 ? std::numeric_limits<double>::infinity()
                                             : p / (p - 1.0));
    const Index n = core.n();
    const Matrix hat_y =
        0.25 * (core.v_star.asDiagonal() * core.y_ll * core.v_star.asDiagonal());
    const Matrix inv = Eigen::LLT<Matrix>(hat_y).solve(Matrix::Identity(n, n));
    double worst_row = 0.0;
    for (Index i = 0; i < n; ++i) {
        double r;
        if (std::isinf(q)) {
            r = inv.row(i).cwiseAbs().maxCoeff();
        } else {
            r = std::pow(inv.row(i).cwiseAbs().array().pow(q).sum(), 1.0 / q);
        }
        worst_row = std::max(worst_row, r);
    }
    return 1.0 / worst_row;
}

bool sufficient_bolognani(const GridCore& core, const Vector& p_c, double p) {
    if (p_c.size() != core.n()) {
        throw DimensionMismatch("DimensionMismatch: demand length must equal loads");
    }
    const double radius = bolognani_radius(core, p);  // validates p
    double norm;
    if (std::isinf(p)) {
        norm = p_c.template lpNorm<Eigen::Infinity>();
    } else if (p == 1.0) {
        norm = p_c.template lpNorm<1>();
    } else if (p == 2.0) {
        norm = p_c.template lpNorm<2>();
    } else {
        norm = std::pow(p_c.cwiseAbs().array().pow(p).sum(), 1.0 / p);
    }
    return norm < radius;
}

bool dominates(const Vector& p_low, const Vector& p_high) {
    if (p_low.size() != p_high.size()) {
        throw DimensionMismatch("DimensionMismatch: dominates expects equal-length vectors");
    }
    return (p_low.array() <= p_high.array()).all() && p_low != p_high;
}

}  // namespace dcflow
