#include "dcflow/matrix_analysis.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "dcflow/powerflow.hpp"

namespace dcflow {

namespace {

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

// Reachability of every node from `start` over the nonzero pattern.
// Pattern edges use exact zeros only; assembly never produces dirty zeros.
std::vector<bool> reachable(const Matrix& a, Index start, bool transpose) {
    const Index n = a.rows();
    std::vector<bool> seen(static_cast<size_t>(n), false);
    std::vector<Index> stack{start};
    seen[static_cast<size_t>(start)] = true;
    while (!stack.empty()) {
        const Index i = stack.back();
        stack.pop_back();
        for (Index j = 0; j < n; ++j) {
            const double w = transpose ? a(j, i) : a(i, j);
            if (i != j && w != 0.0 && !seen[static_cast<size_t>(j)]) {
                seen[static_cast<size_t>(j)] = true;
                stack.push_back(j);
            }
        }
    }
    return seen;
}

// Inverse-iteration path for large matrices: shift to the nonnegative matrix
// B = sI - A, power-iterate for the dominant pair, polish with a shifted
// inverse iteration.
PerronPair perron_iterative(const Matrix& a) {
    const Index n = a.rows();
    const double s = a.diagonal().maxCoeff() + 1.0;
    const Matrix b = s * Matrix::Identity(n, n) - a;

    Vector v = Vector::Constant(n, 1.0 / static_cast<double>(n));
    double rho = 0.0;
    for (int it = 0; it < 2000; ++it) {
        Vector w = b * v;
        const double norm = w.template lpNorm<1>();
        if (norm <= 0.0) break;
        w /= norm;
        const double delta = (w - v).template lpNorm<Eigen::Infinity>();
        v = w;
        rho = v.dot(b * v) / v.squaredNorm();
        if (delta < 1e-13) break;
    }
    // Rayleigh-shifted inverse iteration to tighten the pair.
    for (int it = 0; it < 50; ++it) {
        const double sigma = rho * (1.0 + 1e-10) + 1e-14 * s;
        Eigen::PartialPivLU<Matrix> lu(b - sigma * Matrix::Identity(n, n));
        Vector w = lu.solve(v);
        const double norm = w.template lpNorm<1>();
        if (!std::isfinite(norm) || norm == 0.0) break;
        w /= norm;
        if (w.sum() < 0.0) w = -w;
        const double rho_new = w.dot(b * w) / w.squaredNorm();
        const double change = std::abs(rho_new - rho);
        v = w;
        rho = rho_new;
        if (change < 1e-15 * std::max(1.0, std::abs(rho))) break;
    }
    if (v.sum() < 0.0) v = -v;
    v /= v.template lpNorm<1>();
    // Perron root of A is s minus the spectral radius of B.
    return PerronPair{s - rho, v};
}

}  // namespace

bool is_z_matrix(const Matrix& a) {
    const Index n = a.rows();
    if (n != a.cols()) return false;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (i != j && a(i, j) > 0.0) return false;
        }
    }
    return true;
}

bool is_irreducible(const Matrix& a) {
    const Index n = a.rows();
    if (n == 1) return true;
    // Strongly connected iff all nodes reach 0 and are reached from 0.
    const auto fwd = reachable(a, 0, false);
    const auto bwd = reachable(a, 0, true);
    for (Index i = 0; i < n; ++i) {
        if (!fwd[static_cast<size_t>(i)] || !bwd[static_cast<size_t>(i)]) return false;
    }
    return true;
}

double default_perron_tol(const Matrix& a) { return 1e-9 * max_abs(a); }

PerronPair perron(const Matrix& a) {
    if (!is_z_matrix(a)) {
        throw NotZMatrix("NotZMatrix: perron requires nonpositive off-diagonals");
    }
    if (!is_irreducible(a)) {
        throw Reducible("Reducible: perron requires an irreducible nonzero pattern");
    }
    const Index n = a.rows();
    if (n == 1) {
        return PerronPair{a(0, 0), Vector::Ones(1)};
    }
    if (n > 64) {
        PerronPair p = perron_iterative(a);
        return p;
    }
    Eigen::EigenSolver<Matrix> es(a);
    Index best = 0;
    for (Index k = 1; k < n; ++k) {
        if (es.eigenvalues()(k).real() < es.eigenvalues()(best).real()) best = k;
    }
    Vector v = es.eigenvectors().col(best).real();
    if (v.sum() < 0.0) v = -v;
    const double l1 = v.template lpNorm<1>();
    if (l1 > 0.0) v /= l1;
    return PerronPair{es.eigenvalues()(best).real(), v};
}

MClass classify_m(const Matrix& a, double tol) {
    if (a.rows() != a.cols() || a.size() == 0 || !a.allFinite() || !is_z_matrix(a)) {
        return MClass{MTag::NotM, std::nullopt};
    }
    if (tol < 0.0) tol = default_perron_tol(a);

    double root;
    std::optional<PerronPair> pair;
    if (is_irreducible(a)) {
        pair = perron(a);
        root = pair->root;
    } else {
        // Reducible Z-matrix: the smallest real part over the spectrum is
        // still real; compute it directly.
        Eigen::EigenSolver<Matrix> es(a);
        root = es.eigenvalues()(0).real();
        for (Index k = 1; k < a.rows(); ++k) {
            root = std::min(root, es.eigenvalues()(k).real());
        }
    }
    MTag tag = MTag::NotM;
    if (root > tol) {
        tag = MTag::NonsingularM;
    } else if (std::abs(root) <= tol) {
        tag = MTag::SingularM;
    }
    return MClass{tag, pair};
}

bool is_positive_definite(const Matrix& a, double pd_tol) {
    const double scale = max_abs(a);
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(scale, 1e-300)) {
        throw NotSymmetric("NotSymmetric: positive definiteness is defined for symmetric input");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > pd_tol;
}

Matrix lmi_block(const GridCore& grid, const Vector& nu, const Vector& p_c) {
    const Index n = grid.n();
    if (nu.size() != n || p_c.size() != n) {
        throw DimensionMismatch("DimensionMismatch: lmi_block expects n-vectors");
    }
    if ((nu.array() <= 0.0).any()) {
        throw NonpositiveNu("NonpositiveNu: certificate vector must be strictly positive");
    }
    Matrix block(n + 1, n + 1);
    block.topLeftCorner(n, n) =
        nu.asDiagonal() * grid.y_ll + grid.y_ll * nu.asDiagonal();
    const Vector edge = nu.cwiseProduct(grid.i_star);
    block.topRightCorner(n, 1) = edge;
    block.bottomLeftCorner(1, n) = edge.transpose();
    block(n, n) = 2.0 * nu.dot(p_c);
    return block;
}

}  // namespace dcflow
