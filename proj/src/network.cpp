#include "dcflow/network.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <numeric>
#include <sstream>

#include "dcflow/matrix_analysis.hpp"

namespace dcflow {

namespace {

struct UnionFind {
    std::vector<Index> parent;
    explicit UnionFind(Index n) : parent(static_cast<size_t>(n)) {
        std::iota(parent.begin(), parent.end(), Index{0});
    }
    Index find(Index x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    void unite(Index a, Index b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

Matrix assemble_full(const KirchhoffPartition& part) {
    const Index n = part.n();
    const Index m = part.m();
    Matrix y(n + m, n + m);
    y.topLeftCorner(n, n) = part.y_ll;
    y.topRightCorner(n, m) = part.y_ls;
    y.bottomLeftCorner(m, n) = part.y_sl;
    y.bottomRightCorner(m, m) = part.y_ss;
    return y;
}

}  // namespace

KirchhoffPartition build_kirchhoff(const Network& net) {
    const Index n = net.n_loads;
    const Index m = net.n_sources;
    if (n < 1 || m < 1) {
        throw NoLoadsOrNoSources("NoLoadsOrNoSources: need at least one load and one source");
    }
    const Index total = n + m;
    if (net.source_voltages.size() != m) {
        throw DimensionMismatch("DimensionMismatch: source_voltages length must equal sources");
    }

    Matrix y = Matrix::Zero(total, total);
    UnionFind uf(total);
    for (const Edge& e : net.edges) {
        if (e.a < 0 || e.a >= total || e.b < 0 || e.b >= total || e.a == e.b) {
            std::ostringstream os;
            os << "ParseError: edge (" << e.a << "," << e.b << ") out of range or self-loop";
            throw ParseError(os.str());
        }
        if (!(e.g > 0.0) || !std::isfinite(e.g)) {
            throw NonpositiveConductance("NonpositiveConductance: every conductance must be > 0");
        }
        y(e.a, e.a) += e.g;
        y(e.b, e.b) += e.g;
        y(e.a, e.b) -= e.g;
        y(e.b, e.a) -= e.g;
        uf.unite(e.a, e.b);
    }
    for (Index i = 1; i < total; ++i) {
        if (uf.find(i) != uf.find(0)) {
            throw DisconnectedGraph("DisconnectedGraph: network graph is not connected");
        }
    }

    KirchhoffPartition part;
    part.y_ll = y.topLeftCorner(n, n);
    part.y_ls = y.topRightCorner(n, m);
    part.y_sl = y.bottomLeftCorner(m, n);
    part.y_ss = y.bottomRightCorner(m, m);
    validate_partition(part);
    return part;
}

KirchhoffPartition partition_from_direct(Matrix y_ll, Matrix y_ls) {
    const Index n = y_ll.rows();
    const Index m = y_ls.cols();
    if (y_ll.cols() != n || y_ls.rows() != n || n < 1 || m < 1) {
        throw DimensionMismatch("DimensionMismatch: Y_LL must be n x n and Y_LS n x m");
    }
    const double scale = std::max(y_ll.cwiseAbs().maxCoeff(), 1e-300);
    if ((y_ll - y_ll.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw NotSymmetric("NotSymmetric: direct Y_LL input exceeds the symmetry tolerance");
    }
    y_ll = 0.5 * (y_ll + y_ll.transpose()).eval();
    // Clamp roundoff-positive off-diagonals so the exact-zero pattern checks hold.
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (i != j && y_ll(i, j) > 0.0 && y_ll(i, j) <= 1e-14 * scale) y_ll(i, j) = 0.0;
        }
    }
    for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k < m; ++k) {
            if (y_ls(i, k) > 0.0 && y_ls(i, k) <= 1e-14 * scale) y_ls(i, k) = 0.0;
        }
    }

    KirchhoffPartition part;
    part.y_ll = y_ll;
    part.y_ls = y_ls;
    part.y_sl = y_ls.transpose();
    // No source-source lines assumed: the diagonal completion making every
    // row sum zero.
    part.y_ss = (-y_ls.colwise().sum()).asDiagonal();
    validate_partition(part);
    return part;
}

void validate_partition(const KirchhoffPartition& part) {
    const Index n = part.n();
    const Index m = part.m();
    if (n < 1 || m < 1) {
        throw NoLoadsOrNoSources("NoLoadsOrNoSources: partition needs loads and sources");
    }
    if (part.y_ls.rows() != n || part.y_ls.cols() != m || part.y_sl.rows() != m ||
        part.y_sl.cols() != n || part.y_ll.cols() != n || part.y_ss.cols() != m) {
        throw DimensionMismatch("DimensionMismatch: inconsistent partition block shapes");
    }
    const Matrix y = assemble_full(part);
    if (!y.allFinite()) {
        throw CoreInvariantViolation("CoreInvariantViolation: Kirchhoff matrix has non-finite entries");
    }
    const double scale = std::max(y.cwiseAbs().maxCoeff(), 1e-300);
    if ((y - y.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw NotSymmetric("NotSymmetric: Kirchhoff matrix must be symmetric");
    }
    if (!is_z_matrix(y)) {
        throw CoreInvariantViolation("CoreInvariantViolation: Kirchhoff matrix must be a Z-matrix");
    }
    const double max_diag = std::max(y.diagonal().maxCoeff(), 1e-300);
    if ((y.rowwise().sum()).cwiseAbs().maxCoeff() > 1e-12 * max_diag) {
        throw CoreInvariantViolation("CoreInvariantViolation: Kirchhoff row sums must vanish");
    }
    if (!is_irreducible(y)) {
        throw DisconnectedGraph("DisconnectedGraph: Kirchhoff matrix pattern is not connected");
    }
    if (!is_irreducible(part.y_ll)) {
        throw Reducible("Reducible: load block Y_LL must be irreducible");
    }
    const MClass cls = classify_m(part.y_ll);
    if (cls.tag != MTag::NonsingularM) {
        throw CoreInvariantViolation(
            "CoreInvariantViolation: Y_LL must be a nonsingular M-matrix (Perron root > 0)");
    }
    // Load rows never sum negative, and grid-connectedness of the loads
    // forces at least one strictly positive row sum.
    const Vector ll_row_sums = part.y_ll.rowwise().sum();
    if (ll_row_sums.minCoeff() < -1e-12 * max_diag || ll_row_sums.maxCoeff() <= 0.0) {
        throw CoreInvariantViolation("CoreInvariantViolation: Y_LL row sums must be >= 0, one positive");
    }
}

Matrix kron_reduce(const Matrix& y_ll, const std::vector<Index>& alpha) {
    const Index n = y_ll.rows();
    if (alpha.empty()) {
        throw DimensionMismatch("DimensionMismatch: kron_reduce requires a nonempty index set");
    }
    std::vector<Index> a = alpha;
    std::sort(a.begin(), a.end());
    if (std::adjacent_find(a.begin(), a.end()) != a.end() || a.front() < 0 || a.back() >= n) {
        throw DimensionMismatch("DimensionMismatch: kron_reduce index set out of range or repeated");
    }
    if (static_cast<Index>(a.size()) == n) {
        return y_ll;
    }
    std::vector<Index> comp;
    comp.reserve(static_cast<size_t>(n) - a.size());
    for (Index i = 0, k = 0; i < n; ++i) {
        if (k < static_cast<Index>(a.size()) && a[static_cast<size_t>(k)] == i) {
            ++k;
        } else {
            comp.push_back(i);
        }
    }
    const Index p = static_cast<Index>(a.size());
    const Index q = static_cast<Index>(comp.size());
    Matrix aa(p, p), ac(p, q), ca(q, p), cc(q, q);
    for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) aa(i, j) = y_ll(a[static_cast<size_t>(i)], a[static_cast<size_t>(j)]);
        for (Index j = 0; j < q; ++j) ac(i, j) = y_ll(a[static_cast<size_t>(i)], comp[static_cast<size_t>(j)]);
    }
    for (Index i = 0; i < q; ++i) {
        for (Index j = 0; j < p; ++j) ca(i, j) = y_ll(comp[static_cast<size_t>(i)], a[static_cast<size_t>(j)]);
        for (Index j = 0; j < q; ++j) cc(i, j) = y_ll(comp[static_cast<size_t>(i)], comp[static_cast<size_t>(j)]);
    }
    Eigen::PartialPivLU<Matrix> lu(cc);
    if (lu.rcond() < 1e-12) {
        throw SingularBlock("SingularBlock: eliminated block is numerically singular");
    }
    Matrix reduced = aa - ac * lu.solve(ca);
    reduced = 0.5 * (reduced + reduced.transpose()).eval();
    return reduced;
}

}  // namespace dcflow
