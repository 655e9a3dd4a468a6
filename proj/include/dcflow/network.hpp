#pragma once

#include <vector>

#include "dcflow/types.hpp"

namespace dcflow {

struct Edge {
    Index a = 0;
    Index b = 0;
    double g = 0.0;  // conductance, siemens, > 0
};

/// Resistive network description. Node indices are 0-based with loads first:
/// loads occupy 0..n_loads-1, sources n_loads..n_loads+n_sources-1.
struct Network {
    Index n_loads = 0;
    Index n_sources = 0;
    std::vector<Edge> edges;
    Vector source_voltages;
};

/// The Kirchhoff matrix partitioned by load/source node role.
struct KirchhoffPartition {
    Matrix y_ll;  // n x n
    Matrix y_ls;  // n x m
    Matrix y_sl;  // m x n
    Matrix y_ss;  // m x m

    Index n() const { return y_ll.rows(); }
    Index m() const { return y_ss.rows(); }
};

/// Assemble the weighted Laplacian from edge conductances and partition it.
/// Throws NonpositiveConductance, NoLoadsOrNoSources, DisconnectedGraph,
/// Reducible (load block), and validates all partition invariants.
KirchhoffPartition build_kirchhoff(const Network& net);

/// Build a partition from the direct matrix form {Y_LL, Y_LS}. A symmetric
/// input is required up to 1e-12 relative (then symmetrized by averaging);
/// Y_SS is completed as the diagonal making all row sums zero, i.e. the grid
/// is taken to have no source-source lines.
KirchhoffPartition partition_from_direct(Matrix y_ll, Matrix y_ls);

/// Check every KirchhoffPartition invariant, throwing on the first failure:
/// symmetry, zero row sums (1e-12 relative), Z sign pattern, connectivity,
/// irreducibility of Y_LL, and Perron root of Y_LL > 0.
void validate_partition(const KirchhoffPartition& part);

/// Schur complement Y_LL[alpha,alpha] - Y_LL[alpha,c] Y_LL[c,c]^-1 Y_LL[c,alpha]
/// where c is the complement of alpha. alpha must be nonempty, sorted, unique.
/// Returns Y_LL itself when alpha is the full index set.
Matrix kron_reduce(const Matrix& y_ll, const std::vector<Index>& alpha);

}  // namespace dcflow
