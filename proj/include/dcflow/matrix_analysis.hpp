#pragma once

#include <optional>

#include "dcflow/types.hpp"

namespace dcflow {

struct GridCore;

/// Eigenvalue of smallest real part of an irreducible Z-matrix together with
/// its positive eigenvector, normalized to unit 1-norm.
struct PerronPair {
    double root;
    Vector vector;
};

enum class MTag { NonsingularM, SingularM, NotM };

struct MClass {
    MTag tag;
    std::optional<PerronPair> perron;  // populated when Z and irreducible
};

/// Off-diagonal entries <= 0 (exact comparison; assembly produces exact zeros).
bool is_z_matrix(const Matrix& a);

/// Irreducibility of the nonzero pattern, decided by graph reachability.
bool is_irreducible(const Matrix& a);

/// Scale-invariant tolerance band separating nonsingular from singular.
double default_perron_tol(const Matrix& a);

/// Perron root and vector of an irreducible Z-matrix.
/// Full eigen-decomposition up to n = 64, inverse iteration above.
PerronPair perron(const Matrix& a);

/// Classify a square matrix as a nonsingular M-matrix, a singular M-matrix,
/// or neither. Total function; tol < 0 selects default_perron_tol(a).
MClass classify_m(const Matrix& a, double tol = -1.0);

/// Strict positive definiteness of a symmetric matrix: smallest eigenvalue
/// must exceed pd_tol. Callers needing a semi-definite check pass
/// pd_tol = -1e-10 * max|a|.
bool is_positive_definite(const Matrix& a, double pd_tol = 0.0);

/// The (n+1)x(n+1) block matrix whose positive definiteness for some nu > 0
/// certifies that the demand p_c is infeasible:
///   [ [nu] Y_LL + Y_LL [nu]   [nu] I_L*  ]
///   [ ([nu] I_L*)^T           2 nu^T p_c ]
Matrix lmi_block(const GridCore& grid, const Vector& nu, const Vector& p_c);

}  // namespace dcflow
