#include "dcflow/powerflow.hpp"

#include <Eigen/LU>
#include <cmath>

#include "dcflow/matrix_analysis.hpp"

namespace dcflow {

namespace {

void require_positive_voltage(const Vector& v_l, Index n) {
    if (v_l.size() != n) {
        throw DimensionMismatch("DimensionMismatch: voltage vector length must equal loads");
    }
    if (!v_l.allFinite() || (v_l.array() <= 0.0).any()) {
        throw NonpositiveVoltage("NonpositiveVoltage: load voltages must be finite and > 0");
    }
}

void require_length(const Vector& x, Index n, const char* what) {
    if (x.size() != n) {
        throw DimensionMismatch(std::string("DimensionMismatch: ") + what);
    }
}

}  // namespace

GridCore make_core(const KirchhoffPartition& part, const Vector& v_s) {
    validate_partition(part);
    const Index m = part.m();
    if (v_s.size() != m) {
        throw DimensionMismatch("DimensionMismatch: V_S length must equal sources");
    }
    if (!v_s.allFinite() || (v_s.array() <= 0.0).any()) {
        throw NonpositiveSourceVoltage("NonpositiveSourceVoltage: all source voltages must be > 0");
    }

    GridCore core;
    core.y_ll = part.y_ll;
    core.y_ls = part.y_ls;
    core.y_sl = part.y_sl;
    core.y_ss = part.y_ss;
    core.v_s = v_s;

    core.i_star = -part.y_ls * v_s;
    const double i_scale = core.i_star.cwiseAbs().maxCoeff();
    if (core.i_star.minCoeff() < -1e-12 * std::max(i_scale, 1e-300)) {
        throw CoreInvariantViolation("CoreInvariantViolation: source-injected currents must be >= 0");
    }
    core.i_star = core.i_star.cwiseMax(0.0);
    if (i_scale <= 0.0) {
        throw CoreInvariantViolation("CoreInvariantViolation: source-injected currents all zero");
    }

    core.y_ll_llt_.compute(core.y_ll);
    if (core.y_ll_llt_.info() != Eigen::Success) {
        throw CoreInvariantViolation("CoreInvariantViolation: Y_LL is not positive definite");
    }
    core.v_star = core.y_ll_llt_.solve(core.i_star);
    const double residual =
        (core.y_ll * core.v_star - core.i_star).template lpNorm<Eigen::Infinity>();
    if (residual > 1e-10 * std::max(i_scale, 1e-300)) {
        throw CoreInvariantViolation("CoreInvariantViolation: open-circuit solve residual too large");
    }
    if ((core.v_star.array() <= 0.0).any()) {
        throw CoreInvariantViolation("CoreInvariantViolation: open-circuit voltages must be > 0");
    }
    core.p_max = 0.25 * core.v_star.cwiseProduct(core.i_star);
    return core;
}

Vector injected_power(const GridCore& core, const Vector& v_l) {
    require_positive_voltage(v_l, core.n());
    return v_l.cwiseProduct(core.y_ll * (core.v_star - v_l));
}

Matrix jacobian(const GridCore& core, const Vector& v_l) {
    require_length(v_l, core.n(), "jacobian expects an n-vector");
    Matrix j = (core.y_ll * (core.v_star - v_l)).asDiagonal();
    j -= v_l.asDiagonal() * core.y_ll;
    return j;
}

Matrix h_of(const GridCore& core, const Vector& lambda) {
    require_length(lambda, core.n(), "h expects an n-vector");
    return 0.5 * (lambda.asDiagonal() * core.y_ll + core.y_ll * lambda.asDiagonal());
}

bool in_lambda_set(const GridCore& core, const Vector& lambda) {
    if (!lambda.allFinite()) return false;
    return is_positive_definite(h_of(core, lambda));
}

Matrix g_of(const GridCore& core, const Vector& mu) {
    require_length(mu, core.n(), "g expects an n-vector");
    Matrix g = mu.asDiagonal() * core.y_ll;
    g += Matrix((core.y_ll * mu).asDiagonal());
    return g;
}

bool in_m_set(const GridCore& core, const Vector& mu) {
    if (!mu.allFinite()) return false;
    const bool member = classify_m(g_of(core, mu)).tag == MTag::NonsingularM;
    if (member && (mu.array() <= 0.0).any()) {
        // The M cone lies in the positive orthant; landing here means the
        // classification itself is broken.
        throw CoreInvariantViolation("CoreInvariantViolation: admissible mu with nonpositive entry");
    }
    return member;
}

OperatingPoint phi(const GridCore& core, const Vector& lambda) {
    require_length(lambda, core.n(), "phi expects an n-vector");
    if (!in_lambda_set(core, lambda)) {
        throw LambdaNotAdmissible("LambdaNotAdmissible: h(lambda) is not positive definite");
    }
    const Matrix h = h_of(core, lambda);
    Eigen::LLT<Matrix> llt(h);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-12) {
        throw LambdaNotAdmissible("LambdaNotAdmissible: h(lambda) numerically singular");
    }
    return OperatingPoint(0.5 * llt.solve(lambda.cwiseProduct(core.i_star)));
}

OperatingPoint psi(const GridCore& core, const Vector& mu) {
    require_length(mu, core.n(), "psi expects an n-vector");
    if (!in_m_set(core, mu)) {
        throw MuNotAdmissible("MuNotAdmissible: g(mu) is not a nonsingular M-matrix");
    }
    const Matrix g = g_of(core, mu);
    Eigen::PartialPivLU<Matrix> lu(g);
    if (lu.rcond() < 1e-12) {
        // Boundary-of-M evaluations must come through the boundary module's
        // guarded paths.
        throw MuNotAdmissible("MuNotAdmissible: g(mu) condition estimate exceeds 1e12");
    }
    return OperatingPoint(lu.solve(mu.cwiseProduct(core.i_star)));
}

Vector chi(const GridCore& core, const Vector& nu) {
    require_length(nu, core.n(), "chi expects an n-vector");
    if (!nu.allFinite() || (nu.array() < 0.0).any() || nu.maxCoeff() <= 0.0) {
        throw InvalidNu("InvalidNu: chi requires a nonzero nonnegative vector");
    }
    const Vector mu = core.solve_y_ll(nu);
    // mu = Y_LL^-1 nu is strictly positive, so g(mu) is a nonsingular
    // M-matrix; solve directly instead of re-classifying.
    Eigen::PartialPivLU<Matrix> lu(g_of(core, mu));
    const Vector psi_mu = lu.solve(mu.cwiseProduct(core.i_star));
    return mu.cwiseQuotient(psi_mu);
}

Vector chi_normalized(const GridCore& core, const Vector& nu) {
    Vector x = chi(core, nu);
    return x / x.template lpNorm<1>();
}

double dissipation(const GridCore& core, const Vector& v_l) {
    require_positive_voltage(v_l, core.n());
    const double ll = v_l.dot(core.y_ll * v_l);
    const double ls = v_l.dot(core.y_ls * core.v_s);
    const double ss = core.v_s.dot(core.y_ss * core.v_s);
    return ll + 2.0 * ls + ss;
}

Vector source_power(const GridCore& core, const Vector& v_l) {
    require_positive_voltage(v_l, core.n());
    return core.v_s.cwiseProduct(core.y_sl * v_l + core.y_ss * core.v_s);
}

GridCore to_single_source(const GridCore& core) {
    const Index n = core.n();
    KirchhoffPartition part;
    part.y_ll = core.v_star.asDiagonal() * core.y_ll * core.v_star.asDiagonal();
    part.y_ll = (0.5 * (part.y_ll + part.y_ll.transpose())).eval();
    part.y_ls = Matrix(n, 1);
    part.y_ls.col(0) = -core.v_star.cwiseProduct(core.i_star);
    part.y_sl = part.y_ls.transpose();
    part.y_ss = Matrix::Constant(1, 1, core.v_star.dot(core.i_star));
    return make_core(part, Vector::Ones(1));
}

}  // namespace dcflow
