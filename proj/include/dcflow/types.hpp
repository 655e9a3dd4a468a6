#pragma once

#include <Eigen/Dense>

#include "dcflow/errors.hpp"

namespace dcflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Power demands at the loads, in watts. Entries may have either sign:
/// a negative demand means the load injects power into the grid.
using DemandVector = Vector;

/// Voltage potentials at the loads. Invariant: strictly positive.
struct OperatingPoint {
    Vector v;

    explicit OperatingPoint(Vector v_l) : v(std::move(v_l)) {
        if (v.size() == 0 || !v.allFinite() || (v.array() <= 0.0).any()) {
            throw NonpositiveVoltage("NonpositiveVoltage: operating point must be finite and > 0");
        }
    }
};

}  // namespace dcflow
