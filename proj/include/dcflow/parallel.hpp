#pragma once

#include <cstddef>

namespace dcflow {

/// Execution policy for the data-parallel kernels (simplex scans, subset
/// enumeration, multistart solves, boundary sweeps). Serial is the reference
/// path; Parallel runs the same per-element code under OpenMP. Both fill an
/// index-addressed output and reduce serially, so results are identical.
enum class Exec { Serial, Parallel };

template <typename F>
void for_each_index(std::ptrdiff_t count, Exec exec, F&& body) {
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            body(i);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            body(i);
        }
    }
}

}  // namespace dcflow
