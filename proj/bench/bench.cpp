// Timing harness comparing the serial reference kernels against their
// OpenMP variants. Results must be identical; only wall time differs.

#include <chrono>
#include <cstdio>
#include <random>

#include <omp.h>

#include "dcflow/boundary.hpp"
#include "dcflow/feasibility.hpp"
#include "dcflow/operating_point.hpp"
#include "../tests/test_util.hpp"

using namespace dcflow;

namespace {

template <typename F>
double time_ms(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

void row(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-28s %10.1f ms %10.1f ms   x%.2f   %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-28s %13s %13s %7s\n", "kernel", "serial", "openmp", "speedup");

    std::mt19937_64 rng(31337);
    const GridCore g3 = dcflow::testing::random_grid(rng, 3, 3);

    {
        const Vector p = 0.8 * g3.p_max;
        NonnegDecision s{}, q{};
        const double ts = time_ms([&] { s = nonneg_decide(g3, p, 400, Exec::Serial); });
        const double tp = time_ms([&] { q = nonneg_decide(g3, p, 400, Exec::Parallel); });
        row("simplex scan (res 400)", ts, tp,
            s.min_margin == q.min_margin &&
                (s.worst_nu - q.worst_nu).lpNorm<Eigen::Infinity>() == 0.0);
    }

    {
        const Vector p = dcflow::testing::random_demand(rng, g3);
        std::vector<Vector> s, q;
        const double ts = time_ms([&] { s = multistart_solutions(g3, p, 40, Exec::Serial); });
        const double tp = time_ms([&] { q = multistart_solutions(g3, p, 40, Exec::Parallel); });
        bool same = s.size() == q.size();
        for (size_t k = 0; same && k < s.size(); ++k) {
            same = (s[k] - q[k]).lpNorm<Eigen::Infinity>() == 0.0;
        }
        row("multistart newton (40^3)", ts, tp, same);
    }

    {
        Network net;
        net.n_loads = 14;
        net.n_sources = 1;
        for (Index i = 0; i + 1 < 14; ++i) net.edges.push_back({i, i + 1, 1.0});
        for (Index i = 0; i < 14; ++i) net.edges.push_back({i, 14, 0.5});
        net.source_voltages = Vector::Ones(1);
        const GridCore chain = make_core(build_kirchhoff(net), net.source_voltages);
        std::vector<TightPoint> s, q;
        const double ts = time_ms([&] { s = tight_points(chain, Exec::Serial); });
        const double tp = time_ms([&] { q = tight_points(chain, Exec::Parallel); });
        bool same = s.size() == q.size();
        for (size_t k = 0; same && k < s.size(); ++k) {
            same = (s[k].demand - q[k].demand).lpNorm<Eigen::Infinity>() == 0.0;
        }
        row("tight points (n=14)", ts, tp, same);
    }

    {
        SweepResult s, q;
        const double ts =
            time_ms([&] { s = sweep_boundary(g3, ParamFamily::Nu, 20000, 42, Exec::Serial); });
        const double tp = time_ms(
            [&] { q = sweep_boundary(g3, ParamFamily::Nu, 20000, 42, Exec::Parallel); });
        row("boundary sweep (nu, 20k)", ts, tp, s.points.size() == q.points.size());
    }

    return 0;
}
