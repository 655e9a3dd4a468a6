#pragma once

#include <initializer_list>
#include <random>

#include "dcflow/network.hpp"
#include "dcflow/powerflow.hpp"

namespace dcflow::testing {

inline Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

inline Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

/// Single load, single source, unit line, unit source voltage:
/// Y_LL = [1], I* = 1, V* = 1, P_max = 1/4.
inline GridCore grid1() {
    Network net;
    net.n_loads = 1;
    net.n_sources = 1;
    net.edges = {{0, 1, 1.0}};
    net.source_voltages = Vector::Ones(1);
    return make_core(build_kirchhoff(net), net.source_voltages);
}

/// The symmetric two-load triangle: Y_LL = [[2,-1],[-1,2]], I* = (1,1),
/// V* = (1,1), P_max = (1/4,1/4).
inline GridCore grid2() {
    Network net;
    net.n_loads = 2;
    net.n_sources = 1;
    net.edges = {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}};
    net.source_voltages = Vector::Ones(1);
    return make_core(build_kirchhoff(net), net.source_voltages);
}

/// Random connected grid with an irreducible load block; n in [n_min, n_max],
/// one or two sources, conductances in [0.1, 10], V_S in [0.5, 2].
inline GridCore random_grid(std::mt19937_64& rng, int n_min = 1, int n_max = 3) {
    std::uniform_int_distribution<int> n_dist(n_min, n_max);
    std::uniform_int_distribution<int> m_dist(1, 2);
    std::uniform_real_distribution<double> g_dist(0.1, 10.0);
    std::uniform_real_distribution<double> v_dist(0.5, 2.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    for (;;) {
        Network net;
        net.n_loads = n_dist(rng);
        net.n_sources = m_dist(rng);
        const Index total = net.n_loads + net.n_sources;
        net.source_voltages = Vector::NullaryExpr(net.n_sources, [&](Index) { return v_dist(rng); });
        // random spanning tree, then extra edges
        for (Index i = 1; i < total; ++i) {
            std::uniform_int_distribution<Index> prev(0, i - 1);
            net.edges.push_back({prev(rng), i, g_dist(rng)});
        }
        for (Index i = 0; i < total; ++i) {
            for (Index j = i + 1; j < total; ++j) {
                if (u(rng) < 0.35) net.edges.push_back({i, j, g_dist(rng)});
            }
        }
        try {
            return make_core(build_kirchhoff(net), net.source_voltages);
        } catch (const Reducible&) {
            // load block happened to be disconnected through sources only
        }
    }
}

/// Mixed-sign demand scaled against P_max so that roughly half the draws
/// land outside the feasible set.
inline Vector random_demand(std::mt19937_64& rng, const GridCore& core) {
    std::uniform_real_distribution<double> u(-1.4, 1.4);
    Vector p(core.n());
    for (Index i = 0; i < core.n(); ++i) p(i) = u(rng) * std::max(core.p_max(i), 0.05);
    return p;
}

}  // namespace dcflow::testing
