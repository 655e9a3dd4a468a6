#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <random>

#include "dcflow/matrix_analysis.hpp"
#include "test_util.hpp"

using namespace dcflow;
using dcflow::testing::grid1;
using dcflow::testing::grid2;
using dcflow::testing::mat2;
using dcflow::testing::vec;

TEST_CASE("perron pairs of small Z-matrices") {
    const PerronPair p1 = perron(mat2(2, -1, -1, 2));
    CHECK(p1.root == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p1.vector(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p1.vector(1) == doctest::Approx(0.5).epsilon(1e-12));

    const PerronPair p2 = perron(mat2(1, -1, -1, 1));
    CHECK(std::abs(p2.root) <= 1e-12);
    CHECK(p2.vector(0) == doctest::Approx(0.5).epsilon(1e-12));

    // g(mu) at mu = (2/3, 1/3) on the two-load grid
    const PerronPair p3 = perron(mat2(7.0 / 3, -2.0 / 3, -1.0 / 3, 2.0 / 3));
    CHECK(p3.root > 0.0);

    const PerronPair s = perron(Matrix::Constant(1, 1, 3.5));
    CHECK(s.root == 3.5);
    CHECK(s.vector(0) == 1.0);
}

TEST_CASE("perron residual and positivity invariants") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 40; ++trial) {
        const GridCore core = dcflow::testing::random_grid(rng);
        const Matrix a = core.y_ll;
        const PerronPair p = perron(a);
        const double scale = a.cwiseAbs().maxCoeff();
        CHECK((a * p.vector - p.root * p.vector).lpNorm<Eigen::Infinity>() <= 1e-9 * scale);
        CHECK(p.vector.minCoeff() > 0.0);
        CHECK(p.vector.lpNorm<1>() == doctest::Approx(1.0).epsilon(1e-12));
        // symmetric input: the Perron root is the smallest eigenvalue
        Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
        CHECK(p.root == doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-9));
    }
}

TEST_CASE("perron rejects non-Z and reducible input") {
    CHECK_THROWS_AS(perron(mat2(0, 1, 1, 0)), NotZMatrix);
    CHECK_THROWS_AS(perron(Matrix::Identity(2, 2)), Reducible);
}

TEST_CASE("perron inverse-iteration path beyond n = 64") {
    const Index n = 100;
    Matrix a = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        a(i, i) = 1.0;
        if (i > 0) {
            a(i, i) += 1.0;
            a(i - 1, i - 1) += 1.0;
            a(i, i - 1) -= 1.0;
            a(i - 1, i) -= 1.0;
        }
    }
    // identity plus a path Laplacian: Perron root exactly 1, flat vector
    const PerronPair p = perron(a);
    CHECK(p.root == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(p.vector.minCoeff() > 0.0);
    CHECK((a * p.vector - p.root * p.vector).lpNorm<Eigen::Infinity>() <=
          1e-8 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("classify_m tags") {
    CHECK(classify_m(mat2(2, -1, -1, 2)).tag == MTag::NonsingularM);
    CHECK(classify_m(mat2(1, -1, -1, 1)).tag == MTag::SingularM);
    CHECK(classify_m(mat2(0, 1, 1, 0)).tag == MTag::NotM);
    CHECK(classify_m(mat2(-1, -1, -1, -1)).tag == MTag::NotM);

    // reducible Z-matrix still classifies, without a Perron pair
    const MClass ident = classify_m(Matrix::Identity(3, 3));
    CHECK(ident.tag == MTag::NonsingularM);
    CHECK(!ident.perron.has_value());
}

TEST_CASE("nonsingular M-matrices have positive inverses") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 30; ++trial) {
        const GridCore core = dcflow::testing::random_grid(rng, 2, 3);
        const MClass cls = classify_m(core.y_ll);
        REQUIRE(cls.tag == MTag::NonsingularM);
        const Matrix inv = core.y_ll.inverse();
        CHECK(inv.minCoeff() > 0.0);
    }
}

TEST_CASE("positive definiteness verdicts") {
    CHECK(is_positive_definite(mat2(1, -0.5, -0.5, 1)));
    CHECK(is_positive_definite(mat2(1.5, -0.5, -0.5, 0.5)));
    // h(lambda) at lambda = (0.95, 0.05) sits outside the PD window
    const GridCore core = grid2();
    CHECK_FALSE(is_positive_definite(h_of(core, vec({0.95, 0.05}))));
    CHECK_THROWS_AS(is_positive_definite(mat2(1, 2, 0, 1)), NotSymmetric);
}

TEST_CASE("positive definiteness agrees with a spectral oracle") {
    std::mt19937_64 rng(303);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> eig(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 2 + static_cast<Index>(trial % 4);
        Matrix raw(n, n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) raw(i, j) = gauss(rng);
        }
        const Matrix q = Eigen::HouseholderQR<Matrix>(raw).householderQ();
        Vector d(n);
        for (Index i = 0; i < n; ++i) {
            double e = eig(rng);
            if (std::abs(e) < 1e-3) e = std::copysign(1e-3, e == 0.0 ? 1.0 : e);
            d(i) = e;
        }
        Matrix a = q * d.asDiagonal() * q.transpose();
        a = 0.5 * (a + a.transpose());
        CHECK(is_positive_definite(a) == (d.minCoeff() > 0.0));
    }
}

TEST_CASE("lmi block assembly") {
    const GridCore one = grid1();
    const Matrix b1 = lmi_block(one, vec({1.0}), vec({0.3}));
    CHECK(b1(0, 0) == doctest::Approx(2.0));
    CHECK(b1(0, 1) == doctest::Approx(1.0));
    CHECK(b1(1, 0) == doctest::Approx(1.0));
    CHECK(b1(1, 1) == doctest::Approx(0.6));

    const Matrix b2 = lmi_block(one, vec({1.0}), vec({0.25}));
    CHECK(b2(1, 1) == doctest::Approx(0.5));
    CHECK(b2.determinant() == doctest::Approx(0.0).epsilon(1e-14));

    const GridCore two = grid2();
    const Matrix b3 = lmi_block(two, vec({1.0, 1.0}), vec({0.0, 0.0}));
    Matrix expected(3, 3);
    expected << 4, -2, 1, -2, 4, 1, 1, 1, 0;
    CHECK((b3 - expected).cwiseAbs().maxCoeff() <= 1e-14);

    CHECK_THROWS_AS(lmi_block(two, vec({1.0, -1.0}), vec({0.0, 0.0})), NonpositiveNu);

    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 20; ++trial) {
        const GridCore core = dcflow::testing::random_grid(rng);
        std::uniform_real_distribution<double> u(0.1, 2.0);
        Vector nu(core.n()), p(core.n());
        for (Index i = 0; i < core.n(); ++i) {
            nu(i) = u(rng);
            p(i) = u(rng) - 1.0;
        }
        const Matrix block = lmi_block(core, nu, p);
        CHECK((block - block.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}
