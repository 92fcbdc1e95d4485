#include "cmipdual/cone.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cmipdual;

namespace {

ConeProduct single(ConeBlock b)
{
    return ConeProduct({b});
}

Vector vec(std::initializer_list<double> xs)
{
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        v[i++] = x;
    }
    return v;
}

// Random element of the ambient space of K.
Vector random_point(const ConeProduct& K, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Vector v(static_cast<Eigen::Index>(K.total_dim()));
    for (auto& x : v) {
        x = g(rng);
    }
    return v;
}

ConeProduct random_cone(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<int> count(1, 3);
    std::uniform_int_distribution<int> dim(1, 4);
    std::vector<ConeBlock> blocks;
    const int nb = count(rng);
    for (int i = 0; i < nb; ++i) {
        switch (kind(rng)) {
        case 0:
            blocks.push_back(ConeBlock::orthant(static_cast<std::size_t>(dim(rng))));
            break;
        case 1:
            blocks.push_back(ConeBlock::second_order(static_cast<std::size_t>(dim(rng) + 1)));
            break;
        default:
            blocks.push_back(ConeBlock::psd(static_cast<std::size_t>(dim(rng))));
            break;
        }
    }
    return ConeProduct(blocks);
}

}  // namespace

TEST_CASE("block constructors validate dimensions")
{
    CHECK_THROWS_AS(ConeBlock::orthant(0), std::invalid_argument);
    CHECK_THROWS_AS(ConeBlock::second_order(1), std::invalid_argument);
    CHECK_THROWS_AS(ConeBlock::psd(0), std::invalid_argument);
    CHECK(ConeBlock::psd(3).ambient_dim() == 6);
    CHECK(ConeBlock::psd(3).describe() == "psd:3");
    const ConeProduct K({ConeBlock::orthant(2), ConeBlock::second_order(3), ConeBlock::psd(2)});
    CHECK(K.total_dim() == 8);
    CHECK(K.offset(2) == 5);
    CHECK(K.degree() == 5);
}

TEST_CASE("margins on hand-checked points")
{
    CHECK(cone_margin(single(ConeBlock::orthant(3)), vec({1, -2, 3})) == doctest::Approx(-2));
    CHECK(cone_margin(single(ConeBlock::second_order(3)), vec({3, 4, 5})) == doctest::Approx(0));
    CHECK(cone_margin(single(ConeBlock::second_order(3)), vec({3, 4, 6})) == doctest::Approx(1));
    CHECK(cone_margin(single(ConeBlock::second_order(3)), vec({3, 4, 4})) == doctest::Approx(-1));
    // diag(2, -1): eigenvalues 2 and -1.
    CHECK(cone_margin(single(ConeBlock::psd(2)), svec((Matrix(2, 2) << 2, 0, 0, -1).finished())) ==
          doctest::Approx(-1));
    // [[2,1],[1,2]] has eigenvalues 1 and 3.
    CHECK(cone_margin(single(ConeBlock::psd(2)), svec((Matrix(2, 2) << 2, 1, 1, 2).finished())) ==
          doctest::Approx(1));
    CHECK(std::isinf(cone_margin(ConeProduct(), Vector(0))));
    CHECK_THROWS_AS(cone_margin(single(ConeBlock::orthant(2)), vec({1})), std::invalid_argument);
}

TEST_CASE("svec preserves the trace inner product")
{
    const Matrix X = (Matrix(3, 3) << 1, 2, 3, 2, 4, 5, 3, 5, 6).finished();
    const Matrix Y = (Matrix(3, 3) << -1, 0.5, 2, 0.5, 1, -3, 2, -3, 2).finished();
    CHECK(svec(X).dot(svec(Y)) == doctest::Approx((X * Y).trace()));
    CHECK((smat(svec(X)) - X).norm() < 1e-14);
    CHECK_THROWS_AS(smat(Vector::Zero(4)), std::invalid_argument);
}

TEST_CASE("projections on hand-checked points")
{
    const auto soc = single(ConeBlock::second_order(2));
    CHECK((project(soc, vec({2, 0})) - vec({1, 1})).norm() < 1e-14);
    CHECK((project(soc, vec({0, -1})) - vec({0, 0})).norm() < 1e-14);
    CHECK((project(soc, vec({1, 3})) - vec({1, 3})).norm() < 1e-14);
    const auto psd = single(ConeBlock::psd(2));
    const Matrix P = smat(project(psd, svec((Matrix(2, 2) << 0, 1, 1, 0).finished())));
    CHECK((P - Matrix::Constant(2, 2, 0.5)).norm() < 1e-12);
    CHECK((project(single(ConeBlock::orthant(3)), vec({-1, 2, 0})) - vec({0, 2, 0})).norm() == 0.0);
}

TEST_CASE("jacobi agrees with a reference eigensolver")
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 8;
        Matrix M(n, n);
        for (auto& x : M.reshaped()) {
            x = g(rng);
        }
        M = 0.5 * (M + M.transpose()).eval();
        const auto jac = jacobi_eigen(M);
        Eigen::SelfAdjointEigenSolver<Matrix> ref(M);
        CHECK((jac.values - ref.eigenvalues()).norm() < 1e-10);
        CHECK((jac.vectors * jac.values.asDiagonal() * jac.vectors.transpose() - M).norm() < 1e-10);
    }
}

TEST_CASE("projection properties on random cones")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto K = random_cone(rng);
        const Vector s = random_point(K, rng);
        const Vector t = random_point(K, rng);
        const Vector p = project(K, s);
        CAPTURE(trial);
        // In the cone, idempotent, and nonexpansive.
        CHECK(cone_margin(K, p) >= -1e-10);
        CHECK((project(K, p) - p).norm() < 1e-10);
        CHECK((p - project(K, t)).norm() <= (s - t).norm() + 1e-10);
        // Moreau: s - p lies in the polar cone -K* = -K and is orthogonal to p.
        CHECK(cone_margin(K, p - s) >= -1e-10);
        CHECK(std::abs(p.dot(p - s)) < 1e-9);
    }
}

TEST_CASE("self-duality: inner product of cone elements is nonnegative")
{
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const auto K = random_cone(rng);
        const Vector a = project(K, random_point(K, rng));
        const Vector b = project(K, random_point(K, rng));
        CHECK(a.dot(b) >= -1e-10);
    }
}

TEST_CASE("margin is translation-equivariant along the interior direction")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> shift(-3, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto K = random_cone(rng);
        const Vector s = random_point(K, rng);
        const double t = shift(rng);
        const Vector e = interior_direction(K);
        CHECK(cone_margin(K, s + t * e) == doctest::Approx(cone_margin(K, s) + t).epsilon(1e-9));
        CHECK(cone_margin(K, e) == doctest::Approx(1.0));
    }
}
