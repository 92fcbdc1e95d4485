#pragma once

#include "cmipdual/model.hpp"

#include <initializer_list>
#include <random>

namespace cmipdual::testing {

inline Instance ceiling_instance()
{
    // min x s.t. x - h >= 0.
    return make_instance(Matrix::Ones(1, 1), Matrix(1, 0), Vector::Zero(1), Vector::Ones(1), Vector(0),
                         ConeProduct({ConeBlock::orthant(1)}));
}

inline Vector vec(std::initializer_list<double> xs)
{
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        v[i++] = x;
    }
    return v;
}

// Random small instance: one orthant block and one SOC block, bounded by
// explicit box rows so every value is finite or +inf.
inline Instance random_instance(std::mt19937_64& rng, int n1, int n2)
{
    std::uniform_int_distribution<int> coef(-2, 2);
    std::uniform_real_distribution<double> rhs(-2.0, 1.0);
    std::vector<ConeBlock> blocks{ConeBlock::orthant(2), ConeBlock::second_order(3)};
    const int bounds = 2 * n2;
    if (bounds > 0) {
        blocks.push_back(ConeBlock::orthant(static_cast<std::size_t>(bounds)));
    }
    ConeProduct K(blocks);
    const auto m = static_cast<Eigen::Index>(K.total_dim());
    Matrix A = Matrix::Zero(m, n1);
    Matrix G = Matrix::Zero(m, n2);
    Vector b = Vector::Zero(m);
    for (Eigen::Index r = 0; r < 5; ++r) {
        for (int j = 0; j < n1; ++j) {
            A(r, j) = coef(rng);
        }
        for (int j = 0; j < n2; ++j) {
            G(r, j) = coef(rng);
        }
        b[r] = rhs(rng);
    }
    A(4, 0) += 3;  // keep the SOC scalar part mostly positive
    b[4] -= 3;
    for (int j = 0; j < n2; ++j) {
        G(5 + 2 * j, j) = 1;
        b[5 + 2 * j] = -3;
        G(6 + 2 * j, j) = -1;
        b[6 + 2 * j] = -3;
    }
    Vector c(n1);
    Vector d(n2);
    for (auto& x : c) {
        x = coef(rng);
    }
    for (auto& x : d) {
        x = coef(rng);
    }
    return make_instance(A, G, b, c, d, K);
}

}  // namespace cmipdual::testing
