#include "cmipdual/examples.hpp"

#include <cmath>
#include <stdexcept>

namespace cmipdual {

Instance lorentz_example(double eps)
{
    Matrix A(3, 2);
    A << 1, 0, 0, 1, 1, 0;
    Vector b(3);
    b << 0, 0, -eps;
    Vector c(2);
    c << 0, 1;
    return make_instance(A, Matrix(3, 0), b, c, Vector(0), ConeProduct({ConeBlock::second_order(3)}));
}

std::vector<LorentzWitness> lorentz_witness_table(double eps, int kmax)
{
    if (!(eps > 0.0)) {
        throw std::invalid_argument("witness table needs eps > 0");
    }
    const auto inst = lorentz_example(eps);
    std::vector<LorentzWitness> rows;
    for (int k = 0; k <= kmax; ++k) {
        const double x2 = -k;
        const double x1 = std::ceil((x2 * x2 - eps * eps) / (2.0 * eps));
        Vector x(2);
        x << x1, x2;
        const Vector s = inst.A() * x - inst.b();
        rows.push_back({k, static_cast<std::int64_t>(x1), static_cast<std::int64_t>(x2), inst.c().dot(x),
                        cone_margin(inst.cone(), s)});
    }
    return rows;
}

Instance psd_example()
{
    Matrix A1 = Matrix::Zero(3, 3);
    A1(1, 1) = 1;
    Matrix A2 = Matrix::Zero(3, 3);
    A2(0, 0) = 1;
    A2(1, 2) = A2(2, 1) = 1;
    Matrix B = Matrix::Zero(3, 3);
    B(0, 0) = -1;
    Matrix A(6, 2);
    A << svec(A1), svec(A2);
    Vector c(2);
    c << 0, 1;
    return make_instance(A, Matrix(6, 0), svec(B), c, Vector(0), ConeProduct({ConeBlock::psd(3)}));
}

Instance halving_example()
{
    Matrix A(1, 1);
    A << -2;
    Vector b(1);
    b << -3;
    Vector c(1);
    c << -1;
    return make_instance(A, Matrix(1, 0), b, c, Vector(0), ConeProduct({ConeBlock::orthant(1)}), {}, {true});
}

}  // namespace cmipdual
