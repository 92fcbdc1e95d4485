#include "cmipdual/dual.hpp"
#include "cmipdual/examples.hpp"

#include <doctest.h>

#include "support.hpp"

#include <cmath>
#include <random>

using namespace cmipdual;
using namespace cmipdual::testing;

namespace {

Vector svec_of(std::initializer_list<std::initializer_list<double>> rows)
{
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix M(n, n);
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double x : r) {
            M(i, j++) = x;
        }
        ++i;
    }
    return svec(M);
}

Vector e11()
{
    return svec_of({{1, 0, 0}, {0, 0, 0}, {0, 0, 0}});
}

Vector identity3()
{
    return svec(Matrix::Identity(3, 3));
}

// min c'x over two binaries with an orthant knapsack-like row and one SOC block.
Instance two_binary_instance()
{
    Matrix A(4, 2);
    A << 1, 1,   //
        1, 0,    //
        0, 1,    //
        1, 1;
    Vector b(4);
    b << 1, -1, -1, -2;
    Vector c(2);
    c << 2, 3;
    return make_instance(A, Matrix(4, 0), b, c, Vector(0),
                         ConeProduct({ConeBlock::orthant(1), ConeBlock::second_order(3)}), {true, true});
}

}  // namespace

TEST_CASE("linear functions evaluate exactly")
{
    const auto ex2 = psd_example();
    const auto F = DualFunction::linear(e11());
    const auto e = evaluate(F, ex2.b());
    CHECK(e.exact);
    CHECK(e.value == doctest::Approx(-1.0));
    CHECK(evaluate(F, Vector::Zero(6)).value == 0.0);
    const auto bar = evaluate_bar(F, ex2.A().col(1));
    CHECK(bar.exact);
    CHECK(bar.profile.empty());
    CHECK(bar.value == doctest::Approx(1.0));
    CHECK_THROWS_AS(evaluate(F, Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("value function variant")
{
    const auto F = DualFunction::value_fn(ceiling_instance(), IntegerBox::uniform(1, -20, 20));
    CHECK(evaluate(F, vec({2.3})).value == doctest::Approx(3.0));
    CHECK(evaluate(F, vec({0.0})).value == doctest::Approx(0.0));
    CHECK(F.kind() == "valuefn");
    CHECK_FALSE(F.as_linear());

    // ceil(delta)/delta = 1/delta never settles.
    const auto bar = evaluate_bar(F, vec({1.0}));
    CHECK_FALSE(bar.exact);
    CHECK_FALSE(bar.reliable);
    REQUIRE(bar.profile.size() == 6);
    CHECK(bar.profile.front().second == doctest::Approx(10.0));
    CHECK(bar.value == doctest::Approx(1e6));

    // Zero objective and no continuous part: flat zero profile.
    const auto flat = make_instance(Matrix::Ones(1, 1), Matrix(1, 0), Vector::Zero(1), Vector::Zero(1), Vector(0),
                                    ConeProduct({ConeBlock::orthant(1)}));
    const auto Z = DualFunction::value_fn(flat, IntegerBox::uniform(1, -20, 20));
    const auto zbar = evaluate_bar(Z, vec({0.7}));
    CHECK(zbar.reliable);
    CHECK(zbar.value == doctest::Approx(0.0));
    for (const auto& [delta, ratio] : zbar.profile) {
        CHECK(ratio == doctest::Approx(0.0));
    }
}

TEST_CASE("infeasible right-hand sides give +inf, flagged")
{
    // min x s.t. x >= h, -x >= -1: infeasible for h > 1.
    Matrix A(2, 1);
    A << 1, -1;
    Vector b(2);
    b << 0, -1;
    const auto inst = make_instance(A, Matrix(2, 0), b, Vector::Ones(1), Vector(0), ConeProduct({ConeBlock::orthant(2)}));
    const auto F = DualFunction::value_fn(inst, IntegerBox::uniform(1, -5, 5));
    const auto e = evaluate(F, vec({3.0, -1.0}));
    CHECK(std::isinf(e.value));
    CHECK(e.value > 0);
    CHECK_FALSE(e.reliable);
}

TEST_CASE("lifted and restricted functions")
{
    const auto base = DualFunction::linear(vec({1, 2, 3, 4}));
    const auto lifted = DualFunction::binary_lifted(base, 2, 1);
    CHECK(lifted.domain_dim() == 4);
    CHECK(evaluate(lifted, vec({1, 1, 1, 1})).value == doctest::Approx(10.0));
    const auto r = DualFunction::restricted(lifted, 2);
    CHECK(r.domain_dim() == 2);
    CHECK(evaluate(r, vec({1, 1})).value == doctest::Approx(3.0));
    REQUIRE(r.as_linear());
    CHECK(r.as_linear()->size() == 2);
    CHECK_THROWS_AS(DualFunction::binary_lifted(base, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(DualFunction::restricted(base, 5), std::invalid_argument);
}

TEST_CASE("dual feasibility of linear functions is exact")
{
    const auto ex2 = psd_example();
    const auto rep = check_dual_feasibility(DualFunction::linear(e11()), ex2);
    CHECK(rep.verdict == DualVerdict::Feasible);
    CHECK(rep.exact);
    CHECK_FALSE(rep.witness);

    // Same column values, but lambda is not PSD.
    const Vector bad = svec_of({{1, 0, 0}, {0, 0, 0}, {0, 0, -1}});
    const auto rep2 = check_dual_feasibility(DualFunction::linear(bad), ex2);
    CHECK(rep2.verdict == DualVerdict::Infeasible);
    bool named = false;
    for (const auto& c : rep2.checks) {
        if (!c.ok && c.name.find("psd:3 (block 0)") != std::string::npos) {
            named = true;
        }
    }
    CHECK(named);

    // Column constraint: lambda = 0 gives f(A^2) = 0 != c_2 = 1.
    const auto rep3 = check_dual_feasibility(DualFunction::linear(Vector::Zero(6)), ex2);
    CHECK(rep3.verdict == DualVerdict::Infeasible);
    REQUIRE(rep3.witness);
    CHECK(rep3.witness->find("x2") != std::string::npos);
}

TEST_CASE("value function of an instance is dual feasible up to sampling")
{
    const auto ex2 = psd_example();
    const auto F = DualFunction::value_fn(ex2, IntegerBox::uniform(2, -20, 20));
    CHECK(evaluate(F, ex2.b()).value == doctest::Approx(0.0));
    const auto rep = check_dual_feasibility(F, ex2, 1e-6, 40);
    CHECK(rep.verdict == DualVerdict::FeasibleUpToSampling);
    CHECK_FALSE(rep.exact);
}

TEST_CASE("a value function with f(0) != 0 is rejected")
{
    // Box [1, 5] for min x s.t. x >= h: theta(0) = 1 in the box.
    const auto inst = ceiling_instance();
    const auto F = DualFunction::value_fn(inst, IntegerBox::uniform(1, 1, 5));
    const auto rep = check_dual_feasibility(F, inst, 1e-6, 10);
    CHECK(rep.verdict == DualVerdict::Infeasible);
    REQUIRE(rep.witness);
    CHECK(rep.witness->find("f(0) = 0") != std::string::npos);
}

TEST_CASE("binary perturbation")
{
    Matrix A(1, 1);
    A << 1;
    const auto one = make_instance(A, Matrix(1, 0), Vector::Zero(1), Vector::Ones(1), Vector(0),
                                   ConeProduct({ConeBlock::orthant(1)}), {true});
    const auto p = build_binary_perturbation(one, 0.5);
    REQUIRE(p.m() == 3);
    CHECK(p.b()[1] == doctest::Approx(-0.5));
    CHECK(p.b()[2] == doctest::Approx(-1.5));
    CHECK_FALSE(p.any_binary());
    CHECK(p.cone().size() == 3);
    CHECK_THROWS_AS(build_binary_perturbation(one, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_binary_perturbation(one, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_binary_perturbation(psd_example(), 0.5), std::invalid_argument);

    const auto inst = two_binary_instance();
    const auto base = solve_mip(inst, IntegerBox::uniform(2, 0, 1));
    REQUIRE(base.status == MipStatus::Optimal);
    for (double eps : {0.25, 0.5, 0.9}) {
        const auto q = build_binary_perturbation(inst, eps);
        const auto box = default_box(q);
        CHECK(box.lower() == IntVector{0, 0});
        CHECK(box.upper() == IntVector{1, 1});
        const auto r = solve_mip(q, IntegerBox::uniform(2, -3, 3));
        CHECK(r.status == MipStatus::Optimal);
        CHECK(r.value == doctest::Approx(base.value));
    }
}

TEST_CASE("binary perturbation preserves the optimum on random binary instances")
{
    std::mt19937_64 rng(77);
    for (int t = 0; t < 15; ++t) {
        const auto raw = random_instance(rng, 2, 0);
        auto data = raw.data();
        data.binary = {true, true};
        const Instance inst(data);
        const auto base = solve_mip(inst, IntegerBox::uniform(2, 0, 1));
        for (double eps : {0.25, 0.5, 0.9}) {
            const auto r = solve_mip(build_binary_perturbation(inst, eps), IntegerBox::uniform(2, -2, 2));
            CHECK(r.status == base.status);
            if (std::isfinite(base.value)) {
                CHECK(r.value == doctest::Approx(base.value));
            }
        }
    }
}

TEST_CASE("w perturbation")
{
    const auto ex2 = psd_example();
    const auto box = IntegerBox::uniform(2, -20, 20);
    const auto [inst, spec] = build_w_perturbation(ex2, identity3(), box);
    CHECK(spec.z_star == doctest::Approx(0.0));
    CHECK(spec.z_minus == doctest::Approx(-2.0));
    CHECK(spec.M == doctest::Approx(2.0));
    REQUIRE(inst.n1() == 3);
    CHECK(inst.is_binary(2));
    CHECK(inst.int_names()[2] == "w");
    CHECK(inst.c()[2] == doctest::Approx(2.0));
    IntVector lo = box.lower();
    IntVector hi = box.upper();
    lo.push_back(0);
    hi.push_back(1);
    const auto r = solve_mip(inst, IntegerBox(lo, hi));
    CHECK(r.value == doctest::Approx(0.0));

    // A v that leaves the optimal point unchanged gives M = 0.
    const auto ceil_inst = ceiling_instance();
    const auto [ci, cs] = build_w_perturbation(perturb_rhs(ceil_inst, vec({0.5})), vec({0.25}),
                                               IntegerBox::uniform(1, -20, 20));
    CHECK(cs.M == doctest::Approx(0.0));
    CHECK(ci.n1() == 2);

    CHECK_THROWS_AS(build_w_perturbation(ex2, svec_of({{1, 0, 0}, {0, 1, 0}, {0, 0, 0}}), box), DualFunctionError);
    CHECK_THROWS_AS(build_w_perturbation(lorentz_example(), vec({0, 0, 1}), box), DualFunctionError);
}

TEST_CASE("f* on the PSD example")
{
    const auto ex2 = psd_example();
    const auto F = build_fstar(ex2, 0.5, identity3(), IntegerBox::uniform(2, -20, 20));
    CHECK(F.kind() == "fstar");
    const auto& fs = std::get<FStarFn>(F.variant());
    REQUIRE(fs.spec->theta_star);
    CHECK(*fs.spec->theta_star == doctest::Approx(-1.0).epsilon(1e-4));
    CHECK(evaluate(F, ex2.b()).value == doctest::Approx(0.0));
    CHECK(evaluate(F, Vector::Zero(6)).value == doctest::Approx(0.0));
    CHECK(evaluate(F, ex2.A().col(0)).value == doctest::Approx(0.0));
    CHECK(evaluate(F, Vector(-ex2.A().col(0))).value == doctest::Approx(0.0));
    CHECK(evaluate(F, ex2.A().col(1)).value == doctest::Approx(1.0));
    CHECK(evaluate(F, Vector(-ex2.A().col(1))).value == doctest::Approx(-1.0));
    const auto rep = check_dual_feasibility(F, ex2, 1e-6, 15);
    CHECK(rep.verdict == DualVerdict::FeasibleUpToSampling);
    CHECK_THROWS_AS(build_fstar(ex2, 1.0, identity3(), IntegerBox::uniform(2, -20, 20)), std::invalid_argument);
}

TEST_CASE("cut generation on the halving instance")
{
    const auto inst = halving_example();
    const auto box = IntegerBox::uniform(1, -20, 20);

    const auto lin = generate_cut(DualFunction::linear(vec({0.5})), inst);
    CHECK(lin.pi[0] == doctest::Approx(-1.0));
    CHECK(lin.pi0 == doctest::Approx(-1.5));
    CHECK(lin.provenance == "linear");
    CHECK(format_inequality(lin, inst) == "-1 x1 >= -1.5");
    CHECK(verify_cut(lin, inst, box).valid);

    const auto vf = generate_cut(DualFunction::value_fn(inst, box), inst);
    CHECK(vf.pi[0] == doctest::Approx(-1.0));
    CHECK(vf.pi0 == doctest::Approx(-1.0));
    const auto check = verify_cut(vf, inst, box);
    CHECK(check.valid);
    CHECK(check.worst_slack == doctest::Approx(0.0));

    const auto zero = generate_cut(DualFunction::linear(vec({0.0})), inst);
    CHECK(format_inequality(zero, inst) == "0 >= 0");
    CHECK(verify_cut(zero, inst, box).valid);

    Inequality fake{vec({-1.0}), Vector(0), 0.0, "fabricated", {}};
    const auto bad = verify_cut(fake, inst, box);
    CHECK_FALSE(bad.valid);
    REQUIRE(bad.witness);
    CHECK(bad.witness->x == IntVector{1});

    CHECK_THROWS_AS(generate_cut(DualFunction::linear(vec({-1.0})), inst), DualFunctionError);
}

TEST_CASE("cuts with continuous variables are checked over the fiber")
{
    // min y s.t. y - x >= 0.5 (orthant), x integer in a box: y >= x + 0.5.
    Matrix A(1, 1);
    A << -1;
    Matrix G(1, 1);
    G << 1;
    const auto inst = make_instance(A, G, vec({0.5}), Vector::Zero(1), Vector::Ones(1),
                                    ConeProduct({ConeBlock::orthant(1)}));
    const auto cut = generate_cut(DualFunction::linear(vec({1.0})), inst);
    CHECK(format_inequality(cut, inst) == "-1 x1 + 1 y1 >= 0.5");
    CHECK(verify_cut(cut, inst, IntegerBox::uniform(1, -3, 3)).valid);
    Inequality tight{vec({-1.0}), vec({1.0}), 0.6, "fabricated", {}};
    CHECK_FALSE(verify_cut(tight, inst, IntegerBox::uniform(1, -3, 3)).valid);
}

TEST_CASE("property: linear dual points give lower bounds and valid cuts")
{
    std::mt19937_64 rng(91);
    int tested = 0;
    for (int t = 0; t < 25; ++t) {
        const int n2 = t % 3 == 0 ? 1 : 0;
        const auto inst = random_instance(rng, 2, n2);
        const auto dc = check_dual_feasible(inst);
        if (dc.status != Feasibility::Feasible) {
            continue;
        }
        const auto F = DualFunction::linear(*dc.lambda);
        const auto rep = check_dual_feasibility(F, inst, 1e-5);
        if (rep.verdict != DualVerdict::Feasible) {
            continue;
        }
        const auto box = IntegerBox::uniform(2, -4, 4);
        const auto r = solve_mip(inst, box);
        if (!std::isfinite(r.value)) {
            continue;
        }
        ++tested;
        CHECK(evaluate(F, inst.b()).value <= r.value + 1e-6);
        const auto cut = generate_cut(F, inst);
        CHECK(verify_cut(cut, inst, box).valid);
    }
    CHECK(tested > 0);
}

TEST_CASE("property: restriction of a monotone lifted function")
{
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
        const auto raw = random_instance(rng, 1, 0);
        auto data = raw.data();
        data.binary = {true};
        const auto lifted_inst = build_binary_perturbation(Instance(data), 0.5);
        const auto m = raw.m();
        const auto fprime = DualFunction::binary_lifted(
            DualFunction::value_fn(lifted_inst, IntegerBox::uniform(1, -5, 5)), m, 1);
        const auto F = DualFunction::restricted(fprime, m);
        Vector lowered = Vector::Zero(static_cast<Eigen::Index>(m + 2));
        lowered.head(static_cast<Eigen::Index>(m)) = raw.b();
        lowered[static_cast<Eigen::Index>(m + 1)] = -1.0;
        const double top = evaluate(F, raw.b()).value;
        const double low = evaluate(fprime, lowered).value;
        CHECK(top >= low - 1e-6);
    }
}
