#include "cmipdual/examples.hpp"
#include "cmipdual/mip.hpp"

#include <doctest.h>

#include "support.hpp"

#include <cmath>
#include <random>

using namespace cmipdual;
using namespace cmipdual::testing;

namespace {

// Independent re-enumeration, last point first.
double brute_force(const Instance& inst, const IntegerBox& box)
{
    std::vector<IntVector> points;
    for_each_point(box, [&](const IntVector& x) {
        points.push_back(x);
        return true;
    });
    double best = std::numeric_limits<double>::infinity();
    for (auto it = points.rbegin(); it != points.rend(); ++it) {
        const Vector xv = to_vector(*it);
        const Vector rhs = inst.b() - inst.A() * xv;
        if (inst.n2() == 0) {
            if (cone_margin(inst.cone(), Vector(-rhs)) >= -1e-9) {
                best = std::min(best, inst.c().dot(xv));
            }
            continue;
        }
        const auto sub = make_instance(Matrix(inst.m(), 0), inst.G(), rhs, Vector(0), inst.d(), inst.cone());
        const auto res = solve_continuous(sub);
        if (res.status == SolveStatus::Optimal) {
            best = std::min(best, inst.c().dot(xv) + res.objective);
        }
    }
    return best;
}

}  // namespace

TEST_CASE("lexicographic enumeration")
{
    std::vector<IntVector> seen;
    for_each_point(IntegerBox({0, -1}, {1, 0}), [&](const IntVector& x) {
        seen.push_back(x);
        return true;
    });
    REQUIRE(seen.size() == 4);
    CHECK(seen[0] == IntVector{0, -1});
    CHECK(seen[1] == IntVector{0, 0});
    CHECK(seen[3] == IntVector{1, 0});
    int calls = 0;
    for_each_point(IntegerBox(), [&](const IntVector&) {
        ++calls;
        return true;
    });
    CHECK(calls == 1);
    CHECK_THROWS_AS(IntegerBox({1}, {0}), std::invalid_argument);
}

TEST_CASE("Lorentz example over [-10, 10]^2")
{
    const auto res = solve_mip(lorentz_example(), IntegerBox::uniform(2, -10, 10));
    REQUIRE(res.status == MipStatus::Optimal);
    CHECK(res.value == 0.0);
    REQUIRE(res.witness);
    CHECK(res.witness->x == IntVector{0, 0});
    CHECK(res.witness->margin >= -1e-7);
    CHECK(res.touches_boundary);
    CHECK(res.stage_values.size() == 4);
}

TEST_CASE("perturbed Lorentz example looks unbounded")
{
    const auto inst = lorentz_example(0.5);
    for (const auto& box : {IntegerBox({-60, -10}, {10, 0}), IntegerBox::uniform(2, -10, 10)}) {
        const auto res = solve_mip(inst, box);
        CAPTURE(box.describe());
        REQUIRE(res.status == MipStatus::UnboundedSuspected);
        CHECK(std::isinf(res.value));
        REQUIRE(res.evidence.size() == 4);
        for (std::size_t k = 0; k < res.evidence.size(); ++k) {
            const auto& p = res.evidence[k];
            const Vector s = inst.A() * to_vector(p.x) - inst.b();
            CHECK(cone_margin(inst.cone(), s) >= -1e-7);
            CHECK(inst.c().dot(to_vector(p.x)) == p.objective);
            if (k > 0) {
                CHECK(p.objective < res.evidence[k - 1].objective);
            }
        }
        CHECK(res.evidence.front().objective - res.evidence.back().objective >= 10);
    }
    // Hand-computed stage optima for the [-60,10]x[-10,0] box.
    const auto res = solve_mip(inst, IntegerBox({-60, -10}, {10, 0}));
    CHECK(res.stage_values == std::vector<double>{-3, -10, -32, -40});
}

TEST_CASE("PSD example over [-5, 5]^2")
{
    const auto res = solve_mip(psd_example(), IntegerBox::uniform(2, -5, 5));
    REQUIRE(res.status == MipStatus::Optimal);
    CHECK(res.value == 0.0);
    CHECK(res.witness->x == IntVector{0, 0});
}

TEST_CASE("probing can be disabled")
{
    MipOptions opts;
    opts.probe_boundary = false;
    const auto res = solve_mip(lorentz_example(), IntegerBox::uniform(2, -10, 10), opts);
    CHECK(res.status == MipStatus::BoxLimited);
    CHECK(res.value == 0.0);
}

TEST_CASE("box cap is an explicit error")
{
    MipOptions opts;
    opts.max_assignments = 100;
    CHECK_THROWS_AS(solve_mip(lorentz_example(), IntegerBox::uniform(2, -10, 10), opts), BoxTooLarge);
}

TEST_CASE("infeasible instance")
{
    // x >= 0.5 and -x >= -0.7 has no integer point.
    Matrix A(2, 1);
    A << 1, -1;
    const auto inst = make_instance(A, Matrix(2, 0), vec({0.5, -0.7}), vec({1}), Vector(0),
                                    ConeProduct({ConeBlock::orthant(2)}));
    const auto res = solve_mip(inst, IntegerBox::uniform(1, -5, 5));
    CHECK(res.status == MipStatus::Infeasible);
    CHECK(std::isinf(res.value));
    CHECK(res.value > 0);
}

TEST_CASE("continuous subproblem with a ray")
{
    // min x - y s.t. y >= x: unbounded in y.
    const auto inst = make_instance(Matrix::Constant(1, 1, -1), Matrix::Ones(1, 1), vec({0}), vec({1}), vec({-1}),
                                    ConeProduct({ConeBlock::orthant(1)}));
    const auto res = solve_mip(inst, IntegerBox::uniform(1, -2, 2));
    CHECK(res.status == MipStatus::UnboundedSuspected);
}

TEST_CASE("default box uses single-variable rows")
{
    Matrix A(3, 2);
    A << 1, 0, -2, 0, 1, 1;
    const auto inst = make_instance(A, Matrix(3, 0), vec({-3.5, -7, 0}), vec({1, 1}), Vector(0),
                                    ConeProduct({ConeBlock::orthant(3)}), {false, true});
    const auto box = default_box(inst);
    CHECK(box.lower() == IntVector{-3, 0});
    CHECK(box.upper() == IntVector{3, 1});
}

TEST_CASE("ceiling value function")
{
    const ValueFunctionOracle oracle(ceiling_instance(), IntegerBox::uniform(1, -100, 100));
    CHECK(value_function(oracle, vec({2.3})) == 3.0);
    CHECK(value_function(oracle, vec({-4})) == -4.0);
    CHECK(value_function(oracle, vec({-4 + 1e-14})) == -4.0);
    CHECK(oracle.cache_size() == 2);
    CHECK_THROWS_AS(oracle(vec({1, 2})), std::invalid_argument);

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-30, 30);
    for (int k = 0; k < 200; ++k) {
        const Vector a = vec({u(rng)});
        const Vector b = vec({u(rng)});
        CHECK(oracle(a + b) <= oracle(a) + oracle(b) + 1e-6);
        CHECK(oracle(a) == std::ceil(a[0]));
    }
}

TEST_CASE("PSD example value at b - I")
{
    const auto inst = psd_example();
    const ValueFunctionOracle oracle(inst, IntegerBox::uniform(2, -5, 5));
    const Vector h = inst.b() - svec(Matrix::Identity(3, 3));
    const auto entry = oracle.evaluate(h);
    CHECK(entry.value == doctest::Approx(-2.0));
    CHECK(oracle(inst.b()) == 0.0);
}

TEST_CASE("strict points")
{
    CHECK_FALSE(find_strict_mixed_point(psd_example(), IntegerBox::uniform(2, -5, 5)));
    CHECK_FALSE(find_strict_mixed_point(lorentz_example(), IntegerBox::uniform(2, -10, 10)));
    const auto inst = make_instance(Matrix::Ones(1, 1), Matrix(1, 0), vec({-0.5}), vec({1}), Vector(0),
                                    ConeProduct({ConeBlock::orthant(1)}));
    const auto p = find_strict_mixed_point(inst, IntegerBox::uniform(1, -3, 3));
    REQUIRE(p);
    CHECK(p->x == IntVector{0});
    CHECK(p->margin == doctest::Approx(0.5));

    // All rows in S1 for the PSD example: still nothing.
    const auto view = split_blocks(psd_example(), {BlockPart::S1});
    CHECK_FALSE(find_strict_partial(view, IntegerBox::uniform(2, -5, 5)));
}

TEST_CASE("strict partial point with binary bounds in S2")
{
    // Binary x1, x2 with (x1, x2 - 0.5, 1) in L^3 strictly; bounds as S2.
    Matrix A = Matrix::Zero(3, 2);
    A(0, 0) = 1;
    A(1, 1) = 1;
    const auto base = make_instance(A, Matrix(3, 0), vec({0, 0.5, -1}), vec({0, 0}), Vector(0),
                                    ConeProduct({ConeBlock::second_order(3)}), {true, true});
    const auto inst = materialize_binary_bounds(base);
    const auto view = split_blocks(inst, {BlockPart::S1, BlockPart::S2});
    const auto p = find_strict_partial(view, IntegerBox::uniform(2, 0, 1));
    REQUIRE(p);
    CHECK(p->x == IntVector{0, 0});
    const auto margins = block_margins(inst.cone(), Vector(inst.A() * to_vector(p->x) - inst.b()));
    CHECK(margins[0] > 0);
    CHECK(margins[1] == 0.0);

    // Empty S2 matches the plain search.
    const auto all = split_blocks(base, {BlockPart::S1});
    CHECK(find_strict_partial(all, IntegerBox::uniform(2, 0, 1))->x ==
          find_strict_mixed_point(base, IntegerBox::uniform(2, 0, 1))->x);
}

TEST_CASE("solve_mip agrees with reverse-order brute force")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const int n1 = 1 + trial % 2;
        const int n2 = trial % 3 == 0 ? 1 : 0;
        const auto inst = random_instance(rng, n1, n2);
        const auto box = IntegerBox::uniform(static_cast<std::size_t>(n1), -3, 3);
        MipOptions opts;
        opts.probe_boundary = false;
        const auto res = solve_mip(inst, box, opts);
        CAPTURE(trial);
        const double ref = brute_force(inst, box);
        if (std::isinf(ref)) {
            CHECK(std::isinf(res.value));
        } else {
            CHECK(res.value == doctest::Approx(ref).epsilon(1e-7));
        }
    }
}

TEST_CASE("value function decreases along the cone")
{
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 5; ++trial) {
        const auto inst = random_instance(rng, 2, 0);
        MipOptions opts;
        opts.probe_boundary = false;
        const ValueFunctionOracle oracle(inst, IntegerBox::uniform(2, -4, 4), opts);
        for (int k = 0; k < 20; ++k) {
            Vector v(static_cast<Eigen::Index>(inst.m()));
            for (auto& x : v) {
                x = g(rng);
            }
            v = project(inst.cone(), v);
            CHECK(oracle(inst.b() - v) <= oracle(inst.b()) + 1e-9);
        }
    }
}
