// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "cmipdual/certify.hpp"
#include "cmipdual/cli.hpp"
#include "cmipdual/dirichlet.hpp"
#include "cmipdual/dual.hpp"
#include "cmipdual/examples.hpp"
#include "cmipdual/ipm.hpp"
#include "cmipdual/mip.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cmipdual;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

Vector vec(std::initializer_list<double> xs)
{
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        v[i++] = x;
    }
    return v;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double x)
{
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

int run_cli(const std::vector<std::string>& args, std::string& text)
{
    std::istringstream in;
    std::ostringstream out, err;
    const int code = cli::run(args, in, out, err);
    text = out.str() + err.str();
    return code;
}

// ------------------------------------------------------------------ 1

Outcome example_one()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::string text;
    const int code = run_cli({"example", "1"}, text);
    o.require(code == cli::Definitive, "example 1 exit code " + std::to_string(code));
    o.require(text.find("verdict: DualInfeasible") != std::string::npos, "verdict line missing");

    const auto inst = lorentz_example();
    const auto res = solve_mip(inst, IntegerBox::uniform(2, -10, 10));
    o.require(res.status == MipStatus::Optimal && std::abs(res.value) <= 1e-9,
              "primal value " + num(res.value) + " (" + to_string(res.status) + ")");
    const auto dual = check_dual_feasible(inst);
    o.require(dual.status == Feasibility::Infeasible && dual.ray, "continuous dual not reported infeasible");
    if (dual.ray) {
        o.require(verify_improving_ray(continuous_relaxation(inst), *dual.ray, 1e-6).pass,
                  "infeasibility certificate fails at 1e-6");
    }
    const double eps = 0.5;
    const auto table = lorentz_witness_table(eps, 10);
    o.require(table.size() == 11, "witness table has " + std::to_string(table.size()) + " rows");
    for (const auto& r : table) {
        const double x2 = -r.k;
        const auto x1 = static_cast<std::int64_t>(std::ceil((x2 * x2 - eps * eps) / (2 * eps)));
        o.require(r.x1 == x1 && r.x2 == -r.k, "row " + std::to_string(r.k) + " has the wrong point");
        o.require(r.objective == -r.k, "row " + std::to_string(r.k) + " objective " + num(r.objective));
        o.require(r.margin >= -1e-7, "row " + std::to_string(r.k) + " margin " + num(r.margin));
    }
    const double t = seconds_since(t0);
    o.require(t < 2.0, "runtime " + num(t) + " s");
    if (o.pass) {
        o.detail = "value 0, ray verified at 1e-6, 11 witness rows, " + num(t) + " s";
    }
    return o;
}

// ------------------------------------------------------------------ 2

Outcome example_two()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto inst = psd_example();
    Matrix E = Matrix::Zero(3, 3);
    E(0, 0) = 1;
    const Vector lambda = svec(E);
    const auto F = DualFunction::linear(lambda);
    const auto rep = check_dual_feasibility(F, inst, 1e-8);
    o.require(rep.verdict == DualVerdict::Feasible && rep.exact, "linear dual not certified exactly");
    double worst = 0.0;
    for (const auto& c : rep.checks) {
        worst = std::max(worst, std::abs(c.value - c.target));
    }
    o.require(worst <= 1e-8, "constraint residual " + num(worst));
    const double fb = evaluate(F, inst.b()).value;
    o.require(std::abs(fb + 1.0) <= 1e-9, "F(b) = " + num(fb));

    const auto box = IntegerBox::uniform(2, -5, 5);
    const auto res = solve_mip(inst, box);
    o.require(res.status == MipStatus::Optimal && std::abs(res.value) <= 1e-9, "primal value " + num(res.value));

    const auto cert = certify(inst, std::nullopt, box);
    o.require(cert.verdict.str() == "StrongDual (Theorem 3 via Corollary 1)", "verdict " + cert.verdict.str());
    o.require(cert.gap.defined && std::abs(cert.gap.gap) <= 1e-6 && cert.gap.best_dual_kind == "valuefn",
              "gap evidence " + num(cert.gap.gap) + " from " + cert.gap.best_dual_kind);

    std::string text;
    const int code = run_cli({"example", "2"}, text);
    o.require(code == cli::Definitive, "example 2 exit code " + std::to_string(code));
    o.require(text.find("verdict: StrongDual (Theorem 3 via Corollary 1)") != std::string::npos,
              "verdict line missing");

    const double t = seconds_since(t0);
    o.require(t < 5.0, "runtime " + num(t) + " s");
    if (o.pass) {
        o.detail = "residual " + num(worst) + ", F(b) = -1, gap 0 via valuefn, " + num(t) + " s";
    }
    return o;
}

// ------------------------------------------------------------------ 3

Outcome ipm_sanity()
{
    Outcome o;
    // min x3 s.t. x1 = 1, x2 = 1, (x1, x2, x3) in L^3
    Matrix G = Matrix::Zero(7, 3);
    Vector b = Vector::Zero(7);
    G(0, 0) = 1;
    b[0] = 1;
    G(1, 0) = -1;
    b[1] = -1;
    G(2, 1) = 1;
    b[2] = 1;
    G(3, 1) = -1;
    b[3] = -1;
    G.bottomRows(3) = Matrix::Identity(3, 3);
    const auto soc = make_instance(Matrix(7, 0), G, b, Vector(0), vec({0, 0, 1}),
                                   ConeProduct({ConeBlock::orthant(4), ConeBlock::second_order(3)}));
    const auto r1 = solve_continuous(soc);
    o.require(r1.status == SolveStatus::Optimal && std::abs(r1.objective - std::sqrt(2.0)) <= 1e-6,
              "SOC objective " + num(r1.objective));
    o.require(r1.iterations <= 60, "SOC iterations " + std::to_string(r1.iterations));

    // max t s.t. M - t I PSD; the margin is lambda_min(M) = 2 - sqrt(2)
    Matrix M(3, 3);
    M << 2, 1, 0, 1, 2, 1, 0, 1, 2;
    Matrix H(6, 1);
    H.col(0) = -svec(Matrix::Identity(3, 3));
    const auto psd = make_instance(Matrix(6, 0), H, -svec(M), Vector(0), vec({-1}), ConeProduct({ConeBlock::psd(3)}));
    const auto r2 = solve_continuous(psd);
    const double t = r2.primal ? (*r2.primal)[0] : NAN;
    o.require(r2.status == SolveStatus::Optimal && std::abs(t - (2.0 - std::sqrt(2.0))) <= 1e-6,
              "PSD margin " + num(t));
    if (o.pass) {
        o.detail = "sqrt(2) in " + std::to_string(r1.iterations) + " iterations, PSD margin error " +
                   num(std::abs(t - (2.0 - std::sqrt(2.0))));
    }
    return o;
}

// ------------------------------------------------------------------ 4 and 7

// m <= 6, n1 <= 3, n2 <= 2, blocks drawn from a few mixed layouts.
Instance random_small_instance(std::mt19937_64& rng)
{
    static const std::vector<std::vector<ConeBlock>> layouts{
        {ConeBlock::orthant(2), ConeBlock::second_order(3)},
        {ConeBlock::second_order(3), ConeBlock::psd(2)},
        {ConeBlock::orthant(1), ConeBlock::psd(2), ConeBlock::orthant(2)},
        {ConeBlock::orthant(3), ConeBlock::second_order(3)},
        {ConeBlock::psd(2), ConeBlock::orthant(3)},
        {ConeBlock::orthant(1), ConeBlock::second_order(4)},
    };
    std::uniform_int_distribution<std::size_t> pick(0, layouts.size() - 1);
    std::uniform_int_distribution<int> n1d(1, 3);
    std::uniform_int_distribution<int> n2d(0, 2);
    std::uniform_int_distribution<int> coef(-2, 2);
    std::uniform_int_distribution<int> rhs(-3, 1);
    const ConeProduct K(layouts[pick(rng)]);
    const auto m = static_cast<Eigen::Index>(K.total_dim());
    const int n1 = n1d(rng);
    const int n2 = n2d(rng);
    Matrix A(m, n1);
    Matrix G(m, n2);
    Vector b(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (int j = 0; j < n1; ++j) {
            A(r, j) = coef(rng);
        }
        for (int j = 0; j < n2; ++j) {
            G(r, j) = coef(rng);
        }
        b[r] = rhs(rng);
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

Outcome weak_duality()
{
    Outcome o;
    std::mt19937_64 rng(20240601);
    int compared = 0;
    int violations = 0;
    double worst = -INFINITY;
    for (int t = 0; t < 100; ++t) {
        const auto inst = random_small_instance(rng);
        const auto dual = check_dual_feasible(inst);
        if (dual.status != Feasibility::Feasible || !dual.lambda) {
            continue;
        }
        const auto res = solve_mip(inst, IntegerBox::uniform(inst.n1(), -3, 3));
        if (res.status != MipStatus::Optimal) {
            continue;
        }
        ++compared;
        const double excess = dual.lambda->dot(inst.b()) - res.value;
        worst = std::max(worst, excess);
        if (excess > 1e-6) {
            ++violations;
        }
    }
    o.require(violations == 0, std::to_string(violations) + " violations");
    o.require(compared >= 10, "only " + std::to_string(compared) + " comparable instances");
    o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(compared) + " of 100 comparable, max lambda.b - value " +
                num(worst);
    return o;
}

// ------------------------------------------------------------------ 5

Vector random_in_cone(const ConeProduct& K, std::mt19937_64& rng, double scale)
{
    std::normal_distribution<double> g;
    Vector v(static_cast<Eigen::Index>(K.total_dim()));
    for (auto& x : v) {
        x = g(rng);
    }
    return scale * project(K, v);
}

// Pure integer, with two-sided bound rows so every feasible set lies well
// inside the enumeration box and box-restricted values equal true values.
Instance random_bounded_oracle_instance(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> n1d(1, 2);
    std::uniform_int_distribution<int> coef(-2, 2);
    std::bernoulli_distribution with_psd(0.5);
    const int n1 = n1d(rng);
    std::vector<ConeBlock> blocks{ConeBlock::orthant(static_cast<std::size_t>(2 * n1)), ConeBlock::second_order(3)};
    if (with_psd(rng)) {
        blocks.push_back(ConeBlock::psd(2));
    }
    const ConeProduct K(blocks);
    const auto m = static_cast<Eigen::Index>(K.total_dim());
    Matrix A = Matrix::Zero(m, n1);
    for (int j = 0; j < n1; ++j) {
        A(2 * j, j) = 1;
        A(2 * j + 1, j) = -1;
    }
    for (Eigen::Index r = 2 * n1; r < m; ++r) {
        for (int j = 0; j < n1; ++j) {
            A(r, j) = coef(rng);
        }
    }
    Vector b = Vector::Constant(m, -2.0);
    for (Eigen::Index r = 2 * n1; r < m; ++r) {
        b[r] = coef(rng) - 1.0;
    }
    Vector c(n1);
    for (auto& x : c) {
        x = coef(rng);
    }
    return make_instance(A, Matrix(m, 0), b, c, Vector(0), K);
}

struct OracleCounts {
    int subadditive_fail = 0;
    int monotone_fail = 0;
    int descent_fail = 0;
    int undecided = 0;
};

void check_oracle(const ValueFunctionOracle& oracle, const std::function<Vector()>& sample_h,
                  const std::function<Vector()>& sample_cone, OracleCounts& n)
{
    auto value = [&](const Vector& h, bool& ok) {
        const auto e = oracle.evaluate(h);
        ok = ok && (e.status == MipStatus::Optimal || e.status == MipStatus::Infeasible);
        return e.value;
    };
    for (int p = 0; p < 200; ++p) {
        const Vector u = sample_h();
        const Vector w = sample_h();
        bool ok = true;
        const double fu = value(u, ok);
        const double fw = value(w, ok);
        const double fuw = value(u + w, ok);
        if (!ok) {
            ++n.undecided;
        } else if (!(fuw <= fu + fw + 1e-6)) {
            ++n.subadditive_fail;
        }
        // monotone in the cone order: u <=_K u + k implies f(u) <= f(u + k)
        const Vector k = sample_cone();
        bool ok2 = true;
        const double lo = value(u, ok2);
        const double hi = value(u + k, ok2);
        if (!ok2) {
            ++n.undecided;
        } else if (!(lo <= hi + 1e-6)) {
            ++n.monotone_fail;
        }
    }
    const Vector b = oracle.instance().b();
    for (int p = 0; p < 20; ++p) {
        bool ok = true;
        const double fb = value(b, ok);
        const double fbv = value(b - sample_cone(), ok);
        if (!ok) {
            ++n.undecided;
        } else if (!(fbv <= fb + 1e-6)) {
            ++n.descent_fail;
        }
    }
}

Outcome value_function_properties()
{
    Outcome o;
    std::mt19937_64 rng(424242);
    OracleCounts n;

    // min x s.t. x - h >= 0, i.e. the ceiling function
    const auto ceil_inst = make_instance(Matrix::Ones(1, 1), Matrix(1, 0), Vector::Zero(1), Vector::Ones(1),
                                         Vector(0), ConeProduct({ConeBlock::orthant(1)}));
    const ValueFunctionOracle ceiling(ceil_inst, IntegerBox::uniform(1, -30, 30));
    std::uniform_real_distribution<double> h1(-5.0, 5.0);
    check_oracle(
        ceiling, [&] { return vec({h1(rng)}); }, [&] { return random_in_cone(ceil_inst.cone(), rng, 2.0); }, n);
    for (int p = 0; p < 50; ++p) {
        const double h = h1(rng);
        if (ceiling(vec({h})) != std::ceil(h)) {
            o.require(false, "ceiling oracle disagrees at " + num(h));
            break;
        }
    }

    for (int t = 0; t < 20; ++t) {
        const auto inst = random_bounded_oracle_instance(rng);
        const ValueFunctionOracle oracle(inst, IntegerBox::uniform(inst.n1(), -12, 12));
        const auto n1 = static_cast<Eigen::Index>(inst.n1());
        std::uniform_real_distribution<double> bound(-2.5, 0.0);
        std::uniform_real_distribution<double> free(-2.0, 2.0);
        auto sample_h = [&] {
            Vector h(static_cast<Eigen::Index>(inst.m()));
            for (Eigen::Index r = 0; r < h.size(); ++r) {
                h[r] = r < 2 * n1 ? bound(rng) : free(rng);
            }
            return h;
        };
        check_oracle(oracle, sample_h, [&] { return random_in_cone(inst.cone(), rng, 1.0); }, n);
    }
    o.require(n.subadditive_fail == 0, std::to_string(n.subadditive_fail) + " subadditivity failures");
    o.require(n.monotone_fail == 0, std::to_string(n.monotone_fail) + " monotonicity failures");
    o.require(n.descent_fail == 0, std::to_string(n.descent_fail) + " theta(b - v) > theta(b) cases");
    o.require(n.undecided == 0, std::to_string(n.undecided) + " box-limited evaluations");
    if (o.pass) {
        o.detail = "21 oracles, 200 pairs and 20 cone directions each";
    }
    return o;
}

// ------------------------------------------------------------------ 6

Outcome perturbations()
{
    Outcome o;
    // binary suite: one hand-built instance and four random ones
    std::vector<Instance> suite;
    {
        Matrix A(4, 2);
        A << 1, 1, 1, 0, 0, 1, 1, 1;
        Vector b(4);
        b << 1, -1, -1, -2;
        suite.push_back(make_instance(A, Matrix(4, 0), b, vec({2, 3}), Vector(0),
                                      ConeProduct({ConeBlock::orthant(1), ConeBlock::second_order(3)}), {true, true}));
    }
    std::mt19937_64 rng(606);
    while (suite.size() < 5) {
        auto data = random_small_instance(rng).data();
        if (data.G.cols() != 0) {
            continue;
        }
        data.binary.assign(static_cast<std::size_t>(data.A.cols()), true);
        const Instance inst(data);
        if (solve_mip(inst, IntegerBox::uniform(inst.n1(), 0, 1)).status == MipStatus::Optimal) {
            suite.push_back(inst);
        }
    }
    int equal = 0;
    for (const auto& inst : suite) {
        const auto base = solve_mip(inst, IntegerBox::uniform(inst.n1(), 0, 1));
        for (double eps : {0.25, 0.5, 0.9}) {
            const auto r = solve_mip(build_binary_perturbation(inst, eps), IntegerBox::uniform(inst.n1(), -3, 3));
            const bool same = r.status == base.status && std::abs(r.value - base.value) <= 1e-9;
            o.require(same, "binary perturbation eps " + num(eps) + " gives " + num(r.value) + " vs " + num(base.value));
            equal += same;
        }
    }

    const auto ex2 = psd_example();
    const Vector I = svec(Matrix::Identity(3, 3));
    const auto box = IntegerBox::uniform(2, -20, 20);
    const auto [winst, spec] = build_w_perturbation(ex2, I, box);
    o.require(std::abs(spec.M - 2.0) <= 1e-9, "M = " + num(spec.M));
    IntVector lo = box.lower();
    IntVector hi = box.upper();
    lo.push_back(0);
    hi.push_back(1);
    const auto wres = solve_mip(winst, IntegerBox(lo, hi));
    const auto base = solve_mip(ex2, box);
    o.require(std::abs(wres.value - base.value) <= 1e-9, "w-perturbed value " + num(wres.value));

    const auto F = build_fstar(ex2, 0.5, I, IntegerBox::uniform(2, -5, 5));
    const double fb = evaluate(F, ex2.b()).value;
    o.require(std::abs(fb) <= 1e-6, "f*(b) = " + num(fb));
    const auto rep = check_dual_feasibility(F, ex2, 1e-6, 50);
    o.require(rep.verdict != DualVerdict::Infeasible, "f* fails dual feasibility" + (rep.witness ? ": " + *rep.witness : ""));
    if (o.pass) {
        o.detail = std::to_string(equal) + "/15 binary values equal, M = 2, f*(b) = " + num(fb) + ", f* " +
                   to_string(rep.verdict);
    }
    return o;
}

// ------------------------------------------------------------------ 7

Outcome cuts()
{
    Outcome o;
    const auto inst = halving_example();
    const auto box = IntegerBox::uniform(1, -20, 20);
    const auto lin = generate_cut(DualFunction::linear(vec({0.5})), inst);
    // pi x >= pi0 with pi = -1 reads x <= -pi0
    o.require(lin.pi[0] == -1.0 && std::abs(lin.pi0 + 1.5) <= 1e-12, "linear cut " + format_inequality(lin, inst));
    o.require(verify_cut(lin, inst, box).valid, "linear cut fails verify_cut");
    const auto vf = generate_cut(DualFunction::value_fn(inst, box), inst);
    o.require(std::abs(vf.pi[0] + 1.0) <= 1e-9 && std::abs(vf.pi0 + 1.0) <= 1e-9,
              "value function cut " + format_inequality(vf, inst));
    o.require(verify_cut(vf, inst, box).valid, "value function cut fails verify_cut");
    o.require(vf.pi[0] * 1.5 < vf.pi0 - 1e-9, "value function cut does not separate x = 1.5");

    std::mt19937_64 rng(20240601);
    int generated = 0;
    int invalid = 0;
    for (int t = 0; t < 100; ++t) {
        const auto r = random_small_instance(rng);
        const auto rbox = IntegerBox::uniform(r.n1(), -3, 3);
        std::vector<DualFunction> fs;
        const auto dual = check_dual_feasible(r);
        if (dual.status == Feasibility::Feasible && dual.lambda) {
            fs.push_back(DualFunction::linear(*dual.lambda));
        }
        if (r.n2() == 0) {
            fs.push_back(DualFunction::value_fn(r, rbox));
        }
        for (const auto& F : fs) {
            try {
                const auto cut = generate_cut(F, r);
                ++generated;
                const auto check = verify_cut(cut, r, rbox);
                if (!check.valid) {
                    ++invalid;
                }
            } catch (const DualFunctionError&) {
                // no cut: a coefficient is not finite
            }
        }
    }
    o.require(invalid == 0, std::to_string(invalid) + " of " + std::to_string(generated) + " random cuts invalid");
    if (o.pass) {
        o.detail = "x <= 1.5 and x <= 1 on 2x <= 3, " + std::to_string(generated) + " random cuts valid";
    }
    return o;
}

// ------------------------------------------------------------------ 8

Outcome dirichlet_suite()
{
    Outcome o;
    const auto Z2 = MixedLattice::standard(2, 0);
    const double s2 = std::sqrt(2.0);
    const HalfLineQuery q{vec({0, 0}), vec({1, s2}), 0.1, 5.0};
    const auto w = approximate_halfline(Z2, q, 20);
    o.require(bool(w), "no witness for the sqrt(2) half-line within bound 20");
    if (w) {
        // distance to {lambda r : lambda >= gamma}, recomputed from scratch
        const double r2 = 1.0 + 2.0;
        const double lambda = std::max(5.0, ((*w)[0] + s2 * (*w)[1]) / r2);
        const double dx = (*w)[0] - lambda;
        const double dy = (*w)[1] - lambda * s2;
        const double dist = std::sqrt(dx * dx + dy * dy);
        const bool integral = (*w)[0] == std::round((*w)[0]) && (*w)[1] == std::round((*w)[1]);
        o.require(integral && dist <= 0.1, "witness at distance " + num(dist));
    }

    const auto ray = ConvexBody::shifted_cone(vec({0, 0}), {vec({1, s2})});
    const auto probe = dirichlet_probe(ray, Z2, {{vec({0, 0}), vec({1, s2}), 0.1, 1.0}});
    o.require(probe.any_counterexample() && !probe.results[0].certificate.empty(),
              "irrational ray not reported as a counterexample with certificate");

    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> rhs(0, 4);
    std::uniform_real_distribution<double> center(-3.0, 3.0);
    std::uniform_real_distribution<double> radius(0.8, 4.0);
    int bodies = 0;
    int queries = 0;
    for (int t = 0; t < 20; ++t) {
        ConvexBody P = ConvexBody::space(2);
        if (t % 2 == 0) {
            Polyhedron poly{2, {}};
            for (int i = 0; i < 1 + t % 3; ++i) {
                Vector a = vec({double(coef(rng)), double(coef(rng))});
                if (a.norm() == 0.0) {
                    a[1] = 1.0;
                }
                poly.rows.push_back({a, double(rhs(rng)), true});
            }
            P = ConvexBody::polyhedron(poly);
        } else {
            P = ConvexBody::ball(vec({center(rng), center(rng)}), radius(rng));
        }
        const auto qs = standard_queries(P, Z2, 50);
        if (qs.empty()) {
            continue;
        }
        ++bodies;
        queries += static_cast<int>(qs.size());
        const auto rep = dirichlet_probe(P, Z2, qs, 50);
        o.require(rep.all_witnessed(), "body " + std::to_string(t) + " (" + P.kind() + ") misses a witness");
    }

    Polyhedron wedge{2, {{vec({0, -1}), 0.0, true}, {vec({-1, 1}), 0.0, true}}};
    Matrix shear(2, 2);
    shear << 1, 1, 0, 1;
    const auto inv = affine_invariance_test(ConvexBody::polyhedron(wedge), Z2, {shear, vec({0, 0})},
                                            {{vec({1, 0}), vec({2, 1}), 0.25, 3.0}, {vec({1, 0}), vec({1, 0}), 0.5, 2.0}});
    o.require(inv.agree, "shear test disagrees");
    if (o.pass) {
        o.detail = "witness " + num((*w)[0]) + "," + num((*w)[1]) + "; counterexample certified; " +
                   std::to_string(bodies) + " bodies, " + std::to_string(queries) + " queries witnessed; shear agrees";
    }
    return o;
}

// ------------------------------------------------------------------ 9

Outcome finiteness()
{
    Outcome o;
    const auto Z2 = MixedLattice::standard(2, 0);
    std::mt19937_64 rng(909);
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> rhs(1, 5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int runs = 0;
    int attempts = 0;
    while (runs < 10 && attempts < 200) {
        ++attempts;
        ConvexBody X = ConvexBody::space(2);
        if (runs % 2 == 0) {
            X = ConvexBody::ball(vec({u(rng), u(rng)}), 3.0 + 2.0 * std::abs(u(rng)));
        } else {
            Polyhedron poly{2, {}};
            for (int i = 0; i < 2; ++i) {
                Vector a = vec({double(coef(rng)), double(coef(rng))});
                if (a.norm() == 0.0) {
                    a[0] = 1.0;
                }
                poly.rows.push_back({a, double(rhs(rng)), true});
            }
            X = ConvexBody::polyhedron(poly);
        }
        Polyhedron P{2, {}};
        for (int i = 0; i < 1 + attempts % 3; ++i) {
            Vector a = vec({double(coef(rng)), double(coef(rng))});
            if (a.norm() == 0.0) {
                a[1] = 1.0;
            }
            P.rows.push_back({a, double(rhs(rng)), true});
        }
        const Vector c = vec({u(rng), u(rng)});
        const auto rep = finiteness_experiment(X, ConvexBody::polyhedron(P), Z2, c);
        if (!rep.hypothesis_ok || !rep.dirichlet_class) {
            continue;
        }
        ++runs;
        o.require(!rep.violation, "run " + std::to_string(runs) + ": lattice side stabilizes while the convex side grows");
    }
    o.require(runs == 10, "only " + std::to_string(runs) + " pairs satisfied the hypothesis");
    if (o.pass) {
        o.detail = "10 pairs over boxes 10, 20, 40, no violation";
    }
    return o;
}

}  // namespace

int main()
{
    struct Criterion {
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"example 1 reproduction", example_one},
        {"example 2 reproduction", example_two},
        {"interior-point sanity", ipm_sanity},
        {"weak duality on random instances", weak_duality},
        {"value function properties", value_function_properties},
        {"perturbation equivalences", perturbations},
        {"cut correctness", cuts},
        {"Dirichlet suite", dirichlet_suite},
        {"finiteness experiments", finiteness},
    };
    int failed = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        Outcome out;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        failed += !out.pass;
        std::cout << (out.pass ? "PASS" : "FAIL") << " " << index << " " << c.name << ": " << out.detail << " ["
                  << num(seconds_since(t0)) << " s]" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
