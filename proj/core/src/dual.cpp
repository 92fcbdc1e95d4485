#include "cmipdual/dual.hpp"

#include "cmipdual/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace cmipdual {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dim(const DualFunction& F, const Vector& u, const char* where)
{
    if (static_cast<std::size_t>(u.size()) != F.domain_dim()) {
        throw std::invalid_argument(std::string(where) + ": argument has length " + std::to_string(u.size()) +
                                    ", function acts on R^" + std::to_string(F.domain_dim()));
    }
}

Evaluation from_entry(const ValueEntry& e)
{
    Evaluation out;
    out.value = e.value;
    out.exact = false;
    out.reliable = std::isfinite(e.value) && e.status == MipStatus::Optimal;
    if (e.status != MipStatus::Optimal) {
        out.note = "oracle status " + to_string(e.status);
    }
    return out;
}

std::string unique_name(const std::string& base, const Instance& inst)
{
    std::string name = base;
    const auto taken = [&](const std::string& s) {
        return std::find(inst.int_names().begin(), inst.int_names().end(), s) != inst.int_names().end() ||
               std::find(inst.cont_names().begin(), inst.cont_names().end(), s) != inst.cont_names().end();
    };
    while (taken(name)) {
        name += "_";
    }
    return name;
}

// Appends an untagged block of rows to raw instance data.
void append_rows(InstanceData& data, const ConeBlock& blk, const Matrix& a, const Matrix& g, const Vector& rhs)
{
    const auto m = data.A.rows();
    const auto k = a.rows();
    Matrix A(m + k, data.A.cols());
    A << data.A, a;
    Matrix G(m + k, data.G.cols());
    G << data.G, g;
    Vector b(m + k);
    b << data.b, rhs;
    data.A = std::move(A);
    data.G = std::move(G);
    data.b = std::move(b);
    auto blocks = data.K.blocks();
    blocks.push_back(blk);
    data.K = ConeProduct(blocks);
    if (!data.rational_block.empty()) {
        data.rational_block.push_back(false);
    }
    if (!data.exact.empty()) {
        data.exact.resize(static_cast<std::size_t>(m + k));
    }
}

// theta(h) over the box; throws unless the box value is finite.
double finite_value(const Instance& inst, const Vector& h, const IntegerBox& box, const MipOptions& opts,
                    const std::string& label)
{
    const auto res = solve_mip(perturb_rhs(inst, h), box, opts);
    if (!std::isfinite(res.value)) {
        throw DualFunctionError("value function at " + label + " is not finite (" + to_string(res.status) +
                                (res.note.empty() ? "" : ": " + res.note) + ")");
    }
    return res.value;
}

double continuous_theta(const Instance& inst, const Vector& v, double eps, double M, const IpmOptions& opts)
{
    const auto m = static_cast<Eigen::Index>(inst.m());
    const auto n1 = static_cast<Eigen::Index>(inst.n1());
    const auto n2 = static_cast<Eigen::Index>(inst.n2());
    const auto n = n1 + n2 + 1;
    Matrix G = Matrix::Zero(m + 2, n);
    G.topLeftCorner(m, n1) = inst.A();
    G.block(0, n1, m, n2) = inst.G();
    G.block(0, n - 1, m, 1) = v;
    G(m, n - 1) = 1.0;
    G(m + 1, n - 1) = -1.0;
    Vector b(m + 2);
    b << inst.b(), -eps, -(1.0 + eps);
    Vector d(n);
    d << inst.c(), inst.d(), M;
    auto blocks = inst.cone().blocks();
    blocks.push_back(ConeBlock::orthant(2));
    const auto res = solve_continuous(make_instance(Matrix(m + 2, 0), G, b, Vector(0), d, ConeProduct(blocks)), opts);
    if (res.status == SolveStatus::Optimal) {
        return res.objective;
    }
    // The infimum may be finite but not attained; accept the last iterate
    // when it is feasible and the gap has closed to a looser tolerance.
    constexpr double loose = 1e-5;
    if (res.status == SolveStatus::IllPosed && res.primal && res.residuals.primal_res <= loose &&
        res.residuals.dual_res <= loose && res.residuals.gap <= loose) {
        return res.objective;
    }
    throw DualFunctionError("continuous w-problem did not solve (" + to_string(res.status) + ")");
}

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(10);
    os << (x == 0.0 ? 0.0 : x);
    return os.str();
}

std::string describe_vector(const Vector& u)
{
    std::ostringstream os;
    os.precision(6);
    os << "(";
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        os << (i ? ", " : "") << u[i];
    }
    os << ")";
    return os.str();
}

}  // namespace

DualFunction DualFunction::linear(Vector lambda)
{
    return DualFunction(LinearFn{std::move(lambda)});
}

DualFunction DualFunction::value_fn(std::shared_ptr<const ValueFunctionOracle> oracle)
{
    if (!oracle) {
        throw std::invalid_argument("DualFunction::value_fn: null oracle");
    }
    return DualFunction(ValueFn{std::move(oracle)});
}

DualFunction DualFunction::value_fn(const Instance& inst, const IntegerBox& box, const MipOptions& opts)
{
    return value_fn(std::make_shared<const ValueFunctionOracle>(inst, box, opts));
}

DualFunction DualFunction::binary_lifted(DualFunction base, std::size_t m, std::size_t n1)
{
    if (base.domain_dim() != m + 2 * n1) {
        throw std::invalid_argument("DualFunction::binary_lifted: base acts on R^" + std::to_string(base.domain_dim()) +
                                    ", expected R^" + std::to_string(m + 2 * n1));
    }
    return DualFunction(BinaryLiftedFn{std::make_shared<const DualFunction>(std::move(base)), m, n1});
}

DualFunction DualFunction::restricted(DualFunction base, std::size_t m)
{
    if (base.domain_dim() < m) {
        throw std::invalid_argument("DualFunction::restricted: base acts on R^" + std::to_string(base.domain_dim()) +
                                    ", smaller than R^" + std::to_string(m));
    }
    return DualFunction(RestrictedFn{std::make_shared<const DualFunction>(std::move(base)), m});
}

DualFunction DualFunction::fstar(PerturbationSpec spec, std::shared_ptr<const ValueFunctionOracle> oracle)
{
    if (!oracle || oracle->instance().m() != spec.inst.m() + 2) {
        throw std::invalid_argument("DualFunction::fstar: oracle does not match the perturbation");
    }
    return DualFunction(FStarFn{std::make_shared<const PerturbationSpec>(std::move(spec)), std::move(oracle)});
}

std::size_t DualFunction::domain_dim() const
{
    return std::visit(Overloaded{
                          [](const LinearFn& f) { return static_cast<std::size_t>(f.lambda.size()); },
                          [](const ValueFn& f) { return f.oracle->instance().m(); },
                          [](const BinaryLiftedFn& f) { return f.m + 2 * f.n1; },
                          [](const RestrictedFn& f) { return f.m; },
                          [](const FStarFn& f) { return f.spec->inst.m(); },
                      },
                      v_);
}

std::string DualFunction::kind() const
{
    return std::visit(Overloaded{
                          [](const LinearFn&) { return std::string("linear"); },
                          [](const ValueFn&) { return std::string("valuefn"); },
                          [](const BinaryLiftedFn&) { return std::string("binary-lifted"); },
                          [](const RestrictedFn&) { return std::string("restricted"); },
                          [](const FStarFn&) { return std::string("fstar"); },
                      },
                      v_);
}

std::optional<Vector> DualFunction::as_linear() const
{
    return std::visit(Overloaded{
                          [](const LinearFn& f) -> std::optional<Vector> { return f.lambda; },
                          [](const ValueFn&) -> std::optional<Vector> { return std::nullopt; },
                          [](const BinaryLiftedFn& f) { return f.base->as_linear(); },
                          [](const RestrictedFn& f) -> std::optional<Vector> {
                              auto l = f.base->as_linear();
                              if (!l) {
                                  return std::nullopt;
                              }
                              return Vector(l->head(static_cast<Eigen::Index>(f.m)));
                          },
                          [](const FStarFn&) -> std::optional<Vector> { return std::nullopt; },
                      },
                      v_);
}

Evaluation evaluate(const DualFunction& F, const Vector& u)
{
    require_dim(F, u, "evaluate");
    return std::visit(Overloaded{
                          [&](const LinearFn& f) { return Evaluation{f.lambda.dot(u), true, true, {}}; },
                          [&](const ValueFn& f) { return from_entry(f.oracle->evaluate(u)); },
                          [&](const BinaryLiftedFn& f) { return evaluate(*f.base, u); },
                          [&](const RestrictedFn& f) {
                              Vector full = Vector::Zero(static_cast<Eigen::Index>(f.base->domain_dim()));
                              full.head(u.size()) = u;
                              return evaluate(*f.base, full);
                          },
                          [&](const FStarFn& f) {
                              Vector full = Vector::Zero(u.size() + 2);
                              full.head(u.size()) = u;
                              return from_entry(f.oracle->evaluate(full));
                          },
                      },
                      F.variant());
}

BarEvaluation evaluate_bar(const DualFunction& F, const Vector& u)
{
    require_dim(F, u, "evaluate_bar");
    BarEvaluation out;
    if (const auto lambda = F.as_linear()) {
        out.value = lambda->dot(u);
        out.exact = true;
        return out;
    }
    out.value = -kInf;
    bool evals_ok = true;
    for (int k = 1; k <= 6; ++k) {
        const double delta = std::pow(10.0, -k);
        const auto e = evaluate(F, Vector(delta * u));
        evals_ok = evals_ok && e.reliable;
        const double ratio = e.value / delta;
        out.profile.emplace_back(delta, ratio);
        out.value = std::max(out.value, ratio);
    }
    const auto n = out.profile.size();
    double lo = kInf;
    double hi = -kInf;
    for (std::size_t i = n - 3; i < n; ++i) {
        lo = std::min(lo, out.profile[i].second);
        hi = std::max(hi, out.profile[i].second);
    }
    const bool settled = std::isfinite(lo) && std::isfinite(hi) && hi - lo <= 1e-3;
    out.reliable = settled && evals_ok;
    if (!settled) {
        out.note = "profile has not settled (spread " + fmt(hi - lo) + " over the three smallest steps)";
    } else if (!evals_ok) {
        out.note = "some oracle evaluations were not certified optimal";
    } else {
        out.note = "numeric estimate from the profile";
    }
    return out;
}

std::string to_string(DualVerdict v)
{
    switch (v) {
    case DualVerdict::Feasible:
        return "feasible";
    case DualVerdict::Infeasible:
        return "infeasible";
    case DualVerdict::FeasibleUpToSampling:
        return "feasible-up-to-sampling";
    }
    return "?";
}

DualReport check_dual_feasibility(const DualFunction& F, const Instance& inst, double tol, std::size_t samples,
                                  std::uint64_t seed)
{
    if (F.domain_dim() != inst.m()) {
        throw std::invalid_argument("check_dual_feasibility: function acts on R^" + std::to_string(F.domain_dim()) +
                                    ", instance has m = " + std::to_string(inst.m()));
    }
    DualReport rep;
    const auto lambda = F.as_linear();
    rep.exact = lambda.has_value();
    const auto add = [&](std::string name, double value, double target, double limit) {
        const bool ok = std::abs(value - target) <= limit;
        if (!ok && !rep.witness) {
            rep.witness = name + ": got " + fmt(value) + ", expected " + fmt(target);
        }
        rep.checks.push_back(ConstraintCheck{std::move(name), value, target, ok});
    };

    const auto m = static_cast<Eigen::Index>(inst.m());
    add("f(0) = 0", evaluate(F, Vector::Zero(m)).value, 0.0, 1e-9);
    for (std::size_t j = 0; j < inst.n1(); ++j) {
        const Vector col = inst.A().col(static_cast<Eigen::Index>(j));
        const auto& name = inst.int_names()[j];
        const double cj = inst.c()[static_cast<Eigen::Index>(j)];
        const auto plus = evaluate(F, col);
        const auto minus = evaluate(F, Vector(-col));
        add("f(A^j) = c_j for " + name, plus.value, cj, tol);
        add("-f(-A^j) = c_j for " + name, -minus.value, cj, tol);
        if (!plus.reliable || !minus.reliable) {
            rep.warnings.push_back("column " + name + ": oracle value not certified optimal");
        }
    }
    for (std::size_t j = 0; j < inst.n2(); ++j) {
        const Vector col = inst.G().col(static_cast<Eigen::Index>(j));
        const auto& name = inst.cont_names()[j];
        const double dj = inst.d()[static_cast<Eigen::Index>(j)];
        const auto plus = evaluate_bar(F, col);
        const auto minus = evaluate_bar(F, Vector(-col));
        add("fbar(G^j) = d_j for " + name, plus.value, dj, tol);
        add("-fbar(-G^j) = d_j for " + name, -minus.value, dj, tol);
        if (!plus.exact) {
            rep.warnings.push_back("column " + name + ": fbar is a numeric estimate (" + plus.note + ")");
        }
    }

    if (lambda) {
        // Linear f is subadditive; it is K-nondecreasing iff lambda lies in K* = K.
        const auto margins = block_margins(inst.cone(), *lambda);
        for (std::size_t i = 0; i < margins.size(); ++i) {
            const auto name =
                "lambda in dual cone " + inst.cone().blocks()[i].describe() + " (block " + std::to_string(i) + ")";
            const bool ok = margins[i] >= -tol;
            if (!ok && !rep.witness) {
                rep.witness = "monotonicity fails along " + inst.cone().blocks()[i].describe() + " (block " +
                              std::to_string(i) + "): margin " + fmt(margins[i]);
            }
            rep.checks.push_back(ConstraintCheck{name, margins[i], 0.0, ok});
        }
    } else {
        double scale = 1.0;
        scale = std::max(scale, inst.A().size() > 0 ? inst.A().cwiseAbs().maxCoeff() : 0.0);
        scale = std::max(scale, inst.G().size() > 0 ? inst.G().cwiseAbs().maxCoeff() : 0.0);
        scale = std::max(scale, inst.b().size() > 0 ? inst.b().cwiseAbs().maxCoeff() : 0.0);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, scale);
        const auto draw = [&] {
            Vector u(m);
            for (Eigen::Index i = 0; i < m; ++i) {
                u[i] = gauss(rng);
            }
            return u;
        };
        const auto usable = [](const Evaluation& e) { return e.reliable && std::isfinite(e.value); };
        double worst_sub = 0.0;
        double worst_mono = 0.0;
        std::size_t skipped = 0;
        for (std::size_t k = 0; k < samples; ++k) {
            const Vector u = draw();
            const Vector v = draw();
            const auto fu = evaluate(F, u);
            const auto fv = evaluate(F, v);
            const auto fuv = evaluate(F, Vector(u + v));
            if (usable(fu) && usable(fv) && usable(fuv)) {
                ++rep.sampled_pairs;
                const double excess = fuv.value - fu.value - fv.value;
                worst_sub = std::max(worst_sub, excess);
                if (excess > tol && !rep.witness) {
                    rep.witness = "subadditivity fails: f(u+v) - f(u) - f(v) = " + fmt(excess) +
                                  " at u = " + describe_vector(u) + ", v = " + describe_vector(v);
                }
            } else {
                ++skipped;
            }
            // Monotonicity along a random cone direction.
            const Vector dir = project(inst.cone(), draw());
            const auto fup = evaluate(F, Vector(u + dir));
            if (usable(fu) && usable(fup)) {
                const double drop = fu.value - fup.value;
                worst_mono = std::max(worst_mono, drop);
                if (drop > tol && !rep.witness) {
                    rep.witness = "monotonicity fails: f(u) - f(u+k) = " + fmt(drop) + " at u = " +
                                  describe_vector(u) + ", k = " + describe_vector(dir);
                }
            }
        }
        rep.checks.push_back(ConstraintCheck{"sampled subadditivity", worst_sub, 0.0, worst_sub <= tol});
        rep.checks.push_back(ConstraintCheck{"sampled monotonicity", worst_mono, 0.0, worst_mono <= tol});
        if (skipped > 0) {
            rep.warnings.push_back(std::to_string(skipped) +
                                   " sampled pairs skipped (non-finite or box-limited values)");
        }
    }

    const bool all_ok = std::all_of(rep.checks.begin(), rep.checks.end(), [](const auto& c) { return c.ok; });
    if (!all_ok) {
        rep.verdict = DualVerdict::Infeasible;
    } else {
        rep.verdict = rep.exact ? DualVerdict::Feasible : DualVerdict::FeasibleUpToSampling;
    }
    return rep;
}

Instance build_binary_perturbation(const Instance& inst, double eps)
{
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("build_binary_perturbation: eps must lie in (0, 1), got " + fmt(eps));
    }
    if (!inst.all_binary()) {
        throw std::invalid_argument("build_binary_perturbation: every integer variable must be binary");
    }
    const auto n1 = static_cast<Eigen::Index>(inst.n1());
    InstanceData data = inst.data();
    data.binary.assign(static_cast<std::size_t>(n1), false);
    if (n1 == 0) {
        return Instance(std::move(data));
    }
    const Matrix I = Matrix::Identity(n1, n1);
    const Matrix Z = Matrix::Zero(n1, static_cast<Eigen::Index>(inst.n2()));
    const auto blk = ConeBlock::orthant(static_cast<std::size_t>(n1));
    append_rows(data, blk, I, Z, Vector::Constant(n1, -eps));
    append_rows(data, blk, -I, Z, Vector::Constant(n1, -(1.0 + eps)));
    return Instance(std::move(data));
}

std::pair<Instance, PerturbationSpec> build_w_perturbation(const Instance& inst, const Vector& v,
                                                           const IntegerBox& box, const MipOptions& opts)
{
    if (static_cast<std::size_t>(v.size()) != inst.m()) {
        throw std::invalid_argument("build_w_perturbation: v has length " + std::to_string(v.size()) +
                                    ", expected " + std::to_string(inst.m()));
    }
    const double margin = cone_margin(inst.cone(), v);
    if (!(margin > 0.0)) {
        throw DualFunctionError("build_w_perturbation: v is not in the interior of K (margin " + fmt(margin) + ")");
    }
    const double z_star = finite_value(inst, inst.b(), box, opts, "b");
    const double z_minus = finite_value(inst, Vector(inst.b() - v), box, opts, "b - v");
    const double M = z_star - z_minus;

    InstanceData data = inst.data();
    const auto m = static_cast<Eigen::Index>(inst.m());
    const auto n1 = static_cast<Eigen::Index>(inst.n1());
    Matrix A(m, n1 + 1);
    A << inst.A(), v;
    data.A = std::move(A);
    Vector c(n1 + 1);
    c << inst.c(), M;
    data.c = std::move(c);
    data.binary = inst.binary_mask();
    data.binary.push_back(true);
    data.int_names.push_back(unique_name("w", inst));
    for (auto& row : data.exact) {
        row.reset();  // v is arbitrary real data
    }
    if (!data.rational_block.empty()) {
        for (std::size_t i = 0; i < inst.cone().size(); ++i) {
            const auto off = static_cast<Eigen::Index>(inst.cone().offset(i));
            const auto len = static_cast<Eigen::Index>(inst.cone().blocks()[i].ambient_dim());
            if (data.rational_block[i] && !v.segment(off, len).isZero(0.0)) {
                data.rational_block[i] = false;
            }
        }
        // Surviving rational blocks get exact rows re-derived from doubles.
    }
    PerturbationSpec spec{inst, v, std::nullopt, M, z_star, z_minus, std::nullopt, box};
    return {Instance(std::move(data)), std::move(spec)};
}

Instance fstar_instance(const PerturbationSpec& spec)
{
    if (!spec.eps || !spec.theta_star) {
        throw std::invalid_argument("fstar_instance: eps and Theta* are required");
    }
    const auto& inst = spec.inst;
    const double eps = *spec.eps;
    const auto m = static_cast<Eigen::Index>(inst.m());
    const auto n1 = static_cast<Eigen::Index>(inst.n1());
    const auto n2 = static_cast<Eigen::Index>(inst.n2());
    // Integer variables (x, w, s); rows A x + G y + v w - b s >= u,
    // w + eps s >= 0, -w + (1 + eps) s >= 0.
    Matrix A = Matrix::Zero(m + 2, n1 + 2);
    A.topLeftCorner(m, n1) = inst.A();
    A.block(0, n1, m, 1) = spec.v;
    A.block(0, n1 + 1, m, 1) = -inst.b();
    A(m, n1) = 1.0;
    A(m, n1 + 1) = eps;
    A(m + 1, n1) = -1.0;
    A(m + 1, n1 + 1) = 1.0 + eps;
    Matrix G = Matrix::Zero(m + 2, n2);
    G.topRows(m) = inst.G();
    Vector c(n1 + 2);
    c << inst.c(), spec.M, spec.z_star - 2.0 * *spec.theta_star;
    auto blocks = inst.cone().blocks();
    blocks.push_back(ConeBlock::orthant(2));

    InstanceData data;
    data.A = std::move(A);
    data.G = std::move(G);
    data.b = Vector::Zero(m + 2);
    data.c = std::move(c);
    data.d = inst.d();
    data.K = ConeProduct(blocks);
    data.binary = inst.binary_mask();
    data.binary.push_back(true);
    data.binary.push_back(true);
    data.int_names = inst.int_names();
    data.int_names.push_back(unique_name("w", inst));
    data.int_names.push_back(unique_name("s", inst));
    data.cont_names = inst.cont_names();
    return Instance(std::move(data));
}

DualFunction build_fstar(const Instance& inst, double eps, const Vector& v, const IntegerBox& box,
                         const MipOptions& opts)
{
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("build_fstar: eps must lie in (0, 1), got " + fmt(eps));
    }
    auto [perturbed, spec] = build_w_perturbation(inst, v, box, opts);
    (void)perturbed;
    spec.eps = eps;
    spec.theta_star = continuous_theta(inst, v, eps, spec.M, opts.ipm);
    auto lifted = fstar_instance(spec);
    IntVector lo = box.lower();
    IntVector hi = box.upper();
    lo.insert(lo.end(), {0, 0});
    hi.insert(hi.end(), {1, 1});
    auto oracle = std::make_shared<const ValueFunctionOracle>(std::move(lifted), IntegerBox(lo, hi), opts);
    return DualFunction::fstar(std::move(spec), std::move(oracle));
}

Inequality generate_cut(const DualFunction& F, const Instance& inst)
{
    if (F.domain_dim() != inst.m()) {
        throw std::invalid_argument("generate_cut: function acts on R^" + std::to_string(F.domain_dim()) +
                                    ", instance has m = " + std::to_string(inst.m()));
    }
    const auto m = static_cast<Eigen::Index>(inst.m());
    if (const double f0 = evaluate(F, Vector::Zero(m)).value; std::abs(f0) > 1e-9) {
        throw DualFunctionError("generate_cut: f(0) = " + fmt(f0) + ", expected 0");
    }
    if (const auto lambda = F.as_linear()) {
        // Interior-point multipliers sit on the boundary only up to solver accuracy.
        const double margin = cone_margin(inst.cone(), *lambda);
        if (margin < -1e-7 * std::max(1.0, lambda->cwiseAbs().maxCoeff())) {
            throw DualFunctionError("generate_cut: lambda is not in the dual cone (margin " + fmt(margin) + ")");
        }
    }
    Inequality ineq;
    ineq.provenance = F.kind();
    const auto need_finite = [&](double x, const std::string& what) {
        if (!std::isfinite(x)) {
            throw DualFunctionError("generate_cut: " + what + " is not finite");
        }
        return x;
    };
    ineq.pi.resize(static_cast<Eigen::Index>(inst.n1()));
    for (std::size_t j = 0; j < inst.n1(); ++j) {
        const auto e = evaluate(F, inst.A().col(static_cast<Eigen::Index>(j)));
        ineq.pi[static_cast<Eigen::Index>(j)] = need_finite(e.value, "F(A^j) for " + inst.int_names()[j]);
        if (!e.reliable) {
            ineq.warnings.push_back("F(A^j) for " + inst.int_names()[j] + " is box-limited");
        }
    }
    ineq.gamma.resize(static_cast<Eigen::Index>(inst.n2()));
    bool numeric_bar = false;
    for (std::size_t j = 0; j < inst.n2(); ++j) {
        const auto e = evaluate_bar(F, inst.G().col(static_cast<Eigen::Index>(j)));
        ineq.gamma[static_cast<Eigen::Index>(j)] = need_finite(e.value, "Fbar(G^j) for " + inst.cont_names()[j]);
        numeric_bar = numeric_bar || !e.exact;
    }
    if (numeric_bar) {
        ineq.warnings.push_back("numeric fbar: gamma comes from a finite-difference profile");
    }
    const auto eb = evaluate(F, inst.b());
    ineq.pi0 = need_finite(eb.value, "F(b)");
    if (!eb.reliable) {
        ineq.warnings.push_back("F(b) is box-limited");
    }
    if (std::holds_alternative<FStarFn>(F.variant())) {
        ineq.warnings.push_back("f* evaluated with w and s restricted to {0, 1}");
    }
    return ineq;
}

std::string format_inequality(const Inequality& ineq, const Instance& inst)
{
    std::ostringstream os;
    bool first = true;
    const auto term = [&](double coef, const std::string& name) {
        if (coef == 0.0) {
            return;
        }
        if (first) {
            os << fmt(coef) << " " << name;
        } else {
            os << (coef < 0 ? " - " : " + ") << fmt(std::abs(coef)) << " " << name;
        }
        first = false;
    };
    for (Eigen::Index j = 0; j < ineq.pi.size(); ++j) {
        term(ineq.pi[j], inst.int_names()[static_cast<std::size_t>(j)]);
    }
    for (Eigen::Index j = 0; j < ineq.gamma.size(); ++j) {
        term(ineq.gamma[j], inst.cont_names()[static_cast<std::size_t>(j)]);
    }
    if (first) {
        os << "0";
    }
    os << " >= " << fmt(ineq.pi0);
    return os.str();
}

CutCheck verify_cut(const Inequality& ineq, const Instance& inst, const IntegerBox& box_in, const MipOptions& opts)
{
    if (static_cast<std::size_t>(ineq.pi.size()) != inst.n1() ||
        static_cast<std::size_t>(ineq.gamma.size()) != inst.n2()) {
        throw std::invalid_argument("verify_cut: inequality does not match the instance dimensions");
    }
    const IntegerBox box = box_in.clamped_to(inst);
    if (box.cardinality() > static_cast<double>(opts.max_assignments)) {
        throw BoxTooLarge("verify_cut: box " + box.describe() + " exceeds the assignment cap");
    }
    constexpr double slack_tol = 1e-7;
    CutCheck out;
    out.worst_slack = kInf;
    const auto m = static_cast<Eigen::Index>(inst.m());
    for_each_point(box, [&](const IntVector& x) {
        const Vector xv = to_vector(x);
        const Vector rhs = inst.b() - inst.A() * xv;
        double slack = 0.0;
        Vector y(0);
        double margin = 0.0;
        if (inst.n2() == 0) {
            margin = cone_margin(inst.cone(), Vector(-rhs));
            if (margin < -opts.feasibility_tol) {
                return true;
            }
            slack = ineq.pi.dot(xv) - ineq.pi0;
        } else {
            const auto res = solve_continuous(
                make_instance(Matrix(m, 0), inst.G(), rhs, Vector(0), ineq.gamma, inst.cone()), opts.ipm);
            if (res.status == SolveStatus::PrimalInfeasible) {
                return true;
            }
            if (res.status == SolveStatus::IllPosed) {
                ++out.unreliable;
                return true;
            }
            if (res.status == SolveStatus::DualInfeasible) {
                slack = -kInf;
            } else {
                y = *res.primal;
                margin = cone_margin(inst.cone(), Vector(inst.G() * y - rhs));
                slack = ineq.pi.dot(xv) + res.objective - ineq.pi0;
            }
        }
        ++out.points;
        out.worst_slack = std::min(out.worst_slack, slack);
        if (slack < -slack_tol && out.valid) {
            out.valid = false;
            const double obj = inst.c().dot(xv) + (y.size() > 0 ? inst.d().dot(y) : 0.0);
            out.witness = MixedPoint{x, y, obj, margin};
        }
        return true;
    });
    return out;
}

}  // namespace cmipdual
