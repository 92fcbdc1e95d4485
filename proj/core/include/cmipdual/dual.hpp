#pragma once

#include "cmipdual/mip.hpp"
#include "cmipdual/model.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cmipdual {

/// Raised when a perturbation or dual function cannot be built or used
/// (non-interior v, unbounded value function, non-finite cut coefficient).
class DualFunctionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Data of the w/s-perturbed problem whose value function is an optimal
/// dual function:
///
///   M       = theta(b) - theta(b - v)
///   s coeff = theta(b) - 2 Theta*
///
/// with Theta* the optimum of the continuous problem in (x, y, w) with
/// w in [-eps, 1 + eps].
struct PerturbationSpec {
    Instance inst;
    Vector v;
    std::optional<double> eps;
    double M = 0.0;
    double z_star = 0.0;   // theta(b)
    double z_minus = 0.0;  // theta(b - v)
    std::optional<double> theta_star;
    IntegerBox box;
};

class DualFunction;

struct LinearFn {
    Vector lambda;
};
struct ValueFn {
    std::shared_ptr<const ValueFunctionOracle> oracle;
};
/// F(u, a, b) on R^m x R^n1 x R^n1; evaluation forwards to the base.
struct BinaryLiftedFn {
    std::shared_ptr<const DualFunction> base;
    std::size_t m;
    std::size_t n1;
};
/// F(u) = base(u, 0, ..., 0).
struct RestrictedFn {
    std::shared_ptr<const DualFunction> base;
    std::size_t m;
};
/// Value function of the w/s-perturbed problem, read at (u, 0, 0).
struct FStarFn {
    std::shared_ptr<const PerturbationSpec> spec;
    std::shared_ptr<const ValueFunctionOracle> oracle;
};

/// A candidate for the subadditive dual: a function R^m -> R (extended).
class DualFunction {
public:
    using Variant = std::variant<LinearFn, ValueFn, BinaryLiftedFn, RestrictedFn, FStarFn>;

    static DualFunction linear(Vector lambda);
    static DualFunction value_fn(std::shared_ptr<const ValueFunctionOracle> oracle);
    static DualFunction value_fn(const Instance& inst, const IntegerBox& box, const MipOptions& opts = {});
    /// base must act on R^{m + 2 n1}.
    static DualFunction binary_lifted(DualFunction base, std::size_t m, std::size_t n1);
    /// base must act on R^{m + k} for some k >= 0.
    static DualFunction restricted(DualFunction base, std::size_t m);
    /// Usually obtained from build_fstar.
    static DualFunction fstar(PerturbationSpec spec, std::shared_ptr<const ValueFunctionOracle> oracle);

    const Variant& variant() const noexcept { return v_; }
    std::size_t domain_dim() const;
    /// "linear", "valuefn", "binary-lifted", "restricted" or "fstar".
    std::string kind() const;
    /// lambda when the function is linear (also through lifts and restrictions).
    std::optional<Vector> as_linear() const;

private:
    explicit DualFunction(Variant v) : v_(std::move(v)) {}

    Variant v_;
};

struct Evaluation {
    double value = 0.0;  // may be +-inf
    bool exact = false;  // closed form, no enumeration involved
    /// False when the value is non-finite or the oracle result is only box-limited.
    bool reliable = true;
    std::string note;
};

Evaluation evaluate(const DualFunction& F, const Vector& u);

struct BarEvaluation {
    double value = 0.0;
    bool exact = false;
    bool reliable = true;
    /// (delta, f(delta u) / delta), largest delta first; empty for linear functions.
    std::vector<std::pair<double, double>> profile;
    std::string note;
};

/// Upper directional derivative at 0. Linear functions are exact; oracle
/// variants take the max of f(delta u)/delta over delta = 1e-1 ... 1e-6 and
/// flag the result when the last three ratios spread by more than 1e-3.
BarEvaluation evaluate_bar(const DualFunction& F, const Vector& u);

enum class DualVerdict { Feasible, Infeasible, FeasibleUpToSampling };
std::string to_string(DualVerdict v);

struct ConstraintCheck {
    std::string name;
    double value;   // measured left-hand side
    double target;
    bool ok;
};

struct DualReport {
    DualVerdict verdict = DualVerdict::Feasible;
    bool exact = false;  // subadditivity and monotonicity were certified, not sampled
    std::vector<ConstraintCheck> checks;
    std::optional<std::string> witness;
    std::size_t sampled_pairs = 0;
    std::vector<std::string> warnings;
};

/// Checks the constraints of the subadditive dual for `inst`: column values
/// f(A^j) = -f(-A^j) = c_j and fbar(G^j) = -fbar(-G^j) = d_j (absolute
/// tolerance `tol`), f(0) = 0, and membership in the cone of nondecreasing
/// subadditive functions (exact for linear functions, sampled with a fixed
/// seed otherwise).
DualReport check_dual_feasibility(const DualFunction& F, const Instance& inst, double tol = 1e-6,
                                  std::size_t samples = 500, std::uint64_t seed = 0x5eed);

/// Integer variables ranging over Z with rows x >= -eps e and -x >= -(1+eps) e.
/// Every integer variable of `inst` must be binary.
Instance build_binary_perturbation(const Instance& inst, double eps);

/// Appends a binary variable w with column v and cost theta(b) - theta(b - v).
std::pair<Instance, PerturbationSpec> build_w_perturbation(const Instance& inst, const Vector& v,
                                                           const IntegerBox& box, const MipOptions& opts = {});

/// Conic MIP in (x, w, s; y) whose value function at (u, 0, 0) is f*(u).
/// w and s are restricted to {0, 1}.
Instance fstar_instance(const PerturbationSpec& spec);

/// Builds f*. The box of the returned oracle is `box` x {0,1} x {0,1}.
DualFunction build_fstar(const Instance& inst, double eps, const Vector& v, const IntegerBox& box,
                         const MipOptions& opts = {});

struct Inequality {
    Vector pi;     // n1
    Vector gamma;  // n2
    double pi0 = 0.0;
    std::string provenance;  // kind of the generating function
    std::vector<std::string> warnings;
};

/// pi_j = F(A^j), gamma_j = Fbar(G^j), pi0 = F(b).
Inequality generate_cut(const DualFunction& F, const Instance& inst);

/// "pi . x + gamma . y >= pi0" with variable names, zero terms dropped.
std::string format_inequality(const Inequality& ineq, const Instance& inst);

struct CutCheck {
    bool valid = true;
    std::optional<MixedPoint> witness;  // feasible point violating the cut
    double worst_slack = 0.0;           // min of pi.x + gamma.y - pi0 over checked points
    std::size_t points = 0;
    std::size_t unreliable = 0;
};

/// Enumerates the box; for each integer point, minimizes gamma.y over the
/// continuous fiber and compares with pi0 - 1e-7.
CutCheck verify_cut(const Inequality& ineq, const Instance& inst, const IntegerBox& box,
                    const MipOptions& opts = {});

}  // namespace cmipdual
