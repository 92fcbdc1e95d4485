#pragma once

#include "cmipdual/cone.hpp"
#include "cmipdual/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cmipdual {

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, IllPosed };
std::string to_string(SolveStatus s);

struct Residuals {
    double primal_res = 0.0;
    double dual_res = 0.0;
    double gap = 0.0;
};

/// Outcome of a continuous conic solve of
///
///     min d'y  s.t.  G y - b in K        (dual: max b'l  s.t.  G'l = d, l in K)
///
/// `certificate` holds a Farkas vector l (G'l = 0, l in K, b'l = 1) for
/// PrimalInfeasible, or an improving ray r (G r in K, d'r = -1) for
/// DualInfeasible. For IllPosed the fields describe the best iterate seen.
struct ContinuousResult {
    SolveStatus status = SolveStatus::IllPosed;
    std::optional<Vector> primal;
    std::optional<Vector> dual_lambda;
    double objective = 0.0;
    Residuals residuals;
    std::optional<Vector> certificate;
    int iterations = 0;
};

struct IpmOptions {
    double tol = 1e-8;                // residuals and relative gap
    double infeasibility_tol = 1e-8;  // certificate residual and tau/kappa ratio
    int max_iterations = 200;
    double step_fraction = 0.99;
};

/// Homogeneous self-dual interior-point method with Nesterov-Todd scaling
/// and Mehrotra predictor-corrector steps. Requires inst.n1() == 0.
/// Never throws for numerical trouble; that is reported as IllPosed.
ContinuousResult solve_continuous(const Instance& inst, const IpmOptions& opts = {});

struct CheckItem {
    std::string name;
    double value;  // measured violation (0 = perfect)
    double limit;
    bool ok;
};

struct CheckReport {
    bool pass = true;
    std::vector<CheckItem> checks;
    /// Names of failed checks, comma separated.
    std::string failures() const;
};

/// Recomputes every claim of `res` from the raw data of `inst` (treated as
/// continuous: columns [A G], objective (c, d)).
CheckReport verify_certificate(const Instance& inst, const ContinuousResult& res, double tol);
/// l in K and [A G]'l = (c, d).
CheckReport verify_dual_point(const Instance& inst, const Vector& lambda, double tol);
/// [A G] r in K and (c, d)'r = -1 (r already normalized).
CheckReport verify_improving_ray(const Instance& inst, const Vector& ray, double tol);
/// [A G]'l = 0, l in K, b'l = 1.
CheckReport verify_farkas(const Instance& inst, const Vector& lambda, double tol);

enum class Feasibility { Feasible, Infeasible, Unknown };
std::string to_string(Feasibility f);

/// Feasibility of the dual of the continuous relaxation,
///     l in K,  [A G]' l = (c, d),
/// where binary variables contribute their bound rows. On Infeasible,
/// `ray` is r with [A G] r in K (up to `violation`) and (c, d)'r = -1.
/// `approximate` marks certificates that only hold up to a small cone
/// violation (weak infeasibility, no exact certificate exists).
struct DualCheck {
    Feasibility status = Feasibility::Unknown;
    std::optional<Vector> lambda;
    std::optional<Vector> ray;
    bool approximate = false;
    double residual = 0.0;   // equality residual of lambda
    double violation = 0.0;  // cone violation of lambda or of the ray image
    std::string note;
};
DualCheck check_dual_feasible(const Instance& inst, const IpmOptions& opts = {});

// Building blocks, exposed for testing.

/// Nesterov-Todd scaling for interior s, z: returns dense W with
/// W z = W^{-T} s = lambda.
struct NtScaling {
    Matrix W;
    Matrix Winv;
    Vector lambda;
};
NtScaling nt_scaling(const ConeProduct& K, const Vector& s, const Vector& z);
/// Jordan product u o v blockwise.
Vector jordan_product(const ConeProduct& K, const Vector& u, const Vector& v);
/// Solves lambda o x = r for x, where lambda is an NT scaled point
/// (PSD blocks of lambda must be diagonal).
Vector jordan_divide(const ConeProduct& K, const Vector& lambda, const Vector& r);
/// Largest alpha with x + alpha*dx in K (x interior); +inf if unbounded.
double max_step(const ConeProduct& K, const Vector& x, const Vector& dx);

}  // namespace cmipdual
