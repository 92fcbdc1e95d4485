#pragma once

#include "cmipdual/dual.hpp"
#include "cmipdual/ipm.hpp"
#include "cmipdual/mip.hpp"
#include "cmipdual/model.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cmipdual {

enum class Condition {
    Thm1StrictMip,             // strict mixed-integer point: A x + G y - b in int K
    Prop1BinaryStrict,         // all integers binary, strict point, finite value
    CondA_S2Bounded,           // side block S2 bounded
    CondB_S2RationalPolyhedron,
    CondI_BoundedRegion,       // whole feasible region bounded
    CondIV_EssentialStrict,    // strict in S1, feasible in S2
};
/// Stable key, e.g. "thm1_strict_mip".
std::string to_string(Condition c);

enum class ConditionState { Holds, Fails, Unknown };
std::string to_string(ConditionState s);

struct ConditionResult {
    ConditionState state = ConditionState::Unknown;
    std::string witness;  // point, ray or block that decides the state
    std::string note;
};

using ConditionMap = std::map<Condition, ConditionResult>;

/// Orthant blocks go to S2 (side constraints), every other block to S1.
TwoBlockView default_split(const Instance& inst);

/// Evaluates the sufficient-condition catalog on the box. `known_feasible`
/// (a feasible point of the parent) lets unbounded directions be turned into
/// a definite "fails" for the bounded-region condition.
ConditionMap check_conditions(const TwoBlockView& view, const IntegerBox& box, const MipOptions& opts = {},
                              const std::optional<MixedPoint>& known_feasible = std::nullopt);

struct DualValue {
    std::string kind;
    double value;
    bool reliable;
};

struct GapRecord {
    bool defined = false;
    double primal_value = 0.0;
    double best_dual_value = -std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    std::string best_dual_kind;
    std::vector<DualValue> duals;
    std::string note;
};

/// Primal value by enumeration, best dual value max_F F(b) over reliable
/// evaluations, and their difference.
GapRecord gap_evidence(const Instance& inst, const IntegerBox& box, const std::vector<DualFunction>& duals,
                       const MipOptions& opts = {});

enum class VerdictKind { StrongDual, WeakOnly, DualInfeasible, Unknown };

struct Verdict {
    VerdictKind kind = VerdictKind::Unknown;
    std::string theorem;  // only for StrongDual
    /// "StrongDual (Theorem 1)", "WeakOnly", ...
    std::string str() const;
};

/// Evidence that the subadditive dual is infeasible: a right-hand side
/// b - eps e_K whose box-restricted problem keeps improving.
struct PerturbationWitness {
    double eps;
    Vector rhs;
    MipResult result;
};

struct CertifyOptions {
    MipOptions mip;
    bool include_value_fn = true;
    double perturbation_eps = 0.5;
};

struct CertificateReport {
    MipResult primal;
    DualCheck cont_dual;
    ConditionMap conditions;
    GapRecord gap;
    Verdict verdict;
    std::optional<PerturbationWitness> infeasibility_witness;
    std::vector<std::string> notes;
};

CertificateReport certify(const Instance& inst, const std::optional<TwoBlockView>& view, const IntegerBox& box,
                          const CertifyOptions& opts = {});

/// Machine-readable certificate (JSON text): verdict, lambda, conditions,
/// gap record and witnesses.
std::string certificate_json(const CertificateReport& rep, const Instance& inst);

}  // namespace cmipdual
