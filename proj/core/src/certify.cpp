#include "cmipdual/certify.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cmipdual {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(10);
    os << (x == 0.0 ? 0.0 : x);
    return os.str();
}

std::string describe_point(const IntVector& x, const Vector& y)
{
    std::ostringstream os;
    os << "x = (";
    for (std::size_t j = 0; j < x.size(); ++j) {
        os << (j ? ", " : "") << x[j];
    }
    os << ")";
    if (y.size() > 0) {
        os.precision(6);
        os << ", y = (";
        for (Eigen::Index j = 0; j < y.size(); ++j) {
            os << (j ? ", " : "") << y[j];
        }
        os << ")";
    }
    return os.str();
}

std::string describe_vector(const Vector& v)
{
    std::ostringstream os;
    os.precision(6);
    os << "(";
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        os << (j ? ", " : "") << (std::abs(v[j]) < 1e-12 ? 0.0 : v[j]);
    }
    os << ")";
    return os.str();
}

enum class Recession { Bounded, Unbounded, Unknown };

struct RecessionResult {
    Recession state = Recession::Unknown;
    Vector ray;
    std::string note;
};

// Decides whether {r : [A G] r in K} is {0} by maximizing +-r_i over the
// unit box, one conic program per coordinate and sign.
RecessionResult recession_cone_trivial(const Instance& inst, const IpmOptions& ipm)
{
    const auto m = static_cast<Eigen::Index>(inst.m());
    const auto n = static_cast<Eigen::Index>(inst.n1() + inst.n2());
    RecessionResult out;
    if (n == 0) {
        out.state = Recession::Bounded;
        return out;
    }
    Matrix G = Matrix::Zero(m + 2 * n, n);
    G.topRows(m) = inst.full_matrix();
    G.middleRows(m, n) = -Matrix::Identity(n, n);
    G.bottomRows(n) = Matrix::Identity(n, n);
    Vector b = Vector::Zero(m + 2 * n);
    b.tail(2 * n).setConstant(-1.0);
    auto blocks = inst.cone().blocks();
    blocks.push_back(ConeBlock::orthant(static_cast<std::size_t>(2 * n)));
    const ConeProduct K(blocks);
    bool unsure = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (double sign : {1.0, -1.0}) {
            Vector d = Vector::Zero(n);
            d[i] = -sign;
            const auto res = solve_continuous(make_instance(Matrix(m + 2 * n, 0), G, b, Vector(0), d, K), ipm);
            if (res.status == SolveStatus::Optimal) {
                if (res.objective < -1e-6) {
                    out.state = Recession::Unbounded;
                    out.ray = *res.primal;
                    return out;
                }
                continue;
            }
            if (res.status == SolveStatus::IllPosed && res.primal && -res.objective > 1e-3 &&
                cone_margin(inst.cone(), Vector(inst.full_matrix() * *res.primal)) >= -1e-7) {
                // The best iterate already exhibits a clear direction.
                out.state = Recession::Unbounded;
                out.ray = *res.primal;
                return out;
            }
            unsure = true;
        }
    }
    out.state = unsure ? Recession::Unknown : Recession::Bounded;
    if (unsure) {
        out.note = "some recession subproblems were numerically unreliable";
    }
    return out;
}

// Scales the integer part of a recession ray to a small integer vector and
// re-checks it, so that it moves integer points to integer points.
std::optional<Vector> integral_direction(const Instance& inst, const Vector& ray)
{
    const auto n1 = static_cast<Eigen::Index>(inst.n1());
    const double top = n1 > 0 ? ray.head(n1).cwiseAbs().maxCoeff() : 0.0;
    const double scale_all = ray.cwiseAbs().maxCoeff();
    if (scale_all <= 0.0) {
        return std::nullopt;
    }
    if (top <= 1e-7 * scale_all) {
        Vector r = ray / scale_all;
        r.head(n1).setZero();
        if (cone_margin(inst.cone(), Vector(inst.full_matrix() * r)) >= -1e-7) {
            return r;
        }
        return std::nullopt;
    }
    for (int q = 1; q <= 20; ++q) {
        Vector r = ray * (q / top);
        bool integral = true;
        for (Eigen::Index j = 0; j < n1; ++j) {
            if (std::abs(r[j] - std::round(r[j])) > 1e-6) {
                integral = false;
                break;
            }
            r[j] = std::round(r[j]);
        }
        if (integral && cone_margin(inst.cone(), Vector(inst.full_matrix() * r)) >= -1e-7 * q) {
            return r;
        }
    }
    return std::nullopt;
}

ConditionResult holds(std::string witness, std::string note = {})
{
    return {ConditionState::Holds, std::move(witness), std::move(note)};
}

ConditionResult fails(std::string witness, std::string note = {})
{
    return {ConditionState::Fails, std::move(witness), std::move(note)};
}

ConditionResult unknown(std::string note)
{
    return {ConditionState::Unknown, {}, std::move(note)};
}

ojson vector_json(const Vector& v)
{
    ojson a = ojson::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(v[i]);
    }
    return a;
}

ojson number_json(double x)
{
    if (std::isfinite(x)) {
        return x == 0.0 ? 0.0 : x;
    }
    return std::isnan(x) ? "nan" : (x > 0 ? "+inf" : "-inf");
}

ojson point_json(const MixedPoint& p)
{
    ojson j;
    j["x"] = p.x;
    j["y"] = vector_json(p.y);
    j["objective"] = number_json(p.objective);
    j["margin"] = number_json(p.margin);
    return j;
}

}  // namespace

std::string to_string(Condition c)
{
    switch (c) {
    case Condition::Thm1StrictMip:
        return "thm1_strict_mip";
    case Condition::Prop1BinaryStrict:
        return "prop1_binary_strict";
    case Condition::CondA_S2Bounded:
        return "condA_S2_bounded";
    case Condition::CondB_S2RationalPolyhedron:
        return "condB_S2_rational_polyhedron";
    case Condition::CondI_BoundedRegion:
        return "cond_i_bounded_region";
    case Condition::CondIV_EssentialStrict:
        return "cond_iv_essential_strict";
    }
    return "?";
}

std::string to_string(ConditionState s)
{
    switch (s) {
    case ConditionState::Holds:
        return "holds";
    case ConditionState::Fails:
        return "fails";
    case ConditionState::Unknown:
        return "unknown";
    }
    return "?";
}

TwoBlockView default_split(const Instance& inst)
{
    std::vector<BlockPart> parts;
    for (const auto& blk : inst.cone().blocks()) {
        parts.push_back(blk.kind() == ConeKind::Orthant ? BlockPart::S2 : BlockPart::S1);
    }
    return TwoBlockView(inst, parts);
}

ConditionMap check_conditions(const TwoBlockView& view, const IntegerBox& box, const MipOptions& opts,
                              const std::optional<MixedPoint>& known_feasible)
{
    const auto& inst = view.parent();
    ConditionMap out;

    const auto strict = find_strict_mixed_point(inst, box, opts);
    out[Condition::Thm1StrictMip] =
        strict ? holds(describe_point(strict->x, strict->y), "margin " + fmt(strict->margin))
               : fails({}, "no strictly feasible mixed-integer point in box " + box.clamped_to(inst).describe());

    if (inst.n1() == 0 || !inst.all_binary()) {
        out[Condition::Prop1BinaryStrict] = fails({}, "integer variables are not all binary");
    } else if (!strict) {
        out[Condition::Prop1BinaryStrict] = fails({}, "all binary, but no strictly feasible point");
    } else {
        // Finite value is checked by the caller's primal solve; here the box is {0,1}^n1.
        out[Condition::Prop1BinaryStrict] = holds(describe_point(strict->x, strict->y));
    }

    const auto s2 = view.part(BlockPart::S2);
    if (!s2) {
        const std::string note = "S2 is empty, i.e. the full space: neither bounded nor a proper rational polyhedron";
        out[Condition::CondA_S2Bounded] = fails({}, note);
        out[Condition::CondB_S2RationalPolyhedron] = fails({}, note);
    } else {
        bool polyhedral = true;
        bool rational = true;
        std::string offender;
        for (std::size_t i = 0; i < inst.cone().size(); ++i) {
            if (view.partition()[i] != BlockPart::S2) {
                continue;
            }
            const auto& blk = inst.cone().blocks()[i];
            if (blk.kind() != ConeKind::Orthant) {
                polyhedral = false;
            }
            if (blk.kind() != ConeKind::Orthant || !inst.is_rational_block(i)) {
                rational = false;
                if (offender.empty()) {
                    offender = blk.describe() + " (block " + std::to_string(i) + ")";
                }
            }
        }
        out[Condition::CondB_S2RationalPolyhedron] =
            rational ? holds("all S2 blocks are rational orthant rows")
                     : fails(offender, "S2 block is not a rational-tagged orthant block");
        if (!polyhedral) {
            out[Condition::CondA_S2Bounded] = unknown("S2 is not polyhedral; boundedness is not decided");
        } else {
            const auto rec = recession_cone_trivial(*s2, opts.ipm);
            switch (rec.state) {
            case Recession::Bounded:
                out[Condition::CondA_S2Bounded] = holds("recession cone of S2 is {0}");
                break;
            case Recession::Unbounded:
                out[Condition::CondA_S2Bounded] = fails("recession direction " + describe_vector(rec.ray));
                break;
            case Recession::Unknown:
                out[Condition::CondA_S2Bounded] = unknown(rec.note);
                break;
            }
        }
    }

    const auto rec = recession_cone_trivial(inst, opts.ipm);
    switch (rec.state) {
    case Recession::Bounded:
        out[Condition::CondI_BoundedRegion] = holds("recession cone of the continuous relaxation is {0}");
        break;
    case Recession::Unbounded: {
        const auto dir = integral_direction(inst, rec.ray);
        if (dir && known_feasible) {
            out[Condition::CondI_BoundedRegion] =
                fails("feasible point " + describe_point(known_feasible->x, known_feasible->y) +
                      " plus multiples of " + describe_vector(*dir));
        } else {
            out[Condition::CondI_BoundedRegion] =
                unknown("relaxation has recession direction " + describe_vector(rec.ray) +
                        (dir ? " but no feasible point is known" : " with no integral multiple found"));
        }
        break;
    }
    case Recession::Unknown:
        out[Condition::CondI_BoundedRegion] = unknown(rec.note);
        break;
    }

    const auto partial = find_strict_partial(view, box, opts);
    out[Condition::CondIV_EssentialStrict] =
        partial ? holds(describe_point(partial->x, partial->y), "S1 margin " + fmt(partial->margin))
                : fails({}, "no mixed-integer point strict in S1 and feasible in S2 in box " +
                                box.clamped_to(inst).describe());
    return out;
}

GapRecord gap_evidence(const Instance& inst, const IntegerBox& box, const std::vector<DualFunction>& duals,
                       const MipOptions& opts)
{
    GapRecord g;
    const auto primal = solve_mip(inst, box, opts);
    g.primal_value = primal.value;
    for (const auto& F : duals) {
        const auto e = evaluate(F, inst.b());
        g.duals.push_back(DualValue{F.kind(), e.value, e.reliable});
        if (e.reliable && e.value > g.best_dual_value) {
            g.best_dual_value = e.value;
            g.best_dual_kind = F.kind();
        }
    }
    if (primal.status != MipStatus::Optimal) {
        g.note = "primal is " + to_string(primal.status) + "; gap undefined";
        return g;
    }
    if (!std::isfinite(g.best_dual_value)) {
        g.note = "no reliable dual value";
        return g;
    }
    g.defined = true;
    g.gap = g.primal_value - g.best_dual_value;
    return g;
}

std::string Verdict::str() const
{
    switch (kind) {
    case VerdictKind::StrongDual:
        return "StrongDual (" + theorem + ")";
    case VerdictKind::WeakOnly:
        return "WeakOnly";
    case VerdictKind::DualInfeasible:
        return "DualInfeasible";
    case VerdictKind::Unknown:
        return "Unknown";
    }
    return "?";
}

CertificateReport certify(const Instance& inst, const std::optional<TwoBlockView>& view, const IntegerBox& box,
                          const CertifyOptions& opts)
{
    CertificateReport rep;
    rep.primal = solve_mip(inst, box, opts.mip);
    rep.cont_dual = check_dual_feasible(inst, opts.mip.ipm);
    const TwoBlockView split = view ? *view : default_split(inst);
    rep.conditions = check_conditions(split, box, opts.mip, rep.primal.witness);

    const bool primal_ok = rep.primal.status == MipStatus::Optimal;
    if (rep.primal.status == MipStatus::BoxLimited) {
        rep.notes.push_back("primal value is box-limited and is not used as proof of finiteness");
    }

    const auto is = [&](Condition c) { return rep.conditions.at(c).state == ConditionState::Holds; };
    const auto strong = [&](std::string name) {
        rep.verdict = Verdict{VerdictKind::StrongDual, std::move(name)};
    };
    if (primal_ok && rep.cont_dual.status == Feasibility::Feasible) {
        strong("Theorem 3 via Corollary 1");
    } else if (primal_ok && is(Condition::Thm1StrictMip)) {
        strong("Theorem 1");
    } else if (primal_ok && is(Condition::Prop1BinaryStrict)) {
        strong("Proposition 1");
    } else if (primal_ok && ((is(Condition::CondIV_EssentialStrict) && is(Condition::CondA_S2Bounded)) ||
                             is(Condition::CondI_BoundedRegion))) {
        // A bounded region is the case S2 = whole region, S1 = full space.
        strong("Theorem ESF-A");
    } else if (primal_ok && is(Condition::CondIV_EssentialStrict) && is(Condition::CondB_S2RationalPolyhedron)) {
        strong("Theorem ESF-B");
    }
    if (rep.verdict.kind != VerdictKind::StrongDual && rep.cont_dual.status == Feasibility::Infeasible) {
        // Subadditive dual feasibility does not depend on b, so an unbounded
        // problem at b - eps e_K shows the dual is infeasible.
        const Vector rhs = inst.b() - opts.perturbation_eps * interior_direction(inst.cone());
        auto res = solve_mip(perturb_rhs(inst, rhs), box, opts.mip);
        if (res.status == MipStatus::UnboundedSuspected) {
            rep.infeasibility_witness = PerturbationWitness{opts.perturbation_eps, rhs, std::move(res)};
            rep.verdict = Verdict{VerdictKind::DualInfeasible, {}};
        } else {
            rep.notes.push_back("continuous dual is infeasible but the perturbed problem shows no descent; "
                                "subadditive dual status left open");
        }
    }
    if (rep.verdict.kind == VerdictKind::Unknown && primal_ok) {
        rep.verdict = Verdict{VerdictKind::WeakOnly, {}};
    }

    // Gap evidence: binary bound rows are materialized so that the
    // relaxation multiplier acts on the same rows.
    const Instance work = materialize_binary_bounds(inst);
    std::vector<DualFunction> duals;
    if (rep.cont_dual.status == Feasibility::Feasible && rep.cont_dual.lambda &&
        static_cast<std::size_t>(rep.cont_dual.lambda->size()) == work.m()) {
        duals.push_back(DualFunction::linear(*rep.cont_dual.lambda));
    }
    // With an infeasible dual the value function is -inf at b - eps e_K and
    // only its box truncation is finite, so it is no dual candidate.
    if (opts.include_value_fn && rep.verdict.kind != VerdictKind::DualInfeasible) {
        duals.push_back(DualFunction::value_fn(work, box, opts.mip));
    }
    rep.gap = gap_evidence(work, box, duals, opts.mip);
    if (rep.verdict.kind == VerdictKind::DualInfeasible) {
        rep.gap.defined = rep.primal.status == MipStatus::Optimal;
        rep.gap.gap = kInf;
        rep.gap.note = "subadditive dual is infeasible: the duality gap is infinite";
    }
    return rep;
}

std::string certificate_json(const CertificateReport& rep, const Instance& inst)
{
    ojson j;
    j["verdict"] = rep.verdict.str();
    ojson primal;
    primal["status"] = to_string(rep.primal.status);
    primal["value"] = number_json(rep.primal.value);
    if (rep.primal.witness) {
        primal["witness"] = point_json(*rep.primal.witness);
    }
    primal["box"] = rep.primal.stage_boxes.empty() ? std::string() : rep.primal.stage_boxes.front().describe();
    if (!rep.primal.note.empty()) {
        primal["note"] = rep.primal.note;
    }
    j["primal"] = primal;

    ojson cd;
    cd["status"] = to_string(rep.cont_dual.status);
    if (rep.cont_dual.lambda) {
        cd["lambda"] = vector_json(*rep.cont_dual.lambda);
    }
    if (rep.cont_dual.ray) {
        cd["ray"] = vector_json(*rep.cont_dual.ray);
        cd["approximate"] = rep.cont_dual.approximate;
    }
    cd["residual"] = rep.cont_dual.residual;
    cd["violation"] = rep.cont_dual.violation;
    if (!rep.cont_dual.note.empty()) {
        cd["note"] = rep.cont_dual.note;
    }
    j["continuous_dual"] = cd;

    ojson conds;
    for (const auto& [c, r] : rep.conditions) {
        ojson e;
        e["state"] = to_string(r.state);
        if (!r.witness.empty()) {
            e["witness"] = r.witness;
        }
        if (!r.note.empty()) {
            e["note"] = r.note;
        }
        conds[to_string(c)] = e;
    }
    j["conditions"] = conds;

    ojson gap;
    gap["defined"] = rep.gap.defined;
    gap["primal_value"] = number_json(rep.gap.primal_value);
    gap["best_dual_value"] = number_json(rep.gap.best_dual_value);
    gap["gap"] = number_json(rep.gap.gap);
    gap["best_dual_kind"] = rep.gap.best_dual_kind;
    ojson ds = ojson::array();
    for (const auto& d : rep.gap.duals) {
        ds.push_back({{"kind", d.kind}, {"value", number_json(d.value)}, {"reliable", d.reliable}});
    }
    gap["duals"] = ds;
    if (!rep.gap.note.empty()) {
        gap["note"] = rep.gap.note;
    }
    j["gap"] = gap;

    if (rep.infeasibility_witness) {
        const auto& w = *rep.infeasibility_witness;
        ojson wj;
        wj["eps"] = w.eps;
        wj["rhs"] = vector_json(w.rhs);
        wj["status"] = to_string(w.result.status);
        ojson pts = ojson::array();
        for (const auto& p : w.result.evidence) {
            pts.push_back(point_json(p));
        }
        wj["points"] = pts;
        ojson stages = ojson::array();
        for (double v : w.result.stage_values) {
            stages.push_back(number_json(v));
        }
        wj["stage_values"] = stages;
        wj["note"] = w.result.note;
        j["infeasibility_witness"] = wj;
    }
    j["notes"] = rep.notes;
    j["variables"] = {{"integer", inst.int_names()}, {"continuous", inst.cont_names()}};
    return j.dump(2) + "\n";
}

}  // namespace cmipdual
