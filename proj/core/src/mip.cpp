#include "cmipdual/mip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cmipdual {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class PointKind { Feasible, Infeasible, Unbounded, Unreliable };

struct PointEval {
    PointKind kind = PointKind::Infeasible;
    double objective = kInf;
    Vector y;
    double margin = -kInf;
};

PointEval evaluate_point(const Instance& inst, const Vector& rhs, const IntVector& x, const MipOptions& opts)
{
    PointEval out;
    const Vector xv = to_vector(x);
    const Vector shifted = rhs - inst.A() * xv;
    const double cx = inst.c().dot(xv);
    if (inst.n2() == 0) {
        out.y = Vector(0);
        out.margin = cone_margin(inst.cone(), Vector(-shifted));
        if (out.margin >= -opts.feasibility_tol) {
            out.kind = PointKind::Feasible;
            out.objective = cx;
        }
        return out;
    }
    const auto m = static_cast<Eigen::Index>(inst.m());
    const auto sub = make_instance(Matrix(m, 0), inst.G(), shifted, Vector(0), inst.d(), inst.cone());
    const auto res = solve_continuous(sub, opts.ipm);
    switch (res.status) {
    case SolveStatus::Optimal:
        out.kind = PointKind::Feasible;
        out.y = *res.primal;
        out.objective = cx + inst.d().dot(out.y);
        out.margin = cone_margin(inst.cone(), Vector(inst.G() * out.y - shifted));
        break;
    case SolveStatus::PrimalInfeasible:
        out.kind = PointKind::Infeasible;
        break;
    case SolveStatus::DualInfeasible:
        out.kind = PointKind::Unbounded;
        out.objective = -kInf;
        break;
    case SolveStatus::IllPosed:
        out.kind = PointKind::Unreliable;
        break;
    }
    return out;
}

struct BoxScan {
    double best = kInf;
    std::optional<MixedPoint> witness;
    std::vector<bool> touch_lower;
    std::vector<bool> touch_upper;
    std::optional<IntVector> unbounded_at;
    std::size_t unreliable = 0;
    std::size_t assignments = 0;
    std::size_t subproblems = 0;
};

bool ties(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

BoxScan scan_box(const Instance& inst, const Vector& rhs, const IntegerBox& box, const MipOptions& opts)
{
    BoxScan scan;
    scan.touch_lower.assign(box.size(), false);
    scan.touch_upper.assign(box.size(), false);
    const auto mark = [&](const IntVector& x, bool reset) {
        if (reset) {
            std::fill(scan.touch_lower.begin(), scan.touch_lower.end(), false);
            std::fill(scan.touch_upper.begin(), scan.touch_upper.end(), false);
        }
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (inst.is_binary(j)) {
                continue;
            }
            if (x[j] == box.lower()[j]) {
                scan.touch_lower[j] = true;
            }
            if (x[j] == box.upper()[j]) {
                scan.touch_upper[j] = true;
            }
        }
    };
    for_each_point(box, [&](const IntVector& x) {
        ++scan.assignments;
        if (inst.n2() > 0) {
            ++scan.subproblems;
        }
        const auto ev = evaluate_point(inst, rhs, x, opts);
        switch (ev.kind) {
        case PointKind::Infeasible:
            return true;
        case PointKind::Unreliable:
            ++scan.unreliable;
            return true;
        case PointKind::Unbounded:
            scan.unbounded_at = x;
            return false;
        case PointKind::Feasible:
            break;
        }
        if (scan.witness && ties(ev.objective, scan.best, opts.tie_tol)) {
            mark(x, false);
        } else if (ev.objective < scan.best) {
            scan.best = ev.objective;
            scan.witness = MixedPoint{x, ev.y, ev.objective, ev.margin};
            mark(x, true);
        }
        return true;
    });
    return scan;
}

bool any_touch(const BoxScan& s)
{
    return std::find(s.touch_lower.begin(), s.touch_lower.end(), true) != s.touch_lower.end() ||
           std::find(s.touch_upper.begin(), s.touch_upper.end(), true) != s.touch_upper.end();
}

IntegerBox expand(const IntegerBox& box, const BoxScan& s, double growth)
{
    IntVector lo = box.lower();
    IntVector hi = box.upper();
    for (std::size_t j = 0; j < box.size(); ++j) {
        const auto width = std::max<std::int64_t>(1, hi[j] - lo[j]);
        const auto step = static_cast<std::int64_t>(std::ceil(growth * static_cast<double>(width)));
        if (s.touch_lower[j]) {
            lo[j] -= step;
        }
        if (s.touch_upper[j]) {
            hi[j] += step;
        }
    }
    return IntegerBox(lo, hi);
}

MipResult solve_with_rhs(const Instance& inst, const Vector& rhs, const IntegerBox& box_in, const MipOptions& opts)
{
    if (box_in.size() != inst.n1()) {
        throw std::invalid_argument("solve_mip: box has " + std::to_string(box_in.size()) + " variables, instance has " +
                                    std::to_string(inst.n1()));
    }
    const IntegerBox box = box_in.clamped_to(inst);
    if (box.cardinality() > static_cast<double>(opts.max_assignments)) {
        throw BoxTooLarge("solve_mip: box " + box.describe() + " has " + std::to_string(box.cardinality()) +
                          " assignments, cap is " + std::to_string(opts.max_assignments));
    }
    MipResult res;
    auto scan = scan_box(inst, rhs, box, opts);
    res.assignments = scan.assignments;
    res.subproblems = scan.subproblems;
    res.stage_boxes.push_back(box);
    res.stage_values.push_back(scan.best);

    if (scan.unbounded_at) {
        res.status = MipStatus::UnboundedSuspected;
        res.value = -kInf;
        res.evidence.push_back(MixedPoint{*scan.unbounded_at, Vector(0), -kInf, 0.0});
        res.note = "continuous subproblem has an improving ray";
        return res;
    }
    if (!scan.witness) {
        res.value = kInf;
        if (scan.unreliable > 0) {
            res.status = MipStatus::BoxLimited;
            res.note = std::to_string(scan.unreliable) + " subproblems were numerically unreliable";
        } else {
            res.status = MipStatus::Infeasible;
        }
        return res;
    }
    res.value = scan.best;
    res.witness = scan.witness;
    res.touches_boundary = any_touch(scan);
    if (scan.unreliable > 0) {
        res.status = MipStatus::BoxLimited;
        res.note = std::to_string(scan.unreliable) + " subproblems were numerically unreliable";
        return res;
    }
    if (!res.touches_boundary || !opts.probe_boundary) {
        res.status = res.touches_boundary ? MipStatus::BoxLimited : MipStatus::Optimal;
        if (res.touches_boundary) {
            res.note = "optimal points touch the box boundary";
        }
        return res;
    }

    // Probe: grow the touched sides and watch the optimum.
    std::vector<MixedPoint> stage_best{*scan.witness};
    IntegerBox current = box;
    BoxScan last = scan;
    bool capped = false;
    for (int k = 0; k < opts.expansions && any_touch(last); ++k) {
        current = expand(current, last, opts.growth);
        if (current.cardinality() > static_cast<double>(opts.max_assignments)) {
            capped = true;
            break;
        }
        last = scan_box(inst, rhs, current, opts);
        res.assignments += last.assignments;
        res.subproblems += last.subproblems;
        res.stage_boxes.push_back(current);
        res.stage_values.push_back(last.best);
        if (last.unbounded_at) {
            res.status = MipStatus::UnboundedSuspected;
            res.value = -kInf;
            res.evidence = stage_best;
            res.evidence.push_back(MixedPoint{*last.unbounded_at, Vector(0), -kInf, 0.0});
            res.note = "continuous subproblem has an improving ray in an expanded box";
            return res;
        }
        if (last.unreliable > 0) {
            res.status = MipStatus::BoxLimited;
            res.note = "numerically unreliable subproblems in an expanded box";
            return res;
        }
        stage_best.push_back(*last.witness);
    }
    const auto& v = res.stage_values;
    const bool stable = std::all_of(v.begin(), v.end(), [&](double x) { return ties(x, v.front(), opts.tie_tol); });
    if (stable) {
        res.status = MipStatus::Optimal;
        res.note = capped ? "value stable until the probe reached the assignment cap"
                          : "value stable under " + std::to_string(v.size() - 1) + " box expansions";
        return res;
    }
    bool decreasing = static_cast<int>(v.size()) == opts.expansions + 1;
    for (std::size_t k = 1; k < v.size() && decreasing; ++k) {
        decreasing = v[k] < v[k - 1] && !ties(v[k], v[k - 1], opts.tie_tol);
    }
    if (decreasing && v.front() - v.back() >= opts.unbounded_drop) {
        res.status = MipStatus::UnboundedSuspected;
        res.value = -kInf;
        res.evidence = stage_best;
        std::ostringstream os;
        os << "objective fell from " << v.front() << " to " << v.back() << " over " << v.size() - 1
           << " box expansions";
        res.note = os.str();
        return res;
    }
    res.status = MipStatus::BoxLimited;
    std::ostringstream os;
    os << "box optimum " << v.front() << " moves to " << v.back() << " in larger boxes";
    if (capped) {
        os << " (probe stopped at the assignment cap)";
    }
    res.note = os.str();
    return res;
}

std::vector<std::int64_t> quantize(const Vector& h)
{
    std::vector<std::int64_t> key(static_cast<std::size_t>(h.size()));
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        key[static_cast<std::size_t>(i)] = std::llround(h[i] * 1e12);
    }
    return key;
}

// max t  s.t.  A x + G y - b - t e in K,  t <= 1, with e zero outside `strict_rows`.
std::optional<StrictPoint> strict_search(const Instance& inst, const IntegerBox& box_in, const Vector& e,
                                         const std::vector<std::size_t>& strict_blocks, const MipOptions& opts,
                                         double threshold)
{
    const IntegerBox box = box_in.clamped_to(inst);
    if (box.cardinality() > static_cast<double>(opts.max_assignments)) {
        throw BoxTooLarge("strict point search: box " + box.describe() + " exceeds the assignment cap");
    }
    const auto m = static_cast<Eigen::Index>(inst.m());
    const auto n2 = static_cast<Eigen::Index>(inst.n2());
    std::vector<bool> strict(inst.cone().size(), false);
    for (auto i : strict_blocks) {
        strict[i] = true;
    }
    std::optional<StrictPoint> found;
    for_each_point(box, [&](const IntVector& x) {
        const Vector rhs = inst.b() - inst.A() * to_vector(x);
        if (n2 == 0) {
            const auto margins = block_margins(inst.cone(), Vector(-rhs));
            double t = kInf;
            bool ok = true;
            for (std::size_t i = 0; i < margins.size(); ++i) {
                if (strict[i]) {
                    t = std::min(t, margins[i]);
                } else if (margins[i] < -opts.feasibility_tol) {
                    ok = false;
                }
            }
            if (ok && t > threshold) {
                found = StrictPoint{x, Vector(0), t};
                return false;
            }
            return true;
        }
        // Variables (y, t); rows [G, -e] (y, t) - rhs in K and -t >= -1.
        std::vector<ConeBlock> blocks = inst.cone().blocks();
        blocks.push_back(ConeBlock::orthant(1));
        Matrix G = Matrix::Zero(m + 1, n2 + 1);
        G.topLeftCorner(m, n2) = inst.G();
        G.block(0, n2, m, 1) = -e;
        G(m, n2) = -1.0;
        Vector b(m + 1);
        b.head(m) = rhs;
        b[m] = -1.0;
        Vector d = Vector::Zero(n2 + 1);
        d[n2] = -1.0;
        const auto sub = make_instance(Matrix(m + 1, 0), G, b, Vector(0), d, ConeProduct(blocks));
        const auto res = solve_continuous(sub, opts.ipm);
        if (res.status != SolveStatus::Optimal) {
            return true;
        }
        const Vector y = res.primal->head(n2);
        const auto margins = block_margins(inst.cone(), Vector(inst.G() * y - rhs));
        double t = kInf;
        bool ok = true;
        for (std::size_t i = 0; i < margins.size(); ++i) {
            if (strict[i]) {
                t = std::min(t, margins[i]);
            } else if (margins[i] < -1e-7) {
                ok = false;
            }
        }
        if (ok && t > threshold) {
            found = StrictPoint{x, y, t};
            return false;
        }
        return true;
    });
    return found;
}

}  // namespace

IntegerBox::IntegerBox(IntVector lower, IntVector upper) : lower_(std::move(lower)), upper_(std::move(upper))
{
    if (lower_.size() != upper_.size()) {
        throw std::invalid_argument("IntegerBox: bound vectors differ in length");
    }
    for (std::size_t j = 0; j < lower_.size(); ++j) {
        if (lower_[j] > upper_[j]) {
            throw std::invalid_argument("IntegerBox: lower bound exceeds upper bound for variable " +
                                        std::to_string(j));
        }
    }
}

IntegerBox IntegerBox::uniform(std::size_t n, std::int64_t lo, std::int64_t hi)
{
    return IntegerBox(IntVector(n, lo), IntVector(n, hi));
}

double IntegerBox::cardinality() const
{
    double out = 1.0;
    for (std::size_t j = 0; j < lower_.size(); ++j) {
        out *= static_cast<double>(upper_[j] - lower_[j] + 1);
    }
    return out;
}

IntegerBox IntegerBox::clamped_to(const Instance& inst) const
{
    IntVector lo = lower_;
    IntVector hi = upper_;
    for (std::size_t j = 0; j < lo.size() && j < inst.n1(); ++j) {
        if (inst.is_binary(j)) {
            lo[j] = std::max<std::int64_t>(lo[j], 0);
            hi[j] = std::min<std::int64_t>(hi[j], 1);
            if (lo[j] > hi[j]) {
                throw std::invalid_argument("IntegerBox: binary variable " + std::to_string(j) +
                                            " has no value in [0, 1]");
            }
        }
    }
    return IntegerBox(lo, hi);
}

std::string IntegerBox::describe() const
{
    std::ostringstream os;
    for (std::size_t j = 0; j < lower_.size(); ++j) {
        os << (j ? "x" : "") << "[" << lower_[j] << "," << upper_[j] << "]";
    }
    return lower_.empty() ? "[]" : os.str();
}

IntegerBox default_box(const Instance& inst, std::int64_t lo, std::int64_t hi)
{
    IntVector lower(inst.n1(), lo);
    IntVector upper(inst.n1(), hi);
    for (std::size_t i = 0; i < inst.cone().size(); ++i) {
        const auto& blk = inst.cone().blocks()[i];
        if (blk.kind() != ConeKind::Orthant) {
            continue;
        }
        for (std::size_t r = inst.cone().offset(i); r < inst.cone().offset(i) + blk.ambient_dim(); ++r) {
            const auto row = static_cast<Eigen::Index>(r);
            if (inst.n2() > 0 && inst.G().row(row).cwiseAbs().maxCoeff() != 0.0) {
                continue;
            }
            Eigen::Index nz = -1;
            int count = 0;
            for (Eigen::Index j = 0; j < inst.A().cols(); ++j) {
                if (inst.A()(row, j) != 0.0) {
                    nz = j;
                    ++count;
                }
            }
            if (count != 1) {
                continue;
            }
            const double a = inst.A()(row, nz);
            const double bound = inst.b()[row] / a;
            const auto j = static_cast<std::size_t>(nz);
            if (a > 0) {
                lower[j] = std::max<std::int64_t>(lower[j], static_cast<std::int64_t>(std::ceil(bound - 1e-9)));
            } else {
                upper[j] = std::min<std::int64_t>(upper[j], static_cast<std::int64_t>(std::floor(bound + 1e-9)));
            }
        }
    }
    for (std::size_t j = 0; j < inst.n1(); ++j) {
        if (inst.is_binary(j)) {
            lower[j] = std::max<std::int64_t>(lower[j], 0);
            upper[j] = std::min<std::int64_t>(upper[j], 1);
        }
        if (lower[j] > upper[j]) {
            // Implied bounds are contradictory; keep a one-point box so the
            // enumeration reports infeasibility instead of throwing here.
            upper[j] = lower[j];
        }
    }
    return IntegerBox(lower, upper);
}

std::string to_string(MipStatus s)
{
    switch (s) {
    case MipStatus::Optimal:
        return "Optimal";
    case MipStatus::Infeasible:
        return "Infeasible";
    case MipStatus::UnboundedSuspected:
        return "UnboundedSuspected";
    case MipStatus::BoxLimited:
        return "BoxLimited";
    }
    return "?";
}

Vector to_vector(const IntVector& x)
{
    Vector v(static_cast<Eigen::Index>(x.size()));
    for (std::size_t j = 0; j < x.size(); ++j) {
        v[static_cast<Eigen::Index>(j)] = static_cast<double>(x[j]);
    }
    return v;
}

MipResult solve_mip(const Instance& inst, const IntegerBox& box, const MipOptions& opts)
{
    return solve_with_rhs(inst, inst.b(), box, opts);
}

ValueFunctionOracle::ValueFunctionOracle(Instance inst, IntegerBox box, MipOptions opts)
    : inst_(std::move(inst)), box_(std::move(box)), opts_(std::move(opts))
{
    if (box_.size() != inst_.n1()) {
        throw std::invalid_argument("ValueFunctionOracle: box dimension differs from n1");
    }
}

ValueEntry ValueFunctionOracle::evaluate(const Vector& h) const
{
    if (static_cast<std::size_t>(h.size()) != inst_.m()) {
        throw std::invalid_argument("value_function: rhs has length " + std::to_string(h.size()) + ", expected " +
                                    std::to_string(inst_.m()));
    }
    const auto key = quantize(h);
    {
        const std::lock_guard<std::mutex> lock(mutex_);
        if (const auto it = cache_.find(key); it != cache_.end()) {
            return it->second;
        }
    }
    const auto res = solve_with_rhs(inst_, h, box_, opts_);
    const ValueEntry entry{res.value, res.status};
    const std::lock_guard<std::mutex> lock(mutex_);
    cache_.emplace(key, entry);
    return entry;
}

std::size_t ValueFunctionOracle::cache_size() const
{
    const std::lock_guard<std::mutex> lock(mutex_);
    return cache_.size();
}

double value_function(const ValueFunctionOracle& oracle, const Vector& h)
{
    return oracle(h);
}

std::optional<StrictPoint> find_strict_mixed_point(const Instance& inst, const IntegerBox& box,
                                                    const MipOptions& opts, double threshold)
{
    std::vector<std::size_t> all(inst.cone().size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    return strict_search(inst, box, interior_direction(inst.cone()), all, opts, threshold);
}

std::optional<StrictPoint> find_strict_partial(const TwoBlockView& view, const IntegerBox& box,
                                                const MipOptions& opts, double threshold)
{
    const auto& inst = view.parent();
    Vector e = interior_direction(inst.cone());
    std::vector<std::size_t> strict;
    for (std::size_t i = 0; i < inst.cone().size(); ++i) {
        const auto off = static_cast<Eigen::Index>(inst.cone().offset(i));
        const auto len = static_cast<Eigen::Index>(inst.cone().blocks()[i].ambient_dim());
        if (view.partition()[i] == BlockPart::S1) {
            strict.push_back(i);
        } else {
            e.segment(off, len).setZero();
        }
    }
    return strict_search(inst, box, e, strict, opts, threshold);
}

}  // namespace cmipdual
