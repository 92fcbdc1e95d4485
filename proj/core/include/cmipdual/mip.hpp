#pragma once

#include "cmipdual/ipm.hpp"
#include "cmipdual/model.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cmipdual {

using IntVector = std::vector<std::int64_t>;

/// Per-variable integer bounds; binary variables are clamped to [0, 1].
class IntegerBox {
public:
    IntegerBox() = default;
    IntegerBox(IntVector lower, IntVector upper);
    /// Same bounds [lo, hi] on every variable.
    static IntegerBox uniform(std::size_t n, std::int64_t lo, std::int64_t hi);

    const IntVector& lower() const noexcept { return lower_; }
    const IntVector& upper() const noexcept { return upper_; }
    std::size_t size() const noexcept { return lower_.size(); }
    /// Number of integer points, as a double (may exceed 64 bits).
    double cardinality() const;
    IntegerBox clamped_to(const Instance& inst) const;
    std::string describe() const;

    bool operator==(const IntegerBox&) const = default;

private:
    IntVector lower_;
    IntVector upper_;
};

/// [lo, hi]^n1 tightened by single-variable orthant rows, binaries to [0, 1].
IntegerBox default_box(const Instance& inst, std::int64_t lo = -20, std::int64_t hi = 20);

class BoxTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class MipStatus { Optimal, Infeasible, UnboundedSuspected, BoxLimited };
std::string to_string(MipStatus s);

struct MixedPoint {
    IntVector x;
    Vector y;
    double objective = 0.0;
    double margin = 0.0;  // cone margin of A x + G y - b
};

struct MipOptions {
    std::size_t max_assignments = 1'000'000;
    /// Margin a point needs to count as feasible when there are no
    /// continuous variables (the check is then a direct margin evaluation).
    double feasibility_tol = 1e-9;
    /// Objective tolerance for ties among optimal points.
    double tie_tol = 1e-9;
    /// Expand sides of the box touched by optimal points to test stability.
    bool probe_boundary = true;
    int expansions = 3;
    double growth = 3.0;            // each touched side moves out by growth * width
    double unbounded_drop = 10.0;  // total decrease that signals unboundedness
    IpmOptions ipm;
};

/// Outcome of box-restricted enumeration.
///
/// value is over `box` (the caller's box): +inf when infeasible, -inf for
/// UnboundedSuspected. BoxLimited means the box optimum moved when the box
/// grew, a subproblem was numerically unreliable, or the probe hit the cap.
struct MipResult {
    MipStatus status = MipStatus::Infeasible;
    double value = 0.0;
    std::optional<MixedPoint> witness;
    /// Points with strictly decreasing objectives (UnboundedSuspected), one per box stage.
    std::vector<MixedPoint> evidence;
    /// Optimal value of each box stage (stage 0 is the caller's box).
    std::vector<double> stage_values;
    std::vector<IntegerBox> stage_boxes;
    bool touches_boundary = false;
    std::size_t assignments = 0;
    std::size_t subproblems = 0;
    std::string note;
};

MipResult solve_mip(const Instance& inst, const IntegerBox& box, const MipOptions& opts = {});

struct ValueEntry {
    double value;
    MipStatus status;
};

/// Memoized value function h -> min { c'x + d'y : A x + G y - h in K } over a box.
class ValueFunctionOracle {
public:
    ValueFunctionOracle(Instance inst, IntegerBox box, MipOptions opts = {});

    const Instance& instance() const noexcept { return inst_; }
    const IntegerBox& box() const noexcept { return box_; }
    const MipOptions& options() const noexcept { return opts_; }

    ValueEntry evaluate(const Vector& h) const;
    double operator()(const Vector& h) const { return evaluate(h).value; }
    std::size_t cache_size() const;

private:
    Instance inst_;
    IntegerBox box_;
    MipOptions opts_;
    mutable std::mutex mutex_;
    mutable std::map<std::vector<std::int64_t>, ValueEntry> cache_;
};

double value_function(const ValueFunctionOracle& oracle, const Vector& h);

struct StrictPoint {
    IntVector x;
    Vector y;
    double margin;
};

/// First integer x in the box (lexicographic order) admitting y with
/// A x + G y - b - t e_K in K for some t > threshold.
std::optional<StrictPoint> find_strict_mixed_point(const Instance& inst, const IntegerBox& box,
                                                    const MipOptions& opts = {}, double threshold = 1e-7);
/// As above, but only S1 rows need the strict margin; S2 rows need margin >= -feasibility tol.
std::optional<StrictPoint> find_strict_partial(const TwoBlockView& view, const IntegerBox& box,
                                                const MipOptions& opts = {}, double threshold = 1e-7);

/// Calls fn(x) for every integer point of the box in lexicographic order
/// (last coordinate fastest); stops early when fn returns false.
template <class Fn>
void for_each_point(const IntegerBox& box, Fn&& fn)
{
    IntVector x = box.lower();
    const auto n = x.size();
    for (std::size_t j = 0; j < n; ++j) {
        if (box.lower()[j] > box.upper()[j]) {
            return;
        }
    }
    while (true) {
        if (!fn(static_cast<const IntVector&>(x))) {
            return;
        }
        std::size_t j = n;
        while (j > 0) {
            --j;
            if (x[j] < box.upper()[j]) {
                ++x[j];
                break;
            }
            x[j] = box.lower()[j];
            if (j == 0) {
                return;
            }
        }
        if (n == 0) {
            return;
        }
    }
}

Vector to_vector(const IntVector& x);

}  // namespace cmipdual
