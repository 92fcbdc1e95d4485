#pragma once

#include "cmipdual/cone.hpp"
#include "cmipdual/mip.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cmipdual {

/// {A z + B t : z integer, t real}. Columns of A are linearly independent
/// and orthogonal to span(B).
class MixedLattice {
public:
    MixedLattice(Matrix integer_gens, Matrix continuous_gens);
    /// Z^n1 x R^n2.
    static MixedLattice standard(std::size_t n1, std::size_t n2);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(A_.rows()); }
    std::size_t integer_rank() const noexcept { return static_cast<std::size_t>(A_.cols()); }
    const Matrix& A() const noexcept { return A_; }
    const Matrix& B() const noexcept { return B_; }
    /// Orthonormal basis of span(B).
    const Matrix& continuous_basis() const noexcept { return Q_; }
    bool has_continuous_part() const noexcept { return Q_.cols() > 0; }
    /// Coordinate form Z^k x R^(n-k).
    bool is_standard() const;

    Vector project_continuous(const Vector& x) const;
    /// Lattice coefficients of the part of x orthogonal to span(B) (least squares).
    Vector coefficients(const Vector& x) const;
    /// ||x - (A round(z) + P_B x)||, the distance to the reconstruction.
    double reconstruction_residual(const Vector& x) const;
    bool contains(const Vector& x, double tol = 1e-9) const;
    /// r in span(A) + span(B), i.e. in aff(M).
    bool spans(const Vector& r, double tol = 1e-7) const;
    Vector lattice_point(const IntVector& z) const;

private:
    Matrix A_;
    Matrix B_;
    Matrix Q_;      // orthonormal basis of span(B)
    Matrix Apinv_;  // left inverse of A
    Matrix S_;      // orthonormal basis of span(A) + span(B)
};

/// M intersected with span(W). A, B and W must have rational entries
/// (recovered with denominators up to 10^6); the integer kernel is computed
/// exactly.
MixedLattice intersect_subspace(const MixedLattice& M, const Matrix& W);

/// a'x <= b
struct HalfSpace {
    Vector a;
    double b = 0.0;
    bool rational = false;
};

struct Polyhedron {
    std::size_t dim = 0;
    std::vector<HalfSpace> rows;
};

struct Ball {
    Vector center;
    double radius = 0.0;
};

/// (x - center)' shape (x - center) <= 1
struct Ellipsoid {
    Matrix shape;
    Vector center;
};

/// apex + cone(generators)
struct ShiftedCone {
    Vector apex;
    std::vector<Vector> generators;
};

class ConvexBody {
public:
    using Variant = std::variant<Polyhedron, Ball, Ellipsoid, ShiftedCone>;

    static ConvexBody polyhedron(Polyhedron p);
    /// Whole space R^n, a rational polyhedron without rows.
    static ConvexBody space(std::size_t n);
    static ConvexBody ball(Vector center, double radius);
    static ConvexBody ellipsoid(Matrix shape, Vector center);
    static ConvexBody shifted_cone(Vector apex, std::vector<Vector> generators);

    const Variant& variant() const noexcept { return body_; }
    std::size_t dim() const noexcept;
    /// "polyhedron", "ball", "ellipsoid" or "shifted-cone".
    std::string kind() const;

    bool contains(const Vector& x, double tol = 1e-9) const;
    bool in_recession_cone(const Vector& r, double tol = 1e-9) const;
    /// Generators of rec(P): lineality directions in both signs, then extreme rays.
    std::vector<Vector> recession_generators() const;
    bool is_bounded() const { return recession_generators().empty(); }
    bool is_rational_polyhedron() const;
    /// A point used to fill in continuous lattice coordinates.
    Vector anchor() const;

private:
    explicit ConvexBody(Variant v) : body_(std::move(v)) {}
    Variant body_;
};

struct HalfLineQuery {
    Vector z;
    Vector r;
    double eps = 0.1;
    double gamma = 0.0;
};

/// Exact distance from w to {z + lambda r : lambda >= gamma}, using the
/// clamped projection lambda* = max(gamma, proj).
double halfline_distance(const Vector& w, const HalfLineQuery& q);

/// Calls fn(z) for every integer vector with ||z||_inf <= bound, in shells of
/// increasing norm and lexicographic order inside a shell, until fn returns true.
template <class Fn>
bool for_each_shell_point(std::size_t k, int bound, Fn&& fn)
{
    if (k == 0) {
        return fn(IntVector{});
    }
    for (std::int64_t rho = 0; rho <= bound; ++rho) {
        IntVector z(k, -rho);
        while (true) {
            bool on_shell = false;
            for (auto v : z) {
                on_shell = on_shell || v == rho || v == -rho;
            }
            if (on_shell && fn(z)) {
                return true;
            }
            std::size_t j = k;
            while (j > 0 && z[j - 1] == rho) {
                z[j - 1] = -rho;
                --j;
            }
            if (j == 0) {
                break;
            }
            ++z[j - 1];
        }
    }
    return false;
}

/// First w in M (in shell order of the lattice coefficients) with distance
/// < eps to the half-line. The continuous part of w is the projection of the
/// nearest half-line point onto span(B). Nothing found does not mean nothing exists.
std::optional<Vector> approximate_halfline(const MixedLattice& M, const HalfLineQuery& q, int search_bound);

/// Same search in M intersected with span(W); z and r must lie in span(W).
std::optional<Vector> approximate_halfline_in(const MixedLattice& M, const Matrix& W, const HalfLineQuery& q,
                                              int search_bound);

/// a t^2 + b t + c = 0 with a non-square discriminant.
struct QuadraticSurd {
    std::int64_t a;
    std::int64_t b;
    std::int64_t c;
    std::string str() const;
};

/// Recognizes x as an irrational root of a small integer quadratic. Returns
/// nothing when x is close to a rational with denominator <= 10^6 or no
/// quadratic with coefficients <= max_coeff matches.
std::optional<QuadraticSurd> identify_quadratic_irrational(double x, int max_coeff = 60);

/// Proof that P intersected with M is a finite list of points.
struct FinitePointsCertificate {
    std::vector<Vector> points;
    std::string argument;
};

/// Implemented for a single ray apex + mu g through a lattice point, with
/// purely discrete M, when g leaves span(A) or two lattice coordinates of g
/// have an irrational ratio; integrality then forces mu = 0.
std::optional<FinitePointsCertificate> finite_section_certificate(const ConvexBody& P, const MixedLattice& M);

enum class ProbeStatus { Witness, NoWitnessWithinBound, Counterexample };
std::string to_string(ProbeStatus s);

struct ProbeResult {
    ProbeStatus status = ProbeStatus::NoWitnessWithinBound;
    std::optional<Vector> witness;
    double distance = 0.0;  // of the witness, or of the closest certified point
    std::string certificate;
};

struct ProbeReport {
    std::vector<ProbeResult> results;
    bool all_witnessed() const;
    bool any_counterexample() const;
};

/// Throws std::invalid_argument when z is not in P and M, r is not in
/// rec(P) or aff(M), eps <= 0 or gamma < 0.
void validate_query(const ConvexBody& P, const MixedLattice& M, const HalfLineQuery& q);

ProbeReport dirichlet_probe(const ConvexBody& P, const MixedLattice& M, const std::vector<HalfLineQuery>& queries,
                            int search_bound = 50);

/// Lattice point of P in shell order (continuous coordinates from the anchor).
std::optional<Vector> find_lattice_point(const ConvexBody& P, const MixedLattice& M, int search_bound);

/// Default suite: from a lattice point of P, every recession generator with
/// eps in {0.5, 0.25} and gamma in {0, 2, 5}; the zero ray for bounded P.
std::vector<HalfLineQuery> standard_queries(const ConvexBody& P, const MixedLattice& M, int search_bound = 50);

enum class RecessionVerdict { Holds, FailsSuspected, Unknown };
std::string to_string(RecessionVerdict v);

struct RecessionReport {
    RecessionVerdict verdict = RecessionVerdict::Unknown;
    std::string reason;
    std::optional<Vector> lattice_point;
    std::vector<Vector> failing_directions;
};

/// Does rec(P) equal rec(conv(P intersected with M))?
RecessionReport recession_condition_check(const ConvexBody& P, const MixedLattice& M, int search_bound = 200);

/// x -> U x + shift
struct AffineMap {
    Matrix U;
    Vector shift;
};

ConvexBody transform(const ConvexBody& P, const AffineMap& T);
HalfLineQuery transform(const HalfLineQuery& q, const AffineMap& T);

struct InvarianceReport {
    double determinant = 0.0;
    ProbeReport original;
    ProbeReport transformed;
    bool agree = false;
};

/// Throws std::invalid_argument unless T maps M onto M.
InvarianceReport affine_invariance_test(const ConvexBody& P, const MixedLattice& M, const AffineMap& T,
                                        const std::vector<HalfLineQuery>& queries, int search_bound = 50);

enum class Trend { Stabilizing, Growing };
std::string to_string(Trend t);

struct SideSeries {
    std::vector<double> values;  // sup per box, -inf when empty
    Trend trend = Trend::Growing;
};

struct FinitenessOptions {
    std::vector<double> box_schedule{10.0, 20.0, 40.0};  // half-widths of cubes
    double stable_tol = 1e-6;
    double interior_shrink = 1e-6;
    MipOptions mip;
    IpmOptions ipm;
};

struct FinitenessReport {
    SideSeries convex_side;   // X and P
    SideSeries lattice_side;  // X and P and M
    bool dirichlet_class = false;  // P rational polyhedron with coordinate M, or bounded
    bool hypothesis_ok = false;    // a point of int(X) in P and M was found
    std::optional<Vector> interior_point;
    bool violation = false;  // lattice side stable while the convex side grows
    std::vector<std::string> caveats;
};

/// sup c'x over X and P (resp. X and P and M) in growing cubes. X and P must
/// be polyhedra, balls or ellipsoids.
FinitenessReport finiteness_experiment(const ConvexBody& X, const ConvexBody& P, const MixedLattice& M,
                                       const Vector& c, const FinitenessOptions& opts = {});

/// JSON text forms. Numbers may be written as "sqrt(n)" or "-sqrt(n)".
ConvexBody parse_body(const std::string& text);
MixedLattice parse_lattice(const std::string& text);
std::vector<HalfLineQuery> parse_queries(const std::string& text);

}  // namespace cmipdual
