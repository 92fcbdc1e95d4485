#include "cmipdual/dirichlet.hpp"

#include "cmipdual/rational.hpp"

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cmipdual {

namespace {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(10);
    os << (x == 0.0 ? 0.0 : x);
    return os.str();
}

std::string describe(const Vector& v)
{
    std::ostringstream os;
    os.precision(8);
    os << "(";
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        os << (j ? ", " : "") << (std::abs(v[j]) < 1e-12 ? 0.0 : v[j]);
    }
    os << ")";
    return os.str();
}

double scale_of(const Vector& v)
{
    return std::max(1.0, v.size() ? v.cwiseAbs().maxCoeff() : 0.0);
}

Matrix orthonormal_basis(const Matrix& B)
{
    if (B.cols() == 0 || B.rows() == 0) {
        return Matrix(B.rows(), 0);
    }
    Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double tol = 1e-10 * std::max(1.0, sv(0));
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > tol) {
        ++r;
    }
    return svd.matrixU().leftCols(r);
}

/// Orthonormal basis of {x : R x = 0} in R^n.
Matrix null_space(const Matrix& R, Eigen::Index n)
{
    if (R.rows() == 0) {
        return Matrix::Identity(n, n);
    }
    Eigen::JacobiSVD<Matrix> svd(R, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tol = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > tol) {
        ++r;
    }
    return svd.matrixV().rightCols(n - r);
}

Eigen::Index matrix_rank(const Matrix& M)
{
    return orthonormal_basis(M).cols();
}

// ---- exact arithmetic for subspace intersection ----

using RMatrix = std::vector<std::vector<Rational>>;

Rational recover_rational(double x)
{
    if (!std::isfinite(x)) {
        throw std::invalid_argument("non-finite entry in lattice or subspace data");
    }
    // Continued fraction convergents with denominators up to 10^6.
    const double tol = 1e-14 * std::max(1.0, std::abs(x));
    double rest = x;
    __int128 p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int it = 0; it < 40; ++it) {
        const double a = std::floor(rest);
        if (std::abs(a) > 1e15) {
            break;
        }
        const auto ai = static_cast<__int128>(a);
        const __int128 p2 = ai * p1 + p0;
        const __int128 q2 = ai * q1 + q0;
        if (q2 > 1'000'000) {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - x) <= tol) {
            return Rational(static_cast<std::int64_t>(p1), static_cast<std::int64_t>(q1));
        }
        const double frac = rest - a;
        if (frac == 0.0) {
            break;
        }
        rest = 1.0 / frac;
    }
    throw std::invalid_argument("entry " + fmt(x) + " is not a rational with denominator <= 10^6");
}

RMatrix to_rational(const Matrix& M)
{
    RMatrix out(static_cast<std::size_t>(M.rows()), std::vector<Rational>(static_cast<std::size_t>(M.cols())));
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            out[i][j] = recover_rational(M(i, j));
        }
    }
    return out;
}

RMatrix transpose(const RMatrix& M, std::size_t cols)
{
    RMatrix out(cols, std::vector<Rational>(M.size()));
    for (std::size_t i = 0; i < M.size(); ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            out[j][i] = M[i][j];
        }
    }
    return out;
}

RMatrix multiply(const RMatrix& X, const RMatrix& Y, std::size_t inner, std::size_t cols)
{
    RMatrix out(X.size(), std::vector<Rational>(cols));
    for (std::size_t i = 0; i < X.size(); ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            Rational s;
            for (std::size_t t = 0; t < inner; ++t) {
                s = s + X[i][t] * Y[t][j];
            }
            out[i][j] = s;
        }
    }
    return out;
}

/// Reduced row echelon form in place over the first `cols` columns; returns pivot columns.
std::vector<std::size_t> rref(RMatrix& M, std::size_t cols)
{
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < M.size(); ++col) {
        std::size_t p = row;
        while (p < M.size() && M[p][col] == Rational(0)) {
            ++p;
        }
        if (p == M.size()) {
            continue;
        }
        std::swap(M[p], M[row]);
        const Rational inv = Rational(1) / M[row][col];
        for (auto& v : M[row]) {
            v = v * inv;
        }
        for (std::size_t i = 0; i < M.size(); ++i) {
            if (i != row && !(M[i][col] == Rational(0))) {
                const Rational f = M[i][col];
                for (std::size_t j = 0; j < M[i].size(); ++j) {
                    M[i][j] = M[i][j] - f * M[row][j];
                }
            }
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

/// Basis of {v : M v = 0}, one vector per free column.
std::vector<std::vector<Rational>> rational_kernel(RMatrix M, std::size_t cols)
{
    const auto pivots = rref(M, cols);
    std::vector<bool> is_pivot(cols, false);
    for (auto p : pivots) {
        is_pivot[p] = true;
    }
    std::vector<std::vector<Rational>> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) {
            continue;
        }
        std::vector<Rational> v(cols);
        v[f] = Rational(1);
        for (std::size_t i = 0; i < pivots.size(); ++i) {
            v[pivots[i]] = -M[i][f];
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

/// One solution of M t = rhs with free variables at zero.
std::vector<Rational> particular_solution(RMatrix M, std::size_t cols, const std::vector<Rational>& rhs)
{
    for (std::size_t i = 0; i < M.size(); ++i) {
        M[i].push_back(rhs[i]);
    }
    const auto pivots = rref(M, cols);
    for (std::size_t i = pivots.size(); i < M.size(); ++i) {
        if (!(M[i][cols] == Rational(0))) {
            throw std::logic_error("inconsistent system in subspace intersection");
        }
    }
    std::vector<Rational> t(cols);
    for (std::size_t i = 0; i < pivots.size(); ++i) {
        t[pivots[i]] = M[i][cols];
    }
    return t;
}

std::int64_t checked_sub_mul(std::int64_t a, std::int64_t q, std::int64_t b)
{
    std::int64_t prod = 0;
    std::int64_t out = 0;
    if (__builtin_mul_overflow(q, b, &prod) || __builtin_sub_overflow(a, prod, &out)) {
        throw std::overflow_error("integer kernel overflow");
    }
    return out;
}

/// Lattice basis of {z in Z^k : F z = 0} by unimodular column operations.
std::vector<IntVector> integer_kernel(std::vector<IntVector> F, std::size_t k)
{
    std::vector<IntVector> U(k, IntVector(k, 0));
    for (std::size_t j = 0; j < k; ++j) {
        U[j][j] = 1;
    }
    auto col_op = [&](std::size_t target, std::int64_t q, std::size_t source) {
        for (auto& row : F) {
            row[target] = checked_sub_mul(row[target], q, row[source]);
        }
        for (auto& row : U) {
            row[target] = checked_sub_mul(row[target], q, row[source]);
        }
    };
    auto swap_cols = [&](std::size_t a, std::size_t b) {
        for (auto& row : F) {
            std::swap(row[a], row[b]);
        }
        for (auto& row : U) {
            std::swap(row[a], row[b]);
        }
    };
    std::size_t piv = 0;
    for (std::size_t r = 0; r < F.size() && piv < k; ++r) {
        while (true) {
            std::size_t best = k;
            for (std::size_t j = piv; j < k; ++j) {
                if (F[r][j] != 0 && (best == k || std::llabs(F[r][j]) < std::llabs(F[r][best]))) {
                    best = j;
                }
            }
            if (best == k) {
                break;
            }
            swap_cols(piv, best);
            bool done = true;
            for (std::size_t j = piv + 1; j < k; ++j) {
                if (F[r][j] != 0) {
                    col_op(j, F[r][j] / F[r][piv], piv);
                    done = done && F[r][j] == 0;
                }
            }
            if (done) {
                ++piv;
                break;
            }
        }
    }
    std::vector<IntVector> basis;
    for (std::size_t j = piv; j < k; ++j) {
        IntVector v(k);
        for (std::size_t i = 0; i < k; ++i) {
            v[i] = U[i][j];
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

IntVector integer_row(const std::vector<Rational>& row)
{
    std::int64_t l = 1;
    for (const auto& v : row) {
        l = std::lcm(l, v.den());
        if (l <= 0) {
            throw std::overflow_error("integer kernel overflow");
        }
    }
    IntVector out(row.size());
    std::int64_t g = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        const Rational scaled = row[j] * Rational(l);
        out[j] = scaled.num();
        g = std::gcd(g, out[j]);
    }
    if (g > 1) {
        for (auto& v : out) {
            v /= g;
        }
    }
    return out;
}

Vector to_double(const std::vector<Rational>& v)
{
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = v[i].to_double();
    }
    return out;
}

// ---- convex bodies ----

/// v in cone(gens) up to tol.
bool in_generated_cone(const std::vector<Vector>& gens, const Vector& v, double tol)
{
    const double scale = std::max(1.0, v.norm());
    if (v.norm() <= tol) {
        return true;
    }
    std::vector<Vector> nz;
    for (const auto& g : gens) {
        if (g.norm() > 0.0) {
            nz.push_back(g);
        }
    }
    if (nz.empty()) {
        return false;
    }
    if (nz.size() == 1) {
        const auto& g = nz.front();
        const double mu = v.dot(g) / g.squaredNorm();
        return mu >= -tol && (v - mu * g).norm() <= tol * scale;
    }
    // min t s.t. (G mu - v, t) in SOC, mu >= 0.
    const auto n = v.size();
    const auto p = static_cast<Eigen::Index>(nz.size());
    Matrix Gm(p + n + 1, p + 1);
    Gm.setZero();
    Vector b = Vector::Zero(p + n + 1);
    for (Eigen::Index j = 0; j < p; ++j) {
        Gm(j, j) = 1.0;
        Gm.block(p, j, n, 1) = nz[static_cast<std::size_t>(j)];
    }
    b.segment(p, n) = v;
    Gm(p + n, p) = 1.0;
    Vector d = Vector::Zero(p + 1);
    d[p] = 1.0;
    const auto inst = make_instance(Matrix(p + n + 1, 0), Gm, b, Vector(0), d,
                                    ConeProduct({ConeBlock::orthant(static_cast<std::size_t>(p)),
                                                 ConeBlock::second_order(static_cast<std::size_t>(n + 1))}));
    const auto res = solve_continuous(inst);
    if (!res.primal) {
        return false;
    }
    const Vector mu = res.primal->head(p);
    Matrix G(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        G.col(j) = nz[static_cast<std::size_t>(j)];
    }
    const Vector mu_plus = mu.cwiseMax(0.0);
    return (G * mu_plus - v).norm() <= std::max(tol, 1e-6) * scale;
}

void check_dim(const Vector& v, std::size_t n, const char* what)
{
    if (static_cast<std::size_t>(v.size()) != n) {
        throw std::invalid_argument(std::string(what) + " has dimension " + std::to_string(v.size()) + ", expected " +
                                    std::to_string(n));
    }
    if (!v.allFinite()) {
        throw std::invalid_argument(std::string(what) + " has non-finite entries");
    }
}

std::vector<Vector> polyhedron_recession(const Polyhedron& P)
{
    const auto n = static_cast<Eigen::Index>(P.dim);
    Matrix R(static_cast<Eigen::Index>(P.rows.size()), n);
    for (std::size_t i = 0; i < P.rows.size(); ++i) {
        R.row(static_cast<Eigen::Index>(i)) = P.rows[i].a.transpose() / std::max(1e-300, P.rows[i].a.norm());
    }
    const Matrix L = null_space(R, n);
    std::vector<Vector> gens;
    for (Eigen::Index j = 0; j < L.cols(); ++j) {
        gens.emplace_back(L.col(j));
        gens.emplace_back(-L.col(j));
    }
    const auto d = n - L.cols();
    if (d == 0) {
        return gens;
    }
    auto accept = [&](Vector v) {
        v /= v.norm();
        if (R.rows() > 0 && (R * v).maxCoeff() > 1e-9) {
            return;
        }
        for (const auto& g : gens) {
            if ((g - v).norm() < 1e-8) {
                return;
            }
        }
        gens.push_back(std::move(v));
    };
    // Extreme rays of the pointed part: d - 1 active rows plus orthogonality to L.
    const auto m = static_cast<std::size_t>(R.rows());
    const auto need = static_cast<std::size_t>(d - 1);
    if (need > m) {
        return gens;
    }
    std::vector<std::size_t> pick(need);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
        Matrix sys(static_cast<Eigen::Index>(need) + L.cols(), n);
        for (std::size_t t = 0; t < need; ++t) {
            sys.row(static_cast<Eigen::Index>(t)) = R.row(static_cast<Eigen::Index>(pick[t]));
        }
        if (L.cols() > 0) {
            sys.bottomRows(L.cols()) = L.transpose();
        }
        const Matrix K = null_space(sys, n);
        if (K.cols() == 1) {
            accept(K.col(0));
            accept(-K.col(0));
        }
        // next combination
        std::size_t i = need;
        while (i > 0 && pick[i - 1] == m - need + i - 1) {
            --i;
        }
        if (i == 0) {
            break;
        }
        ++pick[i - 1];
        for (std::size_t j = i; j < need; ++j) {
            pick[j] = pick[j - 1] + 1;
        }
    }
    return gens;
}

// ---- half-line search ----

void check_query_shape(const HalfLineQuery& q, std::size_t n)
{
    check_dim(q.z, n, "query point z");
    check_dim(q.r, n, "query direction r");
    if (!(q.eps > 0.0)) {
        throw std::invalid_argument("eps must be positive");
    }
    if (!(q.gamma >= 0.0) || !std::isfinite(q.gamma)) {
        throw std::invalid_argument("gamma must be a finite nonnegative number");
    }
}

/// Shell search over lattice coefficients; `accept` filters candidates that
/// are already within eps of the half-line.
template <class Accept>
std::optional<Vector> search_halfline(const MixedLattice& M, const HalfLineQuery& q, int bound, Accept&& accept)
{
    const Matrix& Q = M.continuous_basis();
    const Vector Qr = q.r - Q * (Q.transpose() * q.r);
    const Vector Qz = q.z - Q * (Q.transpose() * q.z);
    const double rr = Qr.squaredNorm();
    std::optional<Vector> found;
    for_each_shell_point(M.integer_rank(), bound, [&](const IntVector& z) {
        const Vector p = M.lattice_point(z);
        double lambda = q.gamma;
        if (rr > 1e-300) {
            lambda = std::max(q.gamma, (p - Qz).dot(Qr) / rr);
        }
        const Vector w = p + M.project_continuous(Vector(q.z + lambda * q.r));
        if (halfline_distance(w, q) < q.eps && accept(w)) {
            found = w;
            return true;
        }
        return false;
    });
    return found;
}

std::int64_t isqrt_exact(std::int64_t D)
{
    if (D < 0) {
        return -1;
    }
    auto s = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(D))));
    for (std::int64_t t = std::max<std::int64_t>(0, s - 2); t <= s + 2; ++t) {
        if (t * t == D) {
            return t;
        }
    }
    return -1;
}

bool near_rational(double x)
{
    const double tol = 1e-14 * std::max(1.0, std::abs(x));
    double rest = x;
    double p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int it = 0; it < 40; ++it) {
        const double a = std::floor(rest);
        const double p2 = a * p1 + p0;
        const double q2 = a * q1 + q0;
        if (q2 > 1e6) {
            return false;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (std::abs(p1 / q1 - x) <= tol) {
            return true;
        }
        const double frac = rest - a;
        if (frac == 0.0) {
            return true;
        }
        rest = 1.0 / frac;
    }
    return false;
}

// ---- conic encodings for the finiteness experiment ----

struct RowBuilder {
    std::vector<Matrix> rows;  // coefficient blocks over (xi, y)
    std::vector<Vector> rhs;
    std::vector<ConeBlock> cones;
};

/// Adds the constraints of `body` (shrunk by delta) for x = P v.
void append_body(RowBuilder& out, const ConvexBody& body, const Matrix& P, double delta)
{
    const auto n = P.rows();
    const auto nv = P.cols();
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Polyhedron>) {
                if (b.rows.empty()) {
                    return;
                }
                const auto m = static_cast<Eigen::Index>(b.rows.size());
                Matrix C(m, nv);
                Vector h(m);
                for (Eigen::Index i = 0; i < m; ++i) {
                    const auto& row = b.rows[static_cast<std::size_t>(i)];
                    C.row(i) = -(row.a.transpose() * P);
                    h[i] = -row.b + delta * std::max(1.0, row.a.norm());
                }
                out.rows.push_back(C);
                out.rhs.push_back(h);
                out.cones.push_back(ConeBlock::orthant(static_cast<std::size_t>(m)));
            } else if constexpr (std::is_same_v<T, Ball>) {
                Matrix C = Matrix::Zero(n + 1, nv);
                C.topRows(n) = P;
                Vector h(n + 1);
                h.head(n) = b.center;
                h[n] = -(b.radius - delta);
                out.rows.push_back(C);
                out.rhs.push_back(h);
                out.cones.push_back(ConeBlock::second_order(static_cast<std::size_t>(n + 1)));
            } else if constexpr (std::is_same_v<T, Ellipsoid>) {
                const Matrix Lt = Eigen::LLT<Matrix>(b.shape).matrixU();  // shape = Lt' Lt
                Matrix C = Matrix::Zero(n + 1, nv);
                C.topRows(n) = Lt * P;
                Vector h(n + 1);
                h.head(n) = Lt * b.center;
                h[n] = -(1.0 - delta);
                out.rows.push_back(C);
                out.rhs.push_back(h);
                out.cones.push_back(ConeBlock::second_order(static_cast<std::size_t>(n + 1)));
            } else {
                throw std::invalid_argument("shifted cones cannot be used in the finiteness experiment");
            }
        },
        body.variant());
}

/// max c'x over the bodies and the cube |x_i| <= R with x = Xi xi + Xc y;
/// returned as a minimization of -c'x.
Instance region_instance(const std::vector<std::pair<const ConvexBody*, double>>& bodies, const Matrix& Xi,
                         const Matrix& Xc, const Vector& c, double R)
{
    const auto n = Xi.rows();
    Matrix P(n, Xi.cols() + Xc.cols());
    P << Xi, Xc;
    RowBuilder rb;
    for (const auto& [body, delta] : bodies) {
        append_body(rb, *body, P, delta);
    }
    Matrix C(2 * n, P.cols());
    C << P, -P;
    rb.rows.push_back(C);
    rb.rhs.push_back(Vector::Constant(2 * n, -R));
    rb.cones.push_back(ConeBlock::orthant(static_cast<std::size_t>(2 * n)));

    Eigen::Index m = 0;
    for (const auto& r : rb.rows) {
        m += r.rows();
    }
    Matrix all(m, P.cols());
    Vector b(m);
    Eigen::Index at = 0;
    for (std::size_t i = 0; i < rb.rows.size(); ++i) {
        all.middleRows(at, rb.rows[i].rows()) = rb.rows[i];
        b.segment(at, rb.rhs[i].size()) = rb.rhs[i];
        at += rb.rows[i].rows();
    }
    const Vector ci = -(Xi.transpose() * c);
    const Vector d = -(Xc.transpose() * c);
    return make_instance(all.leftCols(Xi.cols()), all.rightCols(Xc.cols()), b, ci, d, ConeProduct(rb.cones));
}

Trend classify(const std::vector<double>& v, double tol)
{
    const double a = v[v.size() - 2];
    const double b = v.back();
    if (std::isinf(a) && std::isinf(b) && a < 0 && b < 0) {
        return Trend::Stabilizing;
    }
    if (std::isfinite(a) && std::isfinite(b) && std::abs(b - a) < tol) {
        return Trend::Stabilizing;
    }
    return Trend::Growing;
}

// ---- JSON ----

double parse_number(const json& j)
{
    if (j.is_number()) {
        return j.get<double>();
    }
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
        double sign = 1.0;
        if (!s.empty() && s[0] == '-') {
            sign = -1.0;
            s.erase(0, 1);
        }
        if (s.rfind("sqrt(", 0) == 0 && s.back() == ')') {
            return sign * std::sqrt(std::stod(s.substr(5, s.size() - 6)));
        }
        const auto slash = s.find('/');
        if (slash != std::string::npos) {
            return sign * std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
        }
        return sign * std::stod(s);
    }
    throw std::invalid_argument("expected a number, got " + j.dump());
}

Vector parse_vector(const json& j)
{
    if (!j.is_array()) {
        throw std::invalid_argument("expected an array, got " + j.dump());
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = parse_number(j[i]);
    }
    return v;
}

Matrix parse_columns(const json& j, std::size_t n)
{
    Matrix M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j.size()));
    for (std::size_t c = 0; c < j.size(); ++c) {
        const Vector v = parse_vector(j[c]);
        check_dim(v, n, "lattice generator");
        M.col(static_cast<Eigen::Index>(c)) = v;
    }
    return M;
}

json parse_doc(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace

// ---------------------------------------------------------------- MixedLattice

MixedLattice::MixedLattice(Matrix integer_gens, Matrix continuous_gens) :
    A_(std::move(integer_gens)), B_(std::move(continuous_gens))
{
    if (A_.rows() != B_.rows()) {
        throw std::invalid_argument("lattice generators have different dimensions");
    }
    if (!A_.allFinite() || !B_.allFinite()) {
        throw std::invalid_argument("lattice generators must be finite");
    }
    if (matrix_rank(A_) != A_.cols()) {
        throw std::invalid_argument("integer generators are linearly dependent");
    }
    if (A_.cols() > 0 && B_.cols() > 0) {
        const double scale = std::max(1.0, A_.cwiseAbs().maxCoeff()) * std::max(1.0, B_.cwiseAbs().maxCoeff());
        if ((B_.transpose() * A_).cwiseAbs().maxCoeff() > 1e-9 * scale) {
            throw std::invalid_argument("integer generators must be orthogonal to the continuous span");
        }
    }
    Q_ = orthonormal_basis(B_);
    Apinv_ = A_.cols() > 0 ? Matrix((A_.transpose() * A_).ldlt().solve(A_.transpose()))
                           : Matrix(0, A_.rows());
    Matrix AB(A_.rows(), A_.cols() + Q_.cols());
    AB << A_, Q_;
    S_ = orthonormal_basis(AB);
}

MixedLattice MixedLattice::standard(std::size_t n1, std::size_t n2)
{
    const auto n = static_cast<Eigen::Index>(n1 + n2);
    const Matrix I = Matrix::Identity(n, n);
    return MixedLattice(I.leftCols(static_cast<Eigen::Index>(n1)), I.rightCols(static_cast<Eigen::Index>(n2)));
}

bool MixedLattice::is_standard() const
{
    const auto n = A_.rows();
    const auto k = A_.cols();
    if (Q_.cols() != n - k) {
        return false;
    }
    const Matrix I = Matrix::Identity(n, n);
    if (A_ != I.leftCols(k)) {
        return false;
    }
    return k == 0 || Q_.cols() == 0 || Q_.topRows(k).cwiseAbs().maxCoeff() <= 1e-12;
}

Vector MixedLattice::project_continuous(const Vector& x) const
{
    if (Q_.cols() == 0) {
        return Vector::Zero(x.size());
    }
    return Q_ * (Q_.transpose() * x);
}

Vector MixedLattice::coefficients(const Vector& x) const
{
    return Apinv_ * (x - project_continuous(x));
}

double MixedLattice::reconstruction_residual(const Vector& x) const
{
    const Vector z = coefficients(x);
    return (x - A_ * z.array().round().matrix() - project_continuous(x)).norm();
}

bool MixedLattice::contains(const Vector& x, double tol) const
{
    return static_cast<std::size_t>(x.size()) == dim() && reconstruction_residual(x) <= tol * scale_of(x);
}

bool MixedLattice::spans(const Vector& r, double tol) const
{
    if (static_cast<std::size_t>(r.size()) != dim()) {
        return false;
    }
    const Vector res = r - S_ * (S_.transpose() * r);
    return res.norm() <= tol * std::max(1.0, r.norm());
}

Vector MixedLattice::lattice_point(const IntVector& z) const
{
    Vector v(static_cast<Eigen::Index>(z.size()));
    for (std::size_t i = 0; i < z.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = static_cast<double>(z[i]);
    }
    return A_ * v;
}

MixedLattice intersect_subspace(const MixedLattice& M, const Matrix& W)
{
    const auto n = M.dim();
    if (static_cast<std::size_t>(W.rows()) != n) {
        throw std::invalid_argument("subspace basis has the wrong dimension");
    }
    const auto k = M.integer_rank();
    const auto l = static_cast<std::size_t>(M.B().cols());
    const RMatrix A = to_rational(M.A());
    const RMatrix B = to_rational(M.B());
    const RMatrix Wt = transpose(to_rational(W), static_cast<std::size_t>(W.cols()));

    // Normals of W: x in span(W) iff N' x = 0.
    const auto normals = rational_kernel(Wt, n);
    const RMatrix Nt = normals;  // q x n
    const RMatrix C = multiply(Nt, A, n, k);
    const RMatrix D = multiply(Nt, B, n, l);

    // Rows e with e' D = 0 eliminate t; the integer part must satisfy (E C) z = 0.
    const auto left = rational_kernel(transpose(D, l), Nt.size());
    const RMatrix F = multiply(left, C, Nt.size(), k);
    std::vector<IntVector> Fi;
    for (const auto& row : F) {
        Fi.push_back(integer_row(row));
    }
    const auto zs = integer_kernel(Fi, k);

    const auto kerD = rational_kernel(D, l);
    Matrix Bc(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kerD.size()));
    for (std::size_t j = 0; j < kerD.size(); ++j) {
        Bc.col(static_cast<Eigen::Index>(j)) = M.B() * to_double(kerD[j]);
    }
    const Matrix Qc = orthonormal_basis(Bc);

    Matrix Ai(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(zs.size()));
    for (std::size_t j = 0; j < zs.size(); ++j) {
        std::vector<Rational> rhs(D.size());
        for (std::size_t i = 0; i < D.size(); ++i) {
            Rational s;
            for (std::size_t t = 0; t < k; ++t) {
                s = s + C[i][t] * Rational(zs[j][t]);
            }
            rhs[i] = -s;
        }
        const Vector t = l > 0 ? to_double(particular_solution(D, l, rhs)) : Vector(0);
        Vector p = M.lattice_point(zs[j]);
        if (l > 0) {
            p += M.B() * t;
        }
        if (Qc.cols() > 0) {
            p -= Qc * (Qc.transpose() * p);
        }
        Ai.col(static_cast<Eigen::Index>(j)) = p;
    }
    return MixedLattice(Ai, Qc);
}

// ---------------------------------------------------------------- ConvexBody

ConvexBody ConvexBody::polyhedron(Polyhedron p)
{
    for (const auto& row : p.rows) {
        check_dim(row.a, p.dim, "polyhedron row");
        if (!std::isfinite(row.b)) {
            throw std::invalid_argument("polyhedron right-hand side must be finite");
        }
    }
    return ConvexBody(std::move(p));
}

ConvexBody ConvexBody::space(std::size_t n)
{
    return ConvexBody(Polyhedron{n, {}});
}

ConvexBody ConvexBody::ball(Vector center, double radius)
{
    check_dim(center, static_cast<std::size_t>(center.size()), "ball center");
    if (!(radius >= 0.0) || !std::isfinite(radius)) {
        throw std::invalid_argument("ball radius must be finite and nonnegative");
    }
    return ConvexBody(Ball{std::move(center), radius});
}

ConvexBody ConvexBody::ellipsoid(Matrix shape, Vector center)
{
    const auto n = static_cast<std::size_t>(center.size());
    check_dim(center, n, "ellipsoid center");
    if (static_cast<std::size_t>(shape.rows()) != n || static_cast<std::size_t>(shape.cols()) != n ||
        !shape.allFinite()) {
        throw std::invalid_argument("ellipsoid shape must be a finite " + std::to_string(n) + "x" +
                                    std::to_string(n) + " matrix");
    }
    if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, shape.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("ellipsoid shape must be symmetric");
    }
    Eigen::LLT<Matrix> llt(shape);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("ellipsoid shape must be positive definite");
    }
    return ConvexBody(Ellipsoid{std::move(shape), std::move(center)});
}

ConvexBody ConvexBody::shifted_cone(Vector apex, std::vector<Vector> generators)
{
    const auto n = static_cast<std::size_t>(apex.size());
    check_dim(apex, n, "cone apex");
    for (const auto& g : generators) {
        check_dim(g, n, "cone generator");
    }
    return ConvexBody(ShiftedCone{std::move(apex), std::move(generators)});
}

std::size_t ConvexBody::dim() const noexcept
{
    return std::visit(
        [](const auto& b) -> std::size_t {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Polyhedron>) {
                return b.dim;
            } else if constexpr (std::is_same_v<T, ShiftedCone>) {
                return static_cast<std::size_t>(b.apex.size());
            } else {
                return static_cast<std::size_t>(b.center.size());
            }
        },
        body_);
}

std::string ConvexBody::kind() const
{
    static const char* names[] = {"polyhedron", "ball", "ellipsoid", "shifted-cone"};
    return names[body_.index()];
}

bool ConvexBody::contains(const Vector& x, double tol) const
{
    if (static_cast<std::size_t>(x.size()) != dim()) {
        return false;
    }
    return std::visit(
        [&](const auto& b) -> bool {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Polyhedron>) {
                for (const auto& row : b.rows) {
                    if (row.a.dot(x) - row.b > tol * std::max(1.0, row.a.norm()) * scale_of(x)) {
                        return false;
                    }
                }
                return true;
            } else if constexpr (std::is_same_v<T, Ball>) {
                return (x - b.center).norm() <= b.radius + tol * scale_of(x);
            } else if constexpr (std::is_same_v<T, Ellipsoid>) {
                const Vector d = x - b.center;
                return d.dot(b.shape * d) <= 1.0 + tol * scale_of(x);
            } else {
                return in_generated_cone(b.generators, x - b.apex, tol);
            }
        },
        body_);
}

bool ConvexBody::in_recession_cone(const Vector& r, double tol) const
{
    if (static_cast<std::size_t>(r.size()) != dim()) {
        return false;
    }
    return std::visit(
        [&](const auto& b) -> bool {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Polyhedron>) {
                for (const auto& row : b.rows) {
                    if (row.a.dot(r) > tol * std::max(1.0, row.a.norm()) * std::max(1.0, r.norm())) {
                        return false;
                    }
                }
                return true;
            } else if constexpr (std::is_same_v<T, ShiftedCone>) {
                return in_generated_cone(b.generators, r, tol);
            } else {
                return r.norm() <= tol;
            }
        },
        body_);
}

std::vector<Vector> ConvexBody::recession_generators() const
{
    return std::visit(
        [](const auto& b) -> std::vector<Vector> {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Polyhedron>) {
                return polyhedron_recession(b);
            } else if constexpr (std::is_same_v<T, ShiftedCone>) {
                std::vector<Vector> out;
                for (const auto& g : b.generators) {
                    if (g.norm() > 0.0) {
                        out.push_back(g);
                    }
                }
                return out;
            } else {
                return {};
            }
        },
        body_);
}

bool ConvexBody::is_rational_polyhedron() const
{
    const auto* p = std::get_if<Polyhedron>(&body_);
    return p && std::all_of(p->rows.begin(), p->rows.end(), [](const HalfSpace& h) { return h.rational; });
}

Vector ConvexBody::anchor() const
{
    return std::visit(
        [&](const auto& b) -> Vector {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Polyhedron>) {
                return Vector::Zero(static_cast<Eigen::Index>(b.dim));
            } else if constexpr (std::is_same_v<T, ShiftedCone>) {
                return b.apex;
            } else {
                return b.center;
            }
        },
        body_);
}

// ---------------------------------------------------------------- half-lines

double halfline_distance(const Vector& w, const HalfLineQuery& q)
{
    if (w.size() != q.z.size() || q.r.size() != q.z.size()) {
        throw std::invalid_argument("half-line distance: dimension mismatch");
    }
    const double rr = q.r.squaredNorm();
    double lambda = q.gamma;
    if (rr > 0.0) {
        lambda = std::max(q.gamma, (w - q.z).dot(q.r) / rr);
    }
    return (w - q.z - lambda * q.r).norm();
}

std::optional<Vector> approximate_halfline(const MixedLattice& M, const HalfLineQuery& q, int search_bound)
{
    check_query_shape(q, M.dim());
    if (!M.contains(q.z)) {
        throw std::invalid_argument("z = " + describe(q.z) + " is not a lattice point");
    }
    if (!M.spans(q.r)) {
        throw std::invalid_argument("r = " + describe(q.r) + " is outside the affine hull of the lattice");
    }
    return search_halfline(M, q, search_bound, [](const Vector&) { return true; });
}

std::optional<Vector> approximate_halfline_in(const MixedLattice& M, const Matrix& W, const HalfLineQuery& q,
                                              int search_bound)
{
    const auto L = intersect_subspace(M, W);
    const Matrix Wb = orthonormal_basis(W);
    for (const Vector* v : {&q.z, &q.r}) {
        if (v->size() != W.rows() || (*v - Wb * (Wb.transpose() * *v)).norm() > 1e-9 * std::max(1.0, v->norm())) {
            throw std::invalid_argument(describe(*v) + " does not lie in the subspace");
        }
    }
    return approximate_halfline(L, q, search_bound);
}

std::string QuadraticSurd::str() const
{
    std::ostringstream os;
    auto term = [&](std::int64_t coef, const char* var, bool first) {
        if (coef == 0) {
            return first;
        }
        if (!first) {
            os << (coef < 0 ? " - " : " + ");
        } else if (coef < 0) {
            os << "-";
        }
        const auto mag = std::llabs(coef);
        if (mag != 1 || *var == '\0') {
            os << mag;
        }
        os << var;
        return false;
    };
    bool first = term(a, "t^2", true);
    first = term(b, "t", first);
    term(c, "", first);
    os << " = 0";
    return os.str();
}

std::optional<QuadraticSurd> identify_quadratic_irrational(double x, int max_coeff)
{
    if (!std::isfinite(x) || near_rational(x)) {
        return std::nullopt;
    }
    const double x2 = x * x;
    for (std::int64_t a = 1; a <= max_coeff; ++a) {
        for (std::int64_t b = -max_coeff; b <= max_coeff; ++b) {
            const double val = static_cast<double>(a) * x2 + static_cast<double>(b) * x;
            const double cr = std::round(-val);
            if (std::abs(cr) > 1e12) {
                continue;
            }
            const double tol = 1e-10 * (1.0 + std::abs(static_cast<double>(a) * x2) + std::abs(static_cast<double>(b) * x));
            if (std::abs(val + cr) > tol) {
                continue;
            }
            const auto c = static_cast<std::int64_t>(cr);
            if (std::gcd(std::gcd(a, std::llabs(b)), std::llabs(c)) != 1) {
                continue;
            }
            const std::int64_t D = b * b - 4 * a * c;
            if (D > 0 && isqrt_exact(D) < 0) {
                return QuadraticSurd{a, b, c};
            }
        }
    }
    return std::nullopt;
}

std::optional<FinitePointsCertificate> finite_section_certificate(const ConvexBody& P, const MixedLattice& M)
{
    const auto* cone = std::get_if<ShiftedCone>(&P.variant());
    if (!cone || M.has_continuous_part() || !M.contains(cone->apex)) {
        return std::nullopt;
    }
    const auto gens = P.recession_generators();
    if (gens.size() != 1) {
        return std::nullopt;
    }
    const Vector& g = gens.front();
    FinitePointsCertificate cert;
    cert.points.push_back(cone->apex);
    if (!M.spans(g)) {
        cert.argument = "the ray direction " + describe(g) +
                        " leaves the span of the lattice, so apex + mu g is a lattice point only for mu = 0";
        return cert;
    }
    const Vector u = M.coefficients(g);
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        for (Eigen::Index j = 0; j < u.size(); ++j) {
            if (i == j || std::abs(u[i]) < 1e-12 || std::abs(u[j]) < 1e-12) {
                continue;
            }
            const auto surd = identify_quadratic_irrational(u[i] / u[j]);
            if (!surd) {
                continue;
            }
            std::ostringstream os;
            os << "lattice coordinates of the ray direction have ratio u" << i + 1 << "/u" << j + 1 << " = "
               << fmt(u[i] / u[j]) << ", a root of " << surd->str()
               << " with non-square discriminant, hence irrational; mu u" << i + 1 << " and mu u" << j + 1
               << " both integral forces mu = 0, so the body meets the lattice only in its apex";
            cert.argument = os.str();
            return cert;
        }
    }
    return std::nullopt;
}

std::string to_string(ProbeStatus s)
{
    switch (s) {
    case ProbeStatus::Witness:
        return "witness";
    case ProbeStatus::NoWitnessWithinBound:
        return "no-witness-within-bound";
    case ProbeStatus::Counterexample:
        return "counterexample";
    }
    return "?";
}

bool ProbeReport::all_witnessed() const
{
    return std::all_of(results.begin(), results.end(),
                       [](const ProbeResult& r) { return r.status == ProbeStatus::Witness; });
}

bool ProbeReport::any_counterexample() const
{
    return std::any_of(results.begin(), results.end(),
                       [](const ProbeResult& r) { return r.status == ProbeStatus::Counterexample; });
}

void validate_query(const ConvexBody& P, const MixedLattice& M, const HalfLineQuery& q)
{
    if (P.dim() != M.dim()) {
        throw std::invalid_argument("body and lattice have different dimensions");
    }
    check_query_shape(q, M.dim());
    if (!P.contains(q.z)) {
        throw std::invalid_argument("z = " + describe(q.z) + " is not in the body");
    }
    if (!M.contains(q.z)) {
        throw std::invalid_argument("z = " + describe(q.z) + " is not a lattice point");
    }
    if (!P.in_recession_cone(q.r)) {
        throw std::invalid_argument("r = " + describe(q.r) + " is not a recession direction of the body");
    }
    if (!M.spans(q.r)) {
        throw std::invalid_argument("r = " + describe(q.r) + " is outside the affine hull of the lattice");
    }
}

ProbeReport dirichlet_probe(const ConvexBody& P, const MixedLattice& M, const std::vector<HalfLineQuery>& queries,
                            int search_bound)
{
    for (const auto& q : queries) {
        validate_query(P, M, q);
    }
    std::optional<std::optional<FinitePointsCertificate>> cert;  // computed on first need
    ProbeReport rep;
    for (const auto& q : queries) {
        ProbeResult res;
        const auto w = search_halfline(M, q, search_bound, [&](const Vector& v) { return P.contains(v); });
        if (w) {
            res.status = ProbeStatus::Witness;
            res.witness = w;
            res.distance = halfline_distance(*w, q);
            rep.results.push_back(std::move(res));
            continue;
        }
        if (!cert) {
            cert = finite_section_certificate(P, M);
        }
        if (*cert) {
            const auto& c = **cert;
            double best = kInf;
            const Vector* closest = nullptr;
            for (const auto& p : c.points) {
                const double d = halfline_distance(p, q);
                if (d < best) {
                    best = d;
                    closest = &p;
                }
            }
            res.distance = best;
            if (best < q.eps) {
                res.status = ProbeStatus::Witness;
                res.witness = *closest;
            } else {
                res.status = ProbeStatus::Counterexample;
                res.certificate = c.argument + "; the closest of its lattice points is at distance " + fmt(best) +
                                  " >= eps = " + fmt(q.eps);
            }
        }
        rep.results.push_back(std::move(res));
    }
    return rep;
}

std::optional<Vector> find_lattice_point(const ConvexBody& P, const MixedLattice& M, int search_bound)
{
    if (P.dim() != M.dim()) {
        throw std::invalid_argument("body and lattice have different dimensions");
    }
    const Vector cont = M.project_continuous(P.anchor());
    std::optional<Vector> found;
    for_each_shell_point(M.integer_rank(), search_bound, [&](const IntVector& z) {
        const Vector x = M.lattice_point(z) + cont;
        if (P.contains(x)) {
            found = x;
            return true;
        }
        return false;
    });
    return found;
}

std::vector<HalfLineQuery> standard_queries(const ConvexBody& P, const MixedLattice& M, int search_bound)
{
    std::vector<HalfLineQuery> out;
    const auto z = find_lattice_point(P, M, search_bound);
    if (!z) {
        return out;
    }
    std::vector<Vector> dirs;
    for (const auto& g : P.recession_generators()) {
        if (M.spans(g)) {
            dirs.push_back(g / g.norm());
        }
    }
    if (dirs.empty()) {
        out.push_back({*z, Vector::Zero(z->size()), 0.5, 0.0});
        return out;
    }
    for (const auto& r : dirs) {
        for (double eps : {0.5, 0.25}) {
            for (double gamma : {0.0, 2.0, 5.0}) {
                out.push_back({*z, r, eps, gamma});
            }
        }
    }
    return out;
}

std::string to_string(RecessionVerdict v)
{
    switch (v) {
    case RecessionVerdict::Holds:
        return "holds";
    case RecessionVerdict::FailsSuspected:
        return "fails-suspected";
    case RecessionVerdict::Unknown:
        return "unknown";
    }
    return "?";
}

RecessionReport recession_condition_check(const ConvexBody& P, const MixedLattice& M, int search_bound)
{
    if (P.dim() != M.dim()) {
        throw std::invalid_argument("body and lattice have different dimensions");
    }
    RecessionReport rep;
    if (P.is_rational_polyhedron() && M.is_standard()) {
        rep.verdict = RecessionVerdict::Holds;
        rep.reason = "rational polyhedron over Z^n1 x R^n2: the integer hull is a rational polyhedron with the same "
                     "recession cone (Meyer)";
        return rep;
    }
    rep.lattice_point = find_lattice_point(P, M, std::min(search_bound, 50));
    const auto gens = P.recession_generators();
    if (gens.empty()) {
        if (rep.lattice_point) {
            rep.verdict = RecessionVerdict::Holds;
            rep.reason = "bounded body with a lattice point: both recession cones are {0}";
        } else {
            rep.reason = "bounded body, but no lattice point found within the search bound";
        }
        return rep;
    }
    if (!rep.lattice_point) {
        rep.reason = "no lattice point of the body found within the search bound";
        return rep;
    }
    const Vector& z0 = *rep.lattice_point;
    for (const auto& g : gens) {
        if (!M.spans(g)) {
            rep.failing_directions.push_back(g);
            continue;
        }
        const HalfLineQuery q{z0, g / g.norm(), 0.5, 10.0};
        const auto w = search_halfline(M, q, search_bound, [&](const Vector& v) { return P.contains(v); });
        if (!w) {
            rep.failing_directions.push_back(g);
        }
    }
    if (rep.failing_directions.empty()) {
        rep.reason = "lattice points of the body follow every recession generator; equality is not proven";
        return rep;
    }
    rep.verdict = RecessionVerdict::FailsSuspected;
    std::ostringstream os;
    os << "no lattice point of the body within 0.5 of the half-line from " << describe(z0) << " along "
       << describe(rep.failing_directions.front()) << " beyond distance 10 (search bound " << search_bound << ")";
    if (const auto cert = finite_section_certificate(P, M)) {
        os << "; " << cert->argument;
    }
    rep.reason = os.str();
    return rep;
}

// ---------------------------------------------------------------- affine maps

ConvexBody transform(const ConvexBody& P, const AffineMap& T)
{
    const auto n = static_cast<Eigen::Index>(P.dim());
    if (T.U.rows() != n || T.U.cols() != n || T.shift.size() != n) {
        throw std::invalid_argument("affine map has the wrong dimension");
    }
    Eigen::FullPivLU<Matrix> lu(T.U);
    if (!lu.isInvertible()) {
        throw std::invalid_argument("affine map is singular");
    }
    const Matrix Uinv = lu.inverse();
    return std::visit(
        [&](const auto& b) -> ConvexBody {
            using T_ = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T_, Polyhedron>) {
                Polyhedron out{b.dim, {}};
                for (const auto& row : b.rows) {
                    const Vector a = Uinv.transpose() * row.a;
                    out.rows.push_back({a, row.b + a.dot(T.shift), row.rational});
                }
                return ConvexBody::polyhedron(std::move(out));
            } else if constexpr (std::is_same_v<T_, Ball>) {
                const Vector c = T.U * b.center + T.shift;
                if (b.radius == 0.0) {
                    return ConvexBody::ball(c, 0.0);
                }
                const Matrix Q = Uinv.transpose() * Uinv / (b.radius * b.radius);
                return ConvexBody::ellipsoid(0.5 * (Q + Q.transpose()), c);
            } else if constexpr (std::is_same_v<T_, Ellipsoid>) {
                const Matrix Q = Uinv.transpose() * b.shape * Uinv;
                return ConvexBody::ellipsoid(0.5 * (Q + Q.transpose()), T.U * b.center + T.shift);
            } else {
                std::vector<Vector> gens;
                for (const auto& g : b.generators) {
                    gens.emplace_back(T.U * g);
                }
                return ConvexBody::shifted_cone(T.U * b.apex + T.shift, std::move(gens));
            }
        },
        P.variant());
}

HalfLineQuery transform(const HalfLineQuery& q, const AffineMap& T)
{
    return {T.U * q.z + T.shift, T.U * q.r, q.eps, q.gamma};
}

InvarianceReport affine_invariance_test(const ConvexBody& P, const MixedLattice& M, const AffineMap& T,
                                        const std::vector<HalfLineQuery>& queries, int search_bound)
{
    const auto n = static_cast<Eigen::Index>(M.dim());
    if (T.U.rows() != n || T.U.cols() != n || T.shift.size() != n) {
        throw std::invalid_argument("affine map has the wrong dimension");
    }
    InvarianceReport rep;
    rep.determinant = T.U.determinant();
    Eigen::FullPivLU<Matrix> lu(T.U);
    bool preserves = lu.isInvertible() && M.contains(T.shift);
    if (preserves) {
        const Matrix Uinv = lu.inverse();
        const Matrix& Q = M.continuous_basis();
        for (const Matrix* U : {&T.U, &Uinv}) {
            for (Eigen::Index j = 0; j < M.A().cols(); ++j) {
                preserves = preserves && M.contains(Vector(*U * M.A().col(j)));
            }
            for (Eigen::Index j = 0; j < Q.cols(); ++j) {
                const Vector v = *U * Q.col(j);
                preserves = preserves && (v - M.project_continuous(v)).norm() <= 1e-9 * std::max(1.0, v.norm());
            }
        }
    }
    if (!preserves) {
        throw std::invalid_argument("affine map does not map the lattice onto itself (det " + fmt(rep.determinant) +
                                    ")");
    }
    rep.original = dirichlet_probe(P, M, queries, search_bound);
    std::vector<HalfLineQuery> moved;
    for (const auto& q : queries) {
        moved.push_back(transform(q, T));
    }
    rep.transformed = dirichlet_probe(transform(P, T), M, moved, search_bound);
    rep.agree = true;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const bool a = rep.original.results[i].status == ProbeStatus::Witness;
        const bool b = rep.transformed.results[i].status == ProbeStatus::Witness;
        rep.agree = rep.agree && a == b;
    }
    return rep;
}

// ---------------------------------------------------------------- finiteness

std::string to_string(Trend t)
{
    return t == Trend::Stabilizing ? "stabilizing" : "growing";
}

FinitenessReport finiteness_experiment(const ConvexBody& X, const ConvexBody& P, const MixedLattice& M,
                                       const Vector& c, const FinitenessOptions& opts)
{
    const auto n = M.dim();
    if (X.dim() != n || P.dim() != n) {
        throw std::invalid_argument("bodies and lattice have different dimensions");
    }
    check_dim(c, n, "objective");
    if (opts.box_schedule.size() < 2) {
        throw std::invalid_argument("box schedule needs at least two boxes");
    }
    for (const auto* body : {&X, &P}) {
        if (std::holds_alternative<ShiftedCone>(body->variant())) {
            throw std::invalid_argument("shifted cones cannot be used in the finiteness experiment");
        }
    }
    FinitenessReport rep;
    rep.dirichlet_class = (P.is_rational_polyhedron() && M.is_standard()) || P.is_bounded();
    if (!rep.dirichlet_class) {
        rep.caveats.push_back("P is neither a rational polyhedron over Z^n1 x R^n2 nor bounded");
    }

    const auto ni = static_cast<Eigen::Index>(n);
    const Matrix Xi = M.A();
    const Matrix Xc = M.continuous_basis();
    const Matrix Pi(ni, 0);
    const Matrix Pc = Matrix::Identity(ni, ni);

    auto integer_box = [&](double R) {
        const auto k = M.integer_rank();
        IntVector lo(k), hi(k);
        for (std::size_t i = 0; i < k; ++i) {
            double bound = R;
            if (!M.is_standard()) {
                // |z_i| <= ||row_i(A^+)|| ||x|| with ||x|| <= sqrt(n) R
                const Matrix pinv = Xi.completeOrthogonalDecomposition().pseudoInverse();
                bound = pinv.row(static_cast<Eigen::Index>(i)).norm() * std::sqrt(static_cast<double>(n)) * R;
            }
            hi[i] = static_cast<std::int64_t>(std::floor(bound + 1e-9));
            lo[i] = -hi[i];
        }
        return IntegerBox(lo, hi);
    };

    MipOptions mip = opts.mip;
    mip.probe_boundary = false;

    for (double R : opts.box_schedule) {
        const auto cont = region_instance({{&X, 0.0}, {&P, 0.0}}, Pi, Pc, c, R);
        const auto res = solve_continuous(cont, opts.ipm);
        double v = std::numeric_limits<double>::quiet_NaN();
        if (res.status == SolveStatus::Optimal) {
            v = -res.objective;
        } else if (res.status == SolveStatus::PrimalInfeasible) {
            v = -kInf;
        } else if (res.primal && res.residuals.primal_res <= 1e-6 && std::abs(res.residuals.gap) <= 1e-6) {
            v = -res.objective;
            rep.caveats.push_back("convex side at box " + fmt(R) + ": solver ended " + to_string(res.status) +
                                  " with small residuals");
        } else {
            rep.caveats.push_back("convex side at box " + fmt(R) + ": solver ended " + to_string(res.status));
        }
        rep.convex_side.values.push_back(v);

        const auto lat = region_instance({{&X, 0.0}, {&P, 0.0}}, Xi, Xc, c, R);
        const auto mres = solve_mip(lat, integer_box(R), mip);
        double lv = -kInf;
        if (mres.status != MipStatus::Infeasible) {
            lv = -mres.value;
        }
        rep.lattice_side.values.push_back(lv);
    }
    rep.convex_side.trend = classify(rep.convex_side.values, opts.stable_tol);
    rep.lattice_side.trend = classify(rep.lattice_side.values, opts.stable_tol);

    const double R0 = opts.box_schedule.front();
    const auto inner = region_instance({{&X, opts.interior_shrink}, {&P, 0.0}}, Xi, Xc, Vector::Zero(ni), R0);
    const auto hres = solve_mip(inner, integer_box(R0), mip);
    if (hres.witness) {
        rep.hypothesis_ok = true;
        rep.interior_point = Xi * to_vector(hres.witness->x) + Xc * hres.witness->y;
    } else {
        rep.caveats.push_back("no point of int(X) in P and M found in the first box; hypothesis unchecked");
    }
    if (rep.lattice_side.trend == Trend::Stabilizing && rep.convex_side.trend == Trend::Growing) {
        if (rep.dirichlet_class && rep.hypothesis_ok) {
            rep.violation = true;
            rep.caveats.push_back("VIOLATION: lattice side stabilizes while the convex side grows");
        } else {
            rep.caveats.push_back("lattice side stabilizes while the convex side grows (hypotheses not met)");
        }
    }
    return rep;
}

// ---------------------------------------------------------------- text forms

ConvexBody parse_body(const std::string& text)
{
    const json doc = parse_doc(text);
    try {
        const auto kind = doc.at("kind").get<std::string>();
        if (kind == "space") {
            return ConvexBody::space(doc.at("dim").get<std::size_t>());
        }
        if (kind == "polyhedron") {
            Polyhedron p;
            p.dim = doc.at("dim").get<std::size_t>();
            for (const auto& row : doc.value("rows", json::array())) {
                p.rows.push_back({parse_vector(row.at("a")), parse_number(row.at("b")), row.value("rational", false)});
            }
            return ConvexBody::polyhedron(std::move(p));
        }
        if (kind == "ball") {
            return ConvexBody::ball(parse_vector(doc.at("center")), parse_number(doc.at("radius")));
        }
        if (kind == "ellipsoid") {
            const Vector c = parse_vector(doc.at("center"));
            const auto& rows = doc.at("shape");
            Matrix Q(c.size(), c.size());
            if (rows.size() != static_cast<std::size_t>(c.size())) {
                throw std::invalid_argument("ellipsoid shape has the wrong number of rows");
            }
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const Vector r = parse_vector(rows[i]);
                check_dim(r, static_cast<std::size_t>(c.size()), "ellipsoid shape row");
                Q.row(static_cast<Eigen::Index>(i)) = r.transpose();
            }
            return ConvexBody::ellipsoid(Q, c);
        }
        if (kind == "shifted_cone" || kind == "shifted-cone") {
            std::vector<Vector> gens;
            for (const auto& g : doc.value("generators", json::array())) {
                gens.push_back(parse_vector(g));
            }
            return ConvexBody::shifted_cone(parse_vector(doc.at("apex")), std::move(gens));
        }
        throw std::invalid_argument("unknown body kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed body: ") + e.what());
    }
}

MixedLattice parse_lattice(const std::string& text)
{
    const json doc = parse_doc(text);
    try {
        if (doc.contains("standard")) {
            const auto& s = doc.at("standard");
            return MixedLattice::standard(s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>());
        }
        const auto n = doc.at("dim").get<std::size_t>();
        return MixedLattice(parse_columns(doc.value("integer", json::array()), n),
                            parse_columns(doc.value("continuous", json::array()), n));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed lattice: ") + e.what());
    }
}

std::vector<HalfLineQuery> parse_queries(const std::string& text)
{
    const json doc = parse_doc(text);
    try {
        const json& list = doc.is_array() ? doc : doc.at("queries");
        std::vector<HalfLineQuery> out;
        for (const auto& q : list) {
            out.push_back({parse_vector(q.at("z")), parse_vector(q.at("r")), parse_number(q.at("eps")),
                           parse_number(q.value("gamma", json(0.0)))});
        }
        return out;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed queries: ") + e.what());
    }
}

}  // namespace cmipdual
