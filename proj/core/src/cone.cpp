#include "cmipdual/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cmipdual {

namespace {

constexpr std::size_t kJacobiMaxOrder = 16;

void check_dim(const ConeProduct& K, const Vector& s)
{
    if (static_cast<std::size_t>(s.size()) != K.total_dim()) {
        throw std::invalid_argument("cone: vector has dimension " + std::to_string(s.size()) +
                                    ", cone expects " + std::to_string(K.total_dim()));
    }
}

SymmetricEigen symmetric_eigen(const Matrix& m)
{
    if (static_cast<std::size_t>(m.rows()) <= kJacobiMaxOrder) {
        return jacobi_eigen(m);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    return {es.eigenvalues(), es.eigenvectors()};
}

double block_margin(const ConeBlock& blk, const Eigen::Ref<const Vector>& s)
{
    switch (blk.kind()) {
    case ConeKind::Orthant:
        return s.minCoeff();
    case ConeKind::SecondOrder: {
        const auto n = s.size();
        return s[n - 1] - s.head(n - 1).norm();
    }
    case ConeKind::PsdTriangle:
        return symmetric_eigen(smat(s)).values[0];
    }
    return 0.0;
}

Vector project_soc(const Eigen::Ref<const Vector>& s)
{
    const auto n = s.size();
    const double t = s[n - 1];
    const double nu = s.head(n - 1).norm();
    if (nu <= t) {
        return s;
    }
    if (nu <= -t) {
        return Vector::Zero(n);
    }
    const double alpha = 0.5 * (nu + t);
    Vector out(n);
    out.head(n - 1) = (alpha / nu) * s.head(n - 1);
    out[n - 1] = alpha;
    return out;
}

Vector project_psd(const Eigen::Ref<const Vector>& s)
{
    const auto eig = symmetric_eigen(smat(s));
    const Vector clipped = eig.values.cwiseMax(0.0);
    return svec(eig.vectors * clipped.asDiagonal() * eig.vectors.transpose());
}

}  // namespace

ConeBlock ConeBlock::orthant(std::size_t dim)
{
    if (dim < 1) {
        throw std::invalid_argument("orthant cone needs dim >= 1");
    }
    return {ConeKind::Orthant, dim};
}

ConeBlock ConeBlock::second_order(std::size_t dim)
{
    if (dim < 2) {
        throw std::invalid_argument("second-order cone needs dim >= 2");
    }
    return {ConeKind::SecondOrder, dim};
}

ConeBlock ConeBlock::psd(std::size_t order)
{
    if (order < 1) {
        throw std::invalid_argument("psd cone needs order >= 1");
    }
    return {ConeKind::PsdTriangle, order};
}

std::size_t ConeBlock::ambient_dim() const noexcept
{
    return kind_ == ConeKind::PsdTriangle ? triangle_dim(param_) : param_;
}

std::size_t ConeBlock::degree() const noexcept
{
    switch (kind_) {
    case ConeKind::Orthant:
        return param_;
    case ConeKind::SecondOrder:
        return 1;
    case ConeKind::PsdTriangle:
        return param_;
    }
    return 0;
}

std::string ConeBlock::describe() const
{
    switch (kind_) {
    case ConeKind::Orthant:
        return "orthant:" + std::to_string(param_);
    case ConeKind::SecondOrder:
        return "soc:" + std::to_string(param_);
    case ConeKind::PsdTriangle:
        return "psd:" + std::to_string(param_);
    }
    return "?";
}

ConeProduct::ConeProduct(std::vector<ConeBlock> blocks) : blocks_(std::move(blocks))
{
    offsets_.reserve(blocks_.size());
    for (const auto& b : blocks_) {
        offsets_.push_back(total_dim_);
        total_dim_ += b.ambient_dim();
    }
}

std::size_t ConeProduct::degree() const noexcept
{
    return std::accumulate(blocks_.begin(), blocks_.end(), std::size_t{0},
                           [](std::size_t acc, const ConeBlock& b) { return acc + b.degree(); });
}

std::vector<double> block_margins(const ConeProduct& K, const Vector& s)
{
    check_dim(K, s);
    std::vector<double> out;
    out.reserve(K.size());
    for (std::size_t i = 0; i < K.size(); ++i) {
        const auto& blk = K.blocks()[i];
        out.push_back(block_margin(blk, s.segment(K.offset(i), blk.ambient_dim())));
    }
    return out;
}

double cone_margin(const ConeProduct& K, const Vector& s)
{
    const auto margins = block_margins(K, s);
    if (margins.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    return *std::min_element(margins.begin(), margins.end());
}

Vector project(const ConeProduct& K, const Vector& s)
{
    check_dim(K, s);
    Vector out(s.size());
    for (std::size_t i = 0; i < K.size(); ++i) {
        const auto& blk = K.blocks()[i];
        const auto off = static_cast<Eigen::Index>(K.offset(i));
        const auto len = static_cast<Eigen::Index>(blk.ambient_dim());
        const auto seg = s.segment(off, len);
        switch (blk.kind()) {
        case ConeKind::Orthant:
            out.segment(off, len) = seg.cwiseMax(0.0);
            break;
        case ConeKind::SecondOrder:
            out.segment(off, len) = project_soc(seg);
            break;
        case ConeKind::PsdTriangle:
            out.segment(off, len) = project_psd(seg);
            break;
        }
    }
    return out;
}

Vector interior_direction(const ConeProduct& K)
{
    Vector e = Vector::Zero(static_cast<Eigen::Index>(K.total_dim()));
    for (std::size_t i = 0; i < K.size(); ++i) {
        const auto& blk = K.blocks()[i];
        const auto off = static_cast<Eigen::Index>(K.offset(i));
        const auto len = static_cast<Eigen::Index>(blk.ambient_dim());
        switch (blk.kind()) {
        case ConeKind::Orthant:
            e.segment(off, len).setOnes();
            break;
        case ConeKind::SecondOrder:
            e[off + len - 1] = 1.0;
            break;
        case ConeKind::PsdTriangle: {
            const auto n = static_cast<Eigen::Index>(blk.param());
            e.segment(off, len) = svec(Matrix::Identity(n, n));
            break;
        }
        }
    }
    return e;
}

std::size_t triangle_dim(std::size_t order)
{
    return order * (order + 1) / 2;
}

std::size_t triangle_order(std::size_t dim)
{
    const auto n = static_cast<std::size_t>(std::lround((std::sqrt(8.0 * static_cast<double>(dim) + 1.0) - 1.0) / 2.0));
    if (triangle_dim(n) != dim) {
        throw std::invalid_argument("dimension " + std::to_string(dim) + " is not triangular");
    }
    return n;
}

Vector svec(const Matrix& sym)
{
    const auto n = sym.rows();
    Vector v(n * (n + 1) / 2);
    Eigen::Index k = 0;
    for (Eigen::Index col = 0; col < n; ++col) {
        for (Eigen::Index row = col; row < n; ++row) {
            v[k++] = row == col ? sym(row, col) : M_SQRT2 * sym(row, col);
        }
    }
    return v;
}

Matrix smat(const Vector& v)
{
    const auto n = static_cast<Eigen::Index>(triangle_order(static_cast<std::size_t>(v.size())));
    Matrix m(n, n);
    Eigen::Index k = 0;
    for (Eigen::Index col = 0; col < n; ++col) {
        for (Eigen::Index row = col; row < n; ++row) {
            if (row == col) {
                m(row, col) = v[k];
            } else {
                m(row, col) = v[k] * M_SQRT1_2;
                m(col, row) = m(row, col);
            }
            ++k;
        }
    }
    return m;
}

SymmetricEigen jacobi_eigen(const Matrix& sym, double tol, int max_sweeps)
{
    const auto n = sym.rows();
    Matrix a = 0.5 * (sym + sym.transpose());
    Matrix v = Matrix::Identity(n, n);
    const double scale = std::max(a.norm(), 1e-300);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                off += a(p, q) * a(p, q);
            }
        }
        if (std::sqrt(off) <= tol * scale) {
            break;
        }
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) {
                    continue;
                }
                // Rotation zeroing a(p,q), in the stable form of Golub & Van Loan.
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
    SymmetricEigen out{Vector(n), Matrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
        out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

}  // namespace cmipdual
