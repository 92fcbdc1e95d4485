#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace cmipdual {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ConeKind { Orthant, SecondOrder, PsdTriangle };

/// One block of a product cone.
///
/// SecondOrder(dim) is the Lorentz cone {(u, t) : ||u||_2 <= t} with the
/// scalar part stored LAST. PsdTriangle(order) stores the lower triangle of a
/// symmetric matrix column by column with off-diagonal entries scaled by
/// sqrt(2), so the Euclidean inner product equals the trace inner product.
class ConeBlock {
public:
    static ConeBlock orthant(std::size_t dim);
    static ConeBlock second_order(std::size_t dim);
    static ConeBlock psd(std::size_t order);

    ConeKind kind() const noexcept { return kind_; }
    /// Dimension parameter: dim for Orthant/SecondOrder, matrix order for PSD.
    std::size_t param() const noexcept { return param_; }
    /// Number of coordinates the block occupies.
    std::size_t ambient_dim() const noexcept;
    /// Degree of the cone (barrier parameter).
    std::size_t degree() const noexcept;

    std::string describe() const;

    bool operator==(const ConeBlock&) const = default;

private:
    ConeBlock(ConeKind kind, std::size_t param) : kind_(kind), param_(param) {}

    ConeKind kind_;
    std::size_t param_;
};

/// Ordered product of cone blocks. Every block is self-dual under the
/// Euclidean inner product, so K* = K.
class ConeProduct {
public:
    ConeProduct() = default;
    explicit ConeProduct(std::vector<ConeBlock> blocks);

    const std::vector<ConeBlock>& blocks() const noexcept { return blocks_; }
    std::size_t size() const noexcept { return blocks_.size(); }
    std::size_t total_dim() const noexcept { return total_dim_; }
    std::size_t degree() const noexcept;
    /// Offset of block i's first coordinate.
    std::size_t offset(std::size_t i) const { return offsets_.at(i); }

    bool operator==(const ConeProduct& other) const { return blocks_ == other.blocks_; }

private:
    std::vector<ConeBlock> blocks_;
    std::vector<std::size_t> offsets_;
    std::size_t total_dim_ = 0;
};

/// Signed distance-like margin: >= 0 iff s in K, > 0 iff s in int(K).
/// Orthant: min coordinate; SecondOrder: t - ||u||; PSD: smallest eigenvalue.
double cone_margin(const ConeProduct& K, const Vector& s);

/// Per-block margins, in block order.
std::vector<double> block_margins(const ConeProduct& K, const Vector& s);

/// Euclidean projection onto K.
Vector project(const ConeProduct& K, const Vector& s);

/// Canonical interior element e_K (ones, (0,..,0,1), svec(I)).
Vector interior_direction(const ConeProduct& K);

// svec helpers for PSD blocks.
std::size_t triangle_dim(std::size_t order);
/// Inverse of triangle_dim; throws if dim is not triangular.
std::size_t triangle_order(std::size_t dim);
Vector svec(const Matrix& sym);
Matrix smat(const Vector& v);

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues are returned in ascending order; columns of `vectors` match.
struct SymmetricEigen {
    Vector values;
    Matrix vectors;
};
SymmetricEigen jacobi_eigen(const Matrix& sym, double tol = 1e-15, int max_sweeps = 100);

}  // namespace cmipdual
