#pragma once

#include "cmipdual/cone.hpp"
#include "cmipdual/rational.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmipdual {

/// Raised for malformed CMIP text, with a 1-based position.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Raised when instance data is inconsistent (dimensions, cone tags, ...).
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Exact copy of one row of a rational-tagged block: coefficients over
/// (x, y) followed by the right-hand side.
struct ExactRow {
    std::vector<Rational> coeffs;
    Rational rhs;
    bool operator==(const ExactRow&) const = default;
};

/// Raw fields of an instance, before validation.
struct InstanceData {
    Matrix A;  // m x n1
    Matrix G;  // m x n2
    Vector b;  // m
    Vector c;  // n1
    Vector d;  // n2
    ConeProduct K;
    std::vector<bool> binary;          // n1 (empty = none binary)
    std::vector<bool> rational_block;  // K.size() (empty = none rational)
    std::vector<std::optional<ExactRow>> exact;  // m (empty = derive from doubles)
    std::vector<std::string> int_names;   // n1 (empty = x1..)
    std::vector<std::string> cont_names;  // n2 (empty = y1..)
};

/// A conic mixed-integer program
///
///     min c'x + d'y   s.t.  A x + G y - b in K,  x integer, y real.
///
/// Immutable once constructed. Binary variables carry implied bounds
/// 0 <= x_j <= 1 that are not materialized as rows.
class Instance {
public:
    explicit Instance(InstanceData data);

    std::size_t n1() const noexcept { return static_cast<std::size_t>(data_.A.cols()); }
    std::size_t n2() const noexcept { return static_cast<std::size_t>(data_.G.cols()); }
    std::size_t m() const noexcept { return data_.K.total_dim(); }

    const Matrix& A() const noexcept { return data_.A; }
    const Matrix& G() const noexcept { return data_.G; }
    const Vector& b() const noexcept { return data_.b; }
    const Vector& c() const noexcept { return data_.c; }
    const Vector& d() const noexcept { return data_.d; }
    const ConeProduct& cone() const noexcept { return data_.K; }

    bool is_binary(std::size_t j) const { return data_.binary.at(j); }
    const std::vector<bool>& binary_mask() const noexcept { return data_.binary; }
    bool any_binary() const noexcept;
    bool all_binary() const noexcept;
    bool is_rational_block(std::size_t i) const { return data_.rational_block.at(i); }
    const std::vector<bool>& rational_blocks() const noexcept { return data_.rational_block; }
    const std::optional<ExactRow>& exact_row(std::size_t row) const { return data_.exact.at(row); }

    const std::vector<std::string>& int_names() const noexcept { return data_.int_names; }
    const std::vector<std::string>& cont_names() const noexcept { return data_.cont_names; }

    /// [A G]
    Matrix full_matrix() const;
    /// (c, d)
    Vector full_objective() const;

    const InstanceData& data() const noexcept { return data_; }

    bool operator==(const Instance& other) const;

private:
    InstanceData data_;
};

/// Partition of cone blocks into the nonlinear block S1 (cone K1) and the
/// side-constraint block S2 (cone K2).
enum class BlockPart { S1, S2 };

class TwoBlockView {
public:
    TwoBlockView(Instance parent, std::vector<BlockPart> partition);

    const Instance& parent() const noexcept { return parent_; }
    const std::vector<BlockPart>& partition() const noexcept { return partition_; }

    /// Sub-instance made of the S1 (resp. S2) rows; nullopt when empty.
    std::optional<Instance> part(BlockPart which) const;
    /// Row indices of the parent that belong to `which`, in parent order.
    std::vector<std::size_t> rows(BlockPart which) const;
    bool empty(BlockPart which) const;

    /// Rebuilds the parent from the two parts.
    Instance reassemble() const;

private:
    Instance parent_;
    std::vector<BlockPart> partition_;
};

// Convenience constructor for code and tests.
Instance make_instance(Matrix A, Matrix G, Vector b, Vector c, Vector d, ConeProduct K,
                       std::vector<bool> binary = {}, std::vector<bool> rational_block = {});

Instance parse_instance(std::istream& in);
Instance parse_instance(const std::string& text);
Instance load_instance(const std::string& path);
std::string serialize_instance(const Instance& inst);

/// Drops integrality; binary bounds become an appended rational orthant block.
Instance continuous_relaxation(const Instance& inst);
/// Same data with right-hand side h.
Instance perturb_rhs(const Instance& inst, const Vector& h);
TwoBlockView split_blocks(const Instance& inst, const std::vector<BlockPart>& assignment);
/// Appends the implied binary bounds x >= 0, -x >= -1 as an explicit rational
/// orthant block, keeping the binary mask.
Instance materialize_binary_bounds(const Instance& inst);
/// Subset of rows (and the blocks they form) as a new instance over the same variables.
Instance select_blocks(const Instance& inst, const std::vector<std::size_t>& blocks);

}  // namespace cmipdual
