#ifndef BIGWORLD_SPARSE_HPP
#define BIGWORLD_SPARSE_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>

#include "bigworld/errors.hpp"

namespace bigworld {

/// Boolean matrix stored as row- and column-major adjacency lists.
///
/// Both majors use ordered containers so iteration order is deterministic.
/// Only true cells are stored; a place graph over n nodes therefore costs
/// O(n) entries instead of the O(n^2) a full bit matrix would take.
class SparseBoolMatrix {
public:
    using Index = std::uint32_t;
    using IndexSet = std::set<Index>;
    using Major = std::map<Index, IndexSet>;

    SparseBoolMatrix() = default;
    SparseBoolMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

    static SparseBoolMatrix make(std::size_t rows, std::size_t cols) {
        return SparseBoolMatrix(rows, cols);
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t entry_count() const { return entries_; }

    /// Enlarges the shape without touching stored entries.
    void set_shape(std::size_t rows, std::size_t cols);

    /// Sets (i,j) true in both majors. Returns false if the cell was already set.
    bool add(Index i, Index j);

    bool mem(Index i, Index j) const;

    /// True columns of row i (children of i when the matrix is a parent relation).
    const IndexSet& chl(Index i) const;

    /// True rows of column j (parents of j).
    const IndexSet& prn(Index j) const;

    const Major& row_major() const { return r_major_; }
    const Major& col_major() const { return c_major_; }

private:
    void check_row(Index i) const;
    void check_col(Index j) const;
    void rebuild_col_major();

    friend SparseBoolMatrix trans(const SparseBoolMatrix& m0);

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t entries_ = 0;
    Major r_major_;
    Major c_major_;
};

/// Exact equality; operands must have the same shape.
bool equal(const SparseBoolMatrix& a, const SparseBoolMatrix& b);

/// Boolean matrix product (OR of ANDs); a.cols must equal b.rows.
SparseBoolMatrix mul(const SparseBoolMatrix& a, const SparseBoolMatrix& b);

/// Elementwise OR; operands must have the same shape.
SparseBoolMatrix sum(const SparseBoolMatrix& a, const SparseBoolMatrix& b);

/// Transitive closure (reachability in one or more steps) by the fixed-point
/// iteration that repeatedly multiplies the matrix by itself. Slow; kept as
/// the reference implementation that trans() is checked against.
SparseBoolMatrix trans_naive(const SparseBoolMatrix& m0);

/// Transitive closure by one depth-first search per source row, run over the
/// closure as it is being built. Requires the input to be a DAG (the engine
/// only feeds it forests); behaviour on cyclic input is unspecified.
SparseBoolMatrix trans(const SparseBoolMatrix& m0);

}  // namespace bigworld

#endif  // BIGWORLD_SPARSE_HPP
