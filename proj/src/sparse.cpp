#include "bigworld/sparse.hpp"

#include <algorithm>
#include <cassert>
#include <string>
#include <vector>

namespace bigworld {

namespace {
const SparseBoolMatrix::IndexSet kEmptySet;
}

void SparseBoolMatrix::check_row(Index i) const {
    if (i >= rows_) {
        throw BoundsError("row index " + std::to_string(i) + " out of range [0," +
                          std::to_string(rows_) + ")");
    }
}

void SparseBoolMatrix::check_col(Index j) const {
    if (j >= cols_) {
        throw BoundsError("column index " + std::to_string(j) + " out of range [0," +
                          std::to_string(cols_) + ")");
    }
}

void SparseBoolMatrix::set_shape(std::size_t rows, std::size_t cols) {
    if (rows < rows_ || cols < cols_) {
        throw ShapeError("set_shape may only enlarge a matrix");
    }
    rows_ = rows;
    cols_ = cols;
}

bool SparseBoolMatrix::add(Index i, Index j) {
    check_row(i);
    check_col(j);
    bool inserted = r_major_[i].insert(j).second;
    if (inserted) {
        c_major_[j].insert(i);
        ++entries_;
    }
    return inserted;
}

bool SparseBoolMatrix::mem(Index i, Index j) const {
    check_row(i);
    check_col(j);
    auto it = r_major_.find(i);
    return it != r_major_.end() && it->second.count(j) > 0;
}

const SparseBoolMatrix::IndexSet& SparseBoolMatrix::chl(Index i) const {
    check_row(i);
    auto it = r_major_.find(i);
    return it == r_major_.end() ? kEmptySet : it->second;
}

const SparseBoolMatrix::IndexSet& SparseBoolMatrix::prn(Index j) const {
    check_col(j);
    auto it = c_major_.find(j);
    return it == c_major_.end() ? kEmptySet : it->second;
}

bool equal(const SparseBoolMatrix& a, const SparseBoolMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("equal: shape mismatch");
    }
    return a.row_major() == b.row_major();
}

SparseBoolMatrix mul(const SparseBoolMatrix& a, const SparseBoolMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("mul: " + std::to_string(a.cols()) + " columns vs " +
                         std::to_string(b.rows()) + " rows");
    }
    SparseBoolMatrix out(a.rows(), b.cols());
    for (const auto& [i, js] : a.row_major()) {
        for (SparseBoolMatrix::Index j : js) {
            for (SparseBoolMatrix::Index k : b.chl(j)) {
                out.add(i, k);
            }
        }
    }
    return out;
}

SparseBoolMatrix sum(const SparseBoolMatrix& a, const SparseBoolMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("sum: shape mismatch");
    }
    SparseBoolMatrix out = a;
    for (const auto& [i, js] : b.row_major()) {
        for (SparseBoolMatrix::Index j : js) {
            out.add(i, j);
        }
    }
    return out;
}

SparseBoolMatrix trans_naive(const SparseBoolMatrix& m0) {
    if (m0.rows() != m0.cols()) {
        throw ShapeError("trans_naive: matrix is not square");
    }
    SparseBoolMatrix m = m0;
    SparseBoolMatrix acc = m0;
    for (;;) {
        SparseBoolMatrix next = mul(m0, m);
        if (equal(m, next)) {
            return acc;
        }
        acc = sum(next, acc);
        m = std::move(next);
    }
}

void SparseBoolMatrix::rebuild_col_major() {
    c_major_.clear();
    entries_ = 0;
    std::vector<std::vector<Index>> cols(cols_);
    for (const auto& [i, js] : r_major_) {
        for (Index j : js) {
            cols[j].push_back(i);  // rows arrive in ascending order
        }
        entries_ += js.size();
    }
    for (Index j = 0; j < cols_; ++j) {
        if (!cols[j].empty()) {
            c_major_.emplace_hint(c_major_.end(), j, IndexSet(cols[j].begin(), cols[j].end()));
        }
    }
}

SparseBoolMatrix trans(const SparseBoolMatrix& m0) {
    using Index = SparseBoolMatrix::Index;
    if (m0.rows() != m0.cols()) {
        throw ShapeError("trans: matrix is not square");
    }
    const std::size_t n = m0.rows();
    SparseBoolMatrix closure(n, n);

    // The DFS from each source reads rows of the closure being built: rows of
    // already-processed sources are complete, the rest still point at m0.
    std::vector<const SparseBoolMatrix::IndexSet*> row_of(n, nullptr);
    for (const auto& [i, js] : m0.row_major()) {
        row_of[i] = &js;
    }

    std::vector<Index> stack;
    std::vector<Index> found;
    std::vector<Index> merged;
    std::vector<Index> mark(n, 0);
    Index epoch = 0;

    for (const auto& [source, children] : m0.row_major()) {
        ++epoch;
        const SparseBoolMatrix::IndexSet& start = *row_of[source];
        stack.assign(start.begin(), start.end());
        for (Index c : stack) {
            mark[c] = epoch;
        }
        mark[source] = epoch;
        found.clear();
        while (!stack.empty()) {
            Index current = stack.back();
            stack.pop_back();
            assert(current != source && "trans requires a DAG");
            const auto* row = row_of[current];
            if (row == nullptr) {
                continue;
            }
            for (Index child : *row) {
                if (mark[child] != epoch) {
                    mark[child] = epoch;
                    found.push_back(child);
                    stack.push_back(child);
                }
            }
        }
        std::sort(found.begin(), found.end());
        merged.clear();
        std::merge(start.begin(), start.end(), found.begin(), found.end(),
                   std::back_inserter(merged));
        auto placed = closure.r_major_.emplace_hint(
            closure.r_major_.end(), source,
            SparseBoolMatrix::IndexSet(merged.begin(), merged.end()));
        row_of[source] = &placed->second;
        (void)children;
    }
    closure.rebuild_col_major();
    return closure;
}

}  // namespace bigworld
