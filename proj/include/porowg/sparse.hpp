#ifndef POROWG_SPARSE_HPP
#define POROWG_SPARSE_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace porowg {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed sparse row matrix. Column indices are sorted within each row
/// and duplicates are summed at construction, so assembly from triplets is
/// deterministic regardless of how the triplets were produced.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols);

    static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
    static SparseMatrix diagonal(std::span<const double> d);
    static SparseMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    /// y = A x. Parallel over rows when OpenMP is enabled.
    void apply(std::span<const double> x, std::span<double> y) const;
    /// Serial reference kept for kernel verification and benchmarking.
    void apply_serial(std::span<const double> x, std::span<double> y) const;
    /// y += s * A x
    void apply_add(std::span<const double> x, std::span<double> y, double s = 1.0) const;
    /// y = A^T x (serial scatter; prefer storing the transpose for hot paths)
    void apply_transpose(std::span<const double> x, std::span<double> y) const;

    SparseMatrix transpose() const;
    SparseMatrix scaled(double s) const;
    /// alpha*A + beta*B
    static SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b,
                            double alpha = 1.0, double beta = 1.0);

    double coeff(int row, int col) const;
    std::vector<double> diagonal_values() const;
    double max_abs() const;
    double symmetry_error() const;

    /// Plain coordinate text: one "row col value" line per entry, 0-based.
    void dump_coordinate(std::ostream& os) const;

    std::span<const int> row_offsets() const { return row_offsets_; }
    std::span<const int> col_indices() const { return col_indices_; }
    std::span<const double> values() const { return values_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_offsets_{0};
    std::vector<int> col_indices_;
    std::vector<double> values_;
};

} // namespace porowg

#endif
