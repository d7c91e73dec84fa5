#include "porowg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace porowg {

SparseMatrix::SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols)
{
    row_offsets_.assign(static_cast<std::size_t>(rows) + 1, 0);
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets)
{
    for (const Triplet& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw std::invalid_argument("SparseMatrix::from_triplets: index out of range");
        if (!std::isfinite(t.value))
            throw std::invalid_argument("SparseMatrix::from_triplets: non-finite value");
    }
    // Stable sort keeps the original triplet order within each (row, col) group,
    // which makes the duplicate summation order deterministic.
    std::stable_sort(triplets.begin(), triplets.end(),
                     [](const Triplet& a, const Triplet& b) {
                         return a.row != b.row ? a.row < b.row : a.col < b.col;
                     });

    SparseMatrix m(rows, cols);
    m.col_indices_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    std::size_t i = 0;
    for (int r = 0; r < rows; ++r) {
        while (i < triplets.size() && triplets[i].row == r) {
            const int c = triplets[i].col;
            double v = 0.0;
            while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) {
                v += triplets[i].value;
                ++i;
            }
            m.col_indices_.push_back(c);
            m.values_.push_back(v);
        }
        m.row_offsets_[static_cast<std::size_t>(r) + 1] = static_cast<int>(m.col_indices_.size());
    }
    return m;
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d)
{
    const int n = static_cast<int>(d.size());
    SparseMatrix m(n, n);
    m.col_indices_.resize(d.size());
    m.values_.assign(d.begin(), d.end());
    for (int i = 0; i < n; ++i) {
        m.col_indices_[i] = i;
        m.row_offsets_[static_cast<std::size_t>(i) + 1] = i + 1;
    }
    return m;
}

SparseMatrix SparseMatrix::identity(int n)
{
    std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
    return diagonal(ones);
}

void SparseMatrix::apply(std::span<const double> x, std::span<double> y) const
{
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (int k = row_offsets_[r]; k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k)
            s += values_[k] * x[col_indices_[k]];
        y[r] = s;
    }
}

void SparseMatrix::apply_serial(std::span<const double> x, std::span<double> y) const
{
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (int k = row_offsets_[r]; k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k)
            s += values_[k] * x[col_indices_[k]];
        y[r] = s;
    }
}

void SparseMatrix::apply_add(std::span<const double> x, std::span<double> y, double s) const
{
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int r = 0; r < rows_; ++r) {
        double acc = 0.0;
        for (int k = row_offsets_[r]; k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k)
            acc += values_[k] * x[col_indices_[k]];
        y[r] += s * acc;
    }
}

void SparseMatrix::apply_transpose(std::span<const double> x, std::span<double> y) const
{
    for (int c = 0; c < cols_; ++c) y[c] = 0.0;
    for (int r = 0; r < rows_; ++r)
        for (int k = row_offsets_[r]; k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k)
            y[col_indices_[k]] += values_[k] * x[r];
}

SparseMatrix SparseMatrix::transpose() const
{
    SparseMatrix t(cols_, rows_);
    std::vector<int> count(static_cast<std::size_t>(cols_), 0);
    for (int c : col_indices_) ++count[c];
    for (int c = 0; c < cols_; ++c)
        t.row_offsets_[static_cast<std::size_t>(c) + 1] = t.row_offsets_[c] + count[c];
    t.col_indices_.resize(nnz());
    t.values_.resize(nnz());
    std::vector<int> next(t.row_offsets_.begin(), t.row_offsets_.end() - 1);
    for (int r = 0; r < rows_; ++r) {
        for (int k = row_offsets_[r]; k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k) {
            const int pos = next[col_indices_[k]]++;
            t.col_indices_[pos] = r;
            t.values_[pos] = values_[k];
        }
    }
    return t;
}

SparseMatrix SparseMatrix::scaled(double s) const
{
    SparseMatrix m = *this;
    for (double& v : m.values_) v *= s;
    return m;
}

SparseMatrix SparseMatrix::add(const SparseMatrix& a, const SparseMatrix& b,
                               double alpha, double beta)
{
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
        throw std::invalid_argument("SparseMatrix::add: dimension mismatch");
    std::vector<Triplet> t;
    t.reserve(a.nnz() + b.nnz());
    for (int r = 0; r < a.rows_; ++r)
        for (int k = a.row_offsets_[r]; k < a.row_offsets_[static_cast<std::size_t>(r) + 1]; ++k)
            t.push_back({r, a.col_indices_[k], alpha * a.values_[k]});
    for (int r = 0; r < b.rows_; ++r)
        for (int k = b.row_offsets_[r]; k < b.row_offsets_[static_cast<std::size_t>(r) + 1]; ++k)
            t.push_back({r, b.col_indices_[k], beta * b.values_[k]});
    return from_triplets(a.rows_, a.cols_, std::move(t));
}

double SparseMatrix::coeff(int row, int col) const
{
    const int begin = row_offsets_[row];
    const int end = row_offsets_[static_cast<std::size_t>(row) + 1];
    const auto first = col_indices_.begin() + begin;
    const auto last = col_indices_.begin() + end;
    const auto it = std::lower_bound(first, last, col);
    if (it != last && *it == col) return values_[static_cast<std::size_t>(it - col_indices_.begin())];
    return 0.0;
}

std::vector<double> SparseMatrix::diagonal_values() const
{
    std::vector<double> d(static_cast<std::size_t>(std::min(rows_, cols_)), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = coeff(static_cast<int>(i), static_cast<int>(i));
    return d;
}

double SparseMatrix::max_abs() const
{
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double SparseMatrix::symmetry_error() const
{
    if (rows_ != cols_) return max_abs();
    const SparseMatrix t = transpose();
    const SparseMatrix diff = add(*this, t, 1.0, -1.0);
    return diff.max_abs();
}

void SparseMatrix::dump_coordinate(std::ostream& os) const
{
    os.precision(17);
    for (int r = 0; r < rows_; ++r)
        for (int k = row_offsets_[r]; k < row_offsets_[static_cast<std::size_t>(r) + 1]; ++k)
            os << r << ' ' << col_indices_[k] << ' ' << values_[k] << '\n';
}

} // namespace porowg
