#ifndef POROWG_DENSE_HPP
#define POROWG_DENSE_HPP

#include <span>
#include <vector>

#include "porowg/sparse.hpp"

namespace porowg {

/// Row-major dense matrix sized for desk-scale eigenvalue verification.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    static DenseMatrix identity(int n);
    static DenseMatrix from_sparse(const SparseMatrix& s);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    DenseMatrix transpose() const;
    static DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
    static DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b, double alpha = 1.0, double beta = 1.0);
    void add_rank1(std::span<const double> u, std::span<const double> v, double s);

    void apply(std::span<const double> x, std::span<double> y) const;
    double symmetry_error() const;
    double max_abs() const;

    /// In-place lower Cholesky; returns false when a pivot is not positive.
    bool cholesky_factorize();
    /// Solve L L^T x = b using the factor produced by cholesky_factorize.
    void cholesky_solve(std::span<double> b) const;
    /// Convenience: A^{-1} b for SPD A (factors a copy).
    std::vector<double> spd_solve(std::span<const double> b) const;
    DenseMatrix spd_inverse() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// ascending. Stops when the off-diagonal Frobenius norm drops below
/// tol * ||A||_F.
std::vector<double> jacobi_eigenvalues(DenseMatrix a, double tol = 1e-12, int max_sweeps = 100);

/// Eigenvalues of A x = lambda B x with A symmetric and B SPD, via the
/// Cholesky reduction L^{-1} A L^{-T}.
std::vector<double> generalized_eigenvalues(const DenseMatrix& a, const DenseMatrix& b,
                                            double tol = 1e-12);

} // namespace porowg

#endif
