#include "porowg/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace porowg {

DenseMatrix DenseMatrix::identity(int n)
{
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& s)
{
    DenseMatrix m(s.rows(), s.cols());
    const auto offs = s.row_offsets();
    const auto cols = s.col_indices();
    const auto vals = s.values();
    for (int r = 0; r < s.rows(); ++r)
        for (int k = offs[r]; k < offs[static_cast<std::size_t>(r) + 1]; ++k)
            m(r, cols[k]) = vals[k];
    return m;
}

DenseMatrix DenseMatrix::transpose() const
{
    DenseMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

DenseMatrix DenseMatrix::multiply(const DenseMatrix& a, const DenseMatrix& b)
{
    if (a.cols_ != b.rows_) throw std::invalid_argument("DenseMatrix::multiply: dimension mismatch");
    DenseMatrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i) {
        for (int k = 0; k < a.cols_; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

DenseMatrix DenseMatrix::add(const DenseMatrix& a, const DenseMatrix& b, double alpha, double beta)
{
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
        throw std::invalid_argument("DenseMatrix::add: dimension mismatch");
    DenseMatrix c(a.rows_, a.cols_);
    for (std::size_t i = 0; i < c.a_.size(); ++i) c.a_[i] = alpha * a.a_[i] + beta * b.a_[i];
    return c;
}

void DenseMatrix::add_rank1(std::span<const double> u, std::span<const double> v, double s)
{
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) (*this)(i, j) += s * u[i] * v[j];
}

void DenseMatrix::apply(std::span<const double> x, std::span<double> y) const
{
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
}

double DenseMatrix::symmetry_error() const
{
    double e = 0.0;
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j) e = std::max(e, std::abs((*this)(i, j) - (*this)(j, i)));
    return e;
}

double DenseMatrix::max_abs() const
{
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

bool DenseMatrix::cholesky_factorize()
{
    if (rows_ != cols_) throw std::invalid_argument("cholesky: matrix not square");
    const int n = rows_;
    for (int j = 0; j < n; ++j) {
        double d = (*this)(j, j);
        for (int k = 0; k < j; ++k) d -= (*this)(j, k) * (*this)(j, k);
        if (!(d > 0.0)) return false;
        const double ljj = std::sqrt(d);
        (*this)(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = (*this)(i, j);
            for (int k = 0; k < j; ++k) s -= (*this)(i, k) * (*this)(j, k);
            (*this)(i, j) = s / ljj;
        }
        for (int i = 0; i < j; ++i) (*this)(i, j) = 0.0;
    }
    return true;
}

void DenseMatrix::cholesky_solve(std::span<double> b) const
{
    const int n = rows_;
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int j = 0; j < i; ++j) s -= (*this)(i, j) * b[j];
        b[i] = s / (*this)(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= (*this)(j, i) * b[j];
        b[i] = s / (*this)(i, i);
    }
}

std::vector<double> DenseMatrix::spd_solve(std::span<const double> b) const
{
    DenseMatrix f = *this;
    if (!f.cholesky_factorize()) throw std::runtime_error("spd_solve: matrix not SPD");
    std::vector<double> x(b.begin(), b.end());
    f.cholesky_solve(x);
    return x;
}

DenseMatrix DenseMatrix::spd_inverse() const
{
    DenseMatrix f = *this;
    if (!f.cholesky_factorize()) throw std::runtime_error("spd_inverse: matrix not SPD");
    const int n = rows_;
    DenseMatrix inv(n, n);
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        f.cholesky_solve(e);
        for (int i = 0; i < n; ++i) inv(i, j) = e[i];
    }
    return inv;
}

namespace {

double off_diag_norm(const DenseMatrix& a)
{
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

double frobenius_norm(const DenseMatrix& a)
{
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

} // namespace

std::vector<double> jacobi_eigenvalues(DenseMatrix a, double tol, int max_sweeps)
{
    if (a.rows() != a.cols()) throw std::invalid_argument("jacobi_eigenvalues: matrix not square");
    const int n = a.rows();
    // Work on the symmetric part; callers pass symmetric matrices up to roundoff.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = v;
            a(j, i) = v;
        }
    const double fnorm = frobenius_norm(a);
    if (fnorm == 0.0) return std::vector<double>(static_cast<std::size_t>(n), 0.0);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diag_norm(a) <= tol * fnorm) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }

    std::vector<double> eigs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eigs[i] = a(i, i);
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

std::vector<double> generalized_eigenvalues(const DenseMatrix& a, const DenseMatrix& b, double tol)
{
    DenseMatrix l = b;
    if (!l.cholesky_factorize())
        throw std::runtime_error("generalized_eigenvalues: right-hand matrix not SPD");
    const int n = a.rows();
    // C = L^{-1} A L^{-T}
    DenseMatrix c = a;
    // Forward-solve each column: L Y = A
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            double s = c(i, j);
            for (int k = 0; k < i; ++k) s -= l(i, k) * c(k, j);
            c(i, j) = s / l(i, i);
        }
    }
    // Right-multiply by L^{-T}: solve rows against L, i.e. C = Y L^{-T}
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = c(i, j);
            for (int k = 0; k < j; ++k) s -= c(i, k) * l(j, k);
            c(i, j) = s / l(j, j);
        }
    }
    return jacobi_eigenvalues(std::move(c), tol);
}

} // namespace porowg
