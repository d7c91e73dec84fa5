#ifndef POROWG_SOLVERS_HPP
#define POROWG_SOLVERS_HPP

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "porowg/sparse.hpp"

namespace porowg {

enum class KrylovMethod { minres, gmres };
enum class PrecondKind { diag, tri };

struct SolveReport {
    int iterations = 0;
    bool converged = false;
    bool breakdown = false;   // exact Krylov termination, counted as converged
    bool stagnated = false;   // GMRES made no progress across a full restart cycle
    std::vector<double> relative_residuals; // [0] = 1; preconditioned norm
    long inner_iterations_total = 0;        // iterations of nested solvers
    double wall_time = 0.0;
    double final_relres = 1.0;              // stopping-criterion residual at exit
    double true_relres = 1.0;               // ||b - A x|| / ||b|| at exit
};

/// Type-erased linear operator y = Op x. Wraps sparse blocks, diagonal
/// matrices, rank-1 updates, and inner-solve callbacks behind one apply
/// contract so that systems and preconditioners compose uniformly.
class LinearOperator {
public:
    using ApplyFn = std::function<void(std::span<const double>, std::span<double>)>;

    LinearOperator() = default;
    LinearOperator(int n, ApplyFn apply, bool symmetric = false)
        : n_(n), apply_(std::move(apply)), symmetric_(symmetric) {}

    /// References the matrix; the caller keeps it alive.
    static LinearOperator from_matrix(const SparseMatrix& m, bool symmetric = false);
    static LinearOperator identity(int n);

    int size() const { return n_; }
    bool is_symmetric() const { return symmetric_; }
    void apply(std::span<const double> x, std::span<double> y) const { apply_(x, y); }
    std::vector<double> apply(std::span<const double> x) const;

    /// Max |x^T Op y - y^T Op x| over random probes, relative to the probe
    /// magnitudes; used by tests to validate the symmetric flag.
    double symmetry_defect(unsigned seed = 1234, int probes = 10) const;

private:
    int n_ = 0;
    ApplyFn apply_;
    bool symmetric_ = false;
};

/// Incomplete Cholesky with threshold dropping. Entries of the working
/// column below droptol times the 1-norm of the corresponding column of A
/// are discarded. Breakdown is handled by a diagonal shift that doubles
/// from 1e-3 times the mean diagonal, retried at most 20 times.
class IncompleteCholesky {
public:
    static IncompleteCholesky factor(const SparseMatrix& a, double droptol);

    /// y = (L L^T)^{-1} r
    void solve(std::span<const double> r, std::span<double> y) const;
    LinearOperator as_operator() const;

    int size() const { return lower_.rows(); }
    int shift_retries() const { return shift_retries_; }
    double shift_used() const { return shift_used_; }
    const SparseMatrix& lower() const { return lower_; }

private:
    SparseMatrix lower_;   // L, CSR
    SparseMatrix upper_;   // L^T, CSR
    int shift_retries_ = 0;
    double shift_used_ = 0.0;
};

/// Tracks how deeply Krylov solvers are nested within one another; each
/// solver holds a scope for its duration. Tests assert the nesting depth
/// of the composed solvers through max_depth_seen().
struct KrylovScope {
    KrylovScope();
    ~KrylovScope();
    KrylovScope(const KrylovScope&) = delete;
    static int current_depth();
    static int max_depth_seen();
    static void reset_max();
};

/// Preconditioned conjugate gradients for SPD operators. minv applies the
/// inverse of the preconditioner. Stops on ||b - A x|| / ||b|| <= tol using
/// the recursively updated residual. x holds the initial guess on entry.
SolveReport pcg(const LinearOperator& a, std::span<const double> b,
                const LinearOperator& minv, double tol, int maxit,
                std::vector<double>& x);

/// Preconditioned MINRES for symmetric (possibly indefinite) operators with
/// an SPD preconditioner, implemented via the preconditioned Lanczos
/// recurrence. Stops on the true relative residual ||b - A x|| / ||b||; the
/// recorded residual history is the preconditioner-norm one, which is
/// non-increasing by construction.
SolveReport minres(const LinearOperator& a, std::span<const double> b,
                   const LinearOperator& pinv, double tol, int maxit,
                   std::vector<double>& x);

/// Restarted GMRES with left preconditioning and modified Gram-Schmidt.
/// Iterations are counted as total inner iterations across restart cycles.
SolveReport gmres_restarted(const LinearOperator& a, std::span<const double> b,
                            const LinearOperator& pinv, int restart, double tol,
                            int maxit, std::vector<double>& x);

/// y = (M + rho w w^T)^{-1} x for diagonal SPD M and unit w, via the
/// Sherman-Morrison formula; O(n).
void smw_rank1_apply(std::span<const double> m_diag, std::span<const double> w,
                     double rho, std::span<const double> x, std::span<double> y);

} // namespace porowg

#endif
