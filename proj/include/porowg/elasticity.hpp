#ifndef POROWG_ELASTICITY_HPP
#define POROWG_ELASTICITY_HPP

#include <span>
#include <vector>

#include "porowg/solvers.hpp"
#include "porowg/wgfem.hpp"

namespace porowg {

struct ElasticityOptions {
    KrylovMethod method = KrylovMethod::minres;
    double tol = 1e-10;
    int maxit = 1000;
    int restart = 30;
    double inner_tol = 1e-12;     // PCG tolerance for A1 solves in the preconditioner
    int inner_maxit = 2000;
    int precond_override = -1;    // PrecondKind value, or -1 for the method pairing

    PrecondKind precond() const
    {
        if (precond_override >= 0) return static_cast<PrecondKind>(precond_override);
        return method == KrylovMethod::minres ? PrecondKind::diag : PrecondKind::tri;
    }
};

/// The regularized saddle form of the nearly singular elasticity system
///
///   [ A1    -B^T            ] [ eps u ]   [ r ]
///   [ -B    -eps M - rho w w^T ] [  z   ] = [ 0 ]
///
/// with w = M 1 / ||M 1||. The rank-1 term is applied as an outer-product
/// update and never stored. Solving it with rhs r recovers the solution of
/// (eps A1 + A0) u = r, with z = -M^{-1} B u an inherent byproduct
/// satisfying w^T z = 0.
class RegularizedElasticitySystem {
public:
    RegularizedElasticitySystem(const WgBlocks& blocks, const PhysicalParams& params,
                                double rho, double ichol_droptol = 1e-3);

    int n_disp() const { return blocks_->n_disp(); }
    int n_pres() const { return static_cast<int>(m_int().size()); }
    int size() const { return n_disp() + n_pres(); }
    double epsilon() const { return eps_; }
    double rho() const { return rho_; }
    const std::vector<double>& w() const { return w_; }
    std::span<const double> m_int() const { return blocks_->M_int; }
    const WgBlocks& blocks() const { return *blocks_; }
    const IncompleteCholesky& a1_factor() const { return ichol_a1_; }

    LinearOperator system_operator() const;

    /// y = (rho w w^T + M)^{-1} x
    void schur_hat_solve(std::span<const double> x, std::span<double> y) const;

    /// Applies A1^{-1} by PCG with the cached incomplete Cholesky factor.
    /// Accumulates the iteration count into *inner_iters when given.
    void a1_solve(std::span<const double> r, std::span<double> y, double tol, int maxit,
                  long* inner_iters) const;

    /// One application of the block diagonal or triangular preconditioner.
    void apply_preconditioner(PrecondKind kind, const ElasticityOptions& opts,
                              std::span<const double> r, std::span<double> y,
                              long* inner_iters) const;

    /// Solve the saddle system for first-block rhs r; returns the unscaled
    /// displacement u and the numerical pressure z.
    SolveReport solve(std::span<const double> rhs1, const ElasticityOptions& opts,
                      std::vector<double>& u, std::vector<double>& z) const;

    /// (eps A1 + A0) x = r through the regularized route.
    SolveReport solve_reduced(std::span<const double> r, const ElasticityOptions& opts,
                              std::vector<double>& x) const;

private:
    const WgBlocks* blocks_;
    double eps_;
    double rho_;
    std::vector<double> w_;
    SparseMatrix bt_; // B_int^T, stored for row-parallel products
    IncompleteCholesky ichol_a1_;
};

RegularizedElasticitySystem build_regularized_system(const WgBlocks& blocks,
                                                     const PhysicalParams& params, double rho);

/// y = (rho w w^T + M)^{-1} x for the elasticity Schur complement
/// approximation.
void schur_hat_apply(std::span<const double> m_int, std::span<const double> w, double rho,
                     std::span<const double> x, std::span<double> y);

/// First-block rhs of the saddle system from assembled loads and Dirichlet
/// coupling: (eps/mu) b1 - eps a1_bc - B^T M^{-1} b_bc.
std::vector<double> elasticity_rhs(const WgBlocks& blocks, const PhysicalParams& params,
                                   std::span<const double> b1);

/// End-to-end solve for the displacement field of the linear elasticity
/// problem with body force f; boundary values are those the blocks were
/// assembled with.
std::pair<WgField, SolveReport> solve_elasticity(const WgBlocks& blocks,
                                                 const PhysicalParams& params,
                                                 const VectorField& f,
                                                 const VectorField& u_dirichlet,
                                                 double rho, const ElasticityOptions& opts);

} // namespace porowg

#endif
