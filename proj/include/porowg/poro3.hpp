#ifndef POROWG_PORO3_HPP
#define POROWG_PORO3_HPP

#include <span>
#include <tuple>
#include <vector>

#include "porowg/poro2.hpp"

namespace porowg {

/// Regularization constant for the three-field system: a tenth of the
/// smallest pressure mass entry, which keeps it inside the admissible range
/// below beta^2 lambda_min while scaling like h^d under refinement.
double choose_rho(std::span<const double> m_int);

/// Three-field poroelasticity at one time level, unknowns
/// (u, x_p, x_z) with x_p = -(alpha/mu) p and x_z = z/eps - x_p restricted
/// to element interiors, where z = -M^{-1} B u is the numerical pressure:
///
///   [ A1    0                    -B^T        ] [ u  ]
///   [ 0    -(mu/a^2) D - E - R   -(E + R)|_int ] [ x_p ] = rhs ,
///   [ -B   -(E + R)|_int^T       -eps M - rho w w^T ] [ x_z ]
///
/// with E = eps blockdiag(M, 0) and R = blockdiag(rho w w^T, 0). The block
/// preconditioners invert A1 and the middle block by PCG with cached
/// incomplete Cholesky factors; the rank-1 term is folded around the middle
/// solve via Sherman-Morrison so the factorization only sees the sparse part.
class ThreeFieldSystem {
public:
    /// rho_override > 0 replaces the choose_rho default when regularizing.
    ThreeFieldSystem(const WgBlocks& blocks, const PhysicalParams& params, bool regularize,
                     const PoroSolveOptions& opts = {}, double rho_override = -1.0);

    int n_disp() const { return blocks_->n_disp(); }
    int n_pres() const { return blocks_->n_pres(); }
    int n_z() const { return blocks_->mesh->n_elements(); }
    int size() const { return n_disp() + n_pres() + n_z(); }
    double rho() const { return rho_; }
    double epsilon() const { return eps_; }
    bool regularized() const { return rho_ > 0.0; }
    const std::vector<double>& w() const { return w_; }
    const WgBlocks& blocks() const { return *blocks_; }
    const PhysicalParams& params() const { return params_; }
    const SparseMatrix& middle_matrix() const { return c_; } // sparse part only

    LinearOperator system_operator() const;
    std::vector<double> build_rhs(const Loads& loads) const;

    void a1_solve(std::span<const double> r, std::span<double> y, long* inner) const;
    /// ((mu/a^2) D + eps blockdiag(M,0) + blockdiag(rho w w^T, 0))^{-1} r
    void middle_solve(std::span<const double> r, std::span<double> y, long* inner) const;
    void apply_preconditioner(PrecondKind kind, std::span<const double> r,
                              std::span<double> y, long* inner) const;

    SolveReport solve(std::span<const double> rhs, std::vector<double>& x) const;

    /// Expands the solution vector into physical fields and the numerical
    /// pressure z.
    void recover(std::span<const double> x, WgField& u, WgField& p,
                 std::vector<double>& z) const;

private:
    const WgBlocks* blocks_;
    PhysicalParams params_;
    PoroSolveOptions opts_;
    double eps_;
    double rho_;
    std::vector<double> w_;
    SparseMatrix bt_;
    SparseMatrix c_; // (mu/alpha^2) D + eps blockdiag(M, 0)
    IncompleteCholesky ichol_a1_;
    IncompleteCholesky ichol_c_;
    std::vector<double> cw_; // C^{-1} [w; 0]
    double smw_denom_ = 1.0; // 1 + rho w^T C^{-1} w
};

std::tuple<PoroState, std::vector<double>, SolveReport> solve_three_field_step(
    const ThreeFieldSystem& system, const VectorField& f, const ScalarField& s,
    const PoroState& prev, double t_new);

} // namespace porowg

#endif
