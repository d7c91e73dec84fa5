#ifndef POROWG_PORO2_HPP
#define POROWG_PORO2_HPP

#include <functional>
#include <span>
#include <vector>

#include "porowg/elasticity.hpp"
#include "porowg/solvers.hpp"
#include "porowg/wgfem.hpp"

namespace porowg {

struct PoroState {
    WgField u;
    WgField p;
    double t = 0.0;

    static PoroState zero(const Mesh& mesh)
    {
        return {WgField::zero(mesh, mesh.dim), WgField::zero(mesh, 1), 0.0};
    }
};

struct PoroSolveOptions {
    KrylovMethod method = KrylovMethod::minres;
    double tol = 1e-8;
    int maxit = 1000;
    int restart = 30;
    double nested_tol = 1e-12;      // leading-block and D solves
    int nested_maxit = 1000;
    double ichol_droptol = 1e-3;
    KrylovMethod nested_method = KrylovMethod::gmres; // leading-block Krylov
    double elasticity_rho = 1.0;
    int precond_override = -1;      // PrecondKind value, or -1 for the method pairing

    PrecondKind precond() const
    {
        if (precond_override >= 0) return static_cast<PrecondKind>(precond_override);
        return method == KrylovMethod::minres ? PrecondKind::diag : PrecondKind::tri;
    }
};

/// One time level of the two-field poroelasticity system
///
///   [ eps A1 + A0                -(alpha eps/mu) B^T ] [ u ]         [ b1 ]
///   [ -(alpha eps/mu) B          -(eps/mu) D         ] [ p ] = eps/mu [ b2 ]
///
/// preconditioned by blkdiag(eps A1 + A0, (eps/mu) D) or its triangular
/// variant. The leading-block inverse runs through the regularized
/// elasticity solver; the D-solve uses PCG with a cached incomplete
/// Cholesky factor.
class TwoFieldSystem {
public:
    TwoFieldSystem(const WgBlocks& blocks, const PhysicalParams& params,
                   const PoroSolveOptions& opts = {});

    int n_disp() const { return blocks_->n_disp(); }
    int n_pres() const { return blocks_->n_pres(); }
    int size() const { return n_disp() + n_pres(); }
    double epsilon() const { return eps_; }
    const WgBlocks& blocks() const { return *blocks_; }
    const PhysicalParams& params() const { return params_; }
    const RegularizedElasticitySystem& elasticity() const { return elas_; }

    LinearOperator system_operator() const;

    std::vector<double> build_rhs(const Loads& loads) const;

    /// (eps A1 + A0)^{-1} r by the nested regularized elasticity solve.
    void leading_solve(std::span<const double> r, std::span<double> y, long* inner) const;
    /// ((eps/mu) D)^{-1} r by PCG with the cached factor.
    void schur_solve(std::span<const double> r, std::span<double> y, long* inner) const;
    void apply_preconditioner(PrecondKind kind, std::span<const double> r,
                              std::span<double> y, long* inner) const;

    SolveReport solve(std::span<const double> rhs, std::vector<double>& x) const;

private:
    const WgBlocks* blocks_;
    PhysicalParams params_;
    PoroSolveOptions opts_;
    double eps_;
    RegularizedElasticitySystem elas_;
    SparseMatrix bt_;
    IncompleteCholesky ichol_d_;
};

std::pair<PoroState, SolveReport> solve_two_field_step(const TwoFieldSystem& system,
                                                       const VectorField& f,
                                                       const ScalarField& s,
                                                       const PoroState& prev, double t_new);

using TimeVectorField = std::function<std::array<double, 3>(const std::array<double, 3>&, double)>;
using TimeScalarField = std::function<double(const std::array<double, 3>&, double)>;

struct MarchResult {
    std::vector<PoroState> states; // states at t_1 .. T
    std::vector<SolveReport> reports;
};

/// Implicit Euler over (0, T] in `steps` equal steps, dt = T / steps.
MarchResult march(const Mesh& mesh, PhysicalParams params, const TimeVectorField& f,
                  const TimeScalarField& s, const WgField& u0, const WgField& p0, double T,
                  int steps, const PoroSolveOptions& opts);

} // namespace porowg

#endif
