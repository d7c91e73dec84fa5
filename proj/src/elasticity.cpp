#include "porowg/elasticity.hpp"

#include <cmath>
#include <stdexcept>

#include "porowg/vec.hpp"

namespace porowg {

RegularizedElasticitySystem::RegularizedElasticitySystem(const WgBlocks& blocks,
                                                         const PhysicalParams& params,
                                                         double rho, double ichol_droptol)
    : blocks_(&blocks), eps_(params.epsilon()), rho_(rho)
{
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw std::invalid_argument("regularized elasticity: rho must be positive and finite");
    const auto& m = blocks.M_int;
    w_.assign(m.begin(), m.end());
    const double nrm = norm2(w_);
    scale(1.0 / nrm, w_);
    bt_ = blocks.B_int.transpose();
    ichol_a1_ = IncompleteCholesky::factor(blocks.A1, ichol_droptol);
}

RegularizedElasticitySystem build_regularized_system(const WgBlocks& blocks,
                                                     const PhysicalParams& params, double rho)
{
    return RegularizedElasticitySystem(blocks, params, rho);
}

LinearOperator RegularizedElasticitySystem::system_operator() const
{
    const int nu = n_disp();
    const int np = n_pres();
    return LinearOperator(
        nu + np,
        [this, nu, np](std::span<const double> x, std::span<double> y) {
            const auto x1 = x.subspan(0, nu);
            const auto x2 = x.subspan(nu, np);
            auto y1 = y.subspan(0, nu);
            auto y2 = y.subspan(nu, np);
            blocks_->A1.apply(x1, y1);
            bt_.apply_add(x2, y1, -1.0);
            blocks_->B_int.apply(x1, y2);
            const double wx = dot(w_, x2);
            const auto& m = blocks_->M_int;
            for (int i = 0; i < np; ++i) y2[i] = -y2[i] - eps_ * m[i] * x2[i] - rho_ * w_[i] * wx;
        },
        true);
}

void RegularizedElasticitySystem::schur_hat_solve(std::span<const double> x,
                                                  std::span<double> y) const
{
    smw_rank1_apply(blocks_->M_int, w_, rho_, x, y);
}

void schur_hat_apply(std::span<const double> m_int, std::span<const double> w, double rho,
                     std::span<const double> x, std::span<double> y)
{
    smw_rank1_apply(m_int, w, rho, x, y);
}

void RegularizedElasticitySystem::a1_solve(std::span<const double> r, std::span<double> y,
                                           double tol, int maxit, long* inner_iters) const
{
    const LinearOperator a1 = LinearOperator::from_matrix(blocks_->A1, true);
    std::vector<double> x(static_cast<std::size_t>(n_disp()), 0.0);
    const SolveReport rep = pcg(a1, r, ichol_a1_.as_operator(), tol, maxit, x);
    // A stall within two orders of the requested tolerance is still far below
    // anything the outer iterations can resolve.
    if (!rep.converged && rep.final_relres > 100.0 * tol)
        throw std::runtime_error("elasticity: inner PCG for A1 failed (relres " +
                                 std::to_string(rep.final_relres) + ")");
    if (inner_iters) *inner_iters += rep.iterations;
    std::copy(x.begin(), x.end(), y.begin());
}

void RegularizedElasticitySystem::apply_preconditioner(PrecondKind kind,
                                                       const ElasticityOptions& opts,
                                                       std::span<const double> r,
                                                       std::span<double> y,
                                                       long* inner_iters) const
{
    const int nu = n_disp();
    const int np = n_pres();
    const auto r1 = r.subspan(0, nu);
    const auto r2 = r.subspan(nu, np);
    auto y1 = y.subspan(0, nu);
    auto y2 = y.subspan(nu, np);

    a1_solve(r1, y1, opts.inner_tol, opts.inner_maxit, inner_iters);
    if (kind == PrecondKind::diag) {
        schur_hat_solve(r2, y2);
    } else {
        // [A1 0; -B -S] y = r  =>  y2 = -S^{-1} (r2 + B y1)
        std::vector<double> t(static_cast<std::size_t>(np));
        blocks_->B_int.apply(y1, t);
        for (int i = 0; i < np; ++i) t[i] += r2[i];
        schur_hat_solve(t, y2);
        for (int i = 0; i < np; ++i) y2[i] = -y2[i];
    }
}

SolveReport RegularizedElasticitySystem::solve(std::span<const double> rhs1,
                                               const ElasticityOptions& opts,
                                               std::vector<double>& u,
                                               std::vector<double>& z) const
{
    const int nu = n_disp();
    const int np = n_pres();
    std::vector<double> rhs(static_cast<std::size_t>(nu + np), 0.0);
    std::copy(rhs1.begin(), rhs1.end(), rhs.begin());

    long inner = 0;
    const PrecondKind kind = opts.precond();
    const LinearOperator op = system_operator();
    const LinearOperator prec(
        nu + np,
        [this, kind, &opts, &inner](std::span<const double> r, std::span<double> y) {
            apply_preconditioner(kind, opts, r, y, &inner);
        },
        kind == PrecondKind::diag);

    std::vector<double> x(static_cast<std::size_t>(nu + np), 0.0);
    SolveReport rep;
    if (opts.method == KrylovMethod::minres)
        rep = minres(op, rhs, prec, opts.tol, opts.maxit, x);
    else
        rep = gmres_restarted(op, rhs, prec, opts.restart, opts.tol, opts.maxit, x);
    rep.inner_iterations_total = inner;
    u.assign(x.begin(), x.begin() + nu);
    scale(1.0 / eps_, u);
    z.assign(x.begin() + nu, x.end());
    return rep;
}

SolveReport RegularizedElasticitySystem::solve_reduced(std::span<const double> r,
                                                       const ElasticityOptions& opts,
                                                       std::vector<double>& x) const
{
    std::vector<double> z;
    return solve(r, opts, x, z);
}

std::vector<double> elasticity_rhs(const WgBlocks& blocks, const PhysicalParams& params,
                                   std::span<const double> b1)
{
    const double eps = params.epsilon();
    const int nu = blocks.n_disp();
    std::vector<double> rhs(static_cast<std::size_t>(nu), 0.0);
    for (int i = 0; i < nu; ++i) rhs[i] = eps / params.mu * b1[i] - eps * blocks.a1_bc[i];
    // Grad-div Dirichlet coupling: B^T M^{-1} (B_boundary u_D)
    std::vector<double> t(blocks.M_int.size());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = blocks.b_bc[k] / blocks.M_int[k];
    std::vector<double> coupling(static_cast<std::size_t>(nu), 0.0);
    blocks.B_int.apply_transpose(t, coupling);
    axpy(-1.0, coupling, rhs);
    return rhs;
}

std::pair<WgField, SolveReport> solve_elasticity(const WgBlocks& blocks,
                                                 const PhysicalParams& params,
                                                 const VectorField& f,
                                                 const VectorField& u_dirichlet,
                                                 double rho, const ElasticityOptions& opts)
{
    const Mesh& mesh = *blocks.mesh;
    const Loads loads = assemble_loads(blocks, f, nullptr, params);
    const std::vector<double> rhs1 = elasticity_rhs(blocks, params, loads.b1);

    const RegularizedElasticitySystem sys(blocks, params, rho);
    std::vector<double> u_free, z;
    SolveReport rep = sys.solve(rhs1, opts, u_free, z);

    WgField u = WgField::zero(mesh, mesh.dim);
    blocks.disp_map.expand_into(u_free, u);
    if (u_dirichlet) {
        for (int fct = 0; fct < mesh.n_facets(); ++fct) {
            if (!mesh.boundary_facet[fct]) continue;
            const auto val = u_dirichlet(mesh.facet_centroid(fct));
            for (int c = 0; c < mesh.dim; ++c) u.facet_at(fct, c) = val[c];
        }
    }
    return {std::move(u), rep};
}

} // namespace porowg
