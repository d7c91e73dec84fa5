#include "porowg/poro3.hpp"

#include <algorithm>
#include <stdexcept>

#include "porowg/vec.hpp"

namespace porowg {

double choose_rho(std::span<const double> m_int)
{
    double mn = m_int[0];
    for (double v : m_int) {
        if (!(v > 0.0)) throw std::invalid_argument("choose_rho: mass entries must be positive");
        mn = std::min(mn, v);
    }
    return 0.1 * mn;
}

ThreeFieldSystem::ThreeFieldSystem(const WgBlocks& blocks, const PhysicalParams& params,
                                   bool regularize, const PoroSolveOptions& opts,
                                   double rho_override)
    : blocks_(&blocks), params_(params), opts_(opts), eps_(params.epsilon())
{
    params.validate();
    rho_ = regularize ? (rho_override > 0.0 ? rho_override : choose_rho(blocks.M_int)) : 0.0;
    const auto& m = blocks.M_int;
    w_.assign(m.begin(), m.end());
    scale(1.0 / norm2(w_), w_);
    bt_ = blocks.B_int.transpose();

    // Sparse part of the middle block: (mu/alpha^2) D + eps blockdiag(M, 0).
    const int np = blocks.n_pres();
    const int nel = blocks.mesh->n_elements();
    std::vector<Triplet> mass;
    mass.reserve(nel);
    for (int k = 0; k < nel; ++k) mass.push_back({k, k, m[k]});
    const SparseMatrix e_blk = SparseMatrix::from_triplets(np, np, std::move(mass));
    const double c_mu = params.mu / (params.alpha * params.alpha);
    c_ = SparseMatrix::add(blocks.D.scaled(c_mu), e_blk, 1.0, eps_);

    ichol_a1_ = IncompleteCholesky::factor(blocks.A1, opts.ichol_droptol);
    ichol_c_ = IncompleteCholesky::factor(c_, opts.ichol_droptol);

    if (rho_ > 0.0) {
        // Cache C^{-1} [w; 0] for the Sherman-Morrison fold.
        std::vector<double> wz(static_cast<std::size_t>(np), 0.0);
        std::copy(w_.begin(), w_.end(), wz.begin());
        cw_.assign(static_cast<std::size_t>(np), 0.0);
        const LinearOperator c_op = LinearOperator::from_matrix(c_, true);
        const SolveReport rep =
            pcg(c_op, wz, ichol_c_.as_operator(), opts.nested_tol, opts.nested_maxit, cw_);
        if (!rep.converged && rep.final_relres > 100.0 * opts.nested_tol)
            throw std::runtime_error("three-field setup: middle-block solve for w failed");
        double wtcw = 0.0;
        for (int i = 0; i < nel; ++i) wtcw += w_[i] * cw_[i];
        smw_denom_ = 1.0 + rho_ * wtcw;
    }
}

LinearOperator ThreeFieldSystem::system_operator() const
{
    const int nu = n_disp();
    const int np = n_pres();
    const int nz = n_z();
    const double c_mu = params_.mu / (params_.alpha * params_.alpha);
    return LinearOperator(
        size(),
        [this, nu, np, nz, c_mu](std::span<const double> x, std::span<double> y) {
            const auto xu = x.subspan(0, nu);
            const auto xp = x.subspan(nu, np);
            const auto xz = x.subspan(nu + np, nz);
            auto yu = y.subspan(0, nu);
            auto yp = y.subspan(nu, np);
            auto yz = y.subspan(nu + np, nz);
            const auto& m = blocks_->M_int;

            // y_u = A1 u - B^T x_z
            blocks_->A1.apply(xu, yu);
            bt_.apply_add(xz, yu, -1.0);

            // shared coupling: t_i = eps M_i (x_p + x_z)_i + rho w_i w.(x_p + x_z)
            std::vector<double> t(static_cast<std::size_t>(nz));
            double wsum = 0.0;
            for (int i = 0; i < nz; ++i) {
                t[i] = xp[i] + xz[i];
                wsum += w_[i] * t[i];
            }
            for (int i = 0; i < nz; ++i) t[i] = eps_ * m[i] * t[i] + rho_ * w_[i] * wsum;

            // y_p = -(mu/a^2) D x_p - [t; 0]
            blocks_->D.apply(xp, yp);
            scale(-c_mu, yp);
            for (int i = 0; i < nz; ++i) yp[i] -= t[i];

            // y_z = -B u - t
            blocks_->B_int.apply(xu, yz);
            for (int i = 0; i < nz; ++i) yz[i] = -yz[i] - t[i];
        },
        true);
}

std::vector<double> ThreeFieldSystem::build_rhs(const Loads& loads) const
{
    const int nu = n_disp();
    const int np = n_pres();
    const int nz = n_z();
    std::vector<double> rhs(static_cast<std::size_t>(size()), 0.0);

    // First block: (1/mu) b1 minus Dirichlet coupling (the grad-div part of
    // the elasticity rhs carries a 1/eps factor here).
    for (int i = 0; i < nu; ++i) rhs[i] = loads.b1[i] / params_.mu - blocks_->a1_bc[i];
    std::vector<double> t(blocks_->M_int.size());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = blocks_->b_bc[k] / blocks_->M_int[k];
    std::vector<double> coupling(static_cast<std::size_t>(nu), 0.0);
    blocks_->B_int.apply_transpose(t, coupling);
    axpy(-1.0 / eps_, coupling, rhs);

    // Second block: -(1/alpha)(b2 + d_bc) - [B_boundary u_D; 0].
    for (int i = 0; i < np; ++i)
        rhs[nu + i] = -(loads.b2[i] + blocks_->d_bc[i]) / params_.alpha;
    for (int k = 0; k < nz; ++k) rhs[nu + k] -= blocks_->b_bc[k];
    return rhs;
}

void ThreeFieldSystem::a1_solve(std::span<const double> r, std::span<double> y,
                                long* inner) const
{
    const LinearOperator a1 = LinearOperator::from_matrix(blocks_->A1, true);
    std::vector<double> x(static_cast<std::size_t>(n_disp()), 0.0);
    const SolveReport rep =
        pcg(a1, r, ichol_a1_.as_operator(), opts_.nested_tol, opts_.nested_maxit, x);
    if (!rep.converged && rep.final_relres > 100.0 * opts_.nested_tol)
        throw std::runtime_error("three-field preconditioner: A1 solve failed");
    if (inner) *inner += rep.iterations;
    std::copy(x.begin(), x.end(), y.begin());
}

void ThreeFieldSystem::middle_solve(std::span<const double> r, std::span<double> y,
                                    long* inner) const
{
    const int np = n_pres();
    const int nz = n_z();
    const LinearOperator c_op = LinearOperator::from_matrix(c_, true);
    std::vector<double> x(static_cast<std::size_t>(np), 0.0);
    const SolveReport rep =
        pcg(c_op, r, ichol_c_.as_operator(), opts_.nested_tol, opts_.nested_maxit, x);
    if (!rep.converged && rep.final_relres > 100.0 * opts_.nested_tol)
        throw std::runtime_error("three-field preconditioner: middle-block solve failed");
    if (inner) *inner += rep.iterations;

    if (rho_ > 0.0) {
        // (C + rho w w^T)^{-1} r = C^{-1} r - rho C^{-1}w (w.C^{-1}r) / (1 + rho w.C^{-1}w)
        double wx = 0.0;
        for (int i = 0; i < nz; ++i) wx += w_[i] * x[i];
        const double f = rho_ * wx / smw_denom_;
        for (int i = 0; i < np; ++i) x[i] -= f * cw_[i];
    }
    std::copy(x.begin(), x.end(), y.begin());
}

void ThreeFieldSystem::apply_preconditioner(PrecondKind kind, std::span<const double> r,
                                            std::span<double> y, long* inner) const
{
    const int nu = n_disp();
    const int np = n_pres();
    const int nz = n_z();
    const auto& m = blocks_->M_int;
    const auto r1 = r.subspan(0, nu);
    const auto r2 = r.subspan(nu, np);
    const auto r3 = r.subspan(nu + np, nz);
    auto y1 = y.subspan(0, nu);
    auto y2 = y.subspan(nu, np);
    auto y3 = y.subspan(nu + np, nz);

    a1_solve(r1, y1, inner);
    if (kind == PrecondKind::diag) {
        middle_solve(r2, y2, inner);
        for (int i = 0; i < nz; ++i) y3[i] = r3[i] / m[i];
    } else {
        // [A1 0 0; 0 -Mid 0; -B 0 -M] y = r
        middle_solve(r2, y2, inner);
        for (int i = 0; i < np; ++i) y2[i] = -y2[i];
        std::vector<double> bu(static_cast<std::size_t>(nz));
        blocks_->B_int.apply(y1, bu);
        for (int i = 0; i < nz; ++i) y3[i] = -(r3[i] + bu[i]) / m[i];
    }
}

SolveReport ThreeFieldSystem::solve(std::span<const double> rhs, std::vector<double>& x) const
{
    long inner = 0;
    const PrecondKind kind = opts_.precond();
    const LinearOperator op = system_operator();
    const LinearOperator prec(
        size(),
        [this, kind, &inner](std::span<const double> r, std::span<double> y) {
            apply_preconditioner(kind, r, y, &inner);
        },
        kind == PrecondKind::diag);

    x.assign(static_cast<std::size_t>(size()), 0.0);
    SolveReport rep;
    if (opts_.method == KrylovMethod::minres)
        rep = minres(op, rhs, prec, opts_.tol, opts_.maxit, x);
    else
        rep = gmres_restarted(op, rhs, prec, opts_.restart, opts_.tol, opts_.maxit, x);
    rep.inner_iterations_total = inner;
    return rep;
}

void ThreeFieldSystem::recover(std::span<const double> x, WgField& u, WgField& p,
                               std::vector<double>& z) const
{
    const Mesh& mesh = *blocks_->mesh;
    const int nu = n_disp();
    const int np = n_pres();
    const int nz = n_z();

    u = WgField::zero(mesh, mesh.dim);
    blocks_->disp_map.expand_into(x.subspan(0, nu), u);

    // x_p = -(alpha/mu) p
    std::vector<double> pv(x.begin() + nu, x.begin() + nu + np);
    scale(-params_.mu / params_.alpha, pv);
    p = WgField::zero(mesh, 1);
    blocks_->pres_map.expand_into(pv, p);

    // x_z = z/eps - x_p restricted to interiors
    z.assign(static_cast<std::size_t>(nz), 0.0);
    for (int i = 0; i < nz; ++i) z[i] = eps_ * (x[nu + np + i] + x[nu + i]);
}

std::tuple<PoroState, std::vector<double>, SolveReport> solve_three_field_step(
    const ThreeFieldSystem& system, const VectorField& f, const ScalarField& s,
    const PoroState& prev, double t_new)
{
    const WgBlocks& blocks = system.blocks();
    const Loads loads = assemble_loads(blocks, f, s, system.params(), &prev.u, &prev.p);
    const std::vector<double> rhs = system.build_rhs(loads);
    std::vector<double> x;
    SolveReport rep = system.solve(rhs, x);

    PoroState next = PoroState::zero(*blocks.mesh);
    std::vector<double> z;
    system.recover(x, next.u, next.p, z);
    next.t = t_new;
    return {std::move(next), std::move(z), rep};
}

} // namespace porowg
