#include "porowg/poro2.hpp"

#include <stdexcept>

#include "porowg/vec.hpp"

namespace porowg {

TwoFieldSystem::TwoFieldSystem(const WgBlocks& blocks, const PhysicalParams& params,
                               const PoroSolveOptions& opts)
    : blocks_(&blocks), params_(params), opts_(opts), eps_(params.epsilon()),
      elas_(blocks, params, opts.elasticity_rho, opts.ichol_droptol),
      bt_(blocks.B_int.transpose()),
      ichol_d_(IncompleteCholesky::factor(blocks.D, opts.ichol_droptol))
{
    params.validate();
}

LinearOperator TwoFieldSystem::system_operator() const
{
    const int nu = n_disp();
    const int np = n_pres();
    const int nel = blocks_->mesh->n_elements();
    const double c_b = params_.alpha * eps_ / params_.mu;
    const double c_d = eps_ / params_.mu;
    return LinearOperator(
        nu + np,
        [this, nu, np, nel, c_b, c_d](std::span<const double> x, std::span<double> y) {
            const auto xu = x.subspan(0, nu);
            const auto xp = x.subspan(nu, np);
            auto yu = y.subspan(0, nu);
            auto yp = y.subspan(nu, np);
            // (eps A1 + A0) u - (alpha eps/mu) B^T p_int
            blocks_->A1.apply(xu, yu);
            scale(eps_, yu);
            blocks_->A0.apply_add(xu, yu, 1.0);
            bt_.apply_add(xp.subspan(0, nel), yu, -c_b);
            // -(alpha eps/mu) B u - (eps/mu) D p ; B has zero facet rows
            blocks_->D.apply(xp, yp);
            scale(-c_d, yp);
            std::vector<double> bu(static_cast<std::size_t>(nel));
            blocks_->B_int.apply(xu, bu);
            for (int i = 0; i < nel; ++i) yp[i] -= c_b * bu[i];
        },
        true);
}

std::vector<double> TwoFieldSystem::build_rhs(const Loads& loads) const
{
    const int nu = n_disp();
    const int np = n_pres();
    const int nel = blocks_->mesh->n_elements();
    const double s = eps_ / params_.mu;
    std::vector<double> rhs(static_cast<std::size_t>(nu + np), 0.0);

    const std::vector<double> rhs1 = elasticity_rhs(*blocks_, params_, loads.b1);
    std::copy(rhs1.begin(), rhs1.end(), rhs.begin());

    for (int i = 0; i < np; ++i)
        rhs[nu + i] = s * (loads.b2[i] + blocks_->d_bc[i]);
    for (int k = 0; k < nel; ++k) rhs[nu + k] += params_.alpha * s * blocks_->b_bc[k];
    return rhs;
}

void TwoFieldSystem::leading_solve(std::span<const double> r, std::span<double> y,
                                   long* inner) const
{
    ElasticityOptions eopts;
    eopts.method = opts_.nested_method;
    eopts.tol = opts_.nested_tol;
    eopts.maxit = opts_.nested_maxit;
    eopts.restart = opts_.restart;
    eopts.inner_tol = opts_.nested_tol;
    std::vector<double> x(static_cast<std::size_t>(n_disp()), 0.0);
    const SolveReport rep = elas_.solve_reduced(r, eopts, x);
    if (!rep.converged && rep.final_relres > 100.0 * opts_.nested_tol)
        throw std::runtime_error("two-field preconditioner: nested elasticity solve failed "
                                 "(relres " + std::to_string(rep.final_relres) + ")");
    if (inner) *inner += rep.iterations + rep.inner_iterations_total;
    std::copy(x.begin(), x.end(), y.begin());
}

void TwoFieldSystem::schur_solve(std::span<const double> r, std::span<double> y,
                                 long* inner) const
{
    const LinearOperator d_op = LinearOperator::from_matrix(blocks_->D, true);
    std::vector<double> x(static_cast<std::size_t>(n_pres()), 0.0);
    const SolveReport rep = pcg(d_op, r, ichol_d_.as_operator(), opts_.nested_tol,
                                opts_.nested_maxit, x);
    if (!rep.converged && rep.final_relres > 100.0 * opts_.nested_tol)
        throw std::runtime_error("two-field preconditioner: D solve failed (relres " +
                                 std::to_string(rep.final_relres) + ")");
    if (inner) *inner += rep.iterations;
    const double s = params_.mu / eps_; // (eps/mu D)^{-1} = (mu/eps) D^{-1}
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = s * x[i];
}

void TwoFieldSystem::apply_preconditioner(PrecondKind kind, std::span<const double> r,
                                          std::span<double> y, long* inner) const
{
    const int nu = n_disp();
    const int np = n_pres();
    const int nel = blocks_->mesh->n_elements();
    const auto r1 = r.subspan(0, nu);
    const auto r2 = r.subspan(nu, np);
    auto y1 = y.subspan(0, nu);
    auto y2 = y.subspan(nu, np);

    leading_solve(r1, y1, inner);
    if (kind == PrecondKind::diag) {
        schur_solve(r2, y2, inner);
    } else {
        // [L 0; -(alpha eps/mu) B  -S] y = r  =>  y2 = -S^{-1}(r2 + (alpha eps/mu) B y1)
        std::vector<double> t(r2.begin(), r2.end());
        std::vector<double> bu(static_cast<std::size_t>(nel));
        blocks_->B_int.apply(y1, bu);
        const double c_b = params_.alpha * eps_ / params_.mu;
        for (int i = 0; i < nel; ++i) t[i] += c_b * bu[i];
        schur_solve(t, y2, inner);
        for (int i = 0; i < np; ++i) y2[i] = -y2[i];
    }
}

SolveReport TwoFieldSystem::solve(std::span<const double> rhs, std::vector<double>& x) const
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

std::pair<PoroState, SolveReport> solve_two_field_step(const TwoFieldSystem& system,
                                                       const VectorField& f,
                                                       const ScalarField& s,
                                                       const PoroState& prev, double t_new)
{
    const WgBlocks& blocks = system.blocks();
    const Mesh& mesh = *blocks.mesh;
    const Loads loads = assemble_loads(blocks, f, s, system.params(), &prev.u, &prev.p);
    const std::vector<double> rhs = system.build_rhs(loads);
    std::vector<double> x;
    SolveReport rep = system.solve(rhs, x);

    PoroState next = PoroState::zero(mesh);
    const std::span<const double> xs(x);
    blocks.disp_map.expand_into(xs.subspan(0, system.n_disp()), next.u);
    blocks.pres_map.expand_into(xs.subspan(system.n_disp(), system.n_pres()), next.p);
    next.t = t_new;
    return {std::move(next), rep};
}

MarchResult march(const Mesh& mesh, PhysicalParams params, const TimeVectorField& f,
                  const TimeScalarField& s, const WgField& u0, const WgField& p0, double T,
                  int steps, const PoroSolveOptions& opts)
{
    if (steps < 1) throw std::invalid_argument("march: steps must be >= 1");
    params.dt = T / steps;
    const WgBlocks blocks = assemble_blocks(mesh, params);
    const TwoFieldSystem system(blocks, params, opts);

    MarchResult result;
    PoroState state{u0, p0, 0.0};
    for (int n = 1; n <= steps; ++n) {
        const double t = n * params.dt;
        const VectorField f_t = [&f, t](const std::array<double, 3>& x) { return f(x, t); };
        const ScalarField s_t = [&s, t](const std::array<double, 3>& x) { return s(x, t); };
        auto [next, rep] = solve_two_field_step(system, f_t, s_t, state, t);
        if (!rep.converged)
            throw std::runtime_error("march: step " + std::to_string(n) + " did not converge");
        state = std::move(next);
        result.states.push_back(state);
        result.reports.push_back(rep);
    }
    return result;
}

} // namespace porowg
