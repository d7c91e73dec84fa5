#include <doctest.h>

#include <cmath>
#include <random>

#include "porowg/dense.hpp"
#include "porowg/poro2.hpp"
#include "porowg/problems.hpp"
#include "porowg/vec.hpp"

using namespace porowg;

namespace {

std::vector<double> random_vector(int n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

PhysicalParams poro_params(double lambda, double dt)
{
    PhysicalParams p;
    p.mu = 1.0;
    p.lambda = lambda;
    p.dt = dt;
    return p;
}

} // namespace

TEST_CASE("two-field operator is symmetric and keeps the B facet rows zero")
{
    const Mesh mesh = build_structured_mesh(2, 3);
    const PhysicalParams params = poro_params(100.0, 1e-3);
    const WgBlocks blocks = assemble_blocks(mesh, params);
    const TwoFieldSystem system(blocks, params);

    CHECK(system.system_operator().symmetry_defect() < 1e-10);

    // Pressure output of a pure displacement input is supported on the
    // interior rows only (B = [B_int; 0]).
    std::vector<double> x(system.size(), 0.0), y(system.size());
    const auto u = random_vector(system.n_disp(), 3);
    std::copy(u.begin(), u.end(), x.begin());
    system.system_operator().apply(x, y);
    for (int i = mesh.n_elements(); i < system.n_pres(); ++i) CHECK(y[system.n_disp() + i] == 0.0);
}

TEST_CASE("vanishing coupling decouples the blocks")
{
    const Mesh mesh = build_structured_mesh(2, 2);
    PhysicalParams params = poro_params(10.0, 1e-3);
    params.alpha = 1e-300; // the coupling blocks scale linearly with alpha
    const WgBlocks blocks = assemble_blocks(mesh, params);
    const TwoFieldSystem system(blocks, params);

    std::vector<double> x(system.size(), 0.0), y(system.size());
    const auto p = random_vector(system.n_pres(), 5);
    std::copy(p.begin(), p.end(), x.begin() + system.n_disp());
    system.system_operator().apply(x, y);
    for (int i = 0; i < system.n_disp(); ++i) CHECK(std::abs(y[i]) < 1e-280);
}

TEST_CASE("zero forcing and zero previous state give the zero solution")
{
    const Mesh mesh = build_structured_mesh(2, 2);
    const PhysicalParams params = poro_params(1.0, 1e-3);
    const WgBlocks blocks = assemble_blocks(mesh, params);
    const TwoFieldSystem system(blocks, params);
    auto [state, rep] =
        solve_two_field_step(system, nullptr, nullptr, PoroState::zero(mesh), params.dt);
    CHECK(rep.converged);
    CHECK(rep.iterations == 0);
    CHECK(norm2(state.u.interior) == 0.0);
    CHECK(norm2(state.p.interior) == 0.0);
}

TEST_CASE("preconditioner applications match dense block solves on n=2")
{
    const Mesh mesh = build_structured_mesh(2, 2);
    const PhysicalParams params = poro_params(100.0, 1e-3);
    const WgBlocks blocks = assemble_blocks(mesh, params);
    const TwoFieldSystem system(blocks, params);
    const double eps = params.epsilon();
    const int nu = system.n_disp(), np = system.n_pres();
    const int nel = mesh.n_elements();

    const DenseMatrix lead =
        DenseMatrix::add(DenseMatrix::from_sparse(blocks.A1), DenseMatrix::from_sparse(blocks.A0),
                         eps, 1.0);
    const DenseMatrix shat = DenseMatrix::from_sparse(blocks.D.scaled(eps / params.mu));

    SUBCASE("zero input gives zero output")
    {
        std::vector<double> r(nu + np, 0.0), y(nu + np, 1.0);
        long inner = 0;
        system.apply_preconditioner(PrecondKind::diag, r, y, &inner);
        CHECK(norm2(y) == 0.0);
    }
    SUBCASE("diagonal kind on a pressure-supported residual")
    {
        std::vector<double> r(nu + np, 0.0);
        const auto r2 = random_vector(np, 51);
        std::copy(r2.begin(), r2.end(), r.begin() + nu);
        std::vector<double> y(nu + np);
        long inner = 0;
        system.apply_preconditioner(PrecondKind::diag, r, y, &inner);
        // The preconditioner is assembled SPD, so the pressure block returns
        // + (eps/mu D)^{-1} r2.
        const auto y2 = shat.spd_solve(r2);
        for (int i = 0; i < nu; ++i) CHECK(std::abs(y[i]) < 1e-12);
        for (int i = 0; i < np; ++i) CHECK(y[nu + i] == doctest::Approx(y2[i]).epsilon(1e-10));
    }
    SUBCASE("triangular kind against the dense block solve")
    {
        const auto r = random_vector(nu + np, 52);
        std::vector<double> y(nu + np);
        long inner = 0;
        system.apply_preconditioner(PrecondKind::tri, r, y, &inner);

        const auto y1 = lead.spd_solve({r.data(), static_cast<std::size_t>(nu)});
        std::vector<double> t(r.begin() + nu, r.end());
        std::vector<double> bu(nel);
        blocks.B_int.apply(y1, bu);
        const double cb = params.alpha * eps / params.mu;
        for (int i = 0; i < nel; ++i) t[i] += cb * bu[i];
        auto y2 = shat.spd_solve(t);
        for (auto& v : y2) v = -v;

        for (int i = 0; i < nu; ++i) CHECK(y[i] == doctest::Approx(y1[i]).epsilon(1e-8));
        for (int i = 0; i < np; ++i) CHECK(y[nu + i] == doctest::Approx(y2[i]).epsilon(1e-8));
    }
}

TEST_CASE("iteration counts near the reference table values")
{
    const ProblemSetup probe = make_poro_2d(poro_params(1.0, 1e-3));
    struct Cell {
        KrylovMethod method;
        double lambda;
        int expected;
        int tol;
    };
    const Cell cells[] = {{KrylovMethod::minres, 1.0, 16, 3},
                          {KrylovMethod::minres, 1e4, 5, 3},
                          {KrylovMethod::gmres, 1.0, 8, 2},
                          {KrylovMethod::gmres, 1e4, 3, 2}};
    const Mesh mesh = build_structured_mesh(2, 16);
    for (const Cell& cell : cells) {
        const PhysicalParams params = poro_params(cell.lambda, 1e-3);
        const ProblemSetup prob = make_poro_2d(params);
        const WgBlocks blocks = assemble_blocks(mesh, params);
        PoroSolveOptions opts;
        opts.method = cell.method;
        const TwoFieldSystem system(blocks, params, opts);
        auto [state, rep] = solve_two_field_step(system, prob.body_force(params.dt),
                                                 prob.source(params.dt), PoroState::zero(mesh),
                                                 params.dt);
        CHECK(rep.converged);
        CHECK(std::abs(rep.iterations - cell.expected) <= cell.tol);
    }
}

TEST_CASE("march: zero data stays zero and one step matches the direct solve")
{
    const Mesh mesh = build_structured_mesh(2, 4);
    PhysicalParams params = poro_params(1.0, 1e-3);
    PoroSolveOptions opts;

    SUBCASE("zero trajectory")
    {
        const TimeVectorField f = [](const std::array<double, 3>&, double) {
            return std::array<double, 3>{0.0, 0.0, 0.0};
        };
        const TimeScalarField s = [](const std::array<double, 3>&, double) { return 0.0; };
        const MarchResult r = march(mesh, params, f, s, WgField::zero(mesh, 2),
                                    WgField::zero(mesh, 1), 4e-3, 4, opts);
        REQUIRE(r.states.size() == 4);
        for (const auto& st : r.states) {
            CHECK(norm2(st.u.interior) == 0.0);
            CHECK(norm2(st.u.facet) == 0.0);
            CHECK(norm2(st.p.interior) == 0.0);
        }
    }
    SUBCASE("single step consistency")
    {
        const ProblemSetup prob = make_poro_2d(params);
        const TimeVectorField f = [&prob](const std::array<double, 3>& x, double t) {
            return prob.body_force(t)(x);
        };
        const TimeScalarField s = [&prob](const std::array<double, 3>& x, double t) {
            return prob.source(t)(x);
        };
        const double T = 1e-3;
        const MarchResult r =
            march(mesh, params, f, s, WgField::zero(mesh, 2), WgField::zero(mesh, 1), T, 1, opts);
        REQUIRE(r.states.size() == 1);

        PhysicalParams step_params = params;
        step_params.dt = T;
        const WgBlocks blocks = assemble_blocks(mesh, step_params);
        const TwoFieldSystem system(blocks, step_params, opts);
        auto [state, rep] = solve_two_field_step(system, prob.body_force(T), prob.source(T),
                                                 PoroState::zero(mesh), T);
        CHECK(rep.converged);
        for (std::size_t i = 0; i < state.u.interior.size(); ++i)
            CHECK(r.states[0].u.interior[i] == doctest::Approx(state.u.interior[i]).epsilon(1e-14));
        for (std::size_t i = 0; i < state.p.interior.size(); ++i)
            CHECK(r.states[0].p.interior[i] == doctest::Approx(state.p.interior[i]).epsilon(1e-14));
    }
}

TEST_CASE("two-field solve nests exactly three Krylov levels")
{
    const Mesh mesh = build_structured_mesh(2, 4);
    const PhysicalParams params = poro_params(1.0, 1e-3);
    const ProblemSetup prob = make_poro_2d(params);
    const WgBlocks blocks = assemble_blocks(mesh, params);
    const TwoFieldSystem system(blocks, params);
    KrylovScope::reset_max();
    auto [state, rep] = solve_two_field_step(system, prob.body_force(params.dt),
                                             prob.source(params.dt), PoroState::zero(mesh),
                                             params.dt);
    CHECK(rep.converged);
    // outer Krylov -> nested elasticity Krylov -> PCG for A1
    CHECK(KrylovScope::max_depth_seen() == 3);
    CHECK(rep.inner_iterations_total > 0);
}
