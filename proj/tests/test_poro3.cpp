#include <doctest.h>

#include <cmath>
#include <random>

#include "porowg/dense.hpp"
#include "porowg/poro3.hpp"
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

TEST_CASE("choose_rho is a tenth of the smallest mass entry")
{
    const std::vector<double> m = {0.5, 0.25, 0.25};
    CHECK(choose_rho(m) == doctest::Approx(0.025));

    for (const int n : {4, 8}) {
        const Mesh mesh = build_structured_mesh(2, n);
        CHECK(choose_rho(mesh.volumes) == doctest::Approx(0.1 / (2.0 * n * n)));
    }
    // Refining n -> 2n divides rho by four in 2D.
    CHECK(choose_rho(build_structured_mesh(2, 8).volumes) ==
          doctest::Approx(0.25 * choose_rho(build_structured_mesh(2, 4).volumes)));

    CHECK_THROWS_AS(choose_rho(std::vector<double>{1.0, -1.0}), std::invalid_argument);
}

TEST_CASE("three-field operator is symmetric; zero data gives zero solution and z")
{
    const Mesh mesh = build_structured_mesh(2, 3);
    const PhysicalParams params = poro_params(100.0, 1e-3);
    const WgBlocks blocks = assemble_blocks(mesh, params);
    const ThreeFieldSystem system(blocks, params, true);

    CHECK(system.system_operator().symmetry_defect() < 1e-10);
    CHECK(system.rho() == doctest::Approx(choose_rho(blocks.M_int)));

    auto [state, z, rep] =
        solve_three_field_step(system, nullptr, nullptr, PoroState::zero(mesh), params.dt);
    CHECK(rep.converged);
    CHECK(rep.iterations == 0);
    CHECK(norm2(state.u.interior) == 0.0);
    CHECK(norm2(state.p.interior) == 0.0);
    CHECK(norm2(z) == 0.0);
}

TEST_CASE("three-field solution agrees with the two-field solve")
{
    const Mesh mesh = build_structured_mesh(2, 4);
    for (const double lambda : {1.0, 1e4}) {
        const PhysicalParams params = poro_params(lambda, 1e-3);
        const ProblemSetup prob = make_poro_2d(params);
        const WgBlocks blocks = assemble_blocks(mesh, params);

        PoroSolveOptions opts;
        opts.tol = 1e-11;
        opts.method = KrylovMethod::gmres;
        const TwoFieldSystem two(blocks, params, opts);
        auto [st2, rep2] = solve_two_field_step(two, prob.body_force(params.dt),
                                                prob.source(params.dt), PoroState::zero(mesh),
                                                params.dt);
        REQUIRE(rep2.converged);

        const ThreeFieldSystem three(blocks, params, true, opts);
        auto [st3, z3, rep3] = solve_three_field_step(three, prob.body_force(params.dt),
                                                      prob.source(params.dt),
                                                      PoroState::zero(mesh), params.dt);
        REQUIRE(rep3.converged);

        double du = 0.0, dp = 0.0;
        for (std::size_t i = 0; i < st2.u.interior.size(); ++i)
            du += std::pow(st2.u.interior[i] - st3.u.interior[i], 2);
        for (std::size_t i = 0; i < st2.u.facet.size(); ++i)
            du += std::pow(st2.u.facet[i] - st3.u.facet[i], 2);
        for (std::size_t i = 0; i < st2.p.interior.size(); ++i)
            dp += std::pow(st2.p.interior[i] - st3.p.interior[i], 2);
        for (std::size_t i = 0; i < st2.p.facet.size(); ++i)
            dp += std::pow(st2.p.facet[i] - st3.p.facet[i], 2);
        const double u_scale = std::max(1.0, norm2(st2.u.interior));
        const double p_scale = std::max(1.0, norm2(st2.p.interior));
        CHECK(std::sqrt(du) / u_scale < 1e-6);
        CHECK(std::sqrt(dp) / p_scale < 1e-6);

        // z is the numerical pressure of the displacement.
        std::vector<double> u_free = blocks.disp_map.restrict_field(st3.u);
        std::vector<double> bu(mesh.n_elements());
        blocks.B_int.apply(u_free, bu);
        for (int k = 0; k < mesh.n_elements(); ++k) {
            const double expected = -bu[k] / blocks.M_int[k];
            CHECK(z3[k] == doctest::Approx(expected).epsilon(1e-5));
        }
    }
}

TEST_CASE("regularized and unregularized systems share the solution")
{
    const Mesh mesh = build_structured_mesh(2, 4);
    for (const double lambda : {1.0, 1e4}) {
        const PhysicalParams params = poro_params(lambda, 1e-3);
        const ProblemSetup prob = make_poro_2d(params);
        const WgBlocks blocks = assemble_blocks(mesh, params);
        PoroSolveOptions opts;
        opts.tol = 1e-12;
        opts.method = KrylovMethod::gmres;

        const ThreeFieldSystem reg(blocks, params, true, opts);
        const ThreeFieldSystem unreg(blocks, params, false, opts);
        CHECK(unreg.rho() == 0.0);

        auto [st_r, z_r, rep_r] = solve_three_field_step(reg, prob.body_force(params.dt),
                                                         prob.source(params.dt),
                                                         PoroState::zero(mesh), params.dt);
        auto [st_u, z_u, rep_u] = solve_three_field_step(unreg, prob.body_force(params.dt),
                                                         prob.source(params.dt),
                                                         PoroState::zero(mesh), params.dt);
        REQUIRE(rep_r.converged);
        REQUIRE(rep_u.converged);

        double diff = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < st_r.u.interior.size(); ++i) {
            diff += std::pow(st_r.u.interior[i] - st_u.u.interior[i], 2);
            scale += std::pow(st_r.u.interior[i], 2);
        }
        for (std::size_t i = 0; i < st_r.p.interior.size(); ++i) {
            diff += std::pow(st_r.p.interior[i] - st_u.p.interior[i], 2);
            scale += std::pow(st_r.p.interior[i], 2);
        }
        for (std::size_t i = 0; i < z_r.size(); ++i) {
            diff += std::pow(z_r[i] - z_u[i], 2);
            scale += std::pow(z_r[i], 2);
        }
        CHECK(std::sqrt(diff / scale) < 1e-8);
    }
}

TEST_CASE("three-field preconditioners match dense block solves on n=2")
{
    const Mesh mesh = build_structured_mesh(2, 2);
    const PhysicalParams params = poro_params(100.0, 1e-3);
    const WgBlocks blocks = assemble_blocks(mesh, params);
    const ThreeFieldSystem system(blocks, params, true);
    const int nu = system.n_disp(), np = system.n_pres(), nz = system.n_z();
    const double rho = system.rho();

    DenseMatrix a1 = DenseMatrix::from_sparse(blocks.A1);
    DenseMatrix mid = DenseMatrix::from_sparse(system.middle_matrix());
    // Unit-mass direction padded to the pressure space.
    std::vector<double> w_pad(np, 0.0);
    for (int i = 0; i < nz; ++i) w_pad[i] = system.w()[i];
    mid.add_rank1(w_pad, w_pad, rho);

    SUBCASE("zero maps to zero")
    {
        std::vector<double> r(system.size(), 0.0), y(system.size(), 1.0);
        long inner = 0;
        system.apply_preconditioner(PrecondKind::diag, r, y, &inner);
        CHECK(norm2(y) == 0.0);
    }
    SUBCASE("diagonal kind")
    {
        const auto r = random_vector(system.size(), 61);
        std::vector<double> y(system.size());
        long inner = 0;
        system.apply_preconditioner(PrecondKind::diag, r, y, &inner);

        const auto y1 = a1.spd_solve({r.data(), static_cast<std::size_t>(nu)});
        const auto y2 = mid.spd_solve({r.data() + nu, static_cast<std::size_t>(np)});
        for (int i = 0; i < nu; ++i) CHECK(y[i] == doctest::Approx(y1[i]).epsilon(1e-8));
        for (int i = 0; i < np; ++i) CHECK(y[nu + i] == doctest::Approx(y2[i]).epsilon(1e-8));
        for (int i = 0; i < nz; ++i)
            CHECK(y[nu + np + i] ==
                  doctest::Approx(r[nu + np + i] / blocks.M_int[i]).epsilon(1e-12));
    }
    SUBCASE("triangular kind applies the trailing coupling correction")
    {
        const auto r = random_vector(system.size(), 62);
        std::vector<double> y(system.size());
        long inner = 0;
        system.apply_preconditioner(PrecondKind::tri, r, y, &inner);

        const auto y1 = a1.spd_solve({r.data(), static_cast<std::size_t>(nu)});
        auto y2 = mid.spd_solve({r.data() + nu, static_cast<std::size_t>(np)});
        for (auto& v : y2) v = -v;
        std::vector<double> bu(nz);
        blocks.B_int.apply(y1, bu);
        for (int i = 0; i < nu; ++i) CHECK(y[i] == doctest::Approx(y1[i]).epsilon(1e-8));
        for (int i = 0; i < np; ++i) CHECK(y[nu + i] == doctest::Approx(y2[i]).epsilon(1e-8));
        for (int i = 0; i < nz; ++i) {
            const double expected = -(r[nu + np + i] + bu[i]) / blocks.M_int[i];
            CHECK(y[nu + np + i] == doctest::Approx(expected).epsilon(1e-8));
        }
    }
}

TEST_CASE("iteration counts and the regularization gap at lambda = 1e4")
{
    const Mesh mesh = build_structured_mesh(2, 16);
    const PhysicalParams params = poro_params(1e4, 1e-3);
    const ProblemSetup prob = make_poro_2d(params);
    const WgBlocks blocks = assemble_blocks(mesh, params);

    for (const KrylovMethod method : {KrylovMethod::minres, KrylovMethod::gmres}) {
        PoroSolveOptions opts;
        opts.method = method;
        const ThreeFieldSystem reg(blocks, params, true, opts);
        const ThreeFieldSystem unreg(blocks, params, false, opts);
        auto [s1, z1, rep_reg] = solve_three_field_step(reg, prob.body_force(params.dt),
                                                        prob.source(params.dt),
                                                        PoroState::zero(mesh), params.dt);
        auto [s2, z2, rep_unreg] = solve_three_field_step(unreg, prob.body_force(params.dt),
                                                          prob.source(params.dt),
                                                          PoroState::zero(mesh), params.dt);
        REQUIRE(rep_reg.converged);
        REQUIRE(rep_unreg.converged);
        const int gap_required = method == KrylovMethod::minres ? 5 : 4;
        CHECK(rep_unreg.iterations - rep_reg.iterations >= gap_required);
        if (method == KrylovMethod::minres) {
            CHECK(rep_reg.iterations >= 38);
            CHECK(rep_reg.iterations <= 68); // 48..58 reference band +-10
        } else {
            CHECK(rep_reg.iterations >= 15);
            CHECK(rep_reg.iterations <= 38); // 25..28 reference band +-10
        }
    }
}

TEST_CASE("three-field solve nests exactly two Krylov levels")
{
    const Mesh mesh = build_structured_mesh(2, 4);
    const PhysicalParams params = poro_params(1.0, 1e-3);
    const ProblemSetup prob = make_poro_2d(params);
    const WgBlocks blocks = assemble_blocks(mesh, params);
    const ThreeFieldSystem system(blocks, params, true);
    KrylovScope::reset_max();
    auto [state, z, rep] = solve_three_field_step(system, prob.body_force(params.dt),
                                                  prob.source(params.dt), PoroState::zero(mesh),
                                                  params.dt);
    CHECK(rep.converged);
    // outer Krylov + inner PCG, nothing deeper
    CHECK(KrylovScope::max_depth_seen() == 2);
}
