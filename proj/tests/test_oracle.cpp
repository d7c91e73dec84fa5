#include <doctest.h>

#include <cmath>
#include <random>

#include "porowg/oracle.hpp"
#include "porowg/poro3.hpp"
#include "porowg/vec.hpp"

using namespace porowg;

namespace {

PhysicalParams poro_params(double lambda)
{
    PhysicalParams p;
    p.mu = 1.0;
    p.lambda = lambda;
    p.dt = 1e-3;
    return p;
}

} // namespace

TEST_CASE("dense_spectrum basics")
{
    const DenseMatrix eye = DenseMatrix::identity(6);
    const auto eigs = dense_spectrum(eye, nullptr);
    for (double e : eigs) CHECK(e == doctest::Approx(1.0));

    DenseMatrix too_big(kDenseDimensionCap + 1, kDenseDimensionCap + 1);
    CHECK_THROWS_AS(dense_spectrum(too_big, nullptr), std::invalid_argument);
}

TEST_CASE("inf-sup constant: in (0,1), stable under refinement")
{
    PhysicalParams params;
    params.mu = 0.5;
    double beta2 = 0.0, beta4 = 0.0;
    {
        const Mesh mesh = build_structured_mesh(2, 2);
        beta2 = measure_inf_sup(assemble_elasticity(mesh, params));
    }
    {
        const Mesh mesh = build_structured_mesh(2, 4);
        beta4 = measure_inf_sup(assemble_elasticity(mesh, params));
    }
    CHECK(beta2 > 0.0);
    CHECK(beta2 < 1.0);
    CHECK(beta4 > 0.0);
    CHECK(beta4 < 1.0);
    CHECK(std::abs(beta4 - beta2) / beta2 < 0.2);

    const Mesh mesh3 = build_structured_mesh(3, 2);
    const double beta3d = measure_inf_sup(assemble_elasticity(mesh3, params));
    CHECK(beta3d > 0.0);
    CHECK(beta3d < 1.0);
}

TEST_CASE("measured constants satisfy their invariants")
{
    const Mesh mesh = build_structured_mesh(2, 4);
    const PhysicalParams params = poro_params(1.0);
    const WgBlocks blocks = assemble_blocks(mesh, params);
    const BoundConstants c = measure_constants(blocks, params);

    CHECK(c.beta > 0.0);
    CHECK(c.beta < 1.0);
    CHECK(c.gamma > 0.0);
    CHECK(c.gamma <= 1.0 + 1e-12);
    CHECK(c.c3 > 0.0);
    CHECK(c.c4 > 0.0);
    CHECK(c.c5 >= mesh.dim);
    // Uniform mesh: gamma = 1 and C3 collapses to beta^2.
    CHECK(c.gamma == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.c3 == doctest::Approx(c.beta * c.beta).epsilon(1e-12));
    // Definition identity.
    CHECK(c.c3 == doctest::Approx(c.beta * c.beta * (c.lambda_min_m / c.lambda_max_m) *
                                  c.gamma * c.gamma)
                      .epsilon(1e-12));
    CHECK(c.lambda_min_dtilde > 0.0);
}

TEST_CASE("two-field Schur spectrum on n=2: interval and multiplicity")
{
    const Mesh mesh = build_structured_mesh(2, 2);
    const PhysicalParams params = poro_params(1.0); // alpha = c0 = mu = 1, d = 2
    const WgBlocks blocks = assemble_blocks(mesh, params);
    const auto reports = verify_bounds(LemmaCase::two_field, blocks, params, 1.0, 2);
    REQUIRE(!reports.empty());
    const SpectrumReport& r43 = reports.front();
    CHECK(r43.lemma == "4.3");
    CHECK(r43.pass);
    CHECK(r43.min_eig() >= 1.0 - 1e-8);
    CHECK(r43.max_eig() <= 3.0 + 1e-8); // 1 + alpha^2 d / (c0 mu)

    // Eigenvalue 1 multiplicity at least N_f + 1 over the free facet dofs.
    const int n_free_facets = blocks.pres_map.n_free_facets;
    int mult = 0;
    for (double e : r43.eigenvalues)
        if (std::abs(e - 1.0) <= 1e-8) ++mult;
    CHECK(mult >= n_free_facets + 1);
}

TEST_CASE("lemma intervals hold on small meshes across the lambda sweep")
{
    for (const auto& [dim, n] : {std::pair{2, 2}, {2, 4}, {3, 1}}) {
        const Mesh mesh = build_structured_mesh(dim, n);
        for (const double lambda : {1.0, 1e4}) {
            {
                PhysicalParams params;
                params.mu = 0.5;
                params.lambda = lambda;
                const WgBlocks blocks = assemble_blocks(mesh, params);
                for (const auto& r : verify_bounds(LemmaCase::elasticity, blocks, params, 1.0, n)) {
                    INFO("lemma ", r.lemma, " dim ", dim, " n ", n, " lambda ", lambda);
                    CHECK(r.pass);
                }
            }
            {
                const PhysicalParams params = poro_params(lambda);
                const WgBlocks blocks = assemble_blocks(mesh, params);
                const double rho = choose_rho(blocks.M_int);
                for (const auto& r : verify_bounds(LemmaCase::two_field, blocks, params, rho, n)) {
                    INFO("lemma ", r.lemma, " dim ", dim, " n ", n, " lambda ", lambda);
                    CHECK(r.pass);
                }
                for (const auto& r :
                     verify_bounds(LemmaCase::three_field, blocks, params, rho, n)) {
                    INFO("lemma ", r.lemma, " dim ", dim, " n ", n, " lambda ", lambda);
                    CHECK(r.pass);
                }
            }
        }
    }
}

TEST_CASE("dense and sparse operator representations agree on random probes")
{
    const Mesh mesh = build_structured_mesh(2, 3);
    const PhysicalParams params = poro_params(100.0);
    const WgBlocks blocks = assemble_blocks(mesh, params);
    std::mt19937 rng(123);
    std::normal_distribution<double> dist(0.0, 1.0);

    auto agree = [&](const SparseMatrix& s) {
        const DenseMatrix d = DenseMatrix::from_sparse(s);
        std::vector<double> x(s.cols()), ys(s.rows()), yd(s.rows());
        for (int probe = 0; probe < 20; ++probe) {
            for (auto& v : x) v = dist(rng);
            s.apply(x, ys);
            d.apply(x, yd);
            const double scale = std::max(norm2(yd), 1e-300);
            for (int i = 0; i < s.rows(); ++i) CHECK(std::abs(ys[i] - yd[i]) <= 1e-12 * scale);
        }
    };
    agree(blocks.A1);
    agree(blocks.A0);
    agree(blocks.B_int);
    agree(blocks.D);
}

TEST_CASE("manufactured-solution convergence at desk scale")
{
    PoroSolveOptions opts;

    SUBCASE("spatial rate and the locking-free error ratio")
    {
        auto run = [&](double lambda) {
            return convergence_study_poro_2d(poro_params(lambda), {4, 8}, 0.5, 1, opts);
        };
        const RateTable t1 = run(1.0);
        const RateTable t2 = run(1e4);
        CHECK(t1.spatial_slope() > 0.7);
        CHECK(t1.spatial_slope() < 1.3);
        // Errors at lambda = 1e4 within 3x of lambda = 1 on matching meshes.
        for (std::size_t i = 0; i < t1.rows.size(); ++i)
            CHECK(t2.rows[i].total() <= 3.0 * t1.rows[i].total());
    }
    SUBCASE("temporal rate isolated against a fine-step reference")
    {
        const auto rows = temporal_study_poro_2d(poro_params(1.0), 8, 0.5, {2, 4, 8}, 64, 2, opts);
        std::vector<double> lx, ly;
        for (const auto& r : rows) {
            lx.push_back(std::log(r.dt));
            ly.push_back(std::log(r.diff));
        }
        const double slope = least_squares_slope(lx, ly);
        CHECK(slope > 0.8);
        CHECK(slope < 1.2);
    }
}
