// Compares the OpenMP kernels against their serial reference: sparse
// matrix-vector products and element-loop assembly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "porowg/mesh.hpp"
#include "porowg/vec.hpp"
#include "porowg/wgfem.hpp"

using namespace porowg;

namespace {

double now_s()
{
    using Clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(Clock::now().time_since_epoch()).count();
}

template <typename Fn>
double time_best(Fn&& fn, int repeats)
{
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const double t0 = now_s();
        fn();
        best = std::min(best, now_s() - t0);
    }
    return best;
}

} // namespace

int main(int argc, char** argv)
{
    int n = argc > 1 ? std::atoi(argv[1]) : 64;
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif

    const Mesh mesh = build_structured_mesh(2, n);
    PhysicalParams params;

    const double t_assembly = time_best([&] { (void)assemble_elasticity(mesh, params); }, 3);
    std::printf("assembly      2D n=%-4d  N=%-8d %8.2f ms\n", n, mesh.n_elements(),
                1e3 * t_assembly);

    const WgBlocks blocks = assemble_elasticity(mesh, params);
    const SparseMatrix& a = blocks.A1;
    std::vector<double> x(static_cast<std::size_t>(a.cols()), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.1 * static_cast<double>(i));
    std::vector<double> y(static_cast<std::size_t>(a.rows()), 0.0);
    std::vector<double> y_ref(y);

    const int reps = 200;
    const double t_omp = time_best(
        [&] {
            for (int r = 0; r < reps; ++r) a.apply(x, y);
        },
        3);
    const double t_serial = time_best(
        [&] {
            for (int r = 0; r < reps; ++r) a.apply_serial(x, y_ref);
        },
        3);

    double max_diff = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        max_diff = std::max(max_diff, std::abs(y[i] - y_ref[i]));

    const double gflops = 2.0 * static_cast<double>(a.nnz()) * reps / 1e9;
    std::printf("spmv parallel nnz=%-9zu %8.2f ms  (%.2f GF/s)\n", a.nnz(), 1e3 * t_omp,
                gflops / t_omp);
    std::printf("spmv serial   nnz=%-9zu %8.2f ms  (%.2f GF/s)\n", a.nnz(), 1e3 * t_serial,
                gflops / t_serial);
    std::printf("speedup %.2fx, max |diff| = %.3e\n", t_serial / t_omp, max_diff);
    return max_diff == 0.0 ? 0 : 1;
}
