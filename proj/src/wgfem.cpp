#include "porowg/wgfem.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace porowg {

void PhysicalParams::validate() const
{
    if (!(mu > 0.0)) throw std::invalid_argument("params: mu must be > 0");
    if (!(lambda >= 0.0)) throw std::invalid_argument("params: lambda must be >= 0");
    if (!(c0 > 0.0)) throw std::invalid_argument("params: c0 must be > 0");
    if (!(kappa > 0.0)) throw std::invalid_argument("params: kappa must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("params: dt must be > 0");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("params: alpha must be in (0, 1]");
}

WgField WgField::zero(const Mesh& mesh, int components)
{
    WgField f;
    f.components = components;
    f.interior.assign(static_cast<std::size_t>(mesh.n_elements()) * components, 0.0);
    f.facet.assign(static_cast<std::size_t>(mesh.n_facets()) * components, 0.0);
    return f;
}

DofMap DofMap::build(const Mesh& mesh, int components)
{
    DofMap m;
    m.components = components;
    m.n_elements = mesh.n_elements();
    m.facet_to_free.assign(mesh.n_facets(), -1);
    for (int f = 0; f < mesh.n_facets(); ++f) {
        if (!mesh.boundary_facet[f]) {
            m.facet_to_free[f] = m.n_free_facets++;
            m.free_to_facet.push_back(f);
        }
    }
    return m;
}

std::vector<double> DofMap::restrict_field(const WgField& field) const
{
    std::vector<double> v(static_cast<std::size_t>(n_free()), 0.0);
    for (int k = 0; k < n_elements; ++k)
        for (int c = 0; c < components; ++c) v[interior_dof(k, c)] = field.interior_at(k, c);
    for (int i = 0; i < n_free_facets; ++i)
        for (int c = 0; c < components; ++c)
            v[components * n_elements + i * components + c] = field.facet_at(free_to_facet[i], c);
    return v;
}

void DofMap::expand_into(std::span<const double> free_values, WgField& field) const
{
    for (int k = 0; k < n_elements; ++k)
        for (int c = 0; c < components; ++c) field.interior_at(k, c) = free_values[interior_dof(k, c)];
    for (int i = 0; i < n_free_facets; ++i)
        for (int c = 0; c < components; ++c)
            field.facet_at(free_to_facet[i], c) = free_values[components * n_elements + i * components + c];
}

// ---------------------------------------------------------------------------
// Local weak operators
// ---------------------------------------------------------------------------

Rt0Coefficients weak_gradient_local(const Mesh& mesh, int element, double interior_value,
                                    std::span<const double> facet_values)
{
    const int d = mesh.dim;
    if (element < 0 || element >= mesh.n_elements())
        throw std::invalid_argument("weak_gradient_local: invalid element");
    if (static_cast<int>(facet_values.size()) != d + 1)
        throw std::invalid_argument("weak_gradient_local: wrong facet value count");

    const double vol = mesh.volumes[element];
    const double inertia = mesh.element_inertia(element);
    if (!(vol > 0.0) || !(inertia > 0.0))
        throw std::runtime_error("weak_gradient_local: degenerate element " + std::to_string(element));

    // Test against the constant RT0 fields e_j:
    //   (grad_w u, e_j)_K = sum_i u_i |e_i| n_i^out(j)
    // and against the radial field x - x_c, whose normal trace on every facet
    // integrates to d |K| / (d+1) and whose divergence is d:
    //   (grad_w u, x - x_c)_K = (d|K|/(d+1)) sum_i u_i - d |K| u_int .
    Rt0Coefficients rt;
    double facet_sum = 0.0;
    for (int i = 0; i <= d; ++i) {
        const int f = mesh.element_facets[element][i];
        const double sgn = mesh.element_facet_signs[element][i];
        const double w = facet_values[i] * mesh.facet_measures[f] * sgn;
        for (int j = 0; j < d; ++j) rt.constant[j] += w * mesh.facet_normals[f][j];
        facet_sum += facet_values[i];
    }
    for (int j = 0; j < d; ++j) rt.constant[j] /= vol;
    rt.radial = (d * vol / (d + 1.0) * facet_sum - d * vol * interior_value) / inertia;
    return rt;
}

double weak_divergence_local(const Mesh& mesh, int element,
                             const std::array<double, 3>& interior_vec,
                             std::span<const std::array<double, 3>> facet_vecs)
{
    (void)interior_vec; // tests against constants only; the gradient term vanishes
    const int d = mesh.dim;
    if (element < 0 || element >= mesh.n_elements())
        throw std::invalid_argument("weak_divergence_local: invalid element");
    double s = 0.0;
    for (int i = 0; i <= d; ++i) {
        const int f = mesh.element_facets[element][i];
        const double sgn = mesh.element_facet_signs[element][i];
        const auto& n = mesh.facet_normals[f];
        double un = 0.0;
        for (int j = 0; j < d; ++j) un += facet_vecs[i][j] * n[j];
        s += mesh.facet_measures[f] * sgn * un;
    }
    return s / mesh.volumes[element];
}

std::vector<double> weak_divergence_field(const Mesh& mesh, const WgField& u)
{
    const int d = mesh.dim;
    std::vector<double> div(static_cast<std::size_t>(mesh.n_elements()), 0.0);
    for (int k = 0; k < mesh.n_elements(); ++k) {
        double s = 0.0;
        for (int i = 0; i <= d; ++i) {
            const int f = mesh.element_facets[k][i];
            const double sgn = mesh.element_facet_signs[k][i];
            const auto& n = mesh.facet_normals[f];
            double un = 0.0;
            for (int j = 0; j < d; ++j) un += u.facet_at(f, j) * n[j];
            s += mesh.facet_measures[f] * sgn * un;
        }
        div[k] = s / mesh.volumes[k];
    }
    return div;
}

// ---------------------------------------------------------------------------
// Global assembly
// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxLocal = 6; // 1 interior + up to 4 facets, + padding

/// Local scalar weak-Laplacian matrix on element k, local dof order
/// (interior, facet_0, ..., facet_d). Also returns the weak-divergence row
/// scaled by |K| (entries |e_i| sigma_i n_i, facet dofs only).
struct LocalKernels {
    int n = 0; // d + 2
    double stiff[kMaxLocal][kMaxLocal] = {};
    double div_row[kMaxLocal][3] = {}; // per local facet dof, per component
};

LocalKernels local_kernels(const Mesh& mesh, int k)
{
    const int d = mesh.dim;
    LocalKernels loc;
    loc.n = d + 2;
    const double vol = mesh.volumes[k];
    const double inertia = mesh.element_inertia(k);

    // Coefficient map G: rows = RT0 coefficients (d constants + radial),
    // columns = local dofs (interior, facets).
    double g[4][kMaxLocal] = {};
    for (int i = 0; i <= d; ++i) {
        const int f = mesh.element_facets[k][i];
        const double sgn = mesh.element_facet_signs[k][i];
        const double area = mesh.facet_measures[f];
        for (int j = 0; j < d; ++j) {
            g[j][1 + i] = area * sgn * mesh.facet_normals[f][j] / vol;
            loc.div_row[i][j] = area * sgn * mesh.facet_normals[f][j];
        }
        g[d][1 + i] = d * vol / (d + 1.0) / inertia;
    }
    g[d][0] = -d * vol / inertia;

    // stiff = G^T diag(|K|,...,|K|, m_K) G
    for (int a = 0; a < loc.n; ++a) {
        for (int b = a; b < loc.n; ++b) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) s += vol * g[j][a] * g[j][b];
            s += inertia * g[d][a] * g[d][b];
            loc.stiff[a][b] = s;
            loc.stiff[b][a] = s;
        }
    }
    return loc;
}

struct AssemblyBuffers {
    std::vector<Triplet> a1, a0, b, ap;
    std::vector<double> a1_bc, b_bc, ap_bc;
};

} // namespace

WgBlocks assemble_elasticity(const Mesh& mesh, const PhysicalParams& params,
                             const VectorField& u_dirichlet)
{
    params.validate();
    const int d = mesh.dim;
    WgBlocks blocks;
    blocks.mesh = &mesh;
    blocks.disp_map = DofMap::build(mesh, d);
    blocks.pres_map = DofMap::build(mesh, 1);
    blocks.M_int = mesh.volumes;

    const int n_u = blocks.disp_map.n_free();
    const int nel = mesh.n_elements();

    const int n_threads =
#ifdef _OPENMP
        omp_get_max_threads();
#else
        1;
#endif
    std::vector<AssemblyBuffers> buffers(static_cast<std::size_t>(n_threads));
    for (auto& buf : buffers) {
        buf.a1_bc.assign(n_u, 0.0);
        buf.b_bc.assign(nel, 0.0);
    }

    // Element loop: local computation is pure; every thread fills its own
    // triplet buffer and the buffers are merged single-threaded below.
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int k = 0; k < nel; ++k) {
#ifdef _OPENMP
        AssemblyBuffers& buf = buffers[omp_get_thread_num()];
#else
        AssemblyBuffers& buf = buffers[0];
#endif
        const LocalKernels loc = local_kernels(mesh, k);

        // Local dof bookkeeping: global free index or -1, plus Dirichlet values.
        int gdof[kMaxLocal][3];
        double bval[kMaxLocal][3] = {};
        for (int c = 0; c < d; ++c) gdof[0][c] = blocks.disp_map.interior_dof(k, c);
        for (int i = 0; i <= d; ++i) {
            const int f = mesh.element_facets[k][i];
            for (int c = 0; c < d; ++c) gdof[1 + i][c] = blocks.disp_map.facet_dof(f, c);
            if (mesh.boundary_facet[f] && u_dirichlet) {
                const auto val = u_dirichlet(mesh.facet_centroid(f));
                for (int c = 0; c < d; ++c) bval[1 + i][c] = val[c];
            }
        }

        // A1 = scalar stiffness per displacement component.
        for (int a = 0; a < loc.n; ++a) {
            for (int b = 0; b < loc.n; ++b) {
                const double v = loc.stiff[a][b];
                if (v == 0.0) continue;
                for (int c = 0; c < d; ++c) {
                    const int ra = gdof[a][c];
                    const int cb = gdof[b][c];
                    if (ra >= 0 && cb >= 0) {
                        if (b >= a) buf.a1.push_back({ra, cb, v});
                        if (b > a) buf.a1.push_back({cb, ra, v});
                    } else if (ra >= 0 && cb < 0) {
                        buf.a1_bc[ra] += v * bval[b][c];
                    }
                }
            }
        }

        // B row k and the grad-div contribution A0 = div^T |K|^{-1} div.
        const double inv_vol = 1.0 / mesh.volumes[k];
        for (int i = 0; i <= d; ++i) {
            for (int ci = 0; ci < d; ++ci) {
                const double bi = loc.div_row[i][ci];
                if (bi == 0.0) continue;
                const int gi = gdof[1 + i][ci];
                if (gi >= 0)
                    buf.b.push_back({k, gi, bi});
                else
                    buf.b_bc[k] += bi * bval[1 + i][ci];
                // Grad-div boundary coupling is recovered downstream as
                // B_int^T M^{-1} b_bc, so only the free-free block is stored.
                if (gi < 0) continue;
                for (int j = 0; j <= d; ++j) {
                    for (int cj = 0; cj < d; ++cj) {
                        const double bj = loc.div_row[j][cj];
                        if (bj == 0.0) continue;
                        const int gj = gdof[1 + j][cj];
                        if (gj >= 0) buf.a0.push_back({gi, gj, bi * bj * inv_vol});
                    }
                }
            }
        }
    }

    std::vector<Triplet> a1_tr, a0_tr, b_tr;
    blocks.a1_bc.assign(n_u, 0.0);
    blocks.b_bc.assign(nel, 0.0);
    for (const auto& buf : buffers) {
        a1_tr.insert(a1_tr.end(), buf.a1.begin(), buf.a1.end());
        a0_tr.insert(a0_tr.end(), buf.a0.begin(), buf.a0.end());
        b_tr.insert(b_tr.end(), buf.b.begin(), buf.b.end());
        for (int i = 0; i < n_u; ++i) blocks.a1_bc[i] += buf.a1_bc[i];
        for (int k = 0; k < nel; ++k) blocks.b_bc[k] += buf.b_bc[k];
    }
    blocks.A1 = SparseMatrix::from_triplets(n_u, n_u, std::move(a1_tr));
    blocks.A0 = SparseMatrix::from_triplets(n_u, n_u, std::move(a0_tr));
    blocks.B_int = SparseMatrix::from_triplets(nel, n_u, std::move(b_tr));
    return blocks;
}

void assemble_pressure(WgBlocks& blocks, const PhysicalParams& params,
                       const ScalarField& p_dirichlet)
{
    const Mesh& mesh = *blocks.mesh;
    const int d = mesh.dim;
    const int nel = mesh.n_elements();
    const int n_p = blocks.pres_map.n_free();

    std::vector<Triplet> ap_tr;
    blocks.d_bc.assign(n_p, 0.0);
    for (int k = 0; k < nel; ++k) {
        const LocalKernels loc = local_kernels(mesh, k);
        int gdof[kMaxLocal];
        double bval[kMaxLocal] = {};
        gdof[0] = blocks.pres_map.interior_dof(k, 0);
        for (int i = 0; i <= d; ++i) {
            const int f = mesh.element_facets[k][i];
            gdof[1 + i] = blocks.pres_map.facet_dof(f, 0);
            if (mesh.boundary_facet[f] && p_dirichlet)
                bval[1 + i] = p_dirichlet(mesh.facet_centroid(f));
        }
        for (int a = 0; a < loc.n; ++a) {
            for (int b = 0; b < loc.n; ++b) {
                const double v = loc.stiff[a][b];
                if (v == 0.0) continue;
                if (gdof[a] >= 0 && gdof[b] >= 0) {
                    if (b >= a) ap_tr.push_back({gdof[a], gdof[b], v});
                    if (b > a) ap_tr.push_back({gdof[b], gdof[a], v});
                } else if (gdof[a] >= 0 && gdof[b] < 0) {
                    blocks.d_bc[gdof[a]] += params.kappa * params.dt * v * bval[b];
                }
            }
        }
    }
    blocks.A_p = SparseMatrix::from_triplets(n_p, n_p, std::move(ap_tr));

    std::vector<Triplet> mass_tr;
    mass_tr.reserve(nel);
    for (int k = 0; k < nel; ++k) mass_tr.push_back({k, k, mesh.volumes[k]});
    const SparseMatrix mass = SparseMatrix::from_triplets(n_p, n_p, std::move(mass_tr));
    blocks.D = SparseMatrix::add(mass, blocks.A_p, params.c0, params.kappa * params.dt);
}

WgBlocks assemble_blocks(const Mesh& mesh, const PhysicalParams& params,
                         const VectorField& u_dirichlet, const ScalarField& p_dirichlet)
{
    WgBlocks blocks = assemble_elasticity(mesh, params, u_dirichlet);
    assemble_pressure(blocks, params, p_dirichlet);
    return blocks;
}

SparseMatrix assemble_scalar_laplacian_unreduced(const Mesh& mesh)
{
    const int d = mesh.dim;
    const int nel = mesh.n_elements();
    const int n = nel + mesh.n_facets();
    std::vector<Triplet> tr;
    for (int k = 0; k < nel; ++k) {
        const LocalKernels loc = local_kernels(mesh, k);
        int gdof[kMaxLocal];
        gdof[0] = k;
        for (int i = 0; i <= d; ++i) gdof[1 + i] = nel + mesh.element_facets[k][i];
        for (int a = 0; a < loc.n; ++a)
            for (int b = 0; b < loc.n; ++b)
                if (loc.stiff[a][b] != 0.0) tr.push_back({gdof[a], gdof[b], loc.stiff[a][b]});
    }
    return SparseMatrix::from_triplets(n, n, std::move(tr));
}

// ---------------------------------------------------------------------------
// Quadrature and loads
// ---------------------------------------------------------------------------

double integrate_element(const Mesh& mesh, int element, const ScalarField& fn)
{
    const auto& el = mesh.elements[element];
    const double vol = mesh.volumes[element];
    if (mesh.dim == 2) {
        // Edge-midpoint rule, exact for degree 2.
        double s = 0.0;
        for (int i = 0; i < 3; ++i) {
            const auto& a = mesh.vertices[el[i]];
            const auto& b = mesh.vertices[el[(i + 1) % 3]];
            s += fn({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])});
        }
        return vol * s / 3.0;
    }
    // Four-point degree-2 tetrahedron rule.
    static const double qa = 0.5854101966249685;
    static const double qb = 0.1381966011250105;
    double s = 0.0;
    for (int q = 0; q < 4; ++q) {
        double bary[4] = {qb, qb, qb, qb};
        bary[q] = qa;
        std::array<double, 3> x{};
        for (int i = 0; i < 4; ++i) {
            const auto& v = mesh.vertices[el[i]];
            for (int j = 0; j < 3; ++j) x[j] += bary[i] * v[j];
        }
        s += fn(x);
    }
    return vol * s / 4.0;
}

Loads assemble_loads(const WgBlocks& blocks, const VectorField& f, const ScalarField& s,
                     const PhysicalParams& params, const WgField* prev_u,
                     const WgField* prev_p)
{
    const Mesh& mesh = *blocks.mesh;
    const int d = mesh.dim;
    Loads loads;
    loads.b1.assign(blocks.n_disp(), 0.0);
    loads.b2.assign(blocks.n_pres(), 0.0);

    std::vector<double> div_prev;
    if (prev_u) div_prev = weak_divergence_field(mesh, *prev_u);

    for (int k = 0; k < mesh.n_elements(); ++k) {
        if (f) {
            for (int c = 0; c < d; ++c) {
                const double v = integrate_element(
                    mesh, k, [&](const std::array<double, 3>& x) { return f(x)[c]; });
                loads.b1[blocks.disp_map.interior_dof(k, c)] = v;
            }
        }
        double b2 = 0.0;
        if (s) b2 -= params.dt * integrate_element(mesh, k, s);
        if (prev_u) b2 -= params.alpha * mesh.volumes[k] * div_prev[k];
        if (prev_p) b2 -= params.c0 * mesh.volumes[k] * prev_p->interior_at(k, 0);
        loads.b2[k] = b2;
    }
    return loads;
}

} // namespace porowg
