#ifndef POROWG_WGFEM_HPP
#define POROWG_WGFEM_HPP

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "porowg/mesh.hpp"
#include "porowg/sparse.hpp"

namespace porowg {

using VectorField = std::function<std::array<double, 3>(const std::array<double, 3>&)>;
using ScalarField = std::function<double(const std::array<double, 3>&)>;

struct PhysicalParams {
    double mu = 1.0;     // shear Lame constant
    double lambda = 1.0; // first Lame constant
    double alpha = 1.0;  // Biot-Willis constant
    double c0 = 1.0;     // storage capacity
    double kappa = 1.0;  // permeability
    double dt = 1e-3;    // time step

    double epsilon() const { return mu / (lambda + mu); }
    void validate() const;
};

/// Weak Galerkin coefficient field: piecewise constants in element interiors
/// plus piecewise constants on facets, for `components` components per
/// entity (d for displacement, 1 for pressure). Boundary facet entries hold
/// prescribed Dirichlet values; they are never solver unknowns.
struct WgField {
    int components = 1;
    std::vector<double> interior; // components * N, interleaved per element
    std::vector<double> facet;    // components * N_f, interleaved per facet

    static WgField zero(const Mesh& mesh, int components);
    double& interior_at(int element, int comp) { return interior[static_cast<std::size_t>(element) * components + comp]; }
    double interior_at(int element, int comp) const { return interior[static_cast<std::size_t>(element) * components + comp]; }
    double& facet_at(int f, int comp) { return facet[static_cast<std::size_t>(f) * components + comp]; }
    double facet_at(int f, int comp) const { return facet[static_cast<std::size_t>(f) * components + comp]; }
};

/// Numbering of the free (non-Dirichlet) degrees of freedom for a field with
/// `components` components: interior dofs first, then interior-facet dofs,
/// components interleaved per entity.
struct DofMap {
    int components = 1;
    int n_elements = 0;
    int n_free_facets = 0;
    std::vector<int> facet_to_free; // -1 for eliminated boundary facets
    std::vector<int> free_to_facet;

    static DofMap build(const Mesh& mesh, int components);
    int n_free() const { return components * (n_elements + n_free_facets); }
    int interior_dof(int element, int comp) const { return element * components + comp; }
    int facet_dof(int facet, int comp) const
    {
        const int f = facet_to_free[facet];
        return f < 0 ? -1 : components * n_elements + f * components + comp;
    }

    std::vector<double> restrict_field(const WgField& field) const;
    /// Writes free values back; boundary facet entries keep their current values.
    void expand_into(std::span<const double> free_values, WgField& field) const;
};

/// Weak gradient of a scalar WG function on one element, expressed in the
/// centroid-shifted RT0 basis: grad_w u = constant + radial * (x - x_c).
struct Rt0Coefficients {
    std::array<double, 3> constant{};
    double radial = 0.0;

    std::array<double, 3> at(const std::array<double, 3>& x, const std::array<double, 3>& centroid) const
    {
        return {constant[0] + radial * (x[0] - centroid[0]),
                constant[1] + radial * (x[1] - centroid[1]),
                constant[2] + radial * (x[2] - centroid[2])};
    }
};

/// Solves the local RT0 mass system for the discrete weak gradient of a
/// scalar WG function given its interior value and per-facet values
/// (ordered as in element_facets). The centroid-shifted basis makes the
/// local mass matrix diagonal, so the solve is exact.
Rt0Coefficients weak_gradient_local(const Mesh& mesh, int element, double interior_value,
                                    std::span<const double> facet_values);

/// Discrete weak divergence of a vector WG function on one element. Only
/// facet values enter: the interior term tests against the gradient of a
/// constant and drops out.
double weak_divergence_local(const Mesh& mesh, int element,
                             const std::array<double, 3>& interior_vec,
                             std::span<const std::array<double, 3>> facet_vecs);

/// Per-element weak divergence of a full displacement field (boundary facet
/// values included).
std::vector<double> weak_divergence_field(const Mesh& mesh, const WgField& u);

/// Assembled global blocks on the free dof spaces, plus the load
/// contributions of eliminated Dirichlet facet dofs.
struct WgBlocks {
    const Mesh* mesh = nullptr;
    DofMap disp_map;
    DofMap pres_map;

    SparseMatrix A1;    // displacement weak-Laplacian
    SparseMatrix A0;    // grad-div block, assembled element-wise
    SparseMatrix B_int; // B degrees: N rows, displacement columns
    SparseMatrix A_p;   // pressure weak-Laplacian (interior + free facets)
    SparseMatrix D;     // c0 interior mass + kappa dt A_p
    std::vector<double> M_int; // element volumes

    // Dirichlet coupling, already multiplied by the prescribed boundary values:
    std::vector<double> a1_bc; // A1[free, boundary] u_D
    std::vector<double> b_bc;  // B[*, boundary] u_D (one entry per element)
    std::vector<double> d_bc;  // kappa dt A_p[free, boundary] p_D

    int n_disp() const { return disp_map.n_free(); }
    int n_pres() const { return pres_map.n_free(); }
};

/// Elasticity blocks A1, A0, B_int, M_int; boundary facet dofs are
/// eliminated symmetrically, their contributions accumulated into a1_bc and
/// b_bc. u_dirichlet may be null for homogeneous data.
WgBlocks assemble_elasticity(const Mesh& mesh, const PhysicalParams& params,
                             const VectorField& u_dirichlet = nullptr);

/// Adds the pressure blocks A_p and D = c0 blockdiag(M_int, 0) + kappa dt A_p
/// to existing blocks.
void assemble_pressure(WgBlocks& blocks, const PhysicalParams& params,
                       const ScalarField& p_dirichlet = nullptr);

/// Both of the above.
WgBlocks assemble_blocks(const Mesh& mesh, const PhysicalParams& params,
                         const VectorField& u_dirichlet = nullptr,
                         const ScalarField& p_dirichlet = nullptr);

/// Scalar weak-Laplacian on the unreduced space (no boundary elimination);
/// used by tests to check the constant-field kernel.
SparseMatrix assemble_scalar_laplacian_unreduced(const Mesh& mesh);

struct Loads {
    std::vector<double> b1; // displacement block, facet part identically zero
    std::vector<double> b2; // pressure block, facet part identically zero
};

/// Load vectors of the time-marching scheme: b1 from the body force, b2 from
/// the fluid source scaled by -dt plus the previous-step coupling terms
/// -alpha (div_w u^{n-1}, q) - c0 (p^{n-1}, q). Interior terms use a
/// degree-2 simplex rule. prev_u / prev_p may be null (zero previous state).
Loads assemble_loads(const WgBlocks& blocks, const VectorField& f, const ScalarField& s,
                     const PhysicalParams& params, const WgField* prev_u = nullptr,
                     const WgField* prev_p = nullptr);

/// Degree-2 quadrature over one element.
double integrate_element(const Mesh& mesh, int element, const ScalarField& fn);

} // namespace porowg

#endif
