#ifndef POROWG_MESH_HPP
#define POROWG_MESH_HPP

#include <array>
#include <iosfwd>
#include <vector>

namespace porowg {

/// Simplicial mesh of the unit square (2D triangles) or unit cube (3D tets)
/// with full element-facet connectivity. Immutable after construction and
/// safe to share across threads.
///
/// Each facet stores one globally oriented unit normal: it points from the
/// lower-indexed incident element into the higher-indexed one, and outward on
/// the boundary. The per-element outward direction is recovered through the
/// orientation sign stored alongside the facet index.
struct Mesh {
    int dim = 0;
    std::vector<std::array<double, 3>> vertices;       // z = 0 in 2D
    std::vector<std::array<int, 4>> elements;          // d+1 vertex ids, last = -1 in 2D
    std::vector<std::array<int, 3>> facets;            // d vertex ids, sorted; last = -1 in 2D
    std::vector<std::array<int, 4>> element_facets;    // d+1 facet ids per element
    std::vector<std::array<int, 4>> element_facet_signs; // +1 if the stored normal is outward
    std::vector<double> volumes;                       // |K|
    std::vector<double> facet_measures;                // |e|
    std::vector<std::array<double, 3>> facet_normals;  // unit, global orientation
    std::vector<char> boundary_facet;                  // 1 on boundary facets

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_elements() const { return static_cast<int>(elements.size()); }
    int n_facets() const { return static_cast<int>(facets.size()); }
    int facets_per_element() const { return dim + 1; }

    std::array<double, 3> element_centroid(int k) const;
    std::array<double, 3> facet_centroid(int f) const;
    double element_diameter(int k) const;
    /// Exact second moment about the centroid, integral of |x - x_c|^2 over K.
    double element_inertia(int k) const;
};

struct MeshStats {
    int n_elements = 0;
    int n_facets = 0;
    int n_boundary_facets = 0;
    double h_max = 0.0;
    double min_volume = 0.0;
    double max_volume = 0.0;
};

/// Unit square split into 2 n^2 triangles (one diagonal per grid cell) or
/// unit cube split into 6 n^3 tets (Kuhn subdivision). Rejects n < 1 and
/// dim outside {2, 3}.
Mesh build_structured_mesh(int dim, int n);

MeshStats mesh_stats(const Mesh& mesh);

/// Meshes with n doubling per level, starting from start_n.
std::vector<Mesh> refine_family(int dim, int levels, int start_n);

/// Plain-text dump: header "dim N N_f", vertex count, then vertex, element,
/// and facet lines (whitespace-separated, 0-based indices).
void dump_mesh(const Mesh& mesh, std::ostream& os);
Mesh read_mesh(std::istream& is);

} // namespace porowg

#endif
