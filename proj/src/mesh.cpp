#include "porowg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace porowg {

namespace {

std::array<double, 3> sub(const std::array<double, 3>& a, const std::array<double, 3>& b)
{
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b)
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double norm3(const std::array<double, 3>& a) { return std::sqrt(dot3(a, a)); }

double simplex_volume(const Mesh& mesh, const std::array<int, 4>& el, int dim)
{
    const auto& v0 = mesh.vertices[el[0]];
    if (dim == 2) {
        const auto e1 = sub(mesh.vertices[el[1]], v0);
        const auto e2 = sub(mesh.vertices[el[2]], v0);
        return 0.5 * (e1[0] * e2[1] - e1[1] * e2[0]);
    }
    const auto e1 = sub(mesh.vertices[el[1]], v0);
    const auto e2 = sub(mesh.vertices[el[2]], v0);
    const auto e3 = sub(mesh.vertices[el[3]], v0);
    return dot3(e1, cross(e2, e3)) / 6.0;
}

/// Builds facets, connectivity, measures, and oriented normals from
/// vertices + elements. Shared by the structured builders and the reader.
void finalize_connectivity(Mesh& mesh)
{
    const int d = mesh.dim;
    const int nel = mesh.n_elements();

    mesh.volumes.resize(nel);
    for (int k = 0; k < nel; ++k) {
        const double vol = std::abs(simplex_volume(mesh, mesh.elements[k], d));
        if (!(vol > 0.0)) throw std::runtime_error("mesh: degenerate element " + std::to_string(k));
        mesh.volumes[k] = vol;
    }

    // Deduplicate facets through their sorted vertex tuples.
    std::map<std::array<int, 3>, int> facet_ids;
    std::vector<std::array<int, 2>> incident; // up to two incident elements, -1 if absent
    mesh.facets.clear();
    mesh.element_facets.assign(nel, {-1, -1, -1, -1});
    mesh.element_facet_signs.assign(nel, {0, 0, 0, 0});

    for (int k = 0; k < nel; ++k) {
        for (int i = 0; i <= d; ++i) {
            // Facet i is opposite local vertex i.
            std::array<int, 3> key = {-1, -1, -1};
            int pos = 0;
            for (int j = 0; j <= d; ++j)
                if (j != i) key[pos++] = mesh.elements[k][j];
            std::sort(key.begin(), key.begin() + d);
            auto [it, inserted] = facet_ids.try_emplace(key, static_cast<int>(mesh.facets.size()));
            if (inserted) {
                mesh.facets.push_back(key);
                incident.push_back({k, -1});
            } else {
                auto& inc = incident[it->second];
                if (inc[1] != -1) throw std::runtime_error("mesh: facet shared by more than two elements");
                inc[1] = k;
            }
            mesh.element_facets[k][i] = it->second;
        }
    }

    const int nf = mesh.n_facets();
    mesh.facet_measures.resize(nf);
    mesh.facet_normals.resize(nf);
    mesh.boundary_facet.assign(nf, 0);

    for (int f = 0; f < nf; ++f) {
        const auto& fv = mesh.facets[f];
        std::array<double, 3> normal{};
        if (d == 2) {
            const auto t = sub(mesh.vertices[fv[1]], mesh.vertices[fv[0]]);
            mesh.facet_measures[f] = norm3(t);
            normal = {t[1], -t[0], 0.0};
        } else {
            const auto e1 = sub(mesh.vertices[fv[1]], mesh.vertices[fv[0]]);
            const auto e2 = sub(mesh.vertices[fv[2]], mesh.vertices[fv[0]]);
            const auto c = cross(e1, e2);
            mesh.facet_measures[f] = 0.5 * norm3(c);
            normal = c;
        }
        const double len = norm3(normal);
        for (double& v : normal) v /= len;

        // Orient away from the lower-indexed (owner) element.
        int owner = incident[f][0];
        int neighbor = incident[f][1];
        if (neighbor != -1 && neighbor < owner) std::swap(owner, neighbor);
        const auto fc = mesh.facet_centroid(f);
        const auto oc = mesh.element_centroid(owner);
        if (dot3(normal, sub(fc, oc)) < 0.0)
            for (double& v : normal) v = -v;
        mesh.facet_normals[f] = normal;
        mesh.boundary_facet[f] = (neighbor == -1) ? 1 : 0;
    }

    for (int k = 0; k < nel; ++k) {
        const auto kc = mesh.element_centroid(k);
        for (int i = 0; i <= d; ++i) {
            const int f = mesh.element_facets[k][i];
            const auto fc = mesh.facet_centroid(f);
            mesh.element_facet_signs[k][i] =
                dot3(mesh.facet_normals[f], sub(fc, kc)) > 0.0 ? 1 : -1;
        }
    }
}

} // namespace

std::array<double, 3> Mesh::element_centroid(int k) const
{
    std::array<double, 3> c{};
    for (int i = 0; i <= dim; ++i) {
        const auto& v = vertices[elements[k][i]];
        for (int j = 0; j < 3; ++j) c[j] += v[j];
    }
    for (int j = 0; j < 3; ++j) c[j] /= dim + 1;
    return c;
}

std::array<double, 3> Mesh::facet_centroid(int f) const
{
    std::array<double, 3> c{};
    for (int i = 0; i < dim; ++i) {
        const auto& v = vertices[facets[f][i]];
        for (int j = 0; j < 3; ++j) c[j] += v[j];
    }
    for (int j = 0; j < 3; ++j) c[j] /= dim;
    return c;
}

double Mesh::element_diameter(int k) const
{
    double h = 0.0;
    for (int i = 0; i <= dim; ++i)
        for (int j = i + 1; j <= dim; ++j) {
            const auto e = sub(vertices[elements[k][i]], vertices[elements[k][j]]);
            h = std::max(h, norm3(e));
        }
    return h;
}

double Mesh::element_inertia(int k) const
{
    // For a simplex with vertices v_i:
    //   integral of x x^T = |K| / ((d+1)(d+2)) * (sum v_i v_i^T + (sum v_i)(sum v_i)^T)
    double sum_sq = 0.0;
    std::array<double, 3> sum{};
    for (int i = 0; i <= dim; ++i) {
        const auto& v = vertices[elements[k][i]];
        sum_sq += dot3(v, v);
        for (int j = 0; j < 3; ++j) sum[j] += v[j];
    }
    const double vol = volumes[k];
    const double second_moment = vol / ((dim + 1.0) * (dim + 2.0)) * (sum_sq + dot3(sum, sum));
    const auto c = element_centroid(k);
    return second_moment - vol * dot3(c, c);
}

Mesh build_structured_mesh(int dim, int n)
{
    if (n < 1) throw std::invalid_argument("build_structured_mesh: n must be >= 1");
    if (dim != 2 && dim != 3) throw std::invalid_argument("build_structured_mesh: dim must be 2 or 3");

    Mesh mesh;
    mesh.dim = dim;
    const double h = 1.0 / n;

    if (dim == 2) {
        auto vid = [n](int i, int j) { return j * (n + 1) + i; };
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i)
                mesh.vertices.push_back({i * 1.0 / n, j * 1.0 / n, 0.0});
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const int v00 = vid(i, j), v10 = vid(i + 1, j);
                const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
                mesh.elements.push_back({v00, v10, v11, -1});
                mesh.elements.push_back({v00, v11, v01, -1});
            }
        }
    } else {
        auto vid = [n](int i, int j, int k) { return (k * (n + 1) + j) * (n + 1) + i; };
        for (int k = 0; k <= n; ++k)
            for (int j = 0; j <= n; ++j)
                for (int i = 0; i <= n; ++i)
                    mesh.vertices.push_back({i * h, j * h, k * h});
        // Kuhn subdivision: six tets per cell, one per permutation of the axes,
        // all sharing the cell diagonal.
        static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                        {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    const std::array<int, 3> base = {i, j, k};
                    for (const auto& p : perms) {
                        std::array<int, 4> tet;
                        std::array<int, 3> cur = base;
                        tet[0] = vid(cur[0], cur[1], cur[2]);
                        for (int step = 0; step < 3; ++step) {
                            ++cur[p[step]];
                            tet[step + 1] = vid(cur[0], cur[1], cur[2]);
                        }
                        mesh.elements.push_back(tet);
                    }
                }
            }
        }
    }

    finalize_connectivity(mesh);
    return mesh;
}

MeshStats mesh_stats(const Mesh& mesh)
{
    MeshStats s;
    s.n_elements = mesh.n_elements();
    s.n_facets = mesh.n_facets();
    for (char b : mesh.boundary_facet) s.n_boundary_facets += b;
    s.min_volume = mesh.volumes.empty() ? 0.0 : mesh.volumes[0];
    s.max_volume = s.min_volume;
    for (double v : mesh.volumes) {
        s.min_volume = std::min(s.min_volume, v);
        s.max_volume = std::max(s.max_volume, v);
    }
    for (int k = 0; k < mesh.n_elements(); ++k) s.h_max = std::max(s.h_max, mesh.element_diameter(k));
    return s;
}

std::vector<Mesh> refine_family(int dim, int levels, int start_n)
{
    if (levels < 1) throw std::invalid_argument("refine_family: levels must be >= 1");
    std::vector<Mesh> family;
    int n = start_n;
    for (int l = 0; l < levels; ++l) {
        family.push_back(build_structured_mesh(dim, n));
        n *= 2;
    }
    return family;
}

void dump_mesh(const Mesh& mesh, std::ostream& os)
{
    os.precision(17);
    os << mesh.dim << ' ' << mesh.n_elements() << ' ' << mesh.n_facets() << '\n';
    os << mesh.n_vertices() << '\n';
    for (const auto& v : mesh.vertices) {
        os << v[0] << ' ' << v[1];
        if (mesh.dim == 3) os << ' ' << v[2];
        os << '\n';
    }
    for (const auto& e : mesh.elements) {
        for (int i = 0; i <= mesh.dim; ++i) os << (i ? " " : "") << e[i];
        os << '\n';
    }
    for (const auto& f : mesh.facets) {
        for (int i = 0; i < mesh.dim; ++i) os << (i ? " " : "") << f[i];
        os << '\n';
    }
}

Mesh read_mesh(std::istream& is)
{
    Mesh mesh;
    int nel = 0, nf = 0, nv = 0;
    if (!(is >> mesh.dim >> nel >> nf >> nv)) throw std::runtime_error("read_mesh: bad header");
    if (mesh.dim != 2 && mesh.dim != 3) throw std::runtime_error("read_mesh: bad dimension");
    mesh.vertices.resize(nv);
    for (auto& v : mesh.vertices) {
        v = {0.0, 0.0, 0.0};
        is >> v[0] >> v[1];
        if (mesh.dim == 3) is >> v[2];
    }
    mesh.elements.resize(nel);
    for (auto& e : mesh.elements) {
        e = {-1, -1, -1, -1};
        for (int i = 0; i <= mesh.dim; ++i) is >> e[i];
    }
    if (!is) throw std::runtime_error("read_mesh: truncated file");
    // Facet lines are redundant with the connectivity rebuild; skip them.
    finalize_connectivity(mesh);
    if (mesh.n_facets() != nf) throw std::runtime_error("read_mesh: facet count mismatch");
    return mesh;
}

} // namespace porowg
