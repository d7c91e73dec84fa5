#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "porowg/mesh.hpp"

using namespace porowg;

namespace {

// Independent facet count: enumerate the distinct d-subsets of the element
// vertex tuples directly.
int brute_force_facet_count(const Mesh& mesh)
{
    std::set<std::array<int, 3>> facets;
    for (const auto& el : mesh.elements) {
        for (int skip = 0; skip <= mesh.dim; ++skip) {
            std::array<int, 3> key = {-1, -1, -1};
            int pos = 0;
            for (int j = 0; j <= mesh.dim; ++j)
                if (j != skip) key[pos++] = el[j];
            std::sort(key.begin(), key.begin() + mesh.dim);
            facets.insert(key);
        }
    }
    return static_cast<int>(facets.size());
}

void check_invariants(const Mesh& mesh)
{
    // Volumes positive, total measure 1.
    double total = 0.0;
    for (double v : mesh.volumes) {
        CHECK(v > 0.0);
        total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    // Closed-surface identity per element.
    for (int k = 0; k < mesh.n_elements(); ++k) {
        double sum[3] = {0, 0, 0};
        for (int i = 0; i <= mesh.dim; ++i) {
            const int f = mesh.element_facets[k][i];
            const double s = mesh.element_facet_signs[k][i] * mesh.facet_measures[f];
            for (int j = 0; j < 3; ++j) sum[j] += s * mesh.facet_normals[f][j];
        }
        for (int j = 0; j < 3; ++j) CHECK(std::abs(sum[j]) < 1e-12);
    }

    // Interior facets are shared by exactly two elements, boundary by one,
    // and the two incident elements carry opposite orientation signs.
    std::vector<int> count(mesh.n_facets(), 0);
    std::vector<int> sign_sum(mesh.n_facets(), 0);
    for (int k = 0; k < mesh.n_elements(); ++k)
        for (int i = 0; i <= mesh.dim; ++i) {
            count[mesh.element_facets[k][i]]++;
            sign_sum[mesh.element_facets[k][i]] += mesh.element_facet_signs[k][i];
        }
    for (int f = 0; f < mesh.n_facets(); ++f) {
        if (mesh.boundary_facet[f]) {
            CHECK(count[f] == 1);
            CHECK(sign_sum[f] == 1); // outward on the boundary
        } else {
            CHECK(count[f] == 2);
            CHECK(sign_sum[f] == 0);
        }
    }

    CHECK(mesh.n_facets() == brute_force_facet_count(mesh));
}

} // namespace

TEST_CASE("structured 2D mesh n=1")
{
    const Mesh mesh = build_structured_mesh(2, 1);
    CHECK(mesh.n_elements() == 2);
    CHECK(mesh.n_facets() == 5);
    CHECK(mesh.n_vertices() == 4);
    check_invariants(mesh);

    const MeshStats s = mesh_stats(mesh);
    CHECK(s.n_boundary_facets == 4);
    CHECK(s.h_max == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("structured 2D mesh n=2 counts by enumeration")
{
    const Mesh mesh = build_structured_mesh(2, 2);
    const MeshStats s = mesh_stats(mesh);
    CHECK(s.n_elements == 8);
    CHECK(s.n_facets == 16);
    CHECK(s.n_boundary_facets == 8);
    check_invariants(mesh);

    // Euler-type identity for a simply connected triangulation of the square.
    CHECK(mesh.n_vertices() - mesh.n_facets() + mesh.n_elements() == 1);
}

TEST_CASE("structured 3D mesh n=1 is the Kuhn split")
{
    const Mesh mesh = build_structured_mesh(3, 1);
    CHECK(mesh.n_elements() == 6);
    check_invariants(mesh);
    const MeshStats s = mesh_stats(mesh);
    CHECK(s.n_boundary_facets == 12); // two triangles per cube face
}

TEST_CASE("larger meshes keep the invariants and quasi-uniformity")
{
    for (const int n : {3, 5}) {
        const Mesh m2 = build_structured_mesh(2, n);
        check_invariants(m2);
        const MeshStats s2 = mesh_stats(m2);
        CHECK(s2.max_volume / s2.min_volume == doctest::Approx(1.0));
        CHECK(m2.n_vertices() - m2.n_facets() + m2.n_elements() == 1);
    }
    const Mesh m3 = build_structured_mesh(3, 2);
    check_invariants(m3);
    const MeshStats s3 = mesh_stats(m3);
    CHECK(s3.max_volume / s3.min_volume == doctest::Approx(1.0));
}

TEST_CASE("invalid arguments are rejected")
{
    CHECK_THROWS_AS(build_structured_mesh(2, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_structured_mesh(4, 2), std::invalid_argument);
    CHECK_THROWS_AS(refine_family(2, 0, 4), std::invalid_argument);
}

TEST_CASE("refine_family doubles n per level")
{
    const auto family2 = refine_family(2, 3, 16);
    REQUIRE(family2.size() == 3);
    CHECK(family2[0].n_elements() == 512);
    CHECK(family2[1].n_elements() == 2048);
    CHECK(family2[2].n_elements() == 8192);

    const auto family3 = refine_family(3, 2, 8);
    REQUIRE(family3.size() == 2);
    CHECK(family3[0].n_elements() == 3072);
    CHECK(family3[1].n_elements() == 24576);

    const auto single = refine_family(2, 1, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].n_elements() == build_structured_mesh(2, 1).n_elements());
}

TEST_CASE("mesh dump/read round trip")
{
    for (const int dim : {2, 3}) {
        const Mesh mesh = build_structured_mesh(dim, 2);
        std::stringstream ss;
        dump_mesh(mesh, ss);
        const Mesh back = read_mesh(ss);
        CHECK(back.dim == mesh.dim);
        CHECK(back.n_vertices() == mesh.n_vertices());
        CHECK(back.n_elements() == mesh.n_elements());
        CHECK(back.n_facets() == mesh.n_facets());
        for (int k = 0; k < mesh.n_elements(); ++k)
            CHECK(back.volumes[k] == doctest::Approx(mesh.volumes[k]).epsilon(1e-14));
    }
}

TEST_CASE("element inertia agrees with degree-2 quadrature")
{
    // |x - c|^2 is quadratic, so the degree-2 rules integrate it exactly.
    for (const int dim : {2, 3}) {
        const Mesh mesh = build_structured_mesh(dim, 2);
        for (int k = 0; k < mesh.n_elements(); ++k) {
            const auto c = mesh.element_centroid(k);
            double quad = 0.0;
            if (dim == 2) {
                for (int i = 0; i < 3; ++i) {
                    const auto& a = mesh.vertices[mesh.elements[k][i]];
                    const auto& b = mesh.vertices[mesh.elements[k][(i + 1) % 3]];
                    const double mx = 0.5 * (a[0] + b[0]) - c[0];
                    const double my = 0.5 * (a[1] + b[1]) - c[1];
                    quad += (mx * mx + my * my) * mesh.volumes[k] / 3.0;
                }
            } else {
                const double qa = 0.5854101966249685, qb = 0.1381966011250105;
                for (int p = 0; p < 4; ++p) {
                    double x[3] = {0, 0, 0};
                    for (int i = 0; i < 4; ++i) {
                        const double w = (i == p) ? qa : qb;
                        for (int j = 0; j < 3; ++j)
                            x[j] += w * mesh.vertices[mesh.elements[k][i]][j];
                    }
                    double r2 = 0.0;
                    for (int j = 0; j < 3; ++j) r2 += (x[j] - c[j]) * (x[j] - c[j]);
                    quad += r2 * mesh.volumes[k] / 4.0;
                }
            }
            CHECK(mesh.element_inertia(k) == doctest::Approx(quad).epsilon(1e-12));
        }
    }
}
