// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/geometry/vec3.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shapecraft::geometry
{

using Triangle = std::array<std::uint32_t, 3>;

/// Centerline of a curve object, kept so curve meshes can drive deformation.
struct CurvePath
{
    std::vector<Vec3> points;
    bool closed = false;

    friend bool operator==(const CurvePath&, const CurvePath&) = default;
};

/// Indexed triangle mesh. Triangles wind counter-clockwise seen from outside.
struct Mesh
{
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::optional<std::string> component_tag;
    std::optional<CurvePath> centerline;

    bool empty() const noexcept { return triangles.empty(); }

    friend bool operator==(const Mesh&, const Mesh&) = default;
};

struct Aabb
{
    Vec3 min;
    Vec3 max;

    Vec3 center() const { return (min + max) * 0.5; }
    Vec3 size() const { return max - min; }

    friend bool operator==(const Aabb&, const Aabb&) = default;
};

/// Componentwise bounds over all vertices. Throws EmptyMesh when there are none.
Aabb compute_aabb(const Mesh& mesh);

/// Throws GeometryError(InvalidParam) on out-of-range indices, repeated corners or non-finite vertices.
void validate(const Mesh& mesh);

/// Divergence-theorem volume; positive for closed outward-wound meshes.
double signed_volume(const Mesh& mesh);

double surface_area(const Mesh& mesh);

double triangle_area(const Mesh& mesh, std::size_t tri);

Vec3 triangle_normal(const Mesh& mesh, std::size_t tri);

/// Number of undirected edges not shared by exactly two triangles.
std::size_t count_boundary_edges(const Mesh& mesh);

inline bool is_closed(const Mesh& mesh) { return !mesh.empty() && count_boundary_edges(mesh) == 0; }

/// Appends src into dst, offsetting indices. Tags and centerlines of src are dropped.
void append(Mesh& dst, const Mesh& src);

Mesh concatenate(std::span<const Mesh> meshes);

/// Flips the winding of every triangle.
void flip_orientation(Mesh& mesh);

/// Angle-weighted vertex normals (zero for isolated vertices).
std::vector<Vec3> vertex_normals(const Mesh& mesh);

/// Merges vertices closer than tolerance and drops triangles that collapse.
void weld_vertices(Mesh& mesh, double tolerance);

/// Removes triangles with repeated corners or area below min_area.
void remove_degenerate_triangles(Mesh& mesh, double min_area = 0.0);

/// Drops vertices no triangle references, keeping first-use order.
void compact_vertices(Mesh& mesh);

} // namespace shapecraft::geometry
