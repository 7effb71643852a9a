// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/geometry/mesh.hpp"

#include <string_view>

namespace shapecraft::geometry
{

enum class PrimitiveKind
{
    Cube,
    Sphere,
    Cylinder,
    Cone,
    Plane,
    Pyramid,
    Capsule,
    Prism,
};

/// Throws GeometryError(UnknownPrimitive).
PrimitiveKind parse_primitive_kind(std::string_view name);
std::string_view to_string(PrimitiveKind kind);

/// Construction parameters; each kind reads only the fields it documents.
struct PrimitiveParams
{
    int segments = 32;  // sphere, capsule
    int rings = 16;     // sphere
    int vertices = 32;  // cylinder, cone
    int sides = 3;      // prism
    double radius = 1.0;     // cone, capsule, prism
    double depth = 2.0;      // cylinder, cone
    double size = 2.0;       // plane
    double base_size = 2.0;  // pyramid
    double height = 2.0;     // pyramid, capsule, prism
};

/// Builds a primitive centered on the origin, before any Transform.
///
/// Sizing follows the modelling-tool defaults: cube and plane span [-1, 1] on
/// their axes, round primitives have radius 1, and depth/height is the full
/// z-extent. Construction counts (s = segments, r = rings, n = vertices or sides):
///
///   cube       8 vertices, 12 triangles
///   sphere     s*(r-1)+2 vertices, 2*s*(r-1) triangles
///   cylinder   2n+2 vertices, 4n triangles (fan caps around center vertices)
///   prism      same as cylinder with n = sides
///   cone       n+2 vertices, 2n triangles
///   plane      4 vertices, 2 triangles (open)
///   pyramid    5 vertices, 6 triangles
///   capsule    with h = capsule_hemisphere_bands(s): 2*s*h+2 vertices, 4*s*h triangles;
///              z-extent is height + 2*radius
///
/// Throws InvalidParam for non-positive sizes or integer params below 3.
Mesh make_primitive(PrimitiveKind kind, const PrimitiveParams& params = {});

/// Latitude bands per capsule hemisphere: max(2, segments / 4).
int capsule_hemisphere_bands(int segments);

} // namespace shapecraft::geometry
