// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/geometry/errors.hpp"
#include "shapecraft/geometry/mesh.hpp"

#include <string_view>
#include <vector>

namespace shapecraft::geometry
{

enum class CurveKind
{
    Bezier,
    Circle,
    Polyline,
};

CurveKind parse_curve_kind(std::string_view name);

struct CurveParams
{
    std::vector<Vec3> points;      // bezier anchors / polyline vertices
    bool closed = false;           // polyline only
    Vec3 location{};               // circle center
    double radius = 1.0;           // circle
    int segments = 32;             // circle
    double bevel_depth = 0.0;
    double extrude = 0.0;
    bool fill_caps = false;
};

/// Samples per cubic span of a bezier curve.
inline constexpr int bezier_resolution = 12;
/// Vertices around a beveled tube's circular cross-section.
inline constexpr int bevel_profile_segments = 12;

/// Resolves the curve's centerline without building any surface.
CurvePath curve_path(CurveKind kind, const CurveParams& params);

/// Builds the curve object's mesh. bevel_depth > 0 sweeps a circular tube along
/// the centerline using rotation-minimizing frames, extrude > 0 pulls the curve
/// along z into a ribbon (closed polylines with fill_caps get capped), and both
/// together sweep a stadium profile. With neither, the mesh is empty and a warning
/// is emitted; the centerline is still attached for curve deformation.
Mesh make_curve_object(CurveKind kind, const CurveParams& params, Warnings* warnings = nullptr);

/// Orthonormal frame sample along a path.
struct Frame
{
    Vec3 origin;
    Vec3 tangent;
    Vec3 normal;
    Vec3 binormal;
};

/// Rotation-minimizing frames (double reflection). Closed paths distribute the
/// holonomy so the last frame meets the first without a seam twist.
std::vector<Frame> rotation_minimizing_frames(const CurvePath& path);

} // namespace shapecraft::geometry
