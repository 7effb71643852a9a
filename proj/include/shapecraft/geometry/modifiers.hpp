// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/geometry/csg.hpp"
#include "shapecraft/geometry/errors.hpp"
#include "shapecraft/geometry/mesh.hpp"

#include <array>
#include <variant>

namespace shapecraft::geometry
{

struct BooleanModifier
{
    BooleanOp operation = BooleanOp::Difference;
};

struct SubdivisionModifier
{
    int levels = 2;
    int render_levels = 3;  // accepted for compatibility; there is one geometry path
};

enum class BevelAffect
{
    Edges,
    Vertices,
};

struct BevelModifier
{
    double width = 0.1;
    int segments = 3;
    BevelAffect affect = BevelAffect::Edges;
};

struct ArrayModifier
{
    int count = 5;
    Vec3 relative_offset{1.2, 0.0, 0.0};
};

struct MirrorModifier
{
    std::array<bool, 3> axis{true, false, false};
    bool use_clip = true;
};

enum class DeformAxis
{
    PosX,
    PosY,
    PosZ,
    NegX,
    NegY,
    NegZ,
};

struct CurveModifier
{
    DeformAxis deform_axis = DeformAxis::PosX;
};

struct SolidifyModifier
{
    double thickness = 0.2;
};

using ModifierSpec = std::variant<BooleanModifier, SubdivisionModifier, BevelModifier, ArrayModifier, MirrorModifier,
                                  CurveModifier, SolidifyModifier>;

BevelAffect parse_bevel_affect(std::string_view name);
DeformAxis parse_deform_axis(std::string_view name);

/// Dispatches to the functions below. Boolean and curve need `aux`
/// (MissingAuxMesh otherwise); the target must be non-empty.
Mesh apply_modifier(const Mesh& target, const ModifierSpec& spec, const Mesh* aux = nullptr,
                    Warnings* warnings = nullptr);

/// `count` copies, copy i shifted by i * relative_offset * bounding-box size.
Mesh array_copies(const Mesh& mesh, const ArrayModifier& spec);

/// Reflects across each selected axis plane through the origin and merges. With
/// use_clip, vertices on the far side of a plane are first clamped onto it.
/// Vertices on a mirror plane are welded and internal face pairs removed.
Mesh mirror(const Mesh& mesh, const MirrorModifier& spec);

/// Offsets a copy inward along vertex normals by `thickness` and stitches open
/// boundaries so the result is a closed shell.
Mesh solidify(const Mesh& mesh, const SolidifyModifier& spec);

/// `levels` rounds of Loop subdivision. Each round quadruples the triangle count.
Mesh loop_subdivide(const Mesh& mesh, int levels);

/// Chamfers edges whose dihedral angle is below bevel_sharp_angle_deg (or truncates
/// the corners of such edges for BevelAffect::Vertices). `width` is the offset of
/// the new face borders from the original edge, clamped to keep faces valid.
Mesh bevel(const Mesh& mesh, const BevelModifier& spec, Warnings* warnings = nullptr);

inline constexpr double bevel_sharp_angle_deg = 150.0;

/// Maps the deform-axis coordinate, normalized over the mesh bounds, to arclength
/// along `path`; the two remaining coordinates (relative to the bounds center)
/// follow the path's rotation-minimizing frame.
Mesh curve_deform(const Mesh& mesh, const CurvePath& path, DeformAxis axis);

} // namespace shapecraft::geometry
