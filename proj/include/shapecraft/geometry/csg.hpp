// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/geometry/errors.hpp"
#include "shapecraft/geometry/mesh.hpp"

namespace shapecraft::geometry
{

enum class BooleanOp
{
    Intersect,
    Union,
    Difference,
};

BooleanOp parse_boolean_op(std::string_view name);

/// Plane classification tolerance for the BSP.
inline constexpr double csg_plane_epsilon = 1e-7;
/// Outward offset applied to the second operand when coplanar faces overlap.
inline constexpr double csg_coplanar_perturbation = 1e-6;

/// BSP-tree boolean of two closed meshes. Output is welded and T-junction free so
/// it can feed further booleans. Throws NonManifoldOperand for open operands and
/// EmptyMesh for empty ones.
Mesh boolean_op(const Mesh& a, const Mesh& b, BooleanOp op, Warnings* warnings = nullptr);

/// True when some triangle of a lies in the plane of an overlapping triangle of b.
bool has_coplanar_overlap(const Mesh& a, const Mesh& b);

/// Splits triangle edges that pass through other vertices so shared edges match.
void repair_t_junctions(Mesh& mesh, double tolerance);

} // namespace shapecraft::geometry
