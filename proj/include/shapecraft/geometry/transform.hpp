// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/geometry/errors.hpp"
#include "shapecraft/geometry/mesh.hpp"

#include <array>

namespace shapecraft::geometry
{

/// Position / Euler rotation (radians, applied about X, then Y, then Z) / scale.
struct Transform
{
    Vec3 position{0.0, 0.0, 0.0};
    Vec3 rotation{0.0, 0.0, 0.0};
    Vec3 scale{1.0, 1.0, 1.0};
};

/// General affine map x -> linear * x + translation.
struct Affine
{
    std::array<std::array<double, 3>, 3> linear{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
    Vec3 translation{};

    Vec3 apply(const Vec3& p) const;
    Vec3 apply_linear(const Vec3& v) const;
    double determinant() const;
};

/// Rotation matrix Rz * Ry * Rx for the given Euler angles.
Affine rotation_matrix(const Vec3& euler);

Affine to_affine(const Transform& t);

/// Returns the map equivalent to applying `first` and then `second`.
Affine compose(const Affine& second, const Affine& first);

/// Scale, then rotate, then translate every vertex. Zero scale components are
/// allowed and reported through `warnings`. A mirroring transform flips triangle
/// winding so closed meshes stay outward-facing.
Mesh transform(const Mesh& mesh, const Transform& t, Warnings* warnings = nullptr);

Mesh transform(const Mesh& mesh, const Affine& a);

} // namespace shapecraft::geometry
