// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/geometry/transform.hpp"

#include <cmath>

namespace shapecraft::geometry
{

Vec3 Affine::apply_linear(const Vec3& v) const
{
    return {linear[0][0] * v.x + linear[0][1] * v.y + linear[0][2] * v.z,
            linear[1][0] * v.x + linear[1][1] * v.y + linear[1][2] * v.z,
            linear[2][0] * v.x + linear[2][1] * v.y + linear[2][2] * v.z};
}

Vec3 Affine::apply(const Vec3& p) const
{
    return apply_linear(p) + translation;
}

double Affine::determinant() const
{
    const auto& m = linear;
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
           + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Affine compose(const Affine& second, const Affine& first)
{
    Affine out;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
        {
            double sum = 0.0;
            for (int k = 0; k < 3; ++k)
                sum += second.linear[r][k] * first.linear[k][c];
            out.linear[r][c] = sum;
        }
    out.translation = second.apply(first.translation);
    return out;
}

Affine rotation_matrix(const Vec3& euler)
{
    const double cx = std::cos(euler.x), sx = std::sin(euler.x);
    const double cy = std::cos(euler.y), sy = std::sin(euler.y);
    const double cz = std::cos(euler.z), sz = std::sin(euler.z);
    Affine rx, ry, rz;
    rx.linear = {{{1, 0, 0}, {0, cx, -sx}, {0, sx, cx}}};
    ry.linear = {{{cy, 0, sy}, {0, 1, 0}, {-sy, 0, cy}}};
    rz.linear = {{{cz, -sz, 0}, {sz, cz, 0}, {0, 0, 1}}};
    return compose(rz, compose(ry, rx));
}

Affine to_affine(const Transform& t)
{
    Affine scale;
    scale.linear = {{{t.scale.x, 0, 0}, {0, t.scale.y, 0}, {0, 0, t.scale.z}}};
    Affine out = compose(rotation_matrix(t.rotation), scale);
    out.translation = t.position;
    return out;
}

Mesh transform(const Mesh& mesh, const Affine& a)
{
    Mesh out = mesh;
    for (auto& v: out.vertices)
        v = a.apply(v);
    if (out.centerline)
        for (auto& p: out.centerline->points)
            p = a.apply(p);
    if (a.determinant() < 0.0)
        flip_orientation(out);
    return out;
}

Mesh transform(const Mesh& mesh, const Transform& t, Warnings* warnings)
{
    if (t.scale.x == 0.0 || t.scale.y == 0.0 || t.scale.z == 0.0)
        warn(warnings, "zero scale component collapses the mesh");
    const bool identity = t.position == Vec3{} && t.rotation == Vec3{} && t.scale == Vec3{1.0, 1.0, 1.0};
    if (identity)
        return mesh;
    return transform(mesh, to_affine(t));
}

} // namespace shapecraft::geometry
