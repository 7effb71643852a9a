// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "shapecraft/geometry/csg.hpp"
#include "shapecraft/geometry/primitives.hpp"
#include "shapecraft/geometry/transform.hpp"

#include <doctest.h>
#include <numbers>

using namespace shapecraft::geometry;

namespace
{

Mesh cube_at(Vec3 position, Vec3 scale = {1, 1, 1})
{
    Transform t;
    t.position = position;
    t.scale = scale;
    return transform(make_primitive(PrimitiveKind::Cube), t);
}

// Overlap volume of two axis-aligned boxes given as center/half-extent.
double box_overlap(Vec3 ca, Vec3 ha, Vec3 cb, Vec3 hb)
{
    double v = 1.0;
    for (int i = 0; i < 3; ++i)
    {
        const double lo = std::max(ca[i] - ha[i], cb[i] - hb[i]);
        const double hi = std::min(ca[i] + ha[i], cb[i] + hb[i]);
        v *= std::max(0.0, hi - lo);
    }
    return v;
}

} // namespace

TEST_CASE("union of disjoint cubes adds volumes")
{
    const Mesh u = boolean_op(cube_at({0, 0, 0}), cube_at({5, 0, 0}), BooleanOp::Union);
    CHECK(std::abs(oracle::volume(u) - 16.0) < 1e-6 * 16.0);
    CHECK(oracle::open_edges(u) == 0);
}

TEST_CASE("difference with itself is empty")
{
    Warnings w;
    const Mesh cube = cube_at({0, 0, 0});
    const Mesh d = boolean_op(cube, cube, BooleanOp::Difference, &w);
    CHECK(d.empty());
    CHECK(std::abs(oracle::volume(d)) < 1e-9);
    CHECK(w.size() == 1);
}

TEST_CASE("intersection of offset cubes")
{
    const Mesh i = boolean_op(cube_at({0, 0, 0}), cube_at({1.5, 1.5, 1.5}), BooleanOp::Intersect);
    CHECK(std::abs(oracle::volume(i) - 0.125) < 1e-6);
    CHECK(oracle::open_edges(i) == 0);
}

TEST_CASE("random axis-aligned box booleans match interval arithmetic")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 25; ++trial)
    {
        const Vec3 ca = oracle::random_vec(rng, -1, 1), cb = oracle::random_vec(rng, -1, 1);
        const Vec3 ha = oracle::random_vec(rng, 0.3, 1.2), hb = oracle::random_vec(rng, 0.3, 1.2);
        const Mesh a = cube_at(ca, ha), b = cube_at(cb, hb);
        const double va = 8 * ha.x * ha.y * ha.z, vb = 8 * hb.x * hb.y * hb.z;
        const double overlap = box_overlap(ca, ha, cb, hb);
        const Mesh i = boolean_op(a, b, BooleanOp::Intersect);
        const Mesh u = boolean_op(a, b, BooleanOp::Union);
        const Mesh d = boolean_op(a, b, BooleanOp::Difference);
        CHECK(oracle::volume(i) == doctest::Approx(overlap).epsilon(1e-6));
        CHECK(oracle::volume(u) == doctest::Approx(va + vb - overlap).epsilon(1e-6));
        CHECK(oracle::volume(d) == doctest::Approx(va - overlap).epsilon(1e-6));
        CHECK(oracle::open_edges(u) == 0);
        CHECK(oracle::open_edges(d) == 0);
    }
}

TEST_CASE("drilled cube matches prism arithmetic and chains")
{
    PrimitiveParams p;
    p.vertices = 32;
    p.depth = 4.0;
    Transform thin;
    thin.scale = {0.5, 0.5, 1};
    const Mesh drill = transform(make_primitive(PrimitiveKind::Cylinder, p), thin);
    const Mesh holed = boolean_op(cube_at({0, 0, 0}), drill, BooleanOp::Difference);
    const double hole = 0.5 * 32 * 0.25 * std::sin(2 * std::numbers::pi / 32) * 2.0;
    CHECK(oracle::volume(holed) == doctest::Approx(8.0 - hole).epsilon(1e-9));
    CHECK(oracle::open_edges(holed) == 0);

    // A second boolean on the result must still see a closed operand.
    Transform side;
    side.rotation = {std::numbers::pi / 2, 0, 0};
    side.scale = {0.5, 0.5, 1};
    const Mesh cross_drill = transform(make_primitive(PrimitiveKind::Cylinder, p), side);
    const Mesh twice = boolean_op(holed, cross_drill, BooleanOp::Difference);
    CHECK(oracle::open_edges(twice) == 0);
    CHECK(oracle::volume(twice) < oracle::volume(holed));
    CHECK(oracle::volume(twice) > 8.0 - 2 * hole);
}

TEST_CASE("operand checks")
{
    CHECK_THROWS_AS(boolean_op(make_primitive(PrimitiveKind::Plane), cube_at({0, 0, 0}), BooleanOp::Union),
                    GeometryError);
    try
    {
        boolean_op(cube_at({0, 0, 0}), make_primitive(PrimitiveKind::Plane), BooleanOp::Union);
    }
    catch (const GeometryError& e)
    {
        CHECK(e.code() == GeometryErrc::NonManifoldOperand);
    }
    CHECK_THROWS_AS(boolean_op(Mesh{}, cube_at({0, 0, 0}), BooleanOp::Union), GeometryError);
    CHECK(parse_boolean_op("UNION") == BooleanOp::Union);
    CHECK_THROWS_AS(parse_boolean_op("XOR"), GeometryError);
}

TEST_CASE("coplanar detection")
{
    CHECK(has_coplanar_overlap(cube_at({0, 0, 0}), cube_at({1.5, 0, 0}, {0.5, 0.5, 0.5})));
    CHECK_FALSE(has_coplanar_overlap(cube_at({0, 0, 0}), cube_at({0.1, 0.2, 0.3}, {0.5, 0.5, 0.5})));
}

TEST_CASE("sphere boolean stays closed")
{
    PrimitiveParams p;
    p.segments = 16;
    p.rings = 8;
    Transform t;
    t.position = {0.7, 0.3, 0.2};
    const Mesh s = transform(make_primitive(PrimitiveKind::Sphere, p), t);
    const Mesh cube = cube_at({0, 0, 0});
    for (auto op: {BooleanOp::Union, BooleanOp::Difference, BooleanOp::Intersect})
    {
        const Mesh r = boolean_op(cube, s, op);
        CHECK(oracle::open_edges(r) == 0);
        CHECK(oracle::volume(r) > 0.0);
    }
    const double vi = oracle::volume(boolean_op(cube, s, BooleanOp::Intersect));
    const double vu = oracle::volume(boolean_op(cube, s, BooleanOp::Union));
    CHECK(vu + vi == doctest::Approx(8.0 + oracle::volume(s)).epsilon(1e-9));
}
