// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "shapecraft/geometry/curves.hpp"
#include "shapecraft/geometry/errors.hpp"
#include "shapecraft/geometry/primitives.hpp"
#include "shapecraft/geometry/transform.hpp"

#include <doctest.h>
#include <numbers>

using namespace shapecraft::geometry;

namespace
{

// Counts triangles of a UV sphere by walking its grid cells: polar cells are
// single triangles, every other cell is a quad split in two.
std::size_t enumerate_sphere_triangles(int segments, int rings)
{
    std::size_t count = 0;
    for (int ring = 0; ring < rings; ++ring)
        for (int seg = 0; seg < segments; ++seg)
            count += (ring == 0 || ring == rings - 1) ? 1 : 2;
    return count;
}

} // namespace

TEST_CASE("cube defaults")
{
    const Mesh cube = make_primitive(PrimitiveKind::Cube);
    CHECK(cube.vertices.size() == 8);
    CHECK(cube.triangles.size() == 12);
    const Aabb box = compute_aabb(cube);
    CHECK(box.min == Vec3{-1, -1, -1});
    CHECK(box.max == Vec3{1, 1, 1});
    CHECK(oracle::volume(cube) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(oracle::open_edges(cube) == 0);
    CHECK(oracle::consistently_oriented(cube));
}

TEST_CASE("pyramid defaults")
{
    const Mesh p = make_primitive(PrimitiveKind::Pyramid);
    CHECK(p.vertices.size() == 5);
    CHECK(p.triangles.size() == 6);
    // Square base of side 2, height 2.
    CHECK(oracle::volume(p) == doctest::Approx(4.0 * 2.0 / 3.0));
}

TEST_CASE("sphere counts match a grid enumerator")
{
    PrimitiveParams params;
    params.segments = 8;
    params.rings = 4;
    const Mesh s = make_primitive(PrimitiveKind::Sphere, params);
    CHECK(s.vertices.size() == 26);
    CHECK(s.triangles.size() == enumerate_sphere_triangles(8, 4));
    for (const auto& v: s.vertices)
        CHECK(length(v) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("primitive counts and closedness over parameter sweeps")
{
    int combos = 0;
    for (int s: {3, 5, 8, 17, 32})
        for (int r: {3, 4, 9})
        {
            PrimitiveParams p;
            p.segments = s;
            p.rings = r;
            const Mesh m = make_primitive(PrimitiveKind::Sphere, p);
            CHECK(m.vertices.size() == static_cast<std::size_t>(s * (r - 1) + 2));
            CHECK(m.triangles.size() == enumerate_sphere_triangles(s, r));
            CHECK(oracle::open_edges(m) == 0);
            CHECK(oracle::volume(m) > 0.0);
            ++combos;
        }
    for (int n: {3, 4, 7, 32, 64})
    {
        PrimitiveParams p;
        p.vertices = n;
        p.sides = n;
        for (auto kind: {PrimitiveKind::Cylinder, PrimitiveKind::Prism})
        {
            const Mesh m = make_primitive(kind, p);
            CHECK(m.vertices.size() == static_cast<std::size_t>(2 * n + 2));
            CHECK(m.triangles.size() == static_cast<std::size_t>(4 * n));
            CHECK(oracle::open_edges(m) == 0);
            // Regular n-gon area times height 2.
            const double area = 0.5 * n * std::sin(2 * std::numbers::pi / n);
            CHECK(oracle::volume(m) == doctest::Approx(2.0 * area).epsilon(1e-12));
            ++combos;
        }
        const Mesh cone = make_primitive(PrimitiveKind::Cone, p);
        CHECK(cone.vertices.size() == static_cast<std::size_t>(n + 2));
        CHECK(cone.triangles.size() == static_cast<std::size_t>(2 * n));
        CHECK(oracle::open_edges(cone) == 0);
        ++combos;
    }
    for (int s: {4, 8, 16, 32})
    {
        PrimitiveParams p;
        p.segments = s;
        const Mesh m = make_primitive(PrimitiveKind::Capsule, p);
        const int h = std::max(2, s / 4);
        CHECK(capsule_hemisphere_bands(s) == h);
        CHECK(m.vertices.size() == static_cast<std::size_t>(2 * s * h + 2));
        CHECK(m.triangles.size() == static_cast<std::size_t>(4 * s * h));
        CHECK(oracle::open_edges(m) == 0);
        const Aabb box = compute_aabb(m);
        CHECK(box.max.z - box.min.z == doctest::Approx(4.0));
        ++combos;
    }
    const Mesh plane = make_primitive(PrimitiveKind::Plane);
    CHECK(plane.vertices.size() == 4);
    CHECK(plane.triangles.size() == 2);
    CHECK(oracle::open_edges(plane) == 4);
    CHECK(combos >= 20);
}

TEST_CASE("primitive parameter validation")
{
    PrimitiveParams p;
    p.segments = 2;
    CHECK_THROWS_AS(make_primitive(PrimitiveKind::Sphere, p), GeometryError);
    try
    {
        make_primitive(PrimitiveKind::Sphere, p);
    }
    catch (const GeometryError& e)
    {
        CHECK(e.code() == GeometryErrc::InvalidParam);
        CHECK(e.param() == "segments");
    }
    PrimitiveParams q;
    q.depth = 0.0;
    CHECK_THROWS_AS(make_primitive(PrimitiveKind::Cylinder, q), GeometryError);
    CHECK_THROWS_AS(parse_primitive_kind("torus"), GeometryError);
}

TEST_CASE("compute_aabb")
{
    Mesh single;
    single.vertices.push_back({2, 3, 4});
    const Aabb b = compute_aabb(single);
    CHECK(b.min == Vec3{2, 3, 4});
    CHECK(b.max == Vec3{2, 3, 4});
    CHECK_THROWS_AS(compute_aabb(Mesh{}), GeometryError);

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial)
    {
        Mesh m;
        for (int i = 0; i < 100; ++i)
            m.vertices.push_back(oracle::random_vec(rng, -50, 50));
        const auto expected = oracle::scan_bounds(m.vertices);
        const Aabb got = compute_aabb(m);
        CHECK(got.min == expected.lo);
        CHECK(got.max == expected.hi);
    }
}

TEST_CASE("transform basics")
{
    const Mesh cube = make_primitive(PrimitiveKind::Cube);
    const Mesh same = transform(cube, Transform{});
    CHECK(same.vertices == cube.vertices);

    Mesh point;
    point.vertices.push_back({1, 0, 0});
    Transform half_turn;
    half_turn.rotation = {0, 0, std::numbers::pi};
    const Vec3 p = transform(point, half_turn).vertices[0];
    CHECK(std::abs(p.x + 1.0) < 1e-12);
    CHECK(std::abs(p.y) < 1e-12);
    CHECK(std::abs(p.z) < 1e-12);

    Transform stretch;
    stretch.scale = {2, 1, 1};
    const Mesh wide = transform(cube, stretch);
    CHECK(compute_aabb(wide).size().x == doctest::Approx(4.0));
    CHECK(oracle::volume(wide) == doctest::Approx(16.0));

    Transform flip;
    flip.scale = {-1, 1, 1};
    CHECK(oracle::volume(transform(cube, flip)) == doctest::Approx(8.0));

    Warnings w;
    Transform flat;
    flat.scale = {1, 0, 1};
    transform(cube, flat, &w);
    CHECK(w.size() == 1);
}

TEST_CASE("rotation applies X then Y then Z")
{
    // Rotating (0,1,0) a quarter turn about x gives (0,0,1); a quarter turn
    // about y then takes it to (1,0,0).
    Mesh point;
    point.vertices.push_back({0, 1, 0});
    Transform t;
    t.rotation = {std::numbers::pi / 2, std::numbers::pi / 2, 0};
    const Vec3 p = transform(point, t).vertices[0];
    CHECK(p.x == doctest::Approx(1.0));
    CHECK(std::abs(p.y) < 1e-12);
    CHECK(std::abs(p.z) < 1e-12);
}

TEST_CASE("transform composition is associative on point samples")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial)
    {
        Mesh pts;
        for (int i = 0; i < 20; ++i)
            pts.vertices.push_back(oracle::random_vec(rng, -3, 3));
        auto random_transform = [&] {
            Transform t;
            t.position = oracle::random_vec(rng, -5, 5);
            t.rotation = oracle::random_vec(rng, -3.2, 3.2);
            t.scale = oracle::random_vec(rng, 0.2, 3);
            return t;
        };
        const Transform a = random_transform(), b = random_transform(), c = random_transform();
        const Mesh stepwise = transform(transform(transform(pts, a), b), c);
        const Affine left = compose(to_affine(c), compose(to_affine(b), to_affine(a)));
        const Affine right = compose(compose(to_affine(c), to_affine(b)), to_affine(a));
        const Mesh via_left = transform(pts, left);
        const Mesh via_right = transform(pts, right);
        for (std::size_t i = 0; i < pts.vertices.size(); ++i)
        {
            CHECK(distance(stepwise.vertices[i], via_left.vertices[i]) < 1e-9);
            CHECK(distance(via_left.vertices[i], via_right.vertices[i]) < 1e-9);
        }
    }
}

TEST_CASE("polyline tube bounds")
{
    CurveParams p;
    p.points = {{0, 0, 0}, {1, 0, 0}};
    p.bevel_depth = 0.1;
    p.fill_caps = true;
    const Mesh tube = make_curve_object(CurveKind::Polyline, p);
    const Aabb box = compute_aabb(tube);
    CHECK(box.min.x == doctest::Approx(0.0));
    CHECK(box.max.x == doctest::Approx(1.0));
    CHECK(box.min.y == doctest::Approx(-0.1));
    CHECK(box.max.y == doctest::Approx(0.1));
    CHECK(box.min.z == doctest::Approx(-0.1));
    CHECK(box.max.z == doctest::Approx(0.1));
    CHECK(oracle::open_edges(tube) == 0);
    CHECK(oracle::volume(tube) > 0.0);
    // Every surface vertex sits on the tube radius or on a cap center.
    for (const auto& v: tube.vertices)
    {
        const double r = std::hypot(v.y, v.z);
        CHECK((std::abs(r - 0.1) < 1e-12 || r < 1e-12));
    }
}

TEST_CASE("circle ribbon")
{
    CurveParams p;
    p.radius = 1.0;
    p.segments = 64;
    p.extrude = 0.5;
    const Mesh ribbon = make_curve_object(CurveKind::Circle, p);
    CHECK_FALSE(ribbon.empty());
    for (const auto& v: ribbon.vertices)
    {
        CHECK(std::abs(v.x * v.x + v.y * v.y - 1.0) < 1e-9);
        CHECK((v.z == 0.5 || v.z == -0.5));
    }
}

TEST_CASE("curve with no bevel or extrude is empty with a warning")
{
    CurveParams p;
    p.points = {{0, 0, 0}, {1, 1, 0}};
    Warnings w;
    const Mesh m = make_curve_object(CurveKind::Bezier, p, &w);
    CHECK(m.empty());
    CHECK(m.vertices.empty());
    CHECK(w.size() == 1);
    CHECK(m.centerline.has_value());
}

TEST_CASE("curve validation")
{
    CurveParams p;
    p.points = {{0, 0, 0}, {0, 0, 0}, {1, 0, 0}};
    p.bevel_depth = 0.1;
    try
    {
        make_curve_object(CurveKind::Polyline, p);
        FAIL("expected DegenerateCurve");
    }
    catch (const GeometryError& e)
    {
        CHECK(e.code() == GeometryErrc::DegenerateCurve);
    }
    CurveParams q;
    q.points = {{0, 0, 0}};
    CHECK_THROWS_AS(make_curve_object(CurveKind::Polyline, q), GeometryError);
    CurveParams r;
    r.points = {{0, 0, 0}, {1, 0, 0}};
    r.bevel_depth = -1;
    CHECK_THROWS_AS(make_curve_object(CurveKind::Polyline, r), GeometryError);
}

TEST_CASE("closed polyline extrude with caps is a closed solid")
{
    CurveParams p;
    p.points = {{0, 0, 0}, {2, 0, 0}, {2, 1, 0}, {0, 1, 0}};
    p.closed = true;
    p.extrude = 0.5;
    p.fill_caps = true;
    const Mesh m = make_curve_object(CurveKind::Polyline, p);
    CHECK(oracle::open_edges(m) == 0);
    CHECK(oracle::volume(m) == doctest::Approx(2.0));
}

TEST_CASE("bezier tube over a closed loop has no seam")
{
    CurveParams p;
    p.points = {{0, 0, 0}, {2, 0, 1}, {2, 2, 0}, {0, 2, 1}};
    p.bevel_depth = 0.2;
    const Mesh open = make_curve_object(CurveKind::Bezier, p);
    CHECK(oracle::open_edges(open) > 0);

    CurveParams c;
    c.radius = 2.0;
    c.bevel_depth = 0.25;
    const Mesh torus = make_curve_object(CurveKind::Circle, c);
    CHECK(oracle::open_edges(torus) == 0);
    // Pappus: 2*pi*R * area of the profile polygon.
    const double profile = 0.5 * bevel_profile_segments * 0.25 * 0.25 * std::sin(2 * std::numbers::pi / bevel_profile_segments);
    CHECK(oracle::volume(torus) == doctest::Approx(2 * std::numbers::pi * 2.0 * profile).epsilon(0.01));
}

TEST_CASE("rotation-minimizing frames stay orthonormal")
{
    CurvePath path;
    for (int i = 0; i < 40; ++i)
    {
        const double a = i * 0.3;
        path.points.push_back({std::cos(a), std::sin(a), 0.1 * i});
    }
    for (const auto& f: rotation_minimizing_frames(path))
    {
        CHECK(length(f.tangent) == doctest::Approx(1.0));
        CHECK(length(f.normal) == doctest::Approx(1.0));
        CHECK(std::abs(dot(f.tangent, f.normal)) < 1e-9);
        CHECK(distance(f.binormal, cross(f.tangent, f.normal)) < 1e-12);
    }
}
