// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "shapecraft/executor/executor.hpp"
#include "shapecraft/geometry/errors.hpp"
#include "shapecraft/geometry/primitives.hpp"
#include "shapecraft/geometry/transform.hpp"

#include <doctest.h>

using namespace shapecraft::executor;
using shapecraft::geometry::Mesh;
using shapecraft::geometry::Vec3;
using shapecraft::gps::BoundingVolume;
using shapecraft::gps::GpsGraph;
using shapecraft::gps::GpsNode;
namespace g = shapecraft::geometry;

namespace
{

GpsNode node(std::string name, BoundingVolume b, std::optional<std::string> code = std::nullopt)
{
    GpsNode n;
    n.name = std::move(name);
    n.bounds = b;
    n.code = std::move(code);
    return n;
}

void check_box(const Mesh& m, const BoundingVolume& b, double tol)
{
    const auto box = oracle::scan_bounds(m.vertices);
    for (int i = 0; i < 3; ++i)
    {
        CHECK(std::abs(box.lo[i] - (b.center[i] - b.size[i] / 2)) <= tol);
        CHECK(std::abs(box.hi[i] - (b.center[i] + b.size[i] / 2)) <= tol);
    }
}

} // namespace

TEST_CASE("default cube fills the bounds")
{
    const auto r1 = execute_node(node("a", {{0, 0, 0}, {2, 2, 2}}));
    REQUIRE(r1.ok());
    CHECK(r1.mesh->component_tag == "a");
    CHECK(oracle::scan_bounds(r1.mesh->vertices).lo == Vec3{-1, -1, -1});
    CHECK(oracle::scan_bounds(r1.mesh->vertices).hi == Vec3{1, 1, 1});

    const auto r2 = execute_node(node("b", {{1, 2, 3}, {2, 4, 6}}, std::string(" \n\t")));
    REQUIRE(r2.ok());
    CHECK(oracle::scan_bounds(r2.mesh->vertices).lo == Vec3{0, 0, 0});
    CHECK(oracle::scan_bounds(r2.mesh->vertices).hi == Vec3{2, 4, 6});
    CHECK(uses_default_cube(node("c", {}, std::string("  "))));
    CHECK_FALSE(uses_default_cube(node("c", {}, std::string("cube()"))));
}

TEST_CASE("program result is fitted nonuniformly")
{
    const BoundingVolume b{{0, 0, 0}, {4, 2, 2}};
    const auto r = execute_node(node("body", b, std::string("cube()")));
    REQUIRE(r.ok());
    check_box(*r.mesh, b, 1e-12);
    CHECK(oracle::volume(*r.mesh) == doctest::Approx(16.0));
}

TEST_CASE("fit exactness on random meshes and bounds")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial)
    {
        g::Transform t;
        t.position = oracle::random_vec(rng, -5, 5);
        t.rotation = oracle::random_vec(rng, -3, 3);
        t.scale = oracle::random_vec(rng, 0.1, 3);
        g::PrimitiveParams p;
        p.segments = 10;
        p.rings = 5;
        const Mesh m = g::transform(g::make_primitive(trial % 2 ? g::PrimitiveKind::Sphere : g::PrimitiveKind::Cone, p), t);
        const BoundingVolume b{oracle::random_vec(rng, -10, 10), oracle::random_vec(rng, 0.01, 20)};
        check_box(fit_to_bounds(m, b), b, 1e-9);
        CHECK(fit_to_bounds(m, b).triangles == m.triangles);
    }
}

TEST_CASE("fit identity and degenerate axes")
{
    const Mesh cube = g::make_primitive(g::PrimitiveKind::Cube);
    const Mesh same = fit_to_bounds(cube, {{0, 0, 0}, {2, 2, 2}});
    for (std::size_t i = 0; i < cube.vertices.size(); ++i)
        for (int k = 0; k < 3; ++k)
            CHECK(std::abs(same.vertices[i][k] - cube.vertices[i][k]) <= 1e-12);

    const Mesh plane = g::make_primitive(g::PrimitiveKind::Plane);
    const Mesh fitted = fit_to_bounds(plane, {{0, 0, 5}, {2, 2, 2}});
    const auto box = oracle::scan_bounds(fitted.vertices);
    CHECK(box.lo.z == 5.0);
    CHECK(box.hi.z == 5.0);
    CHECK(box.lo.x == -1.0);
    CHECK(box.hi.y == 1.0);

    CHECK_THROWS_AS(fit_to_bounds(Mesh{}, {}), g::GeometryError);
}

TEST_CASE("uniform fit keeps proportions")
{
    const Mesh cube = g::make_primitive(g::PrimitiveKind::Cube);
    const Mesh fitted = fit_to_bounds(cube, {{1, 0, 0}, {4, 2, 8}}, FitMode::Uniform);
    const auto box = oracle::scan_bounds(fitted.vertices);
    CHECK(box.lo == Vec3{0, -1, -1});
    CHECK(box.hi == Vec3{2, 1, 1});
}

TEST_CASE("assembly concatenates in graph order")
{
    GpsGraph graph;
    graph.nodes.push_back(node("big", {{0, 0, 0}, {2, 2, 2}}));
    graph.nodes.push_back(node("small", {{5, 0, 0}, {1, 1, 1}}));
    for (bool parallel: {false, true})
    {
        ExecutorOptions opts;
        opts.parallel = parallel;
        const Assembly a = assemble(graph, opts);
        CHECK(a.complete());
        CHECK(std::abs(oracle::volume(a.mesh) - 9.0) < 1e-6);
        REQUIRE(a.components.size() == 2);
        CHECK(a.components[0].component_tag == "big");
        CHECK(a.mesh.vertices.size() == a.components[0].vertices.size() + a.components[1].vertices.size());
    }

    GpsGraph single;
    single.nodes.push_back(node("only", {{1, 1, 1}, {1, 2, 3}}, std::string("sphere(segments=8, rings=4)")));
    const Assembly one = assemble(single);
    CHECK(one.mesh.vertices == execute_node(single.nodes[0]).mesh->vertices);
    CHECK(one.mesh.triangles == execute_node(single.nodes[0]).mesh->triangles);
}

TEST_CASE("assembly reports failing nodes and keeps the rest")
{
    GpsGraph graph;
    graph.nodes.push_back(node("a", {{0, 0, 0}, {1, 1, 1}}));
    graph.nodes.push_back(node("b", {{2, 0, 0}, {1, 1, 1}}, std::string("cube()\nwobble()\n")));
    graph.nodes.push_back(node("c", {{4, 0, 0}, {1, 1, 1}}, std::string("cylinder(vertices=12)")));
    const Assembly a = assemble(graph);
    CHECK_FALSE(a.complete());
    CHECK(a.components.size() == 2);
    REQUIRE(a.failures.size() == 1);
    CHECK(a.failures[0].node == "b");
    CHECK(a.failure_report() == "node 'b' failed:\n  line 2: error: unknown builtin 'wobble'\n");
}

TEST_CASE("empty program output is an error")
{
    const auto r = execute_node(node("a", {{0, 0, 0}, {1, 1, 1}},
                                     std::string("a = cube()\nb = cube()\nModifiers.boolean(a, b)\n")));
    CHECK_FALSE(r.ok());
    REQUIRE_FALSE(r.diagnostics.empty());
    CHECK(shapecraft::program::render(r.diagnostics.back()) == "line 3: error: the program produced no geometry");
}

TEST_CASE("partial geometry")
{
    GpsGraph graph;
    const BoundingVolume b{{0, 1, 2}, {1, 2, 3}};
    graph.nodes.push_back(node("first", {{0, 0, 0}, {1, 1, 1}}));
    graph.nodes.push_back(node("wheel", b, std::string("cylinder(vertices=16, rotation=(1.5707963267948966, 0, 0))")));
    const auto r = partial_geometry(graph, "wheel");
    REQUIRE(r.ok());
    check_box(*r.mesh, b, 1e-9);
    CHECK(r.mesh->vertices == execute_node(graph.nodes[1]).mesh->vertices);
    CHECK(partial_geometry(graph, "first").mesh->vertices == execute_node(graph.nodes[0]).mesh->vertices);
    try
    {
        partial_geometry(graph, "ghost");
        FAIL("expected UnknownNode");
    }
    catch (const ExecutorError& e)
    {
        CHECK(e.code() == ExecutorErrc::UnknownNode);
    }
    GpsNode unbounded;
    unbounded.name = "x";
    CHECK_THROWS_AS(execute_node(unbounded), ExecutorError);
}
