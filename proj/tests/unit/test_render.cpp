// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "shapecraft/geometry/primitives.hpp"
#include "shapecraft/geometry/transform.hpp"
#include "shapecraft/render/render.hpp"

#include <doctest.h>
#include <png.h>
#include <set>

using namespace shapecraft::render;
namespace g = shapecraft::geometry;
using g::Vec3;

namespace
{

std::size_t covered(const Image& img)
{
    std::size_t n = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            n += img.pixel(x, y) != background_color;
    return n;
}

double distance(const Rgb& a, const Rgb& b)
{
    double s = 0;
    for (int i = 0; i < 3; ++i)
        s += (double(a[i]) - b[i]) * (double(a[i]) - b[i]);
    return std::sqrt(s);
}

shapecraft::gps::GpsNode bbox_node(std::string name, Vec3 c, Vec3 s)
{
    shapecraft::gps::GpsNode n;
    n.name = std::move(name);
    n.bounds = shapecraft::gps::BoundingVolume{c, s};
    return n;
}

} // namespace

TEST_CASE("preset cameras")
{
    const auto a = preset_cameras();
    const auto b = preset_cameras();
    REQUIRE(a.size() == 3);
    CHECK(a == b);
    std::set<double> az;
    for (const auto& c: a)
    {
        az.insert(c.azimuth_deg);
        CHECK(c.fov_deg == 45.0);
        CHECK(c.elevation_deg > -90.0);
        CHECK(c.elevation_deg < 90.0);
    }
    CHECK(az.size() == 3);
}

TEST_CASE("scene center projects to the image center")
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial)
    {
        const Vec3 lo = oracle::random_vec(rng, -5, 0), hi = lo + oracle::random_vec(rng, 0.1, 6);
        const g::Aabb box{lo, hi};
        for (const auto& cam: preset_cameras())
        {
            const Projector p(box, cam, 512);
            const Vec3 s = p.project(box.center());
            CHECK(std::abs(s.x - 256.0) < 1.0);
            CHECK(std::abs(s.y - 256.0) < 1.0);
        }
    }
}

TEST_CASE("box corners land inside the frame with a 5% margin")
{
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial)
    {
        const Vec3 lo = oracle::random_vec(rng, -3, 3), hi = lo + oracle::random_vec(rng, 0.01, 10);
        const g::Aabb box{lo, hi};
        Camera cam;
        cam.azimuth_deg = oracle::uniform(rng, -180, 180);
        cam.elevation_deg = oracle::uniform(rng, -85, 85);
        const Projector p(box, cam, 400);
        for (int k = 0; k < 8; ++k)
        {
            const Vec3 s = p.project({k & 1 ? hi.x : lo.x, k & 2 ? hi.y : lo.y, k & 4 ? hi.z : lo.z});
            CHECK(s.x >= 20.0);
            CHECK(s.x <= 380.0);
            CHECK(s.y >= 20.0);
            CHECK(s.y <= 380.0);
            CHECK(s.z > 0.0);
        }
    }
}

TEST_CASE("camera geometry")
{
    const g::Aabb box{{-1, -1, -1}, {1, 1, 1}};
    const Projector front_left(box, {45, 30, 45}, 100);
    CHECK(front_left.eye.x < 0);
    CHECK(front_left.eye.y < 0);
    CHECK(front_left.eye.z > 0);
    const Projector front_right(box, {-45, 30, 45}, 100);
    CHECK(front_right.eye.x > 0);
    CHECK(front_right.eye.y < 0);
    const Projector rear(box, {180, 70, 45}, 100);
    CHECK(rear.eye.y > 0);
    CHECK(rear.eye.z > 2 * std::abs(rear.eye.y));
    // z points up on screen, smaller pixel y.
    const Projector side(box, {0, 0, 45}, 100);
    CHECK(side.project({0, 0, 1}).y < side.project({0, 0, -1}).y);
    CHECK(side.project({1, 0, 0}).x > side.project({-1, 0, 0}).x);
    CHECK_THROWS_AS(Projector(box, {0, 90, 45}, 100), RenderError);
}

TEST_CASE("cube coverage and determinism")
{
    const std::vector<g::Mesh> scene{g::make_primitive(g::PrimitiveKind::Cube)};
    for (const auto& cam: preset_cameras())
    {
        const Image img = render(scene, cam, 512);
        const double fraction = double(covered(img)) / (512.0 * 512.0);
        CHECK(fraction > 0.10);
        CHECK(fraction < 0.90);
        CHECK(encode_png(img) == encode_png(render(scene, cam, 512)));
    }
    CHECK_THROWS_AS(render(std::vector<g::Mesh>{}, preset_cameras()[0]), RenderError);
    CHECK_THROWS_AS(render(std::vector<g::Mesh>{g::Mesh{}}, preset_cameras()[0]), RenderError);
}

TEST_CASE("nearer surfaces win the depth test")
{
    g::Transform t;
    t.position = {0, -3, 0};
    t.scale = {0.5, 0.5, 0.5};
    const std::vector<g::Mesh> scene{g::make_primitive(g::PrimitiveKind::Cube),
                                     g::transform(g::make_primitive(g::PrimitiveKind::Cube), t)};
    const std::vector<Rgb> colors{Rgb{255, 0, 0}, Rgb{0, 0, 255}};
    // Looking from the front, the small cube sits between camera and big cube.
    const Image img = render(scene, {0, 0, 45}, 200, colors);
    const Projector p(g::Aabb{{-1, -3.5, -1}, {1, 1, 1}}, {0, 0, 45}, 200);
    const Vec3 c = p.project({0, -3.5, 0});
    const Rgb px = img.pixel(static_cast<int>(c.x), static_cast<int>(c.y));
    CHECK(px[2] > 0);
    CHECK(px[0] == 0);
    const Image swapped = render(std::vector<g::Mesh>{scene[1], scene[0]}, {0, 0, 45}, 200,
                                 std::vector<Rgb>{colors[1], colors[0]});
    CHECK(swapped == img);
}

TEST_CASE("palette is pairwise distinct")
{
    for (std::size_t n: {1u, 5u, 20u, 60u})
    {
        const auto pal = distinct_palette(n);
        REQUIRE(pal.size() == n);
        for (std::size_t i = 0; i < n; ++i)
        {
            CHECK(distance(pal[i].second, background_color) >= 40.0);
            for (std::size_t j = i + 1; j < n; ++j)
                CHECK(distance(pal[i].second, pal[j].second) >= 40.0);
        }
    }
}

TEST_CASE("bounding box render")
{
    shapecraft::gps::GpsGraph graph;
    graph.nodes.push_back(bbox_node("seat", {0, 0, 0.5}, {2, 2, 0.2}));
    const auto one = render_bboxes(graph, preset_cameras()[0], 256);
    REQUIRE(one.legend.size() == 1);
    bool found = false;
    for (int y = 0; y < 256 && !found; ++y)
        for (int x = 0; x < 256 && !found; ++x)
            found = one.image.pixel(x, y) == one.legend[0].color;
    CHECK(found);

    graph.nodes.push_back(bbox_node("backrest", {0, 0.9, 1.5}, {2, 0.2, 2}));
    graph.nodes.push_back(bbox_node("legs", {0, 0, 0.2}, {2, 2, 0.4}));
    const auto three = render_bboxes(graph, preset_cameras()[1], 256);
    REQUIRE(three.legend.size() == 3);
    CHECK(three.legend[0].node == "seat");
    CHECK(three.legend[1].node == "backrest");
    CHECK(three.legend[2].node == "legs");
    CHECK(three.legend[0].color != three.legend[1].color);
    CHECK(legend_text(three.legend).rfind("- seat: red (230, 25, 75)\n", 0) == 0);

    graph.nodes.push_back(bbox_node("ghost", {}, {}));
    graph.nodes.back().bounds.reset();
    CHECK_THROWS_AS(render_bboxes(graph, preset_cameras()[0], 64), RenderError);
}

TEST_CASE("png encoding decodes back to the same pixels")
{
    Image img(7, 5, Rgb{10, 20, 30});
    img.set(3, 2, Rgb{200, 100, 0});
    const auto bytes = encode_png(img);
    REQUIRE(bytes.size() > 8);
    CHECK(bytes[1] == 'P');
    CHECK(bytes[2] == 'N');
    CHECK(bytes[3] == 'G');

    png_image decoded{};
    decoded.version = PNG_IMAGE_VERSION;
    REQUIRE(png_image_begin_read_from_memory(&decoded, bytes.data(), bytes.size()));
    decoded.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(decoded));
    REQUIRE(png_image_finish_read(&decoded, nullptr, pixels.data(), 0, nullptr));
    CHECK(decoded.width == 7);
    CHECK(decoded.height == 5);
    CHECK(pixels == img.rgb);
}
