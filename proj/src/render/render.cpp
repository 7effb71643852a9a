// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/render/render.hpp"

#include "shapecraft/geometry/primitives.hpp"
#include "shapecraft/geometry/transform.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <numbers>
#include <png.h>

namespace shapecraft::render
{

namespace g = shapecraft::geometry;
using g::Vec3;

namespace
{

constexpr double deg = std::numbers::pi / 180.0;
// The scene's bounding sphere fills at most this fraction of the half-frame.
constexpr double frame_fill = 0.9;
constexpr double bbox_fill_alpha = 0.22;
constexpr double min_palette_distance = 40.0;

double rgb_distance(const Rgb& a, const Rgb& b)
{
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
    {
        const double d = double(a[i]) - double(b[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

double edge(double ax, double ay, double bx, double by, double px, double py)
{
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

g::Aabb scene_box(std::span<const g::Mesh> meshes)
{
    g::Aabb box{};
    bool any = false;
    for (const auto& m: meshes)
    {
        if (m.triangles.empty())
            continue;
        const g::Aabb b = g::compute_aabb(m);
        if (!any)
            box = b;
        for (int i = 0; i < 3; ++i)
        {
            box.min[i] = std::min(box.min[i], b.min[i]);
            box.max[i] = std::max(box.max[i], b.max[i]);
        }
        any = true;
    }
    if (!any)
        throw RenderError("nothing to render: the scene has no triangles");
    return box;
}

void check_size(int size)
{
    if (size <= 0 || size > 8192)
        throw RenderError(fmt::format("image size {} is out of range", size));
}

struct Raster
{
    Image image;
    std::vector<double> depth;

    explicit Raster(int size)
        : image(size, size, background_color),
          depth(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), std::numeric_limits<double>::infinity())
    {
    }
};

// Calls fn(x, y, view_depth) for each pixel center covered by the triangle.
template <class Fn>
void scan_triangle(const Vec3& s0, const Vec3& s1, const Vec3& s2, int size, Fn&& fn)
{
    const double area = edge(s0.x, s0.y, s1.x, s1.y, s2.x, s2.y);
    if (std::abs(area) < 1e-12)
        return;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min({s0.x, s1.x, s2.x}))));
    const int x1 = std::min(size - 1, static_cast<int>(std::ceil(std::max({s0.x, s1.x, s2.x}))));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min({s0.y, s1.y, s2.y}))));
    const int y1 = std::min(size - 1, static_cast<int>(std::ceil(std::max({s0.y, s1.y, s2.y}))));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
        {
            const double px = x + 0.5, py = y + 0.5;
            const double w0 = edge(s1.x, s1.y, s2.x, s2.y, px, py) / area;
            const double w1 = edge(s2.x, s2.y, s0.x, s0.y, px, py) / area;
            const double w2 = edge(s0.x, s0.y, s1.x, s1.y, px, py) / area;
            if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0)
                continue;
            // Screen-space barycentrics interpolate reciprocal depth linearly.
            const double inv = w0 / s0.z + w1 / s1.z + w2 / s2.z;
            fn(x, y, 1.0 / inv);
        }
}

void draw_line(Image& img, const Vec3& a, const Vec3& b, Rgb color)
{
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int steps = std::max(1, static_cast<int>(std::ceil(len * 2.0)));
    for (int i = 0; i <= steps; ++i)
    {
        const double t = static_cast<double>(i) / steps;
        const int x = static_cast<int>(std::floor(a.x + (b.x - a.x) * t));
        const int y = static_cast<int>(std::floor(a.y + (b.y - a.y) * t));
        for (int dy = 0; dy <= 1; ++dy)
            for (int dx = 0; dx <= 1; ++dx)
                if (x + dx >= 0 && x + dx < img.width && y + dy >= 0 && y + dy < img.height)
                    img.set(x + dx, y + dy, color);
    }
}

Rgb shade(Rgb base, double intensity)
{
    Rgb out{};
    for (int i = 0; i < 3; ++i)
        out[i] = static_cast<std::uint8_t>(std::clamp(std::lround(base[i] * intensity), 0L, 255L));
    return out;
}

} // namespace

std::vector<Camera> preset_cameras()
{
    return {Camera{45.0, 30.0, 45.0}, Camera{-45.0, 30.0, 45.0}, Camera{180.0, 70.0, 45.0}};
}

Image::Image(int w, int h, Rgb fill) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3)
{
    for (std::size_t i = 0; i < rgb.size(); i += 3)
        std::copy(fill.begin(), fill.end(), rgb.begin() + static_cast<std::ptrdiff_t>(i));
}

Rgb Image::pixel(int x, int y) const
{
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
}

void Image::set(int x, int y, Rgb c)
{
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[i] = c[0];
    rgb[i + 1] = c[1];
    rgb[i + 2] = c[2];
}

Projector::Projector(const g::Aabb& scene, const Camera& cam, int size) : _size(size)
{
    if (!(cam.elevation_deg > -90.0 && cam.elevation_deg < 90.0))
        throw RenderError(fmt::format("camera elevation {} must lie strictly between -90 and 90", cam.elevation_deg));
    if (!(cam.fov_deg > 0.0 && cam.fov_deg < 180.0))
        throw RenderError(fmt::format("camera field of view {} is out of range", cam.fov_deg));
    const Vec3 center = scene.center();
    const double radius = std::max(0.5 * g::length(scene.size()), 1e-9);
    _tan_half = std::tan(0.5 * cam.fov_deg * deg);
    const double distance = radius / std::sin(std::atan(frame_fill * _tan_half));
    const double az = cam.azimuth_deg * deg, el = cam.elevation_deg * deg;
    const Vec3 offset{-std::sin(az) * std::cos(el), -std::cos(az) * std::cos(el), std::sin(el)};
    eye = center + offset * distance;
    forward = -offset;
    _right = g::normalize(g::cross(forward, Vec3{0, 0, 1}));
    _up = g::cross(_right, forward);
}

Vec3 Projector::project(const Vec3& p) const
{
    const Vec3 d = p - eye;
    const double z = g::dot(d, forward);
    const double nx = g::dot(d, _right) / (z * _tan_half);
    const double ny = g::dot(d, _up) / (z * _tan_half);
    return {(nx + 1.0) * 0.5 * _size, (1.0 - ny) * 0.5 * _size, z};
}

Image render(std::span<const g::Mesh> meshes, const Camera& cam, int size, std::span<const Rgb> colors)
{
    check_size(size);
    const Projector proj(scene_box(meshes), cam, size);
    Raster r(size);
    for (std::size_t mi = 0; mi < meshes.size(); ++mi)
    {
        const g::Mesh& m = meshes[mi];
        const Rgb base = mi < colors.size() ? colors[mi] : default_mesh_color;
        std::vector<Vec3> screen(m.vertices.size());
        for (std::size_t i = 0; i < m.vertices.size(); ++i)
            screen[i] = proj.project(m.vertices[i]);
        for (std::size_t t = 0; t < m.triangles.size(); ++t)
        {
            const auto& tri = m.triangles[t];
            const Vec3 n = g::triangle_normal(m, t);
            if (g::length_squared(n) == 0.0)
                continue;
            // Two-sided headlight so open surfaces read correctly from behind.
            const Rgb color = shade(base, 0.3 + 0.7 * std::abs(g::dot(n, proj.forward)));
            scan_triangle(screen[tri[0]], screen[tri[1]], screen[tri[2]], size, [&](int x, int y, double z) {
                double& zb = r.depth[static_cast<std::size_t>(y) * size + x];
                if (z < zb)
                {
                    zb = z;
                    r.image.set(x, y, color);
                }
            });
        }
    }
    return std::move(r.image);
}

std::vector<std::pair<std::string, Rgb>> distinct_palette(std::size_t count)
{
    static const std::pair<const char*, Rgb> named[] = {
        {"red", {230, 25, 75}},       {"green", {60, 180, 75}},    {"blue", {0, 130, 200}},
        {"orange", {245, 130, 48}},   {"purple", {145, 30, 180}},  {"cyan", {70, 240, 240}},
        {"magenta", {240, 50, 230}},  {"yellow", {255, 225, 25}},  {"teal", {0, 128, 128}},
        {"brown", {170, 110, 40}},    {"maroon", {128, 0, 0}},     {"navy", {0, 0, 128}},
        {"olive", {128, 128, 0}},     {"lime", {210, 245, 60}},    {"pink", {250, 190, 212}},
        {"lavender", {220, 190, 255}}, {"mint", {170, 255, 195}},  {"black", {0, 0, 0}},
        {"grey", {128, 128, 128}},    {"apricot", {255, 215, 180}},
    };
    std::vector<std::pair<std::string, Rgb>> out;
    auto fits = [&out](const Rgb& c) {
        if (rgb_distance(c, background_color) < min_palette_distance)
            return false;
        return std::all_of(out.begin(), out.end(),
                           [&](const auto& e) { return rgb_distance(e.second, c) >= min_palette_distance; });
    };
    for (const auto& [name, c]: named)
    {
        if (out.size() == count)
            return out;
        if (fits(c))
            out.emplace_back(name, c);
    }
    // Beyond the named colors walk a coarse RGB lattice.
    for (int step: {85, 51, 32})
        for (int r = 0; r <= 255; r += step)
            for (int gg = 0; gg <= 255; gg += step)
                for (int b = 0; b <= 255; b += step)
                {
                    if (out.size() == count)
                        return out;
                    const Rgb c{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(gg),
                                static_cast<std::uint8_t>(b)};
                    if (fits(c))
                        out.emplace_back(fmt::format("rgb({}, {}, {})", r, gg, b), c);
                }
    if (out.size() < count)
        throw RenderError(fmt::format("cannot pick {} distinguishable colors", count));
    return out;
}

BboxRender render_bboxes(const gps::GpsGraph& graph, const Camera& cam, int size)
{
    check_size(size);
    std::vector<g::Mesh> boxes;
    for (const auto& n: graph.nodes)
    {
        if (!n.bounds)
            throw RenderError(fmt::format("node '{}' has no bounds", n.name));
        g::Transform t;
        t.position = n.bounds->center;
        t.scale = n.bounds->size * 0.5;
        boxes.push_back(g::transform(g::make_primitive(g::PrimitiveKind::Cube), t));
    }
    const auto palette = distinct_palette(boxes.size());
    const Projector proj(scene_box(boxes), cam, size);

    BboxRender out{Image(size, size, background_color), {}};
    Image& img = out.image;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(size) * size);
    for (std::size_t i = 0; i < boxes.size(); ++i)
    {
        std::fill(mask.begin(), mask.end(), 0);
        const g::Mesh& box = boxes[i];
        for (const auto& tri: box.triangles)
            scan_triangle(proj.project(box.vertices[tri[0]]), proj.project(box.vertices[tri[1]]),
                          proj.project(box.vertices[tri[2]]), size,
                          [&](int x, int y, double) { mask[static_cast<std::size_t>(y) * size + x] = 1; });
        const Rgb c = palette[i].second;
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x)
                if (mask[static_cast<std::size_t>(y) * size + x])
                {
                    const Rgb p = img.pixel(x, y);
                    Rgb blended{};
                    for (int k = 0; k < 3; ++k)
                        blended[k] = static_cast<std::uint8_t>(
                            std::lround(p[k] * (1.0 - bbox_fill_alpha) + c[k] * bbox_fill_alpha));
                    img.set(x, y, blended);
                }
        out.legend.push_back({graph.nodes[i].name, palette[i].first, c});
    }
    for (std::size_t i = 0; i < boxes.size(); ++i)
    {
        const g::Aabb b = graph.nodes[i].bounds->to_aabb();
        auto corner = [&](int k) {
            return proj.project({k & 1 ? b.max.x : b.min.x, k & 2 ? b.max.y : b.min.y, k & 4 ? b.max.z : b.min.z});
        };
        for (int k = 0; k < 8; ++k)
            for (int bit: {1, 2, 4})
                if (!(k & bit))
                    draw_line(img, corner(k), corner(k | bit), palette[i].second);
    }
    return out;
}

std::string legend_text(const std::vector<LegendEntry>& legend)
{
    std::string out;
    for (const auto& e: legend)
        out += fmt::format("- {}: {} ({}, {}, {})\n", e.node, e.color_name, e.color[0], e.color[1], e.color[2]);
    return out;
}

std::vector<std::uint8_t> encode_png(const Image& image)
{
    if (image.width <= 0 || image.height <= 0)
        throw RenderError("cannot encode an empty image");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw RenderError("libpng initialization failed");
    png_infop info = png_create_info_struct(png);
    std::vector<std::uint8_t> out;
    if (!info || setjmp(png_jmpbuf(png)))
    {
        png_destroy_write_struct(&png, &info);
        throw RenderError("PNG encoding failed");
    }
    png_set_write_fn(
        png, &out,
        [](png_structp p, png_bytep data, png_size_t n) {
            auto* buf = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(p));
            buf->insert(buf->end(), data, data + n);
        },
        nullptr);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < image.height; ++y)
        png_write_row(png, image.rgb.data() + static_cast<std::size_t>(y) * image.width * 3);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

void write_png(const std::filesystem::path& path, const Image& image)
{
    const auto bytes = encode_png(image);
    std::ofstream f(path, std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f)
        throw RenderError(fmt::format("cannot write '{}'", path.string()));
}

} // namespace shapecraft::render
