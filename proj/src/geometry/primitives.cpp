// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/geometry/primitives.hpp"

#include "shapecraft/geometry/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace shapecraft::geometry
{

namespace
{

using std::numbers::pi;

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value))
        throw_invalid_param(name, "must be a positive number");
}

void require_count(int value, const char* name)
{
    if (value < 3)
        throw_invalid_param(name, "must be an integer >= 3");
}

std::uint32_t idx(std::size_t i) { return static_cast<std::uint32_t>(i); }

// Surface of revolution about z: pole, rings (radius, z) top to bottom, pole.
Mesh lathe(double top_z, std::span<const std::pair<double, double>> rings, double bottom_z, int segments)
{
    Mesh m;
    const auto s = static_cast<std::size_t>(segments);
    m.vertices.reserve(rings.size() * s + 2);
    m.vertices.push_back({0.0, 0.0, top_z});
    for (const auto& [radius, z]: rings)
        for (std::size_t j = 0; j < s; ++j)
        {
            const double phi = 2.0 * pi * static_cast<double>(j) / static_cast<double>(s);
            m.vertices.push_back({radius * std::cos(phi), radius * std::sin(phi), z});
        }
    const std::size_t bottom = m.vertices.size();
    m.vertices.push_back({0.0, 0.0, bottom_z});

    auto ring = [&](std::size_t k, std::size_t j) { return idx(1 + k * s + (j % s)); };
    for (std::size_t j = 0; j < s; ++j)
        m.triangles.push_back({0, ring(0, j), ring(0, j + 1)});
    for (std::size_t k = 0; k + 1 < rings.size(); ++k)
        for (std::size_t j = 0; j < s; ++j)
        {
            m.triangles.push_back({ring(k, j), ring(k + 1, j), ring(k + 1, j + 1)});
            m.triangles.push_back({ring(k, j), ring(k + 1, j + 1), ring(k, j + 1)});
        }
    const std::size_t last = rings.size() - 1;
    for (std::size_t j = 0; j < s; ++j)
        m.triangles.push_back({idx(bottom), ring(last, j + 1), ring(last, j)});
    return m;
}

// Closed n-gon prism with fan caps around center vertices.
Mesh ring_prism(int n, double radius, double height)
{
    Mesh m;
    const auto count = static_cast<std::size_t>(n);
    const double half = height * 0.5;
    for (double z: {-half, half})
        for (std::size_t j = 0; j < count; ++j)
        {
            const double phi = 2.0 * pi * static_cast<double>(j) / static_cast<double>(count);
            m.vertices.push_back({radius * std::cos(phi), radius * std::sin(phi), z});
        }
    const auto bottom_center = idx(m.vertices.size());
    m.vertices.push_back({0.0, 0.0, -half});
    const auto top_center = idx(m.vertices.size());
    m.vertices.push_back({0.0, 0.0, half});

    auto b = [&](std::size_t j) { return idx(j % count); };
    auto t = [&](std::size_t j) { return idx(count + j % count); };
    for (std::size_t j = 0; j < count; ++j)
    {
        m.triangles.push_back({b(j), b(j + 1), t(j + 1)});
        m.triangles.push_back({b(j), t(j + 1), t(j)});
        m.triangles.push_back({top_center, t(j), t(j + 1)});
        m.triangles.push_back({bottom_center, b(j + 1), b(j)});
    }
    return m;
}

Mesh make_cube()
{
    Mesh m;
    for (int i = 0; i < 8; ++i)
        m.vertices.push_back({(i & 1) ? 1.0 : -1.0, (i & 2) ? 1.0 : -1.0, (i & 4) ? 1.0 : -1.0});
    m.triangles = {{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
                   {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
    return m;
}

Mesh make_sphere(int segments, int rings)
{
    std::vector<std::pair<double, double>> profile;
    for (int k = 1; k < rings; ++k)
    {
        const double theta = pi * k / rings;
        profile.emplace_back(std::sin(theta), std::cos(theta));
    }
    return lathe(1.0, profile, -1.0, segments);
}

Mesh make_capsule(double radius, double height, int segments)
{
    const int bands = capsule_hemisphere_bands(segments);
    const double half = height * 0.5;
    std::vector<std::pair<double, double>> profile;
    for (int k = 1; k <= bands; ++k)
    {
        const double theta = 0.5 * pi * k / bands;
        profile.emplace_back(radius * std::sin(theta), half + radius * std::cos(theta));
    }
    for (int k = 0; k < bands; ++k)
    {
        const double theta = 0.5 * pi + 0.5 * pi * k / bands;
        profile.emplace_back(radius * std::sin(theta), -half + radius * std::cos(theta));
    }
    return lathe(half + radius, profile, -half - radius, segments);
}

Mesh make_cone(int n, double radius, double depth)
{
    Mesh m;
    const auto count = static_cast<std::size_t>(n);
    const double half = depth * 0.5;
    for (std::size_t j = 0; j < count; ++j)
    {
        const double phi = 2.0 * pi * static_cast<double>(j) / static_cast<double>(count);
        m.vertices.push_back({radius * std::cos(phi), radius * std::sin(phi), -half});
    }
    const auto apex = idx(count);
    const auto base = idx(count + 1);
    m.vertices.push_back({0.0, 0.0, half});
    m.vertices.push_back({0.0, 0.0, -half});
    for (std::size_t j = 0; j < count; ++j)
    {
        const auto a = idx(j), b = idx((j + 1) % count);
        m.triangles.push_back({a, b, apex});
        m.triangles.push_back({base, b, a});
    }
    return m;
}

Mesh make_plane(double size)
{
    const double h = size * 0.5;
    Mesh m;
    m.vertices = {{-h, -h, 0.0}, {h, -h, 0.0}, {h, h, 0.0}, {-h, h, 0.0}};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    return m;
}

Mesh make_pyramid(double base_size, double height)
{
    const double b = base_size * 0.5;
    const double h = height * 0.5;
    Mesh m;
    m.vertices = {{-b, -b, -h}, {b, -b, -h}, {b, b, -h}, {-b, b, -h}, {0.0, 0.0, h}};
    m.triangles = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}, {0, 2, 1}, {0, 3, 2}};
    return m;
}

} // namespace

PrimitiveKind parse_primitive_kind(std::string_view name)
{
    static constexpr std::pair<std::string_view, PrimitiveKind> table[] = {
        {"cube", PrimitiveKind::Cube},       {"sphere", PrimitiveKind::Sphere},   {"cylinder", PrimitiveKind::Cylinder},
        {"cone", PrimitiveKind::Cone},       {"plane", PrimitiveKind::Plane},     {"pyramid", PrimitiveKind::Pyramid},
        {"capsule", PrimitiveKind::Capsule}, {"prism", PrimitiveKind::Prism},
    };
    for (const auto& [key, kind]: table)
        if (key == name)
            return kind;
    throw GeometryError(GeometryErrc::UnknownPrimitive, "unknown primitive '" + std::string(name) + "'");
}

std::string_view to_string(PrimitiveKind kind)
{
    switch (kind)
    {
        case PrimitiveKind::Cube: return "cube";
        case PrimitiveKind::Sphere: return "sphere";
        case PrimitiveKind::Cylinder: return "cylinder";
        case PrimitiveKind::Cone: return "cone";
        case PrimitiveKind::Plane: return "plane";
        case PrimitiveKind::Pyramid: return "pyramid";
        case PrimitiveKind::Capsule: return "capsule";
        case PrimitiveKind::Prism: return "prism";
    }
    return "unknown";
}

int capsule_hemisphere_bands(int segments)
{
    return std::max(2, segments / 4);
}

Mesh make_primitive(PrimitiveKind kind, const PrimitiveParams& p)
{
    switch (kind)
    {
        case PrimitiveKind::Cube: return make_cube();
        case PrimitiveKind::Sphere:
            require_count(p.segments, "segments");
            require_count(p.rings, "rings");
            return make_sphere(p.segments, p.rings);
        case PrimitiveKind::Cylinder:
            require_count(p.vertices, "vertices");
            require_positive(p.depth, "depth");
            return ring_prism(p.vertices, 1.0, p.depth);
        case PrimitiveKind::Cone:
            require_count(p.vertices, "vertices");
            require_positive(p.radius, "radius");
            require_positive(p.depth, "depth");
            return make_cone(p.vertices, p.radius, p.depth);
        case PrimitiveKind::Plane:
            require_positive(p.size, "size");
            return make_plane(p.size);
        case PrimitiveKind::Pyramid:
            require_positive(p.base_size, "base_size");
            require_positive(p.height, "height");
            return make_pyramid(p.base_size, p.height);
        case PrimitiveKind::Capsule:
            require_positive(p.radius, "radius");
            require_positive(p.height, "height");
            require_count(p.segments, "segments");
            return make_capsule(p.radius, p.height, p.segments);
        case PrimitiveKind::Prism:
            require_count(p.sides, "sides");
            require_positive(p.radius, "radius");
            require_positive(p.height, "height");
            return ring_prism(p.sides, p.radius, p.height);
    }
    throw GeometryError(GeometryErrc::UnknownPrimitive, "unknown primitive");
}

} // namespace shapecraft::geometry
