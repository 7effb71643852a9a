// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/geometry/mesh.hpp"

#include "shapecraft/geometry/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace shapecraft::geometry
{

namespace
{

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b)
{
    if (a > b)
        std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

struct CellKey
{
    std::int64_t x, y, z;
    friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct CellHash
{
    std::size_t operator()(const CellKey& k) const noexcept
    {
        auto h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
        h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
        h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

} // namespace

Aabb compute_aabb(const Mesh& mesh)
{
    if (mesh.vertices.empty())
        throw GeometryError(GeometryErrc::EmptyMesh, "mesh has no vertices");
    Aabb box{mesh.vertices.front(), mesh.vertices.front()};
    for (const auto& v: mesh.vertices)
    {
        for (int axis = 0; axis < 3; ++axis)
        {
            box.min[axis] = std::min(box.min[axis], v[axis]);
            box.max[axis] = std::max(box.max[axis], v[axis]);
        }
    }
    return box;
}

void validate(const Mesh& mesh)
{
    for (const auto& v: mesh.vertices)
        if (!is_finite(v))
            throw_invalid_param("vertices", "non-finite coordinate");
    const auto count = mesh.vertices.size();
    for (const auto& t: mesh.triangles)
    {
        if (t[0] >= count || t[1] >= count || t[2] >= count)
            throw_invalid_param("triangles", "index out of range");
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw_invalid_param("triangles", "triangle repeats a vertex");
    }
}

double signed_volume(const Mesh& mesh)
{
    double six_volume = 0.0;
    for (const auto& t: mesh.triangles)
    {
        const auto& a = mesh.vertices[t[0]];
        const auto& b = mesh.vertices[t[1]];
        const auto& c = mesh.vertices[t[2]];
        six_volume += dot(a, cross(b, c));
    }
    return six_volume / 6.0;
}

double triangle_area(const Mesh& mesh, std::size_t tri)
{
    const auto& t = mesh.triangles[tri];
    const auto& a = mesh.vertices[t[0]];
    return 0.5 * length(cross(mesh.vertices[t[1]] - a, mesh.vertices[t[2]] - a));
}

double surface_area(const Mesh& mesh)
{
    double area = 0.0;
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i)
        area += triangle_area(mesh, i);
    return area;
}

Vec3 triangle_normal(const Mesh& mesh, std::size_t tri)
{
    const auto& t = mesh.triangles[tri];
    const auto& a = mesh.vertices[t[0]];
    return normalize(cross(mesh.vertices[t[1]] - a, mesh.vertices[t[2]] - a));
}

std::size_t count_boundary_edges(const Mesh& mesh)
{
    std::unordered_map<std::uint64_t, int> uses;
    uses.reserve(mesh.triangles.size() * 2);
    for (const auto& t: mesh.triangles)
        for (int i = 0; i < 3; ++i)
            ++uses[edge_key(t[i], t[(i + 1) % 3])];
    return static_cast<std::size_t>(std::count_if(uses.begin(), uses.end(), [](const auto& e) { return e.second != 2; }));
}

void append(Mesh& dst, const Mesh& src)
{
    const auto offset = static_cast<std::uint32_t>(dst.vertices.size());
    dst.vertices.insert(dst.vertices.end(), src.vertices.begin(), src.vertices.end());
    dst.triangles.reserve(dst.triangles.size() + src.triangles.size());
    for (const auto& t: src.triangles)
        dst.triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
}

Mesh concatenate(std::span<const Mesh> meshes)
{
    Mesh out;
    for (const auto& m: meshes)
        append(out, m);
    return out;
}

void flip_orientation(Mesh& mesh)
{
    for (auto& t: mesh.triangles)
        std::swap(t[1], t[2]);
}

std::vector<Vec3> vertex_normals(const Mesh& mesh)
{
    std::vector<Vec3> normals(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i)
    {
        const auto& t = mesh.triangles[i];
        const Vec3 n = triangle_normal(mesh, i);
        for (int c = 0; c < 3; ++c)
        {
            const auto& p = mesh.vertices[t[c]];
            const Vec3 e1 = normalize(mesh.vertices[t[(c + 1) % 3]] - p);
            const Vec3 e2 = normalize(mesh.vertices[t[(c + 2) % 3]] - p);
            const double angle = std::acos(std::clamp(dot(e1, e2), -1.0, 1.0));
            normals[t[c]] += n * angle;
        }
    }
    for (auto& n: normals)
        n = normalize(n);
    return normals;
}

void weld_vertices(Mesh& mesh, double tolerance)
{
    if (mesh.vertices.empty())
        return;
    const double cell = tolerance > 0.0 ? tolerance * 2.0 : 1e-12;
    std::unordered_map<CellKey, std::vector<std::uint32_t>, CellHash> grid;
    std::vector<std::uint32_t> remap(mesh.vertices.size());
    std::vector<Vec3> kept;
    kept.reserve(mesh.vertices.size());
    const double tol2 = tolerance * tolerance;

    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    {
        const auto& v = mesh.vertices[i];
        const CellKey base{static_cast<std::int64_t>(std::floor(v.x / cell)),
                           static_cast<std::int64_t>(std::floor(v.y / cell)),
                           static_cast<std::int64_t>(std::floor(v.z / cell))};
        std::optional<std::uint32_t> match;
        for (std::int64_t dx = -1; dx <= 1 && !match; ++dx)
            for (std::int64_t dy = -1; dy <= 1 && !match; ++dy)
                for (std::int64_t dz = -1; dz <= 1 && !match; ++dz)
                {
                    auto it = grid.find({base.x + dx, base.y + dy, base.z + dz});
                    if (it == grid.end())
                        continue;
                    for (auto candidate: it->second)
                        if (length_squared(kept[candidate] - v) <= tol2)
                        {
                            match = candidate;
                            break;
                        }
                }
        if (match)
        {
            remap[i] = *match;
            continue;
        }
        const auto index = static_cast<std::uint32_t>(kept.size());
        kept.push_back(v);
        grid[base].push_back(index);
        remap[i] = index;
    }

    mesh.vertices = std::move(kept);
    for (auto& t: mesh.triangles)
        for (auto& idx: t)
            idx = remap[idx];
    remove_degenerate_triangles(mesh);
}

void remove_degenerate_triangles(Mesh& mesh, double min_area)
{
    std::erase_if(mesh.triangles, [&](const Triangle& t) {
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            return true;
        if (min_area <= 0.0)
            return false;
        const auto& a = mesh.vertices[t[0]];
        return 0.5 * length(cross(mesh.vertices[t[1]] - a, mesh.vertices[t[2]] - a)) <= min_area;
    });
}

void compact_vertices(Mesh& mesh)
{
    std::vector<std::int64_t> remap(mesh.vertices.size(), -1);
    std::vector<Vec3> kept;
    kept.reserve(mesh.vertices.size());
    for (auto& t: mesh.triangles)
        for (auto& i: t)
        {
            if (remap[i] < 0)
            {
                remap[i] = static_cast<std::int64_t>(kept.size());
                kept.push_back(mesh.vertices[i]);
            }
            i = static_cast<std::uint32_t>(remap[i]);
        }
    mesh.vertices = std::move(kept);
}

} // namespace shapecraft::geometry
