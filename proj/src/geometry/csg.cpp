// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/geometry/csg.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace shapecraft::geometry
{

namespace
{

struct Plane
{
    Vec3 normal;
    double w = 0.0;

    void flip()
    {
        normal = -normal;
        w = -w;
    }
};

struct Polygon
{
    std::vector<Vec3> vertices;
    Plane plane;

    void flip()
    {
        std::reverse(vertices.begin(), vertices.end());
        plane.flip();
    }
};

enum : int
{
    Coplanar = 0,
    Front = 1,
    Back = 2,
    Spanning = 3,
};

void split_polygon(const Plane& plane, const Polygon& poly, std::vector<Polygon>& coplanar_front,
                   std::vector<Polygon>& coplanar_back, std::vector<Polygon>& front, std::vector<Polygon>& back)
{
    int polygon_type = 0;
    std::vector<int> types(poly.vertices.size());
    for (std::size_t i = 0; i < poly.vertices.size(); ++i)
    {
        const double t = dot(plane.normal, poly.vertices[i]) - plane.w;
        const int type = t < -csg_plane_epsilon ? Back : (t > csg_plane_epsilon ? Front : Coplanar);
        polygon_type |= type;
        types[i] = type;
    }
    switch (polygon_type)
    {
        case Coplanar:
            (dot(plane.normal, poly.plane.normal) > 0.0 ? coplanar_front : coplanar_back).push_back(poly);
            break;
        case Front: front.push_back(poly); break;
        case Back: back.push_back(poly); break;
        default:
        {
            std::vector<Vec3> f, b;
            const std::size_t n = poly.vertices.size();
            for (std::size_t i = 0; i < n; ++i)
            {
                const std::size_t j = (i + 1) % n;
                const int ti = types[i], tj = types[j];
                const Vec3& vi = poly.vertices[i];
                const Vec3& vj = poly.vertices[j];
                if (ti != Back)
                    f.push_back(vi);
                if (ti != Front)
                    b.push_back(vi);
                if ((ti | tj) == Spanning)
                {
                    const double t = (plane.w - dot(plane.normal, vi)) / dot(plane.normal, vj - vi);
                    const Vec3 v = lerp(vi, vj, t);
                    f.push_back(v);
                    b.push_back(v);
                }
            }
            if (f.size() >= 3)
                front.push_back({std::move(f), poly.plane});
            if (b.size() >= 3)
                back.push_back({std::move(b), poly.plane});
            break;
        }
    }
}

// BSP tree stored in a node pool so deep (convex) trees never recurse.
class BspTree
{
public:
    explicit BspTree(std::vector<Polygon> polygons) { build(std::move(polygons)); }

    void invert()
    {
        for (auto& node: _nodes)
        {
            for (auto& p: node.polygons)
                p.flip();
            if (node.plane)
                node.plane->flip();
            std::swap(node.front, node.back);
        }
    }

    std::vector<Polygon> clip_polygons(std::vector<Polygon> polygons) const
    {
        std::vector<Polygon> result;
        if (_nodes.empty())
            return polygons;
        std::vector<std::pair<int, std::vector<Polygon>>> work;
        work.emplace_back(0, std::move(polygons));
        while (!work.empty())
        {
            auto [index, polys] = std::move(work.back());
            work.pop_back();
            const Node& node = _nodes[static_cast<std::size_t>(index)];
            if (!node.plane)
            {
                std::move(polys.begin(), polys.end(), std::back_inserter(result));
                continue;
            }
            std::vector<Polygon> front, back;
            for (const auto& p: polys)
                split_polygon(*node.plane, p, front, back, front, back);
            if (node.front >= 0)
                work.emplace_back(node.front, std::move(front));
            else
                std::move(front.begin(), front.end(), std::back_inserter(result));
            if (node.back >= 0)
                work.emplace_back(node.back, std::move(back));
        }
        return result;
    }

    void clip_to(const BspTree& other)
    {
        for (auto& node: _nodes)
            node.polygons = other.clip_polygons(std::move(node.polygons));
    }

    std::vector<Polygon> all_polygons() const
    {
        std::vector<Polygon> out;
        for (const auto& node: _nodes)
            out.insert(out.end(), node.polygons.begin(), node.polygons.end());
        return out;
    }

    void build(std::vector<Polygon> polygons)
    {
        if (polygons.empty())
            return;
        if (_nodes.empty())
            _nodes.emplace_back();
        std::vector<std::pair<int, std::vector<Polygon>>> work;
        work.emplace_back(0, std::move(polygons));
        while (!work.empty())
        {
            auto [index, polys] = std::move(work.back());
            work.pop_back();
            if (polys.empty())
                continue;
            auto node_at = [&](int i) -> Node& { return _nodes[static_cast<std::size_t>(i)]; };
            if (!node_at(index).plane)
                node_at(index).plane = polys.front().plane;
            std::vector<Polygon> front, back, coplanar;
            const Plane plane = *node_at(index).plane;
            for (const auto& p: polys)
                split_polygon(plane, p, coplanar, coplanar, front, back);
            auto& own = node_at(index).polygons;
            own.insert(own.end(), std::make_move_iterator(coplanar.begin()), std::make_move_iterator(coplanar.end()));
            if (!front.empty())
            {
                if (node_at(index).front < 0)
                {
                    _nodes.emplace_back();
                    node_at(index).front = static_cast<int>(_nodes.size() - 1);
                }
                work.emplace_back(node_at(index).front, std::move(front));
            }
            if (!back.empty())
            {
                if (node_at(index).back < 0)
                {
                    _nodes.emplace_back();
                    node_at(index).back = static_cast<int>(_nodes.size() - 1);
                }
                work.emplace_back(node_at(index).back, std::move(back));
            }
        }
    }

private:
    struct Node
    {
        std::optional<Plane> plane;
        int front = -1;
        int back = -1;
        std::vector<Polygon> polygons;
    };
    std::vector<Node> _nodes;
};

std::vector<Polygon> to_polygons(const Mesh& mesh)
{
    std::vector<Polygon> out;
    out.reserve(mesh.triangles.size());
    for (const auto& t: mesh.triangles)
    {
        const Vec3& a = mesh.vertices[t[0]];
        const Vec3& b = mesh.vertices[t[1]];
        const Vec3& c = mesh.vertices[t[2]];
        const Vec3 n = normalize(cross(b - a, c - a));
        if (n == Vec3{})
            continue;
        out.push_back({{a, b, c}, {n, dot(n, a)}});
    }
    return out;
}

double mesh_scale(const Mesh& a, const Mesh& b)
{
    double extent = 1.0;
    for (const Mesh* m: {&a, &b})
        if (!m->vertices.empty())
            extent = std::max(extent, length(compute_aabb(*m).size()));
    return extent;
}

// Drops triangles whose corners are collinear within tolerance.
void remove_slivers(Mesh& mesh, double tolerance)
{
    std::erase_if(mesh.triangles, [&](const Triangle& t) {
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            return true;
        for (int i = 0; i < 3; ++i)
        {
            const Vec3& a = mesh.vertices[t[i]];
            const Vec3& b = mesh.vertices[t[(i + 1) % 3]];
            const Vec3& c = mesh.vertices[t[(i + 2) % 3]];
            const double base = length(b - a);
            if (base <= 0.0)
                return true;
            if (length(cross(b - a, c - a)) / base <= tolerance)
            {
                const double s = dot(c - a, b - a) / (base * base);
                if (s > 0.0 && s < 1.0)
                    return true;
            }
        }
        return false;
    });
}

Mesh from_polygons(const std::vector<Polygon>& polygons, double scale)
{
    Mesh out;
    for (const auto& p: polygons)
    {
        const auto base = static_cast<std::uint32_t>(out.vertices.size());
        out.vertices.insert(out.vertices.end(), p.vertices.begin(), p.vertices.end());
        for (std::size_t i = 1; i + 1 < p.vertices.size(); ++i)
            out.triangles.push_back(
                {base, base + static_cast<std::uint32_t>(i), base + static_cast<std::uint32_t>(i + 1)});
    }
    const double tolerance = 1e-8 * scale;
    weld_vertices(out, tolerance);
    remove_slivers(out, tolerance);
    repair_t_junctions(out, tolerance);
    compact_vertices(out);
    return out;
}

Mesh inflate(const Mesh& mesh, double offset)
{
    Mesh out = mesh;
    const auto normals = vertex_normals(mesh);
    for (std::size_t i = 0; i < out.vertices.size(); ++i)
        out.vertices[i] += normals[i] * offset;
    return out;
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

BooleanOp parse_boolean_op(std::string_view name)
{
    if (name == "INTERSECT")
        return BooleanOp::Intersect;
    if (name == "UNION")
        return BooleanOp::Union;
    if (name == "DIFFERENCE")
        return BooleanOp::Difference;
    throw_invalid_param("operation", "must be one of INTERSECT, UNION, DIFFERENCE");
}

bool has_coplanar_overlap(const Mesh& a, const Mesh& b)
{
    struct TriBox
    {
        Aabb box;
        std::size_t index;
    };
    auto boxes = [](const Mesh& m) {
        std::vector<TriBox> out;
        for (std::size_t i = 0; i < m.triangles.size(); ++i)
        {
            const auto& t = m.triangles[i];
            Aabb box{m.vertices[t[0]], m.vertices[t[0]]};
            for (auto v: t)
                for (int axis = 0; axis < 3; ++axis)
                {
                    box.min[axis] = std::min(box.min[axis], m.vertices[v][axis]);
                    box.max[axis] = std::max(box.max[axis], m.vertices[v][axis]);
                }
            out.push_back({box, i});
        }
        return out;
    };
    auto a_boxes = boxes(a);
    auto b_boxes = boxes(b);
    std::sort(b_boxes.begin(), b_boxes.end(), [](const TriBox& l, const TriBox& r) { return l.box.min.x < r.box.min.x; });
    const double eps = csg_plane_epsilon;

    for (const auto& ta: a_boxes)
    {
        const Vec3 na = triangle_normal(a, ta.index);
        if (na == Vec3{})
            continue;
        const Vec3& pa = a.vertices[a.triangles[ta.index][0]];
        for (const auto& tb: b_boxes)
        {
            if (tb.box.min.x > ta.box.max.x + eps)
                break;
            bool overlap = true;
            for (int axis = 0; axis < 3; ++axis)
                overlap = overlap && tb.box.min[axis] <= ta.box.max[axis] + eps
                          && ta.box.min[axis] <= tb.box.max[axis] + eps;
            if (!overlap)
                continue;
            const Vec3 nb = triangle_normal(b, tb.index);
            if (std::abs(dot(na, nb)) < 1.0 - 1e-9)
                continue;
            bool in_plane = true;
            for (auto v: b.triangles[tb.index])
                in_plane = in_plane && std::abs(dot(na, b.vertices[v] - pa)) <= eps;
            if (in_plane)
                return true;
        }
    }
    return false;
}

void repair_t_junctions(Mesh& mesh, double tolerance)
{
    if (mesh.triangles.empty())
        return;
    const Aabb box = compute_aabb(mesh);
    const double cell = std::max(length(box.size()) / 64.0, tolerance * 4.0);
    std::unordered_map<CellKey, std::vector<std::uint32_t>, CellHash> grid;
    auto key_of = [&](const Vec3& p) {
        return CellKey{static_cast<std::int64_t>(std::floor(p.x / cell)), static_cast<std::int64_t>(std::floor(p.y / cell)),
                       static_cast<std::int64_t>(std::floor(p.z / cell))};
    };
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
        grid[key_of(mesh.vertices[i])].push_back(static_cast<std::uint32_t>(i));

    // Closest interior vertex to a along edge (a, b), if any lies on it.
    auto find_on_edge = [&](std::uint32_t ia, std::uint32_t ib) -> std::optional<std::uint32_t> {
        const Vec3& a = mesh.vertices[ia];
        const Vec3& b = mesh.vertices[ib];
        const Vec3 d = b - a;
        const double len = length(d);
        if (len <= tolerance)
            return std::nullopt;
        std::unordered_set<std::uint32_t> seen;
        std::optional<std::uint32_t> best;
        double best_s = 2.0;
        const int steps = static_cast<int>(std::ceil(len / (cell * 0.5))) + 1;
        std::unordered_set<std::uint64_t> visited_cells;
        for (int k = 0; k <= steps; ++k)
        {
            const CellKey base = key_of(lerp(a, b, static_cast<double>(k) / steps));
            for (std::int64_t dx = -1; dx <= 1; ++dx)
                for (std::int64_t dy = -1; dy <= 1; ++dy)
                    for (std::int64_t dz = -1; dz <= 1; ++dz)
                    {
                        const CellKey key{base.x + dx, base.y + dy, base.z + dz};
                        if (!visited_cells.insert(CellHash{}(key)).second)
                            continue;
                        auto it = grid.find(key);
                        if (it == grid.end())
                            continue;
                        for (auto v: it->second)
                        {
                            if (v == ia || v == ib || !seen.insert(v).second)
                                continue;
                            const Vec3 p = mesh.vertices[v] - a;
                            const double s = dot(p, d) / (len * len);
                            if (s * len <= tolerance || (1.0 - s) * len <= tolerance)
                                continue;
                            if (length(p - d * s) > tolerance)
                                continue;
                            if (s < best_s)
                            {
                                best_s = s;
                                best = v;
                            }
                        }
                    }
        }
        return best;
    };

    std::vector<Triangle> queue = std::move(mesh.triangles);
    std::vector<Triangle> done;
    std::size_t guard = 0;
    const std::size_t guard_limit = queue.size() * 64 + 1024;
    while (!queue.empty())
    {
        const Triangle t = queue.back();
        queue.pop_back();
        bool split = false;
        if (++guard < guard_limit)
        {
            for (int e = 0; e < 3 && !split; ++e)
            {
                const auto a = t[e], b = t[(e + 1) % 3], c = t[(e + 2) % 3];
                if (auto v = find_on_edge(a, b); v && *v != c)
                {
                    queue.push_back({a, *v, c});
                    queue.push_back({*v, b, c});
                    split = true;
                }
            }
        }
        if (!split)
            done.push_back(t);
    }
    std::reverse(done.begin(), done.end());
    mesh.triangles = std::move(done);
}

Mesh boolean_op(const Mesh& a, const Mesh& b, BooleanOp op, Warnings* warnings)
{
    if (a.empty() || b.empty())
        throw GeometryError(GeometryErrc::EmptyMesh, "boolean operand has no geometry");
    if (auto open = count_boundary_edges(a); open > 0)
        throw GeometryError(GeometryErrc::NonManifoldOperand,
                            fmt::format("first boolean operand is not closed ({} open edges)", open));
    if (auto open = count_boundary_edges(b); open > 0)
        throw GeometryError(GeometryErrc::NonManifoldOperand,
                            fmt::format("second boolean operand is not closed ({} open edges)", open));

    const Mesh* cutter = &b;
    Mesh perturbed;
    if (has_coplanar_overlap(a, b))
    {
        perturbed = inflate(b, csg_coplanar_perturbation);
        cutter = &perturbed;
        warn(warnings, fmt::format("coplanar faces between boolean operands; second operand offset outward by {}",
                                   csg_coplanar_perturbation));
    }

    BspTree ta(to_polygons(a));
    BspTree tb(to_polygons(*cutter));
    switch (op)
    {
        case BooleanOp::Union:
            ta.clip_to(tb);
            tb.clip_to(ta);
            tb.invert();
            tb.clip_to(ta);
            tb.invert();
            ta.build(tb.all_polygons());
            break;
        case BooleanOp::Difference:
            ta.invert();
            ta.clip_to(tb);
            tb.clip_to(ta);
            tb.invert();
            tb.clip_to(ta);
            tb.invert();
            ta.build(tb.all_polygons());
            ta.invert();
            break;
        case BooleanOp::Intersect:
            ta.invert();
            tb.clip_to(ta);
            tb.invert();
            ta.clip_to(tb);
            tb.clip_to(ta);
            ta.build(tb.all_polygons());
            ta.invert();
            break;
    }
    Mesh out = from_polygons(ta.all_polygons(), mesh_scale(a, b));
    out.component_tag = a.component_tag;
    return out;
}

} // namespace shapecraft::geometry
