// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/geometry/modifiers.hpp"

#include "shapecraft/geometry/curves.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <numbers>
#include <unordered_map>

namespace shapecraft::geometry
{

namespace
{

std::uint32_t idx(std::size_t i) { return static_cast<std::uint32_t>(i); }

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b)
{
    if (a > b)
        std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::uint64_t directed_key(std::uint32_t a, std::uint32_t b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

double corner_angle(const Vec3& at, const Vec3& p, const Vec3& q)
{
    const Vec3 u = normalize(p - at);
    const Vec3 v = normalize(q - at);
    return std::acos(std::clamp(dot(u, v), -1.0, 1.0));
}

// Triangle fan around one vertex, in winding order. For a face (v, a, b) the
// edge v->a leads to the next face and b->v comes from the previous one.
struct Ring
{
    std::vector<std::size_t> faces;
    std::vector<std::uint32_t> out;  // a per face
    std::vector<std::uint32_t> in;   // b per face
};

class Adjacency
{
public:
    explicit Adjacency(const Mesh& mesh) : _mesh(mesh), _incident(mesh.vertices.size())
    {
        for (std::size_t f = 0; f < mesh.triangles.size(); ++f)
        {
            const auto& t = mesh.triangles[f];
            for (int k = 0; k < 3; ++k)
            {
                _incident[t[k]].push_back(f);
                _edge_faces[edge_key(t[k], t[(k + 1) % 3])].push_back(f);
            }
            _normals.push_back(triangle_normal(mesh, f));
        }
    }

    const Vec3& normal(std::size_t f) const { return _normals[f]; }

    const std::vector<std::size_t>& edge_faces(std::uint32_t a, std::uint32_t b) const
    {
        static const std::vector<std::size_t> none;
        auto it = _edge_faces.find(edge_key(a, b));
        return it == _edge_faces.end() ? none : it->second;
    }

    bool sharp(std::uint32_t a, std::uint32_t b) const
    {
        const auto& faces = edge_faces(a, b);
        if (faces.size() != 2)
            return false;
        const Vec3 n0 = _normals[faces[0]], n1 = _normals[faces[1]];
        if (n0 == Vec3{} || n1 == Vec3{})
            return false;
        const double limit = std::cos((180.0 - bevel_sharp_angle_deg) * std::numbers::pi / 180.0);
        return dot(n0, n1) < limit;
    }

    // Ordered fan, or nullopt when the vertex is on a boundary or non-manifold.
    std::optional<Ring> ring(std::uint32_t v) const
    {
        const auto& faces = _incident[v];
        if (faces.size() < 3)
            return std::nullopt;
        std::unordered_map<std::uint32_t, std::size_t> by_in;
        Ring all;
        for (std::size_t i = 0; i < faces.size(); ++i)
        {
            const auto& t = _mesh.triangles[faces[i]];
            const int k = t[0] == v ? 0 : (t[1] == v ? 1 : 2);
            all.faces.push_back(faces[i]);
            all.out.push_back(t[(k + 1) % 3]);
            all.in.push_back(t[(k + 2) % 3]);
            if (!by_in.emplace(all.in.back(), i).second)
                return std::nullopt;
        }
        Ring ordered;
        std::size_t cur = 0;
        std::vector<bool> used(faces.size(), false);
        for (std::size_t step = 0; step < faces.size(); ++step)
        {
            if (used[cur])
                return std::nullopt;
            used[cur] = true;
            ordered.faces.push_back(all.faces[cur]);
            ordered.out.push_back(all.out[cur]);
            ordered.in.push_back(all.in[cur]);
            auto it = by_in.find(all.out[cur]);
            if (it == by_in.end())
                return std::nullopt;
            cur = it->second;
        }
        if (cur != 0)
            return std::nullopt;
        return ordered;
    }

private:
    const Mesh& _mesh;
    std::vector<std::vector<std::size_t>> _incident;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> _edge_faces;
    std::vector<Vec3> _normals;
};

Mesh mirror_once(const Mesh& mesh, int axis, bool use_clip)
{
    constexpr double on_plane = 1e-9;
    Mesh base = mesh;
    if (use_clip)
    {
        const double side = compute_aabb(mesh).center()[axis] >= 0.0 ? 1.0 : -1.0;
        for (auto& v: base.vertices)
            if (side * v[axis] < 0.0)
                v[axis] = 0.0;
    }
    const std::size_t n = base.vertices.size();
    Mesh out = base;
    std::vector<std::uint32_t> remap(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (std::abs(base.vertices[i][axis]) <= on_plane)
        {
            out.vertices[i][axis] = 0.0;
            remap[i] = idx(i);
            continue;
        }
        Vec3 r = base.vertices[i];
        r[axis] = -r[axis];
        remap[i] = idx(out.vertices.size());
        out.vertices.push_back(r);
    }
    for (const auto& t: base.triangles)
        out.triangles.push_back({remap[t[0]], remap[t[2]], remap[t[1]]});

    // Faces lying in the mirror plane now appear twice with opposite winding.
    std::map<std::array<std::uint32_t, 3>, std::vector<std::size_t>> by_corners;
    for (std::size_t f = 0; f < out.triangles.size(); ++f)
    {
        auto key = out.triangles[f];
        std::sort(key.begin(), key.end());
        by_corners[key].push_back(f);
    }
    auto same_winding = [](const Triangle& a, const Triangle& b) {
        for (int k = 0; k < 3; ++k)
            if (a[0] == b[k] && a[1] == b[(k + 1) % 3] && a[2] == b[(k + 2) % 3])
                return true;
        return false;
    };
    std::vector<bool> drop(out.triangles.size(), false);
    for (const auto& [key, faces]: by_corners)
        for (std::size_t i = 0; i < faces.size(); ++i)
        {
            if (drop[faces[i]])
                continue;
            for (std::size_t j = i + 1; j < faces.size(); ++j)
                if (!drop[faces[j]] && !same_winding(out.triangles[faces[i]], out.triangles[faces[j]]))
                {
                    drop[faces[i]] = drop[faces[j]] = true;
                    break;
                }
        }
    std::vector<Triangle> kept;
    for (std::size_t f = 0; f < out.triangles.size(); ++f)
        if (!drop[f])
            kept.push_back(out.triangles[f]);
    out.triangles = std::move(kept);
    remove_degenerate_triangles(out);
    compact_vertices(out);
    return out;
}

Mesh subdivide_once(const Mesh& mesh)
{
    const std::size_t nv = mesh.vertices.size();
    struct EdgeInfo
    {
        std::uint32_t a, b;
        std::vector<std::uint32_t> opposite;
        std::uint32_t midpoint = 0;
    };
    std::unordered_map<std::uint64_t, std::size_t> edge_index;
    std::vector<EdgeInfo> edges;
    for (const auto& t: mesh.triangles)
        for (int k = 0; k < 3; ++k)
        {
            const auto a = t[k], b = t[(k + 1) % 3], c = t[(k + 2) % 3];
            auto [it, inserted] = edge_index.emplace(edge_key(a, b), edges.size());
            if (inserted)
                edges.push_back({std::min(a, b), std::max(a, b), {}});
            edges[it->second].opposite.push_back(c);
        }

    std::vector<std::vector<std::uint32_t>> neighbors(nv), boundary_neighbors(nv);
    for (const auto& e: edges)
    {
        neighbors[e.a].push_back(e.b);
        neighbors[e.b].push_back(e.a);
        if (e.opposite.size() != 2)
        {
            boundary_neighbors[e.a].push_back(e.b);
            boundary_neighbors[e.b].push_back(e.a);
        }
    }

    Mesh out;
    out.vertices.resize(nv);
    for (std::size_t i = 0; i < nv; ++i)
    {
        const Vec3& v = mesh.vertices[i];
        if (!boundary_neighbors[i].empty())
        {
            const auto& bn = boundary_neighbors[i];
            out.vertices[i] = bn.size() == 2
                                  ? v * 0.75 + (mesh.vertices[bn[0]] + mesh.vertices[bn[1]]) * 0.125
                                  : v;
            continue;
        }
        const auto& nb = neighbors[i];
        if (nb.empty())
        {
            out.vertices[i] = v;
            continue;
        }
        const double n = static_cast<double>(nb.size());
        const double beta = nb.size() == 3 ? 3.0 / 16.0 : 3.0 / (8.0 * n);
        Vec3 sum{};
        for (auto j: nb)
            sum += mesh.vertices[j];
        out.vertices[i] = v * (1.0 - n * beta) + sum * beta;
    }
    for (auto& e: edges)
    {
        const Vec3& a = mesh.vertices[e.a];
        const Vec3& b = mesh.vertices[e.b];
        Vec3 p = e.opposite.size() == 2
                     ? (a + b) * 0.375 + (mesh.vertices[e.opposite[0]] + mesh.vertices[e.opposite[1]]) * 0.125
                     : (a + b) * 0.5;
        e.midpoint = idx(out.vertices.size());
        out.vertices.push_back(p);
    }
    out.triangles.reserve(mesh.triangles.size() * 4);
    for (const auto& t: mesh.triangles)
    {
        const auto ab = edges[edge_index.at(edge_key(t[0], t[1]))].midpoint;
        const auto bc = edges[edge_index.at(edge_key(t[1], t[2]))].midpoint;
        const auto ca = edges[edge_index.at(edge_key(t[2], t[0]))].midpoint;
        out.triangles.push_back({t[0], ab, ca});
        out.triangles.push_back({t[1], bc, ab});
        out.triangles.push_back({t[2], ca, bc});
        out.triangles.push_back({ab, bc, ca});
    }
    return out;
}

// One smooth region of the fan around a vertex, bounded by sharp edges.
struct Sector
{
    std::vector<std::size_t> faces;
    std::uint32_t first_in = 0;  // sharp edge before the sector
    std::uint32_t last_out = 0;  // sharp edge after it
    std::vector<std::uint32_t> interior;
    double span = 0.0;
    std::uint32_t vertex = 0;  // index of the offset vertex in the output
};

struct VertexSplit
{
    std::vector<Sector> sectors;
    std::unordered_map<std::size_t, std::size_t> sector_of_face;
    Ring ring;
};

Mesh bevel_edges(const Mesh& mesh, const BevelModifier& spec, Warnings* warnings)
{
    const Adjacency adj(mesh);
    const std::size_t nv = mesh.vertices.size();
    std::vector<std::optional<VertexSplit>> splits(nv);
    std::size_t sharp_edges = 0;

    for (std::uint32_t v = 0; v < nv; ++v)
    {
        auto ring = adj.ring(v);
        if (!ring)
            continue;
        const std::size_t n = ring->faces.size();
        // Edge i sits between face i-1 and face i, i.e. (v, in[i]).
        std::vector<bool> sharp(n);
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            sharp[i] = adj.sharp(v, ring->in[i]);
            count += sharp[i] ? 1 : 0;
        }
        if (count < 2)
            continue;
        std::size_t start = 0;
        while (!sharp[start])
            ++start;
        VertexSplit split;
        for (std::size_t step = 0; step < n; ++step)
        {
            const std::size_t i = (start + step) % n;
            if (sharp[i])
            {
                split.sectors.emplace_back();
                split.sectors.back().first_in = ring->in[i];
            }
            auto& s = split.sectors.back();
            if (!s.faces.empty())
                s.interior.push_back(ring->in[i]);
            s.faces.push_back(ring->faces[i]);
            s.last_out = ring->out[i];
            s.span += corner_angle(mesh.vertices[v], mesh.vertices[ring->out[i]], mesh.vertices[ring->in[i]]);
            split.sector_of_face[ring->faces[i]] = split.sectors.size() - 1;
        }
        split.ring = std::move(*ring);
        splits[v] = std::move(split);
    }
    for (const auto& t: mesh.triangles)
        for (int k = 0; k < 3; ++k)
            if (t[k] < t[(k + 1) % 3] && adj.sharp(t[k], t[(k + 1) % 3]))
                ++sharp_edges;
    if (sharp_edges == 0)
    {
        warn(warnings, "bevel found no sharp edges; mesh unchanged");
        return mesh;
    }

    // Largest offset that keeps every moved vertex inside its own sector faces.
    double width = spec.width;
    for (std::uint32_t v = 0; v < nv; ++v)
    {
        if (!splits[v])
            continue;
        for (const auto& s: splits[v]->sectors)
        {
            double reach = std::numeric_limits<double>::infinity();
            for (auto f: s.faces)
            {
                const auto& t = mesh.triangles[f];
                const int k = t[0] == v ? 0 : (t[1] == v ? 1 : 2);
                const Vec3& a = mesh.vertices[t[(k + 1) % 3]];
                const Vec3& b = mesh.vertices[t[(k + 2) % 3]];
                const Vec3 ab = b - a;
                const double height = length(cross(ab, mesh.vertices[v] - a)) / std::max(length(ab), 1e-300);
                reach = std::min(reach, height);
            }
            const double half = std::max(std::sin(s.span * 0.5), 0.2);
            width = std::min(width, 0.45 * reach * half);
        }
    }
    if (width < spec.width)
        warn(warnings, fmt::format("bevel width clamped from {} to {} to keep faces valid", spec.width, width));

    Mesh out;
    out.vertices = mesh.vertices;
    out.component_tag = mesh.component_tag;
    out.centerline = mesh.centerline;
    for (std::uint32_t v = 0; v < nv; ++v)
    {
        if (!splits[v])
            continue;
        const Vec3& p = mesh.vertices[v];
        for (auto& s: splits[v]->sectors)
        {
            Vec3 dir{};
            for (auto w: s.interior)
                dir += normalize(mesh.vertices[w] - p);
            if (s.interior.empty())
                dir = normalize(mesh.vertices[s.first_in] - p) + normalize(mesh.vertices[s.last_out] - p);
            dir = normalize(dir);
            const double half = std::max(std::sin(s.span * 0.5), 0.2);
            s.vertex = idx(out.vertices.size());
            out.vertices.push_back(p + dir * (width / half));
        }
    }

    auto corner = [&](std::uint32_t v, std::size_t face) -> std::uint32_t {
        if (!splits[v])
            return v;
        const auto& split = *splits[v];
        return split.sectors[split.sector_of_face.at(face)].vertex;
    };

    for (std::size_t f = 0; f < mesh.triangles.size(); ++f)
    {
        const auto& t = mesh.triangles[f];
        out.triangles.push_back({corner(t[0], f), corner(t[1], f), corner(t[2], f)});
    }

    // Profile points between two corners of the same vertex, shared by key.
    const int segments = spec.segments;
    std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, std::vector<std::uint32_t>> profiles;
    auto profile = [&](std::uint32_t v, std::uint32_t from, std::uint32_t to) {
        std::vector<std::uint32_t> pts;
        if (from == to)
            return std::vector<std::uint32_t>(static_cast<std::size_t>(segments) + 1, from);
        const auto key = std::make_tuple(v, std::min(from, to), std::max(from, to));
        auto it = profiles.find(key);
        if (it == profiles.end())
        {
            const std::uint32_t lo = std::min(from, to), hi = std::max(from, to);
            std::vector<std::uint32_t> made{lo};
            for (int k = 1; k < segments; ++k)
            {
                const double s = static_cast<double>(k) / segments;
                const Vec3 q = out.vertices[lo] * ((1 - s) * (1 - s)) + mesh.vertices[v] * (2 * s * (1 - s))
                               + out.vertices[hi] * (s * s);
                made.push_back(idx(out.vertices.size()));
                out.vertices.push_back(q);
            }
            made.push_back(hi);
            it = profiles.emplace(key, std::move(made)).first;
        }
        pts = it->second;
        if (pts.front() != from)
            std::reverse(pts.begin(), pts.end());
        return pts;
    };

    for (std::size_t f1 = 0; f1 < mesh.triangles.size(); ++f1)
    {
        const auto& t = mesh.triangles[f1];
        for (int k = 0; k < 3; ++k)
        {
            const auto u = t[k], w = t[(k + 1) % 3];
            if (u > w || !adj.sharp(u, w))
                continue;
            const auto& faces = adj.edge_faces(u, w);
            const std::size_t f2 = faces[0] == f1 ? faces[1] : faces[0];
            const auto P = profile(u, corner(u, f1), corner(u, f2));
            const auto Q = profile(w, corner(w, f1), corner(w, f2));
            for (int s = 0; s < segments; ++s)
            {
                out.triangles.push_back({Q[s], P[s], P[s + 1]});
                out.triangles.push_back({Q[s], P[s + 1], Q[s + 1]});
            }
        }
    }

    // Corner patches where three or more sectors meet.
    for (std::uint32_t v = 0; v < nv; ++v)
    {
        if (!splits[v] || splits[v]->sectors.size() < 3)
            continue;
        const auto& split = *splits[v];
        std::map<std::uint32_t, std::vector<std::uint32_t>> chain;
        const std::size_t n = split.ring.faces.size();
        for (std::size_t i = 0; i < n; ++i)
        {
            const std::uint32_t w = split.ring.out[i];
            if (!adj.sharp(v, w))
                continue;
            const std::size_t f_out = split.ring.faces[i];
            const std::size_t f_in = split.ring.faces[(i + 1) % n];
            auto pts = profile(v, corner(v, f_in), corner(v, f_out));
            chain[pts.front()] = std::move(pts);
        }
        std::vector<std::uint32_t> loop;
        std::uint32_t at = chain.begin()->first;
        bool ok = true;
        for (std::size_t step = 0; step < chain.size(); ++step)
        {
            auto it = chain.find(at);
            if (it == chain.end())
            {
                ok = false;
                break;
            }
            loop.insert(loop.end(), it->second.begin(), it->second.end() - 1);
            at = it->second.back();
        }
        if (!ok || at != chain.begin()->first)
        {
            warn(warnings, fmt::format("bevel could not close the corner at vertex {}", v));
            continue;
        }
        if (loop.size() == 3)
        {
            out.triangles.push_back({loop[0], loop[1], loop[2]});
            continue;
        }
        Vec3 c{};
        for (auto i: loop)
            c += out.vertices[i];
        c = c / static_cast<double>(loop.size());
        // Pull the fan center toward the original corner so rounded profiles stay convex.
        if (segments > 1)
            c = lerp(c, mesh.vertices[v], 0.25);
        const auto center = idx(out.vertices.size());
        out.vertices.push_back(c);
        for (std::size_t i = 0; i < loop.size(); ++i)
            out.triangles.push_back({center, loop[i], loop[(i + 1) % loop.size()]});
    }

    remove_degenerate_triangles(out);
    compact_vertices(out);
    return out;
}

Mesh bevel_vertices(const Mesh& mesh, const BevelModifier& spec, Warnings* warnings)
{
    // Each selected corner is cut by a plane perpendicular to its vertex normal,
    // placed so the cut lands `width` away along the steepest incident edge.
    const Adjacency adj(mesh);
    const auto normals = vertex_normals(mesh);
    const std::size_t nv = mesh.vertices.size();
    std::vector<std::optional<Ring>> rings(nv);
    std::vector<double> min_slope(nv, 1.0);
    double width = spec.width;
    for (std::uint32_t v = 0; v < nv; ++v)
    {
        auto ring = adj.ring(v);
        if (!ring)
            continue;
        bool any_sharp = false;
        double slope = 1.0;
        for (auto w: ring->out)
        {
            any_sharp = any_sharp || adj.sharp(v, w);
            slope = std::min(slope, dot(normals[v], normalize(mesh.vertices[v] - mesh.vertices[w])));
        }
        if (!any_sharp || slope < 0.05)
            continue;
        for (auto w: ring->out)
        {
            const double along = dot(normals[v], normalize(mesh.vertices[v] - mesh.vertices[w]));
            // Cut distance on this edge is width * slope / along; keep it under 45% of the edge.
            width = std::min(width, 0.45 * distance(mesh.vertices[v], mesh.vertices[w]) * along / slope);
        }
        min_slope[v] = slope;
        rings[v] = std::move(ring);
    }
    if (std::none_of(rings.begin(), rings.end(), [](const auto& r) { return r.has_value(); }))
    {
        warn(warnings, "bevel found no sharp corners; mesh unchanged");
        return mesh;
    }
    if (width < spec.width)
        warn(warnings, fmt::format("bevel width clamped from {} to {} to keep faces valid", spec.width, width));

    Mesh out;
    out.vertices = mesh.vertices;
    out.component_tag = mesh.component_tag;
    out.centerline = mesh.centerline;
    std::unordered_map<std::uint64_t, std::uint32_t> cut;
    auto cut_point = [&](std::uint32_t v, std::uint32_t toward) {
        auto [it, inserted] = cut.emplace(directed_key(v, toward), 0);
        if (inserted)
        {
            const Vec3& p = mesh.vertices[v];
            const Vec3 dir = normalize(mesh.vertices[toward] - p);
            const double depth = width * min_slope[v];
            it->second = idx(out.vertices.size());
            out.vertices.push_back(p + dir * (depth / dot(normals[v], -dir)));
        }
        return it->second;
    };

    for (const auto& t: mesh.triangles)
    {
        std::vector<std::uint32_t> poly;
        for (int k = 0; k < 3; ++k)
        {
            const auto c = t[k], next = t[(k + 1) % 3], prev = t[(k + 2) % 3];
            if (rings[c])
            {
                poly.push_back(cut_point(c, prev));
                poly.push_back(cut_point(c, next));
            }
            else
                poly.push_back(c);
        }
        for (std::size_t i = 1; i + 1 < poly.size(); ++i)
            out.triangles.push_back({poly[0], poly[i], poly[i + 1]});
    }
    for (std::uint32_t v = 0; v < nv; ++v)
    {
        if (!rings[v])
            continue;
        std::vector<std::uint32_t> cap;
        for (auto it = rings[v]->in.rbegin(); it != rings[v]->in.rend(); ++it)
            cap.push_back(cut_point(v, *it));
        if (cap.size() == 3)
        {
            out.triangles.push_back({cap[0], cap[1], cap[2]});
            continue;
        }
        Vec3 c{};
        for (auto i: cap)
            c += out.vertices[i];
        const auto center = idx(out.vertices.size());
        out.vertices.push_back(c / static_cast<double>(cap.size()));
        for (std::size_t i = 0; i < cap.size(); ++i)
            out.triangles.push_back({center, cap[i], cap[(i + 1) % cap.size()]});
    }
    remove_degenerate_triangles(out);
    compact_vertices(out);
    return out;
}

} // namespace

BevelAffect parse_bevel_affect(std::string_view name)
{
    if (name == "EDGES")
        return BevelAffect::Edges;
    if (name == "VERTICES")
        return BevelAffect::Vertices;
    throw_invalid_param("affect", "must be EDGES or VERTICES");
}

DeformAxis parse_deform_axis(std::string_view name)
{
    static const std::pair<std::string_view, DeformAxis> table[] = {
        {"POS_X", DeformAxis::PosX}, {"POS_Y", DeformAxis::PosY}, {"POS_Z", DeformAxis::PosZ},
        {"NEG_X", DeformAxis::NegX}, {"NEG_Y", DeformAxis::NegY}, {"NEG_Z", DeformAxis::NegZ},
    };
    for (const auto& [text, axis]: table)
        if (name == text)
            return axis;
    throw_invalid_param("deform_axis", "must be one of POS_X, POS_Y, POS_Z, NEG_X, NEG_Y, NEG_Z");
}

Mesh array_copies(const Mesh& mesh, const ArrayModifier& spec)
{
    if (spec.count < 1)
        throw_invalid_param("count", "must be >= 1");
    const Vec3 step = hadamard(spec.relative_offset, compute_aabb(mesh).size());
    Mesh out;
    out.component_tag = mesh.component_tag;
    out.vertices.reserve(mesh.vertices.size() * static_cast<std::size_t>(spec.count));
    out.triangles.reserve(mesh.triangles.size() * static_cast<std::size_t>(spec.count));
    for (int i = 0; i < spec.count; ++i)
    {
        const auto base = idx(out.vertices.size());
        const Vec3 shift = step * static_cast<double>(i);
        for (const auto& v: mesh.vertices)
            out.vertices.push_back(v + shift);
        for (const auto& t: mesh.triangles)
            out.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
    }
    return out;
}

Mesh mirror(const Mesh& mesh, const MirrorModifier& spec)
{
    Mesh out = mesh;
    for (int axis = 0; axis < 3; ++axis)
        if (spec.axis[static_cast<std::size_t>(axis)])
            out = mirror_once(out, axis, spec.use_clip);
    out.component_tag = mesh.component_tag;
    return out;
}

Mesh solidify(const Mesh& mesh, const SolidifyModifier& spec)
{
    if (!std::isfinite(spec.thickness) || spec.thickness == 0.0)
        throw_invalid_param("thickness", "must be finite and non-zero");
    const auto normals = vertex_normals(mesh);
    const auto n = idx(mesh.vertices.size());
    Mesh out;
    out.component_tag = mesh.component_tag;
    out.vertices = mesh.vertices;
    for (std::size_t i = 0; i < n; ++i)
        out.vertices.push_back(mesh.vertices[i] - normals[i] * spec.thickness);
    out.triangles = mesh.triangles;
    for (const auto& t: mesh.triangles)
        out.triangles.push_back({t[0] + n, t[2] + n, t[1] + n});

    std::unordered_map<std::uint64_t, int> directed;
    for (const auto& t: mesh.triangles)
        for (int k = 0; k < 3; ++k)
            ++directed[directed_key(t[k], t[(k + 1) % 3])];
    for (const auto& t: mesh.triangles)
        for (int k = 0; k < 3; ++k)
        {
            const auto a = t[k], b = t[(k + 1) % 3];
            if (directed.count(directed_key(b, a)))
                continue;
            out.triangles.push_back({b, a, a + n});
            out.triangles.push_back({b, a + n, b + n});
        }
    return out;
}

Mesh loop_subdivide(const Mesh& mesh, int levels)
{
    if (levels < 0)
        throw_invalid_param("levels", "must be >= 0");
    Mesh out = mesh;
    for (int i = 0; i < levels; ++i)
        out = subdivide_once(out);
    out.component_tag = mesh.component_tag;
    out.centerline = mesh.centerline;
    return out;
}

Mesh bevel(const Mesh& mesh, const BevelModifier& spec, Warnings* warnings)
{
    if (!(spec.width > 0.0) || !std::isfinite(spec.width))
        throw_invalid_param("width", "must be > 0");
    if (spec.segments < 1)
        throw_invalid_param("segments", "must be >= 1");
    return spec.affect == BevelAffect::Edges ? bevel_edges(mesh, spec, warnings)
                                             : bevel_vertices(mesh, spec, warnings);
}

Mesh curve_deform(const Mesh& mesh, const CurvePath& path, DeformAxis axis)
{
    if (path.points.size() < 2)
        throw GeometryError(GeometryErrc::DegenerateCurve, "deform curve needs at least 2 points");
    auto frames = rotation_minimizing_frames(path);
    if (path.closed)
        frames.push_back(frames.front());
    std::vector<double> arc(frames.size(), 0.0);
    for (std::size_t i = 1; i < frames.size(); ++i)
        arc[i] = arc[i - 1] + distance(frames[i - 1].origin, frames[i].origin);
    const double total = arc.back();
    if (!(total > 0.0))
        throw GeometryError(GeometryErrc::DegenerateCurve, "deform curve has zero length");

    int along = 0;
    bool negative = false;
    switch (axis)
    {
        case DeformAxis::PosX: along = 0; break;
        case DeformAxis::PosY: along = 1; break;
        case DeformAxis::PosZ: along = 2; break;
        case DeformAxis::NegX: along = 0; negative = true; break;
        case DeformAxis::NegY: along = 1; negative = true; break;
        case DeformAxis::NegZ: along = 2; negative = true; break;
    }
    const int first = (along + 1) % 3;
    const int second = (along + 2) % 3;
    const Aabb box = compute_aabb(mesh);
    const Vec3 center = box.center();
    const double extent = box.size()[along];

    Mesh out = mesh;
    for (auto& v: out.vertices)
    {
        double u = extent > 0.0 ? (v[along] - box.min[along]) / extent : 0.5;
        double a = v[first] - center[first];
        const double b = v[second] - center[second];
        if (negative)
        {
            u = 1.0 - u;
            a = -a;
        }
        const double s = std::clamp(u, 0.0, 1.0) * total;
        std::size_t j = static_cast<std::size_t>(std::upper_bound(arc.begin(), arc.end(), s) - arc.begin());
        j = std::clamp<std::size_t>(j, 1, arc.size() - 1);
        const double seg = arc[j] - arc[j - 1];
        const double alpha = seg > 0.0 ? (s - arc[j - 1]) / seg : 0.0;
        const Frame& f0 = frames[j - 1];
        const Frame& f1 = frames[j];
        const Vec3 origin = lerp(f0.origin, f1.origin, alpha);
        const Vec3 tangent = normalize(lerp(f0.tangent, f1.tangent, alpha));
        Vec3 normal = lerp(f0.normal, f1.normal, alpha);
        normal = normalize(normal - tangent * dot(normal, tangent));
        const Vec3 binormal = cross(tangent, normal);
        v = origin + normal * a + binormal * b;
    }
    out.centerline.reset();
    return out;
}

Mesh apply_modifier(const Mesh& target, const ModifierSpec& spec, const Mesh* aux, Warnings* warnings)
{
    if (target.empty())
        throw GeometryError(GeometryErrc::EmptyMesh, "modifier target has no geometry");
    return std::visit(
        [&](const auto& m) -> Mesh {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BooleanModifier>)
            {
                if (!aux)
                    throw GeometryError(GeometryErrc::MissingAuxMesh, "boolean needs a second object");
                return boolean_op(target, *aux, m.operation, warnings);
            }
            else if constexpr (std::is_same_v<T, SubdivisionModifier>)
                return loop_subdivide(target, m.levels);
            else if constexpr (std::is_same_v<T, BevelModifier>)
                return bevel(target, m, warnings);
            else if constexpr (std::is_same_v<T, ArrayModifier>)
                return array_copies(target, m);
            else if constexpr (std::is_same_v<T, MirrorModifier>)
                return mirror(target, m);
            else if constexpr (std::is_same_v<T, CurveModifier>)
            {
                if (!aux)
                    throw GeometryError(GeometryErrc::MissingAuxMesh, "curve deform needs a curve object");
                if (!aux->centerline)
                    throw GeometryError(GeometryErrc::MissingAuxMesh, "curve deform target is not a curve object");
                return curve_deform(target, *aux->centerline, m.deform_axis);
            }
            else
                return solidify(target, m);
        },
        spec);
}

} // namespace shapecraft::geometry
