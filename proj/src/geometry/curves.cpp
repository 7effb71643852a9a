// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/geometry/curves.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace shapecraft::geometry
{

namespace
{

using std::numbers::pi;

struct Point2
{
    double u, v;
};

std::uint32_t idx(std::size_t i) { return static_cast<std::uint32_t>(i); }

void check_no_coincident(const std::vector<Vec3>& points, bool closed)
{
    const std::size_t n = points.size();
    const std::size_t limit = closed ? n : n - 1;
    for (std::size_t i = 0; i < limit; ++i)
        if (length_squared(points[(i + 1) % n] - points[i]) <= 1e-24)
            throw GeometryError(GeometryErrc::DegenerateCurve,
                                "curve points " + std::to_string(i) + " and " + std::to_string((i + 1) % n)
                                    + " coincide");
}

std::vector<Vec3> sample_bezier(const std::vector<Vec3>& anchors)
{
    const std::size_t n = anchors.size();
    std::vector<Vec3> out;
    out.reserve((n - 1) * bezier_resolution + 1);
    auto at = [&](std::ptrdiff_t i) {
        return anchors[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1))];
    };
    for (std::size_t i = 0; i + 1 < n; ++i)
    {
        const auto si = static_cast<std::ptrdiff_t>(i);
        const Vec3 p0 = anchors[i];
        const Vec3 p3 = anchors[i + 1];
        const Vec3 p1 = p0 + (p3 - at(si - 1)) / 6.0;
        const Vec3 p2 = p3 - (at(si + 2) - p0) / 6.0;
        for (int k = 0; k < bezier_resolution; ++k)
        {
            const double t = static_cast<double>(k) / bezier_resolution;
            const double s = 1.0 - t;
            out.push_back(p0 * (s * s * s) + p1 * (3 * s * s * t) + p2 * (3 * s * t * t) + p3 * (t * t * t));
        }
    }
    out.push_back(anchors.back());
    return out;
}

std::vector<Vec3> path_tangents(const CurvePath& path)
{
    const auto& p = path.points;
    const std::size_t n = p.size();
    std::vector<Vec3> t(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        Vec3 prev = p[i], next = p[i];
        if (path.closed)
        {
            prev = p[(i + n - 1) % n];
            next = p[(i + 1) % n];
        }
        else
        {
            if (i > 0)
                prev = p[i - 1];
            if (i + 1 < n)
                next = p[i + 1];
        }
        t[i] = normalize(next - prev);
    }
    return t;
}

Vec3 rotate_about(const Vec3& v, const Vec3& axis, double angle)
{
    return v * std::cos(angle) + cross(axis, v) * std::sin(angle) + axis * (dot(axis, v) * (1.0 - std::cos(angle)));
}

// Transports normal r along segment x0->x1 with tangents t0->t1.
Vec3 reflect_transport(const Vec3& x0, const Vec3& x1, const Vec3& r, const Vec3& t0, const Vec3& t1)
{
    const Vec3 v1 = x1 - x0;
    const double c1 = dot(v1, v1);
    if (c1 <= 0.0)
        return r;
    const Vec3 rl = r - v1 * (2.0 / c1 * dot(v1, r));
    const Vec3 tl = t0 - v1 * (2.0 / c1 * dot(v1, t0));
    const Vec3 v2 = t1 - tl;
    const double c2 = dot(v2, v2);
    const Vec3 out = c2 <= 1e-30 ? rl : rl - v2 * (2.0 / c2 * dot(v2, rl));
    return normalize(out - t1 * dot(out, t1));
}

std::vector<Point2> circle_profile(double radius)
{
    std::vector<Point2> out;
    for (int k = 0; k < bevel_profile_segments; ++k)
    {
        const double a = 2.0 * pi * k / bevel_profile_segments;
        out.push_back({radius * std::cos(a), radius * std::sin(a)});
    }
    return out;
}

std::vector<Point2> stadium_profile(double radius, double half_height)
{
    std::vector<Point2> out;
    const int half = bevel_profile_segments / 2;
    for (int k = 0; k <= half; ++k)
    {
        const double a = pi * k / half;
        out.push_back({radius * std::cos(a), half_height + radius * std::sin(a)});
    }
    for (int k = 0; k <= half; ++k)
    {
        const double a = pi + pi * k / half;
        out.push_back({radius * std::cos(a), -half_height + radius * std::sin(a)});
    }
    return out;
}

Mesh sweep_profile(const CurvePath& path, const std::vector<Point2>& profile, bool caps)
{
    const auto frames = rotation_minimizing_frames(path);
    const std::size_t n = frames.size();
    const std::size_t s = profile.size();
    Mesh m;
    m.vertices.reserve(n * s + 2);
    for (const auto& f: frames)
        for (const auto& q: profile)
            m.vertices.push_back(f.origin + f.normal * q.u + f.binormal * q.v);

    auto ring = [&](std::size_t i, std::size_t k) { return idx((i % n) * s + (k % s)); };
    const std::size_t spans = path.closed ? n : n - 1;
    for (std::size_t i = 0; i < spans; ++i)
        for (std::size_t k = 0; k < s; ++k)
        {
            m.triangles.push_back({ring(i, k), ring(i + 1, k + 1), ring(i + 1, k)});
            m.triangles.push_back({ring(i, k), ring(i, k + 1), ring(i + 1, k + 1)});
        }
    if (caps && !path.closed)
    {
        const auto start = idx(m.vertices.size());
        m.vertices.push_back(frames.front().origin);
        const auto end = idx(m.vertices.size());
        m.vertices.push_back(frames.back().origin);
        for (std::size_t k = 0; k < s; ++k)
        {
            m.triangles.push_back({start, ring(0, k + 1), ring(0, k)});
            m.triangles.push_back({end, ring(n - 1, k), ring(n - 1, k + 1)});
        }
    }
    return m;
}

double signed_area_xy(const std::vector<Vec3>& poly)
{
    double area = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
    {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        area += a.x * b.y - b.x * a.y;
    }
    return area * 0.5;
}

// Ear clipping of a counter-clockwise polygon projected on xy.
std::vector<Triangle> triangulate_xy(const std::vector<Vec3>& poly)
{
    std::vector<std::uint32_t> remaining(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i)
        remaining[i] = idx(i);
    auto cross2 = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        const auto& pa = poly[a];
        const auto& pb = poly[b];
        const auto& pc = poly[c];
        return (pb.x - pa.x) * (pc.y - pa.y) - (pb.y - pa.y) * (pc.x - pa.x);
    };
    std::vector<Triangle> out;
    while (remaining.size() > 3)
    {
        bool clipped = false;
        const std::size_t n = remaining.size();
        for (std::size_t i = 0; i < n && !clipped; ++i)
        {
            const auto a = remaining[(i + n - 1) % n];
            const auto b = remaining[i];
            const auto c = remaining[(i + 1) % n];
            if (cross2(a, b, c) <= 0.0)
                continue;
            bool contains = false;
            for (auto other: remaining)
            {
                if (other == a || other == b || other == c)
                    continue;
                if (cross2(a, b, other) >= 0.0 && cross2(b, c, other) >= 0.0 && cross2(c, a, other) >= 0.0)
                {
                    contains = true;
                    break;
                }
            }
            if (contains)
                continue;
            out.push_back({a, b, c});
            remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
        }
        if (!clipped)
            return {};
    }
    out.push_back({remaining[0], remaining[1], remaining[2]});
    return out;
}

Mesh extrude_ribbon(const CurvePath& path, double extrude, bool fill_caps, Warnings* warnings)
{
    const auto& pts = path.points;
    const std::size_t n = pts.size();
    const Vec3 up{0.0, 0.0, extrude};
    Mesh m;
    for (const auto& p: pts)
        m.vertices.push_back(p - up);
    for (const auto& p: pts)
        m.vertices.push_back(p + up);
    auto bot = [&](std::size_t i) { return idx(i % n); };
    auto top = [&](std::size_t i) { return idx(n + i % n); };
    const std::size_t spans = path.closed ? n : n - 1;
    for (std::size_t i = 0; i < spans; ++i)
    {
        m.triangles.push_back({bot(i), bot(i + 1), top(i + 1)});
        m.triangles.push_back({bot(i), top(i + 1), top(i)});
    }
    if (!path.closed)
        return m;

    const bool clockwise = signed_area_xy(pts) < 0.0;
    if (clockwise)
        flip_orientation(m);
    if (!fill_caps)
        return m;

    std::vector<Vec3> ccw = pts;
    if (clockwise)
        std::reverse(ccw.begin(), ccw.end());
    const auto tris = triangulate_xy(ccw);
    if (tris.empty())
    {
        warn(warnings, "closed curve outline could not be triangulated; caps skipped");
        return m;
    }
    auto original = [&](std::uint32_t i) { return clockwise ? idx(n - 1 - i) : i; };
    for (const auto& t: tris)
    {
        m.triangles.push_back({top(original(t[0])), top(original(t[1])), top(original(t[2]))});
        m.triangles.push_back({bot(original(t[0])), bot(original(t[2])), bot(original(t[1]))});
    }
    return m;
}

} // namespace

CurveKind parse_curve_kind(std::string_view name)
{
    if (name == "bezier_curve")
        return CurveKind::Bezier;
    if (name == "circle")
        return CurveKind::Circle;
    if (name == "polyline")
        return CurveKind::Polyline;
    throw GeometryError(GeometryErrc::UnknownPrimitive, "unknown curve kind '" + std::string(name) + "'");
}

CurvePath curve_path(CurveKind kind, const CurveParams& params)
{
    switch (kind)
    {
        case CurveKind::Circle:
        {
            if (params.segments < 3)
                throw_invalid_param("segments", "must be an integer >= 3");
            if (!(params.radius > 0.0) || !std::isfinite(params.radius))
                throw_invalid_param("radius", "must be a positive number");
            CurvePath path;
            path.closed = true;
            for (int k = 0; k < params.segments; ++k)
            {
                const double a = 2.0 * pi * k / params.segments;
                path.points.push_back(params.location
                                      + Vec3{params.radius * std::cos(a), params.radius * std::sin(a), 0.0});
            }
            return path;
        }
        case CurveKind::Polyline:
        {
            const std::size_t minimum = params.closed ? 3 : 2;
            if (params.points.size() < minimum)
                throw_invalid_param("points", "needs at least " + std::to_string(minimum) + " points");
            for (const auto& p: params.points)
                if (!is_finite(p))
                    throw_invalid_param("points", "non-finite coordinate");
            check_no_coincident(params.points, params.closed);
            return CurvePath{params.points, params.closed};
        }
        case CurveKind::Bezier:
        {
            if (params.points.size() < 2)
                throw_invalid_param("points", "needs at least 2 points");
            for (const auto& p: params.points)
                if (!is_finite(p))
                    throw_invalid_param("points", "non-finite coordinate");
            check_no_coincident(params.points, false);
            return CurvePath{sample_bezier(params.points), false};
        }
    }
    throw GeometryError(GeometryErrc::UnknownPrimitive, "unknown curve kind");
}

std::vector<Frame> rotation_minimizing_frames(const CurvePath& path)
{
    const auto& pts = path.points;
    const std::size_t n = pts.size();
    std::vector<Frame> frames(n);
    if (n == 0)
        return frames;
    const auto tangents = path_tangents(path);

    const Vec3 t0 = tangents[0];
    Vec3 r = std::abs(t0.z) < 0.999 ? cross(Vec3{0, 0, 1}, t0) : cross(Vec3{1, 0, 0}, t0);
    r = normalize(r);
    frames[0] = {pts[0], t0, r, cross(t0, r)};
    for (std::size_t i = 0; i + 1 < n; ++i)
    {
        r = reflect_transport(pts[i], pts[i + 1], r, tangents[i], tangents[i + 1]);
        frames[i + 1] = {pts[i + 1], tangents[i + 1], r, cross(tangents[i + 1], r)};
    }
    if (path.closed && n > 2)
    {
        const Vec3 back = reflect_transport(pts[n - 1], pts[0], frames[n - 1].normal, tangents[n - 1], tangents[0]);
        const double gap = std::atan2(dot(t0, cross(back, frames[0].normal)), dot(back, frames[0].normal));
        for (std::size_t i = 1; i < n; ++i)
        {
            auto& f = frames[i];
            f.normal = normalize(rotate_about(f.normal, f.tangent, gap * static_cast<double>(i) / static_cast<double>(n)));
            f.binormal = cross(f.tangent, f.normal);
        }
    }
    return frames;
}

Mesh make_curve_object(CurveKind kind, const CurveParams& params, Warnings* warnings)
{
    if (!(params.bevel_depth >= 0.0) || !std::isfinite(params.bevel_depth))
        throw_invalid_param("bevel_depth", "must be >= 0");
    if (!(params.extrude >= 0.0) || !std::isfinite(params.extrude))
        throw_invalid_param("extrude", "must be >= 0");

    CurvePath path = curve_path(kind, params);
    Mesh m;
    if (params.bevel_depth > 0.0 && params.extrude > 0.0)
        m = sweep_profile(path, stadium_profile(params.bevel_depth, params.extrude), params.fill_caps);
    else if (params.bevel_depth > 0.0)
        m = sweep_profile(path, circle_profile(params.bevel_depth), params.fill_caps);
    else if (params.extrude > 0.0)
        m = extrude_ribbon(path, params.extrude, params.fill_caps, warnings);
    else
        warn(warnings, "curve has neither bevel_depth nor extrude, so it has no surface");
    m.centerline = std::move(path);
    return m;
}

} // namespace shapecraft::geometry
