// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/metrics/metrics.hpp"

#include "shapecraft/agents/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <random>

namespace shapecraft::metrics
{

using geometry::Mesh;
using geometry::Vec3;

namespace
{

double d2(const Vec3& a, const Vec3& b)
{
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

// Implicit k-d tree: each range [lo, hi) splits at its middle element.
class KdTree
{
public:
    explicit KdTree(const PointCloud& points) : _pts(points), _axis(points.size(), 0) { build(0, _pts.size()); }

    double nearest_sq(const Vec3& q) const
    {
        double best = std::numeric_limits<double>::infinity();
        visit(q, 0, _pts.size(), best);
        return best;
    }

private:
    static constexpr std::size_t leaf = 8;

    void build(std::size_t lo, std::size_t hi)
    {
        if (hi - lo <= leaf)
            return;
        Vec3 mn = _pts[lo], mx = _pts[lo];
        for (std::size_t i = lo; i < hi; ++i)
            for (int k = 0; k < 3; ++k)
            {
                mn[k] = std::min(mn[k], _pts[i][k]);
                mx[k] = std::max(mx[k], _pts[i][k]);
            }
        const Vec3 ext = mx - mn;
        const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
        const std::size_t mid = lo + (hi - lo) / 2;
        std::nth_element(_pts.begin() + static_cast<std::ptrdiff_t>(lo), _pts.begin() + static_cast<std::ptrdiff_t>(mid),
                         _pts.begin() + static_cast<std::ptrdiff_t>(hi),
                         [axis](const Vec3& a, const Vec3& b) { return a[axis] < b[axis]; });
        _axis[mid] = axis;
        build(lo, mid);
        build(mid + 1, hi);
    }

    void visit(const Vec3& q, std::size_t lo, std::size_t hi, double& best) const
    {
        if (hi - lo <= leaf)
        {
            for (std::size_t i = lo; i < hi; ++i)
                best = std::min(best, d2(q, _pts[i]));
            return;
        }
        const std::size_t mid = lo + (hi - lo) / 2;
        best = std::min(best, d2(q, _pts[mid]));
        const int axis = _axis[mid];
        const double diff = q[axis] - _pts[mid][axis];
        if (diff < 0)
        {
            visit(q, lo, mid, best);
            if (diff * diff < best)
                visit(q, mid + 1, hi, best);
        }
        else
        {
            visit(q, mid + 1, hi, best);
            if (diff * diff < best)
                visit(q, lo, mid, best);
        }
    }

    PointCloud _pts;
    std::vector<int> _axis;
};

double directed_sq(const PointCloud& from, const KdTree& to)
{
    double worst = 0.0;
    for (const auto& p: from)
        worst = std::max(worst, to.nearest_sq(p));
    return worst;
}

struct P2
{
    double x, y;
};

bool lex_less(const P2& a, const P2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

// Side of p relative to the edge u->v. The value is computed with the endpoints in a
// fixed order so a shared edge gives both triangles the same number, and exact zeros
// are resolved as if p were nudged by (e, e^2). Every column point therefore lies in
// exactly one of the triangles sharing an edge or vertex.
int edge_side(const P2& u, const P2& v, const P2& p, double& value)
{
    const bool fwd = lex_less(u, v);
    const P2& a = fwd ? u : v;
    const P2& b = fwd ? v : u;
    double w = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    value = fwd ? w : -w;
    int sign;
    if (w > 0)
        sign = 1;
    else if (w < 0)
        sign = -1;
    else if (b.y != a.y)
        sign = a.y > b.y ? 1 : -1;
    else
        sign = b.x > a.x ? 1 : -1;
    return fwd ? sign : -sign;
}

std::vector<Vec3> framed(const Mesh& mesh, const UnitFrame& frame)
{
    std::vector<Vec3> out;
    out.reserve(mesh.vertices.size());
    for (const auto& v: mesh.vertices)
        out.push_back(frame.apply(v));
    return out;
}

void require_solid(const Mesh& mesh, std::string_view what)
{
    if (mesh.empty())
        throw MetricsError(MetricsErrc::EmptyMesh, fmt::format("{} mesh is empty", what));
    // Imported meshes often repeat vertices per face, so closedness is judged after welding.
    Mesh welded = mesh;
    const auto box = geometry::compute_aabb(mesh);
    const Vec3 ext = box.size();
    geometry::weld_vertices(welded, 1e-9 * std::max({ext.x, ext.y, ext.z, 1e-300}));
    if (const auto open = geometry::count_boundary_edges(welded))
        throw MetricsError(MetricsErrc::OpenMesh,
                           fmt::format("{} mesh is not closed ({} boundary edges); the interior is undefined", what, open));
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

} // namespace

PointCloud sample_points(const Mesh& mesh, int n, std::uint64_t seed)
{
    if (n < 1)
        throw MetricsError(MetricsErrc::InvalidArgument, fmt::format("sample count must be at least 1, got {}", n));
    if (mesh.empty())
        throw MetricsError(MetricsErrc::EmptyMesh, "cannot sample an empty mesh");
    std::vector<double> cdf(mesh.triangles.size());
    double total = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i)
        cdf[i] = total += geometry::triangle_area(mesh, i);
    if (!(total > 0.0) || !std::isfinite(total))
        throw MetricsError(MetricsErrc::EmptyMesh, "mesh has no surface area to sample");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PointCloud out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
    {
        const double pick = unit(rng) * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), pick);
        const std::size_t tri = std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
        const auto& t = mesh.triangles[tri];
        const double r1 = std::sqrt(unit(rng));
        const double r2 = unit(rng);
        const Vec3& a = mesh.vertices[t[0]];
        const Vec3& b = mesh.vertices[t[1]];
        const Vec3& c = mesh.vertices[t[2]];
        out.push_back(a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2));
    }
    return out;
}

double hausdorff(const PointCloud& a, const PointCloud& b)
{
    if (a.empty() || b.empty())
        throw MetricsError(MetricsErrc::EmptyCloud, "Hausdorff distance needs two non-empty point clouds");
    const KdTree ta(a), tb(b);
    return std::sqrt(std::max(directed_sq(a, tb), directed_sq(b, ta)));
}

Vec3 UnitFrame::apply(const Vec3& p) const { return (p - center) * scale + Vec3{0.5, 0.5, 0.5}; }

UnitFrame unit_frame(const Mesh& ground_truth)
{
    if (ground_truth.vertices.empty())
        throw MetricsError(MetricsErrc::EmptyMesh, "ground truth mesh is empty");
    const auto box = geometry::compute_aabb(ground_truth);
    const Vec3 ext = box.size();
    const double e = std::max({ext.x, ext.y, ext.z});
    if (!(e > 0.0) || !std::isfinite(e))
        throw MetricsError(MetricsErrc::InvalidArgument, "ground truth mesh has no extent");
    return {box.center(), 1.0 / e};
}

std::vector<std::uint8_t> voxelize(const Mesh& mesh, const UnitFrame& frame, int resolution)
{
    if (resolution < 1)
        throw MetricsError(MetricsErrc::InvalidArgument, "voxel resolution must be positive");
    const auto res = static_cast<std::size_t>(resolution);
    const std::vector<Vec3> v = framed(mesh, frame);
    // Signed z crossings per column: -1 entering the solid going up, +1 leaving.
    std::vector<std::vector<std::pair<double, int>>> columns(res * res);
    const double r = resolution;
    auto first_center = [&](double lo) {
        return static_cast<long>(std::max(0.0, std::ceil(lo * r - 0.5)));
    };
    auto last_center = [&](double hi) {
        return static_cast<long>(std::min(r - 1.0, std::floor(hi * r - 0.5)));
    };
    for (const auto& t: mesh.triangles)
    {
        const Vec3 &a = v[t[0]], &b = v[t[1]], &c = v[t[2]];
        const P2 pa{a.x, a.y}, pb{b.x, b.y}, pc{c.x, c.y};
        double area_value;
        const int orientation = edge_side(pa, pb, pc, area_value);
        if (area_value == 0.0)
            continue;  // seen edge-on from below
        const long i0 = first_center(std::min({a.x, b.x, c.x})), i1 = last_center(std::max({a.x, b.x, c.x}));
        const long j0 = first_center(std::min({a.y, b.y, c.y})), j1 = last_center(std::max({a.y, b.y, c.y}));
        for (long j = j0; j <= j1; ++j)
            for (long i = i0; i <= i1; ++i)
            {
                const P2 p{(static_cast<double>(i) + 0.5) / r, (static_cast<double>(j) + 0.5) / r};
                double wa, wb, wc;
                const int sa = edge_side(pb, pc, p, wa);
                const int sb = edge_side(pc, pa, p, wb);
                const int sc = edge_side(pa, pb, p, wc);
                if (sa != sb || sb != sc)
                    continue;
                const double sum = wa + wb + wc;
                const double z = (wa * a.z + wb * b.z + wc * c.z) / sum;
                columns[static_cast<std::size_t>(j) * res + static_cast<std::size_t>(i)].emplace_back(z, -orientation);
            }
    }
    std::vector<std::uint8_t> grid(res * res * res, 0);
    for (std::size_t col = 0; col < columns.size(); ++col)
    {
        auto& hits = columns[col];
        if (hits.empty())
            continue;
        std::sort(hits.begin(), hits.end());
        int winding = 0;
        std::size_t h = 0;
        for (std::size_t k = 0; k < res; ++k)
        {
            const double z = (static_cast<double>(k) + 0.5) / r;
            while (h < hits.size() && hits[h].first < z)
                winding += hits[h++].second;
            if (winding != 0)
                grid[k * res * res + col] = 1;
        }
    }
    return grid;
}

double iogt(const Mesh& generated, const Mesh& ground_truth, int resolution)
{
    if (resolution < 8)
        throw MetricsError(MetricsErrc::InvalidArgument, fmt::format("voxel resolution must be at least 8, got {}", resolution));
    require_solid(generated, "generated");
    require_solid(ground_truth, "ground truth");
    const UnitFrame frame = unit_frame(ground_truth);
    const auto gen = voxelize(generated, frame, resolution);
    const auto gt = voxelize(ground_truth, frame, resolution);
    std::size_t both = 0, truth = 0;
    for (std::size_t i = 0; i < gt.size(); ++i)
    {
        truth += gt[i];
        both += gt[i] & gen[i];
    }
    if (truth == 0)
        throw MetricsError(MetricsErrc::EmptyVoxelization,
                           fmt::format("ground truth occupies no voxel centre at resolution {}", resolution));
    return static_cast<double>(both) / static_cast<double>(truth);
}

RunOutcome outcome_of(const executor::Assembly& assembly) { return {!assembly.mesh.empty(), assembly.complete()}; }

double compile_rate(const std::vector<RunOutcome>& outcomes)
{
    if (outcomes.empty())
        throw MetricsError(MetricsErrc::InvalidArgument, "compile rate needs at least one run");
    const auto ok = std::count_if(outcomes.begin(), outcomes.end(), [](const RunOutcome& o) { return o.ok(); });
    return static_cast<double>(ok) / static_cast<double>(outcomes.size());
}

std::string_view answer_name(Answer a)
{
    switch (a)
    {
    case Answer::Yes: return "yes";
    case Answer::No: return "no";
    case Answer::Unclear: return "unclear";
    }
    return "unclear";
}

Answer normalize_answer(std::string_view reply)
{
    std::size_t i = 0;
    while (i < reply.size() && !std::isalpha(static_cast<unsigned char>(reply[i])))
        ++i;
    std::size_t j = i;
    while (j < reply.size() && std::isalpha(static_cast<unsigned char>(reply[j])))
        ++j;
    const std::string word = lower(reply.substr(i, j - i));
    if (word == "yes")
        return Answer::Yes;
    if (word == "no")
        return Answer::No;
    return Answer::Unclear;
}

VqaResult vqa_pass_rate(const std::vector<render::Image>& renders, const std::vector<std::string>& questions,
                        llm::Backend& backend, const llm::BackendConfig& cfg)
{
    if (questions.empty())
        throw MetricsError(MetricsErrc::InvalidArgument, "VQA needs at least one question");
    if (renders.empty())
        throw MetricsError(MetricsErrc::InvalidArgument, "VQA needs at least one render");
    std::vector<std::vector<std::uint8_t>> images;
    for (const auto& img: renders)
        images.push_back(render::encode_png(img));
    VqaResult out;
    int yes = 0;
    for (std::size_t q = 0; q < questions.size(); ++q)
    {
        llm::BackendConfig c = cfg;
        c.thread = fmt::format("vqa/q{}", q + 1);
        const std::vector<llm::ChatMessage> msg{
            {llm::Role::User, agents::render_prompt("vqa", {{"question", questions[q]}}), images}};
        const Answer a = normalize_answer(backend.complete(msg, c));
        yes += a == Answer::Yes;
        out.answers.push_back(a);
    }
    out.pass_rate = static_cast<double>(yes) / static_cast<double>(questions.size());
    return out;
}

} // namespace shapecraft::metrics
