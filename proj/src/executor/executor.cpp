// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/executor/executor.hpp"

#include "shapecraft/geometry/errors.hpp"
#include "shapecraft/geometry/primitives.hpp"
#include "shapecraft/geometry/transform.hpp"
#include "shapecraft/program/parser.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <future>

namespace shapecraft::executor
{

namespace g = shapecraft::geometry;
using program::Diagnostic;
using program::Severity;

g::Mesh fit_to_bounds(const g::Mesh& mesh, const gps::BoundingVolume& b, FitMode mode)
{
    const g::Aabb box = g::compute_aabb(mesh);
    const g::Vec3 size = box.size();
    const g::Vec3 center = box.center();

    g::Vec3 scale{1.0, 1.0, 1.0};
    if (mode == FitMode::Nonuniform)
    {
        for (int i = 0; i < 3; ++i)
            if (size[i] > 0.0)
                scale[i] = b.size[i] / size[i];
    }
    else
    {
        double s = 0.0;
        bool any = false;
        for (int i = 0; i < 3; ++i)
            if (size[i] > 0.0)
            {
                const double r = b.size[i] / size[i];
                s = any ? std::min(s, r) : r;
                any = true;
            }
        if (any)
            scale = {s, s, s};
    }

    g::Mesh out = mesh;
    for (auto& v: out.vertices)
        for (int i = 0; i < 3; ++i)
            v[i] = b.center[i] + (v[i] - center[i]) * scale[i];
    // Pin the extremes so the fitted box matches the bounds to rounding.
    if (mode == FitMode::Nonuniform)
        for (int i = 0; i < 3; ++i)
        {
            if (size[i] <= 0.0)
                continue;
            const double lo = b.center[i] - 0.5 * b.size[i];
            const double hi = b.center[i] + 0.5 * b.size[i];
            for (std::size_t k = 0; k < out.vertices.size(); ++k)
            {
                if (mesh.vertices[k][i] == box.min[i])
                    out.vertices[k][i] = lo;
                else if (mesh.vertices[k][i] == box.max[i])
                    out.vertices[k][i] = hi;
            }
        }
    if (out.centerline)
        for (auto& p: out.centerline->points)
            for (int i = 0; i < 3; ++i)
                p[i] = b.center[i] + (p[i] - center[i]) * scale[i];
    return out;
}

bool uses_default_cube(const gps::GpsNode& node)
{
    return !node.code || node.code->find_first_not_of(" \t\r\n") == std::string::npos;
}

NodeResult execute_node(const gps::GpsNode& node, const ExecutorOptions& options)
{
    if (!node.bounds)
        throw ExecutorError(ExecutorErrc::MissingBounds, fmt::format("node '{}' has no bounds", node.name));
    const gps::BoundingVolume& b = *node.bounds;
    NodeResult out;

    if (uses_default_cube(node))
    {
        g::Transform t;
        t.position = b.center;
        t.scale = b.size * 0.5;
        out.mesh = g::transform(g::make_primitive(g::PrimitiveKind::Cube), t);
        out.mesh->component_tag = node.name;
        return out;
    }

    program::ExecResult run = program::run_source(*node.code, options.limits);
    out.diagnostics = std::move(run.diagnostics);
    if (!run.ok())
        return out;
    if (run.scene->result.vertices.empty())
    {
        int line = 1;
        const auto parsed = program::parse(*node.code);
        if (parsed.program && !parsed.program->statements.empty())
            line = parsed.program->statements.back().line;
        out.diagnostics.push_back({line, Severity::Error, "the program produced no geometry"});
        return out;
    }
    out.mesh = fit_to_bounds(run.scene->result, b, options.fit);
    out.mesh->component_tag = node.name;
    out.mesh->centerline.reset();
    return out;
}

std::string Assembly::failure_report() const
{
    std::string out;
    for (const auto& f: failures)
    {
        out += fmt::format("node '{}' failed:\n", f.node);
        for (const auto& d: f.diagnostics)
            if (d.severity == Severity::Error)
                out += "  " + program::render(d) + "\n";
    }
    return out;
}

Assembly assemble(const gps::GpsGraph& graph, const ExecutorOptions& options)
{
    auto run_one = [&options](const gps::GpsNode& node) {
        try
        {
            return execute_node(node, options);
        }
        catch (const ExecutorError& e)
        {
            NodeResult r;
            r.diagnostics.push_back({1, Severity::Error, e.what()});
            return r;
        }
    };

    std::vector<NodeResult> results;
    results.reserve(graph.nodes.size());
    if (options.parallel && graph.nodes.size() > 1)
    {
        std::vector<std::future<NodeResult>> pending;
        for (const auto& node: graph.nodes)
            pending.push_back(std::async(std::launch::async, run_one, std::cref(node)));
        for (auto& f: pending)
            results.push_back(f.get());
    }
    else
        for (const auto& node: graph.nodes)
            results.push_back(run_one(node));

    Assembly out;
    for (std::size_t i = 0; i < results.size(); ++i)
    {
        if (results[i].ok())
        {
            g::append(out.mesh, *results[i].mesh);
            out.components.push_back(std::move(*results[i].mesh));
        }
        else
            out.failures.push_back({graph.nodes[i].name, std::move(results[i].diagnostics)});
    }
    return out;
}

NodeResult partial_geometry(const gps::GpsGraph& graph, std::string_view node_name, const ExecutorOptions& options)
{
    const gps::GpsNode* node = graph.find(node_name);
    if (!node)
        throw ExecutorError(ExecutorErrc::UnknownNode, fmt::format("no node named '{}'", node_name));
    return execute_node(*node, options);
}

} // namespace shapecraft::executor
