// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/geometry/mesh.hpp"
#include "shapecraft/gps/graph.hpp"
#include "shapecraft/program/diagnostic.hpp"
#include "shapecraft/program/interpreter.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shapecraft::executor
{

enum class FitMode
{
    Nonuniform,  // per-axis stretch, the mesh box lands exactly on the bounds
    Uniform,     // one scale factor, centered, fits inside the bounds
};

struct ExecutorOptions
{
    FitMode fit = FitMode::Nonuniform;
    program::ExecutionLimits limits{};
    bool parallel = true;  // assemble runs nodes concurrently
};

enum class ExecutorErrc
{
    MissingBounds,
    UnknownNode,
};

class ExecutorError : public std::runtime_error
{
public:
    ExecutorError(ExecutorErrc code, std::string message) : std::runtime_error(std::move(message)), _code(code) {}
    ExecutorErrc code() const noexcept { return _code; }

private:
    ExecutorErrc _code;
};

/// Maps the mesh box onto `b`. Axes where the mesh has zero extent keep scale 1
/// and are centered. Throws GeometryError(EmptyMesh) for meshes without vertices.
geometry::Mesh fit_to_bounds(const geometry::Mesh& mesh, const gps::BoundingVolume& b,
                             FitMode mode = FitMode::Nonuniform);

/// True when the node would fall back to the default cube.
bool uses_default_cube(const gps::GpsNode& node);

struct NodeResult
{
    std::optional<geometry::Mesh> mesh;  // fitted and tagged with the node name
    std::vector<program::Diagnostic> diagnostics;

    bool ok() const { return mesh.has_value(); }
};

/// Throws ExecutorError(MissingBounds) when the node has no bounds.
NodeResult execute_node(const gps::GpsNode& node, const ExecutorOptions& options = {});

struct NodeFailure
{
    std::string node;
    std::vector<program::Diagnostic> diagnostics;
};

struct Assembly
{
    geometry::Mesh mesh;                        // concatenation in graph order
    std::vector<geometry::Mesh> components;     // one per succeeding node, tagged
    std::vector<NodeFailure> failures;

    bool complete() const { return failures.empty(); }
    std::string failure_report() const;
};

Assembly assemble(const gps::GpsGraph& graph, const ExecutorOptions& options = {});

/// Executes one node only. Throws ExecutorError(UnknownNode).
NodeResult partial_geometry(const gps::GpsGraph& graph, std::string_view node_name,
                            const ExecutorOptions& options = {});

} // namespace shapecraft::executor
