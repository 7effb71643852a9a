// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/geometry/mesh.hpp"
#include "shapecraft/program/ast.hpp"
#include "shapecraft/program/diagnostic.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shapecraft::program
{

struct ExecutionLimits
{
    std::size_t max_statements = 10000;
    int max_array_count = 1000;
    int max_subdivision_levels = 6;
    int max_resolution = 1024;  // segments, rings, vertices, sides
    std::size_t max_triangles = 2'000'000;
};

struct SceneObject
{
    std::string key;
    std::string builtin;  // canonical name of the creating call
    geometry::Mesh mesh;
};

struct SceneObjects
{
    std::vector<SceneObject> objects;  // live objects in creation order
    geometry::Mesh result;             // concatenation of all live objects

    const SceneObject* find(std::string_view key) const;
};

struct ExecResult
{
    std::optional<SceneObjects> scene;  // set iff execution finished without errors
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return scene.has_value(); }
};

ExecResult execute(const ShapeProgram& program, const ExecutionLimits& limits = {});

/// parse + execute, with parse errors reported the same way.
ExecResult run_source(std::string_view source, const ExecutionLimits& limits = {});

} // namespace shapecraft::program
