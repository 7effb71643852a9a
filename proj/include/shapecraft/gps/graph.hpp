// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/geometry/mesh.hpp"
#include "shapecraft/program/diagnostic.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shapecraft::gps
{

/// Axis-aligned volume: size holds full extents (l, w, h) along x, y, z.
struct BoundingVolume
{
    geometry::Vec3 center{};
    geometry::Vec3 size{2.0, 2.0, 2.0};

    geometry::Aabb to_aabb() const;
    static BoundingVolume from_aabb(const geometry::Aabb& box);

    friend bool operator==(const BoundingVolume&, const BoundingVolume&) = default;
};

/// Extents strictly positive and every component finite.
bool is_valid(const BoundingVolume& b);

struct GpsNode
{
    std::string name;
    std::string geometric_desc;
    std::string positional_desc;
    std::optional<BoundingVolume> bounds;
    std::optional<std::string> code;
    std::optional<int> best_score;

    friend bool operator==(const GpsNode&, const GpsNode&) = default;
};

/// Depth-1 graph: every node hangs off the virtual root.
struct GpsGraph
{
    std::string root_summary;
    std::vector<GpsNode> nodes;

    const GpsNode* find(std::string_view name) const;
    GpsNode* find(std::string_view name);

    friend bool operator==(const GpsGraph&, const GpsGraph&) = default;
};

/// Lowercase letters, digits and underscores, not starting with a digit.
bool is_valid_node_name(std::string_view name);

struct GraphParseResult
{
    std::optional<GpsGraph> graph;  // set iff there are no error diagnostics
    std::vector<program::Diagnostic> diagnostics;
};

/// Accepts raw JSONL or a model reply wrapping it in a ```jsonl fence. Objects
/// may span several lines; diagnostics use the line where an object starts.
GraphParseResult parse_graph_jsonl(std::string_view text);

std::string serialize_graph(const GpsGraph& graph);

/// Deterministic digest handed to agents as context.
std::string graph_overview(const GpsGraph& graph);

} // namespace shapecraft::gps
