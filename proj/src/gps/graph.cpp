// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/gps/graph.hpp"

#include "shapecraft/util/fences.hpp"

#include <cmath>
#include <fmt/format.h>
#include <json.hpp>
#include <set>

namespace shapecraft::gps
{

using program::Diagnostic;
using program::Severity;
using json = nlohmann::ordered_json;

geometry::Aabb BoundingVolume::to_aabb() const { return {center - size * 0.5, center + size * 0.5}; }

BoundingVolume BoundingVolume::from_aabb(const geometry::Aabb& box) { return {box.center(), box.size()}; }

bool is_valid(const BoundingVolume& b)
{
    for (int i = 0; i < 3; ++i)
        if (!std::isfinite(b.center[i]) || !std::isfinite(b.size[i]) || !(b.size[i] > 0.0))
            return false;
    return true;
}

const GpsNode* GpsGraph::find(std::string_view name) const
{
    for (const auto& n: nodes)
        if (n.name == name)
            return &n;
    return nullptr;
}

GpsNode* GpsGraph::find(std::string_view name)
{
    for (auto& n: nodes)
        if (n.name == name)
            return &n;
    return nullptr;
}

bool is_valid_node_name(std::string_view name)
{
    if (name.empty() || (name[0] >= '0' && name[0] <= '9'))
        return false;
    for (char c: name)
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'))
            return false;
    return true;
}

namespace
{

struct Chunk
{
    int line;
    std::string text;
};

// Splits text into top-level JSON objects by brace depth, outside strings.
std::vector<Chunk> split_objects(std::string_view text, int first_line, std::vector<Diagnostic>& diags)
{
    std::vector<Chunk> out;
    int line = first_line;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    Chunk current{0, {}};
    std::string stray;
    int stray_line = 0;

    auto flush_stray = [&] {
        if (stray.find_first_not_of(" \t\r,") != std::string::npos)
            diags.push_back({stray_line, Severity::Warning, "ignored text outside JSON objects"});
        stray.clear();
    };

    for (char c: text)
    {
        if (depth == 0 && !in_string)
        {
            if (c == '{')
            {
                flush_stray();
                depth = 1;
                current = {line, "{"};
            }
            else if (c == '\n')
                flush_stray();
            else
            {
                if (stray.empty())
                    stray_line = line;
                stray.push_back(c);
            }
            if (c == '\n')
                ++line;
            continue;
        }
        current.text.push_back(c);
        if (c == '\n')
            ++line;
        if (in_string)
        {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"')
            in_string = true;
        else if (c == '{' || c == '[')
            ++depth;
        else if ((c == '}' || c == ']') && --depth == 0)
            out.push_back(std::move(current));
    }
    flush_stray();
    if (depth > 0)
        out.push_back(std::move(current));  // reported as malformed by the JSON parser
    return out;
}

std::string json_error(const std::exception& e)
{
    std::string msg = e.what();
    const auto close = msg.find("] ");
    if (msg.rfind("[json.exception", 0) == 0 && close != std::string::npos)
        msg.erase(0, close + 2);
    return msg;
}

std::string text_field(const json& obj, const char* key, const std::string& node, int line,
                       std::vector<Diagnostic>& diags)
{
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null())
    {
        diags.push_back({line, Severity::Warning, fmt::format("node '{}' has no {}", node, key)});
        return {};
    }
    if (it->is_string())
        return it->get<std::string>();
    return it->dump();
}

void read_node(const json& obj, int line, GpsGraph& graph, std::set<std::string>& seen,
               std::vector<Diagnostic>& diags)
{
    const json& name_value = obj.at("node");
    if (!name_value.is_string())
    {
        diags.push_back({line, Severity::Error, "\"node\" must be a string"});
        return;
    }
    GpsNode node;
    node.name = name_value.get<std::string>();
    if (!is_valid_node_name(node.name))
    {
        diags.push_back({line, Severity::Error,
                         fmt::format("invalid node name '{}': use lowercase letters, digits and underscores, not "
                                     "starting with a digit",
                                     node.name)});
        return;
    }
    if (!seen.insert(node.name).second)
    {
        diags.push_back({line, Severity::Error, fmt::format("duplicate node name '{}'", node.name)});
        return;
    }
    node.geometric_desc = text_field(obj, "shape_description", node.name, line, diags);
    node.positional_desc = text_field(obj, "bounding_volume", node.name, line, diags);

    bool ok = true;
    for (const auto& [key, value]: obj.items())
    {
        if (key == "node" || key == "shape_description" || key == "bounding_volume")
            continue;
        if (key == "bounds")
        {
            BoundingVolume b;
            bool shaped = value.is_array() && value.size() == 6;
            for (std::size_t i = 0; shaped && i < 6; ++i)
                shaped = value[i].is_number();
            if (shaped)
            {
                b.center = {value[0].get<double>(), value[1].get<double>(), value[2].get<double>()};
                b.size = {value[3].get<double>(), value[4].get<double>(), value[5].get<double>()};
            }
            if (!shaped || !is_valid(b))
            {
                diags.push_back({line, Severity::Error,
                                 fmt::format("node '{}': bounds must be [cx, cy, cz, l, w, h] with finite numbers "
                                             "and positive sizes",
                                             node.name)});
                ok = false;
            }
            else
                node.bounds = b;
        }
        else if (key == "code")
        {
            if (value.is_string())
                node.code = value.get<std::string>();
            else if (!value.is_null())
            {
                diags.push_back({line, Severity::Error, fmt::format("node '{}': code must be a string", node.name)});
                ok = false;
            }
        }
        else if (key == "best_score")
        {
            if (value.is_number_integer() && value.get<long long>() >= 0 && value.get<long long>() <= 10)
                node.best_score = value.get<int>();
            else if (!value.is_null())
            {
                diags.push_back({line, Severity::Error,
                                 fmt::format("node '{}': best_score must be an integer from 0 to 10", node.name)});
                ok = false;
            }
        }
        else
            diags.push_back({line, Severity::Warning, fmt::format("node '{}': ignoring unknown key '{}'", node.name, key)});
    }
    if (ok)
        graph.nodes.push_back(std::move(node));
}

void read_object(const json& obj, int line, GpsGraph& graph, std::set<std::string>& seen,
                 std::vector<Diagnostic>& diags)
{
    if (!obj.is_object())
    {
        diags.push_back({line, Severity::Error, "expected a JSON object per node"});
        return;
    }
    if (obj.contains("node"))
    {
        read_node(obj, line, graph, seen, diags);
        return;
    }
    if (obj.contains("root_summary") && obj.size() == 1 && obj["root_summary"].is_string())
    {
        graph.root_summary = obj["root_summary"].get<std::string>();
        return;
    }
    diags.push_back({line, Severity::Error, "object has no \"node\" key"});
}

} // namespace

GraphParseResult parse_graph_jsonl(std::string_view text)
{
    GraphParseResult result;
    auto& diags = result.diagnostics;

    std::string body(text);
    int first_line = 1;
    if (auto block = util::find_fenced_block(text, {"jsonl", "json", "ndjson"}))
    {
        body = std::move(block->body);
        first_line = block->first_line;
    }

    GpsGraph graph;
    std::set<std::string> seen;

    // A single JSON array of nodes is accepted as well.
    const auto lead = body.find_first_not_of(" \t\r\n");
    if (lead != std::string::npos && body[lead] == '[')
    {
        const int line = first_line + static_cast<int>(std::count(body.begin(), body.begin() + lead, '\n'));
        try
        {
            const json arr = json::parse(body);
            for (const auto& obj: arr)
                read_object(obj, line, graph, seen, diags);
        }
        catch (const json::exception& e)
        {
            diags.push_back({line, Severity::Error, fmt::format("malformed JSON: {}", json_error(e))});
        }
    }
    else
    {
        for (const auto& chunk: split_objects(body, first_line, diags))
        {
            try
            {
                read_object(json::parse(chunk.text), chunk.line, graph, seen, diags);
            }
            catch (const json::exception& e)
            {
                diags.push_back({chunk.line, Severity::Error, fmt::format("malformed JSON: {}", json_error(e))});
            }
        }
    }

    if (graph.nodes.empty() && !program::has_errors(diags))
        diags.push_back({first_line, Severity::Error, "no nodes"});
    if (!program::has_errors(diags))
        result.graph = std::move(graph);
    return result;
}

std::string serialize_graph(const GpsGraph& graph)
{
    std::string out;
    if (!graph.root_summary.empty())
        out += json{{"root_summary", graph.root_summary}}.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
    for (const auto& n: graph.nodes)
    {
        json obj;
        obj["node"] = n.name;
        obj["shape_description"] = n.geometric_desc;
        obj["bounding_volume"] = n.positional_desc;
        if (n.bounds)
        {
            const auto& b = *n.bounds;
            obj["bounds"] = {b.center.x, b.center.y, b.center.z, b.size.x, b.size.y, b.size.z};
        }
        if (n.code)
            obj["code"] = *n.code;
        if (n.best_score)
            obj["best_score"] = *n.best_score;
        out += obj.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
    }
    return out;
}

std::string graph_overview(const GpsGraph& graph)
{
    std::string out;
    if (!graph.root_summary.empty())
        out += fmt::format("Object: {}\n", graph.root_summary);
    out += fmt::format("Components ({}):\n", graph.nodes.size());
    for (const auto& n: graph.nodes)
    {
        out += fmt::format("- {}\n", n.name);
        out += fmt::format("  shape: {}\n", n.geometric_desc);
        out += fmt::format("  placement: {}\n", n.positional_desc);
        if (n.bounds)
        {
            const auto& b = *n.bounds;
            out += fmt::format("  bounds: center ({}, {}, {}), size ({}, {}, {})\n", b.center.x, b.center.y,
                               b.center.z, b.size.x, b.size.y, b.size.z);
        }
    }
    return out;
}

} // namespace shapecraft::gps
