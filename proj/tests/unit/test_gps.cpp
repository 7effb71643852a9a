// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "shapecraft/gps/graph.hpp"
#include "shapecraft/util/fences.hpp"

#include <doctest.h>
#include <fmt/format.h>

using namespace shapecraft::gps;
using shapecraft::program::Severity;

namespace
{

std::size_t count_of(const std::string& hay, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1))
        ++n;
    return n;
}

GpsGraph sample_graph(int nodes, bool with_bounds)
{
    GpsGraph g;
    g.root_summary = "a wooden chair";
    for (int i = 0; i < nodes; ++i)
    {
        GpsNode n;
        n.name = fmt::format("part_{}", i);
        n.geometric_desc = fmt::format("shape number {} with \"quotes\" and a\nnewline", i);
        n.positional_desc = fmt::format("placed at slot {}", i);
        if (with_bounds)
            n.bounds = BoundingVolume{{0.1 * i, -1.0 / 3.0, 2.5}, {1.0, 0.25 + i, 1e-3}};
        if (i % 2 == 1)
        {
            n.code = "a = cube(name=\"a\")\n";
            n.best_score = i % 11;
        }
        g.nodes.push_back(n);
    }
    return g;
}

} // namespace

TEST_CASE("parse a single node")
{
    const auto r = parse_graph_jsonl(
        R"({"node":"backrest","shape_description":"curved slab","bounding_volume":"upper rear of chair"})");
    REQUIRE(r.graph);
    REQUIRE(r.graph->nodes.size() == 1);
    const GpsNode& n = r.graph->nodes[0];
    CHECK(n.name == "backrest");
    CHECK(n.geometric_desc == "curved slab");
    CHECK(n.positional_desc == "upper rear of chair");
    CHECK_FALSE(n.bounds);
    CHECK_FALSE(n.code);
    CHECK(r.diagnostics.empty());
}

TEST_CASE("empty input has no nodes")
{
    for (const char* text: {"", "\n  \n", "```jsonl\n```"})
    {
        const auto r = parse_graph_jsonl(text);
        CHECK_FALSE(r.graph);
        REQUIRE(r.diagnostics.size() == 1);
        CHECK(r.diagnostics[0].message == "no nodes");
    }
}

TEST_CASE("duplicate and invalid names are rejected")
{
    const auto dup = parse_graph_jsonl("{\"node\":\"leg\",\"shape_description\":\"a\",\"bounding_volume\":\"b\"}\n"
                                       "{\"node\":\"leg\",\"shape_description\":\"c\",\"bounding_volume\":\"d\"}\n");
    CHECK_FALSE(dup.graph);
    REQUIRE(dup.diagnostics.size() == 1);
    CHECK(dup.diagnostics[0].line == 2);
    CHECK(dup.diagnostics[0].message == "duplicate node name 'leg'");

    for (const char* bad: {"Leg", "2legs", "front leg", "leg-1", ""})
    {
        const auto r = parse_graph_jsonl(
            fmt::format(R"({{"node":"{}","shape_description":"a","bounding_volume":"b"}})", bad));
        CHECK_FALSE(r.graph);
        CHECK(r.diagnostics[0].message.find("invalid node name") == 0);
    }
    CHECK(is_valid_node_name("_leg_2"));
    CHECK_FALSE(is_valid_node_name("9"));
}

TEST_CASE("model reply with layers and a fenced multi-line block")
{
    const char* reply = "# First, the hierarchical layers\n"
                        "- root: seating, support\n"
                        "- support: legs\n"
                        "\n"
                        "```jsonl\n"
                        "{\"node\": \"seat\",\n"
                        "\"shape_description\": \"flat square cushion\",\n"
                        "\"bounding_volume\": \"center, at knee height\"\n"
                        "}\n"
                        "{\"node\": \"legs\", \"shape_description\": \"four thin posts\", \"bounding_volume\": "
                        "\"below the seat\", \"material\": \"oak\"}\n"
                        "```\n";
    const auto r = parse_graph_jsonl(reply);
    REQUIRE(r.graph);
    REQUIRE(r.graph->nodes.size() == 2);
    CHECK(r.graph->nodes[0].name == "seat");
    CHECK(r.graph->nodes[1].name == "legs");
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].severity == Severity::Warning);
    CHECK(r.diagnostics[0].line == 10);
    CHECK(r.diagnostics[0].message == "node 'legs': ignoring unknown key 'material'");
}

TEST_CASE("malformed JSON reports the object line")
{
    const auto r = parse_graph_jsonl("{\"node\":\"a\",\"shape_description\":\"x\",\"bounding_volume\":\"y\"}\n"
                                     "{\"node\":\"b\" \"shape_description\":\"x\"}\n");
    CHECK_FALSE(r.graph);
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].line == 2);
    CHECK(r.diagnostics[0].message.rfind("malformed JSON: ", 0) == 0);

    const auto unclosed = parse_graph_jsonl("{\"node\":\"a\",\n\"shape_description\":\"x\"\n");
    CHECK_FALSE(unclosed.graph);
    CHECK(unclosed.diagnostics[0].line == 1);
}

TEST_CASE("bounds validation")
{
    const auto bad = parse_graph_jsonl(
        R"({"node":"a","shape_description":"x","bounding_volume":"y","bounds":[0,0,0,1,0,1]})");
    CHECK_FALSE(bad.graph);
    const auto good = parse_graph_jsonl(
        R"({"node":"a","shape_description":"x","bounding_volume":"y","bounds":[1,2,3,4,5,6],"best_score":7})");
    REQUIRE(good.graph);
    CHECK(good.graph->nodes[0].bounds == BoundingVolume{{1, 2, 3}, {4, 5, 6}});
    CHECK(good.graph->nodes[0].best_score == 7);
    CHECK_FALSE(parse_graph_jsonl(R"({"node":"a","shape_description":"x","bounding_volume":"y","best_score":11})")
                    .graph);
}

TEST_CASE("serialization round trip")
{
    for (int n: {1, 2, 12})
        for (bool bounds: {false, true})
        {
            const GpsGraph g = sample_graph(n, bounds);
            const std::string text = serialize_graph(g);
            CHECK(count_of(text, "\n") == static_cast<std::size_t>(n) + 1);
            const auto back = parse_graph_jsonl(text);
            REQUIRE(back.graph);
            CHECK(*back.graph == g);
            CHECK(back.diagnostics.empty());
            CHECK(serialize_graph(*back.graph) == text);
        }

    GpsGraph one = sample_graph(1, true);
    one.root_summary.clear();
    const std::string line = serialize_graph(one);
    CHECK(count_of(line, "\n") == 1);
    CHECK(line.find("\"bounds\":[0.0,-0.3333333333333333,2.5,1.0,0.25,0.001]") != std::string::npos);
}

TEST_CASE("node order survives serialization")
{
    const GpsGraph g = sample_graph(12, false);
    const auto back = parse_graph_jsonl(serialize_graph(g));
    REQUIRE(back.graph);
    for (std::size_t i = 0; i < 12; ++i)
        CHECK(back.graph->nodes[i].name == g.nodes[i].name);
}

TEST_CASE("overview is deterministic and isolates bounds lines")
{
    GpsGraph g = sample_graph(1, false);
    const std::string plain = graph_overview(g);
    CHECK(count_of(plain, "part_0") == 1);
    CHECK(plain == graph_overview(g));

    g.nodes[0].bounds = BoundingVolume{{0, 0, 0.5}, {2, 2, 0.2}};
    const std::string bounded = graph_overview(g);
    std::vector<std::string> a, b;
    auto lines = [](const std::string& s) {
        std::vector<std::string> out;
        std::size_t pos = 0;
        while (pos < s.size())
        {
            const auto end = s.find('\n', pos);
            out.push_back(s.substr(pos, end - pos));
            pos = end + 1;
        }
        return out;
    };
    a = lines(plain);
    b = lines(bounded);
    std::vector<std::string> extra;
    std::size_t i = 0;
    for (const auto& l: b)
    {
        if (i < a.size() && a[i] == l)
            ++i;
        else
            extra.push_back(l);
    }
    CHECK(i == a.size());
    REQUIRE(extra.size() == 1);
    CHECK(extra[0].find("bounds:") != std::string::npos);
}

TEST_CASE("bounding volume conversion")
{
    const BoundingVolume b{{1, 2, 3}, {2, 4, 6}};
    const auto box = b.to_aabb();
    CHECK(box.min == shapecraft::geometry::Vec3{0, 0, 0});
    CHECK(box.max == shapecraft::geometry::Vec3{2, 4, 6});
    CHECK(BoundingVolume::from_aabb(box) == b);
    CHECK(is_valid(b));
    CHECK_FALSE(is_valid(BoundingVolume{{0, 0, 0}, {1, -1, 1}}));
    CHECK_FALSE(is_valid(BoundingVolume{{std::nan(""), 0, 0}, {1, 1, 1}}));
}

TEST_CASE("fenced block extraction")
{
    using shapecraft::util::extract_fenced_block;
    const char* text = "intro\n```python\nx = 1\n```\nmore\n```jsonl\n{\"a\":1}\n```\n";
    CHECK(extract_fenced_block(text, {"jsonl"}) == "{\"a\":1}\n");
    CHECK(extract_fenced_block(text, {"python"}) == "x = 1\n");
    CHECK(extract_fenced_block(text, {}) == "x = 1\n");
    CHECK(extract_fenced_block("```jsonl\nfirst\n```\n```jsonl\nsecond\n```\n", {"jsonl"}) == "first\n");
    CHECK_FALSE(extract_fenced_block("no fences here", {}));
    CHECK(extract_fenced_block("```\nuntagged\n```", {"jsonl"}) == "untagged\n");
    CHECK(extract_fenced_block("```jsonl\nunterminated\n", {"jsonl"}) == "unterminated\n");
}
