// SPDX-License-Identifier: Apache-2.0
#include "alg1_oracle.hpp"
#include "scripts.hpp"

#include "shapecraft/agents/agents.hpp"
#include "shapecraft/agents/prompts.hpp"
#include "shapecraft/program/builtins.hpp"

#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace shapecraft::agents;
using shapecraft::gps::BoundingVolume;
using shapecraft::gps::GpsGraph;
using shapecraft::llm::ScriptEntry;
using shapecraft::llm::ScriptedBackend;
namespace fs = std::filesystem;

namespace
{

std::vector<shapecraft::render::Image> one_image()
{
    return {shapecraft::render::Image(8, 8, shapecraft::render::Rgb{0, 0, 0})};
}

std::string last_user_text(const shapecraft::llm::ScriptedCall& c) { return c.messages.back().text; }

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

fs::path fresh_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("shapecraft_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("prompt templates render with their placeholders")
{
    const auto names = prompt_names();
    CHECK(names.size() >= 10);
    for (const auto& name: names)
    {
        PromptVars vars;
        for (const auto& key: placeholders(name))
            vars[key] = "<" + key + ">";
        const std::string text = render_prompt(name, vars);
        CHECK_FALSE(contains(text, "{{"));
        for (const auto& [key, value]: vars)
            CHECK(contains(text, value));
    }
    CHECK_THROWS_AS(render_prompt("parse", {}), std::invalid_argument);
    CHECK_THROWS_AS(render_prompt("parse", {{"shape", "x"}, {"extra", "y"}}), std::invalid_argument);
    CHECK_THROWS_AS(prompt_template("nope"), std::out_of_range);
    CHECK(placeholders("parse") == std::vector<std::string>{"shape"});
}

TEST_CASE("node prompt carries the generated library reference")
{
    const std::string lib = shapecraft::program::library_reference();
    const std::string text = render_prompt("node_system", {{"library", lib}});
    CHECK(contains(text, "cube(name"));
    CHECK(contains(text, "Modifiers.boolean("));
}

TEST_CASE("evaluation replies")
{
    auto r = parse_evaluation(R"({"score": 9, "feedback": "good"})");
    REQUIRE(r);
    CHECK(*r == EvalReport{9, "good"});
    CHECK(parse_evaluation("Sure!\n```json\n{\"score\": 4, \"feedback\": \"thin\"}\n```")->score == 4);
    CHECK(parse_evaluation("prefix {\"feedback\": \"x\", \"score\": 7.6} suffix")->score == 8);
    std::string why;
    CHECK_FALSE(parse_evaluation("score: nine", &why));
    CHECK(why == "no JSON object found");
    CHECK_FALSE(parse_evaluation(R"({"score": "nine", "feedback": "x"})", &why));
    CHECK_FALSE(parse_evaluation(R"({"score": 3})", &why));
}

TEST_CASE("evaluate re-asks and clamps")
{
    scripts::Script sc;
    sc.evaluator(R"({"score": 9, "feedback": "good"})");
    sc.evaluator("score: nine");
    sc.evaluator(R"({"score": 6, "feedback": "ok"})");
    sc.evaluator(R"({"score": 15, "feedback": "wow"})");
    Session s(sc.backend, scripts::roles(), scripts::small_options());
    CHECK(evaluate(s, "e", one_image(), "ctx") == EvalReport{9, "good"});
    CHECK(evaluate(s, "e", one_image(), "ctx") == EvalReport{6, "ok"});
    CHECK(sc.backend.call_count() == 3);
    CHECK(contains(last_user_text(sc.backend.calls()[2]), "could not be read"));
    CHECK(evaluate(s, "e", one_image(), "ctx").score == 10);
    REQUIRE(s.warnings().size() == 1);
    CHECK(s.warnings()[0] == "evaluator score 15 clamped to 10");
    CHECK(sc.backend.calls()[0].messages[0].images.size() == 1);

    CHECK_THROWS_AS(evaluate(s, "e", {}, "ctx"), AgentError);
    CHECK(sc.backend.call_count() == 4);

    scripts::Script bad;
    for (int i = 0; i < 4; ++i)
        bad.evaluator("no idea");
    Session sb(bad.backend, scripts::roles(), scripts::small_options());
    try
    {
        evaluate(sb, "e", one_image(), "ctx");
        FAIL("expected UnparseableEvaluation");
    }
    catch (const AgentError& e)
    {
        CHECK(e.code() == AgentErrc::UnparseableEvaluation);
    }
    CHECK(bad.backend.call_count() == 4);
}

TEST_CASE("bounding box rubric drops the visual criterion")
{
    scripts::Script sc;
    sc.score(5);
    sc.score(5);
    Session s(sc.backend, scripts::roles(), scripts::small_options());
    evaluate(s, "e", one_image(), "ctx", Rubric::Shape);
    evaluate(s, "e", one_image(), "ctx", Rubric::BoundingBox);
    const auto calls = sc.backend.calls();
    CHECK(contains(calls[0].messages[0].text, "appearance"));
    CHECK_FALSE(contains(calls[1].messages[0].text, "appearance"));
    CHECK(contains(calls[1].messages[0].text, "soundness"));
}

TEST_CASE("parse_shape on the chair example")
{
    scripts::Script sc;
    sc.parser(scripts::parse_reply("chair", {{"backrest", "curved slab", "upper rear of the chair"}}));
    Session s(sc.backend, scripts::roles(), scripts::small_options());
    const GpsGraph g = parse_shape(s, "a wooden chair");
    REQUIRE(g.nodes.size() == 1);
    CHECK(g.nodes[0].name == "backrest");
    CHECK(g.root_summary == "chair");
    CHECK(sc.backend.call_count() == 1);
    CHECK(contains(sc.backend.calls()[0].messages[0].text, "a wooden chair"));
}

TEST_CASE("parse_shape re-asks after malformed JSON")
{
    scripts::Script sc;
    sc.parser("```jsonl\n{\"node\": \"seat\" \"shape_description\": \"x\"}\n```");
    sc.parser(scripts::parse_reply("stool", {{"seat", "round disc", "top"}, {"legs", "four posts", "below"}}));
    Session s(sc.backend, scripts::roles(), scripts::small_options());
    const GpsGraph g = parse_shape(s, "a stool");
    CHECK(g.nodes.size() == 2);
    CHECK(sc.backend.call_count() == 2);
    const auto second = sc.backend.calls()[1].messages;
    REQUIRE(second.size() == 3);
    CHECK(contains(second[2].text, "malformed JSON"));
}

TEST_CASE("parse_shape errors")
{
    scripts::Script sc;
    Session s(sc.backend, scripts::roles(), scripts::small_options());
    CHECK_THROWS_AS(parse_shape(s, "  \n "), AgentError);
    CHECK(sc.backend.call_count() == 0);

    for (int i = 0; i < 3; ++i)
        sc.parser("I cannot help with that.");
    try
    {
        parse_shape(s, "a lamp");
        FAIL("expected UnparseableGraph");
    }
    catch (const AgentError& e)
    {
        CHECK(e.code() == AgentErrc::UnparseableGraph);
    }
    CHECK(sc.backend.call_count() == 3);
}

TEST_CASE("root line extraction")
{
    CHECK(root_line("# layers\n- root: seating, support\n- seating: seat") == "seating, support");
    CHECK(root_line("* **root**: x") == std::nullopt);
    CHECK(root_line("Root: lamp") == "lamp");
    CHECK_FALSE(root_line("no layers here"));
}

TEST_CASE("bounding box from a cube_bounding_box program")
{
    scripts::Script sc;
    sc.coder(scripts::fenced("cube_bounding_box(name=\"seat_bbox\", position=(0,0,0.5), scale=(1,1,0.1))\n"));
    sc.score(9);
    GpsGraph g;
    g.root_summary = "chair";
    g.nodes.push_back({"seat", "flat", "middle", std::nullopt, std::nullopt, std::nullopt});
    Session s(sc.backend, scripts::roles(), scripts::small_options());
    const GpsGraph out = generate_bboxes(s, g);
    REQUIRE(out.nodes[0].bounds);
    const BoundingVolume& b = *out.nodes[0].bounds;
    CHECK(b.center.x == doctest::Approx(0.0));
    CHECK(b.center.z == doctest::Approx(0.5));
    CHECK(b.size.x == doctest::Approx(2.0));
    CHECK(b.size.y == doctest::Approx(2.0));
    CHECK(b.size.z == doctest::Approx(0.2));
    CHECK(sc.backend.call_count() == 2);
}

TEST_CASE("two boxes in one node are rejected and fed back")
{
    scripts::Script sc;
    sc.program("cube_bounding_box(name=\"legs_bbox\", position=(1,0,0))\ncube_bounding_box(name=\"legs2_bbox\", position=(-1,0,0))\n");
    sc.program("cube_bounding_box(name=\"legs_bbox\", position=(0,0,0), scale=(1.5,1,0.5))\n");
    sc.score(9);
    GpsGraph g;
    g.nodes.push_back({"legs", "four posts", "under the seat", std::nullopt, std::nullopt, std::nullopt});
    auto opts = scripts::small_options();
    opts.bbox_iterations = 3;
    Session s(sc.backend, scripts::roles(), opts);
    const GpsGraph out = generate_bboxes(s, g);
    const auto calls = sc.backend.calls();
    REQUIRE(calls.size() == 3);
    CHECK(calls[1].agent == "coder");
    CHECK(contains(last_user_text(calls[1]), "line 2: error: only one cube_bounding_box call is allowed per node"));
    CHECK(out.nodes[0].bounds->size.x == doctest::Approx(3.0));
}

TEST_CASE("three nodes get three coder calls before refinement")
{
    scripts::Script sc;
    sc.coder(scripts::bbox_reply("a", 0, 0, 0, 1, 1, 1));
    sc.coder(scripts::bbox_reply("b", 3, 0, 0, 1, 1, 1));
    sc.coder(scripts::bbox_reply("c", 6, 0, 0, 1, 1, 1));
    sc.score(9);
    sc.score(9);
    sc.score(9);
    GpsGraph g;
    for (const char* n: {"a", "b", "c"})
        g.nodes.push_back({n, "block", "in a row", std::nullopt, std::nullopt, std::nullopt});
    Session s(sc.backend, scripts::roles(), scripts::small_options());
    const GpsGraph out = generate_bboxes(s, g);
    const auto calls = sc.backend.calls();
    REQUIRE(calls.size() == 6);
    for (int i = 0; i < 3; ++i)
        CHECK(calls[i].agent == "coder");
    for (const auto& n: out.nodes)
        CHECK(n.bounds);
    CHECK(out.nodes[2].bounds->center.x == doctest::Approx(6.0));
    // The evaluator of the last node sees all three boxes in the colour key.
    CHECK(contains(calls[5].messages[0].text, "- c: "));
    CHECK(contains(calls[5].messages[0].text, "- a: "));
}

TEST_CASE("bounding box fallback after repeated failure")
{
    scripts::Script sc;
    for (int i = 0; i < 3; ++i)
        sc.program("cube(name=\"x\")\n");
    GpsGraph g;
    g.nodes.push_back({"knob", "small", "front", std::nullopt, std::nullopt, std::nullopt});
    Session s(sc.backend, scripts::roles(), scripts::small_options());
    const GpsGraph out = generate_bboxes(s, g);
    CHECK(out.nodes[0].bounds == BoundingVolume{{0, 0, 0}, {2, 2, 2}});
    CHECK(sc.backend.call_count("evaluator") == 0);
    CHECK(sc.backend.call_count("coder") == 3);
    REQUIRE(s.warnings().size() == 1);
    CHECK(contains(s.warnings()[0], "knob"));
}

TEST_CASE("bootstrap rounds")
{
    const GpsGraph start = scripts::bounded_graph({"body", "lid"});

    scripts::Script none;
    Session s0(none.backend, scripts::roles(), scripts::small_options());
    CHECK(bootstrap(s0, start, "a box", 0) == start);
    CHECK(none.backend.call_count() == 0);

    // N=1 with two new nodes, each needing a box.
    scripts::Script one;
    one.evaluator("The lid floats; add hinges and a latch instead.");
    one.parser(scripts::parse_reply("box", {{"hinge", "small cylinder", "rear edge"}, {"latch", "tab", "front edge"}}));
    one.coder(scripts::bbox_reply("hinge", 0, 0.5, 1, 0.5, 0.1, 0.1));
    one.coder(scripts::bbox_reply("latch", 0, -0.5, 1, 0.1, 0.05, 0.1));
    one.score(9);
    one.score(9);
    Session s1(one.backend, scripts::roles(), scripts::small_options());
    const GpsGraph g1 = bootstrap(s1, start, "a box", 1);
    REQUIRE(g1.nodes.size() == 2);
    CHECK(g1.nodes[0].name == "hinge");
    CHECK(g1.nodes[1].name == "latch");
    CHECK(g1.nodes[1].bounds->center.y == doctest::Approx(-0.5));
    const auto update = one.backend.calls()[1].messages;
    REQUIRE(update.size() == 3);
    CHECK(contains(update[1].text, "\"node\":\"body\""));
    CHECK(contains(update[2].text, "The lid floats"));
    CHECK(one.backend.calls()[0].messages[0].images.size() == 3);

    // N=2 with an unchanged graph: exactly two review and two update calls.
    scripts::Script two;
    const std::string same = scripts::parse_reply("box", {{"body", "a simple block named body", "in a row"},
                                                          {"lid", "a simple block named lid", "in a row"}});
    for (int i = 0; i < 2; ++i)
    {
        two.evaluator("fine");
        two.parser(same);
    }
    Session s2(two.backend, scripts::roles(), scripts::small_options());
    const GpsGraph g2 = bootstrap(s2, start, "a box", 2);
    CHECK(two.backend.call_count("evaluator") == 2);
    CHECK(two.backend.call_count("parser") == 2);
    CHECK(two.backend.call_count() == 4);
    CHECK(g2.nodes == start.nodes);
}

TEST_CASE("bootstrap keeps the graph when the update is unusable")
{
    const GpsGraph start = scripts::bounded_graph({"body"});
    scripts::Script sc;
    sc.evaluator("fine");
    sc.parser("nothing useful");
    Session s(sc.backend, scripts::roles(), scripts::small_options());
    CHECK(bootstrap(s, start, "a box", 1) == start);
    REQUIRE(s.warnings().size() == 1);
    CHECK(contains(s.warnings()[0], "bootstrap round 1"));
}

TEST_CASE("multi-path early stop example")
{
    // path1 scores [5, 9], path2 [7, 8, 8], threshold 9.
    ScriptedBackend backend(scripts::keyed_paths("body", {{5, 9, 1}, {7, 8, 8}}));
    Session s(backend, scripts::roles(), scripts::small_options(2, 3, 9));
    const auto r = model_shape(s, scripts::bounded_graph({"body"}));
    REQUIRE(r.traces.size() == 1);
    const auto& paths = r.traces[0].paths;
    CHECK(paths[0].scores == std::vector<int>{5, 9});
    CHECK(paths[0].stopped_early);
    CHECK(paths[1].scores == std::vector<int>{7, 8, 8});
    CHECK(backend.call_count("evaluator") == 5);
    CHECK(backend.call_count("coder") == 5);
    CHECK(r.traces[0].selected == 1);
    CHECK(r.graph.nodes[0].code == "cube(name=\"p1t1\")\n");
    CHECK(r.graph.nodes[0].best_score == 9);
}

TEST_CASE("minimal loop")
{
    scripts::Script sc;
    sc.program("cylinder(vertices=12)\n");
    sc.score(10);
    Session s(sc.backend, scripts::roles(), scripts::small_options(1, 1, 9));
    const auto r = model_shape(s, scripts::bounded_graph({"post"}));
    CHECK(sc.backend.call_count("coder") == 1);
    CHECK(sc.backend.call_count("evaluator") == 1);
    CHECK(r.graph.nodes[0].best_score == 10);
    CHECK(sc.backend.calls()[0].messages[1].text.find("Model the part `post`") != std::string::npos);
}

TEST_CASE("ties go to the lower path index")
{
    ScriptedBackend backend(scripts::keyed_paths("body", {{6}, {6}, {4}}));
    Session s(backend, scripts::roles(), scripts::small_options(3, 1, 9));
    const auto r = model_shape(s, scripts::bounded_graph({"body"}));
    CHECK(r.traces[0].selected == 1);
    CHECK(r.graph.nodes[0].code == "cube(name=\"p1t0\")\n");
}

TEST_CASE("interpreter diagnostics reach the refine prompt verbatim")
{
    scripts::Script sc;
    sc.program("base = cylinder(vertices=16)\nwobble(base)\n");
    sc.program("base = cylinder(vertices=16)\n");
    sc.score(9);
    Session s(sc.backend, scripts::roles(), scripts::small_options(1, 3, 9));
    const auto r = model_shape(s, scripts::bounded_graph({"base"}));
    const auto calls = sc.backend.calls();
    REQUIRE(calls.size() == 3);
    CHECK(calls[1].agent == "coder");
    CHECK(contains(last_user_text(calls[1]), "line 2: error: unknown builtin 'wobble'\n"));
    CHECK(r.traces[0].paths[0].scores == std::vector<int>{0, 9});
    CHECK(r.traces[0].paths[0].compiled == std::vector<bool>{false, true});
    CHECK(r.traces[0].paths[0].evaluator_calls == 1);
    CHECK(r.graph.nodes[0].code == "base = cylinder(vertices=16)\n");
}

TEST_CASE("all paths at zero fall back to the default cube")
{
    scripts::Script sc;
    sc.program("wobble()\n");
    sc.program("wobble()\n");
    Session s(sc.backend, scripts::roles(), scripts::small_options(2, 1, 9));
    const auto r = model_shape(s, scripts::bounded_graph({"thing"}));
    CHECK_FALSE(r.graph.nodes[0].code);
    CHECK(r.graph.nodes[0].best_score == 0);
    CHECK_FALSE(r.traces[0].selected);
    REQUIRE(s.warnings().size() == 1);
    CHECK(contains(s.warnings()[0], "default cube"));
}

TEST_CASE("unreadable evaluation counts as zero")
{
    scripts::Script sc;
    sc.program("cube()\n");
    for (int i = 0; i < 4; ++i)
        sc.evaluator("hmm");
    Session s(sc.backend, scripts::roles(), scripts::small_options(1, 1, 9));
    const auto r = model_shape(s, scripts::bounded_graph({"thing"}));
    CHECK(r.traces[0].paths[0].scores == std::vector<int>{0});
    CHECK_FALSE(r.graph.nodes[0].code);
}

TEST_CASE("model_shape needs bounds")
{
    scripts::Script sc;
    GpsGraph g = scripts::bounded_graph({"a"});
    g.nodes[0].bounds.reset();
    Session s(sc.backend, scripts::roles(), scripts::small_options());
    CHECK_THROWS_AS(model_shape(s, g), AgentError);
}

TEST_CASE("orchestrator matches the reference simulator on random score matrices")
{
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> score(0, 10);
    for (int trial = 0; trial < 60; ++trial)
    {
        const int M = 1 + trial % 3;
        const int T = 1 + (trial / 3) % 3;
        const double s_tau = 6 + trial % 5;
        std::vector<std::vector<int>> scores(M, std::vector<int>(T));
        for (auto& row: scores)
            for (auto& v: row)
                v = score(rng);
        const auto expect = oracle::simulate_alg1(scores, T, s_tau);

        ScriptedBackend backend(scripts::keyed_paths("n", scores));
        auto opts = scripts::small_options(M, T, s_tau);
        opts.parallel = trial % 2 == 0;
        Session s(backend, scripts::roles(), opts);
        const auto r = model_shape(s, scripts::bounded_graph({"n"}));
        const auto& trace = r.traces[0];
        int coder = 0, evals = 0;
        for (int m = 0; m < M; ++m)
        {
            const auto& p = trace.paths[m];
            CHECK(p.coder_calls == expect.paths[m].coder_calls);
            CHECK(p.evaluator_calls == expect.paths[m].evaluator_calls);
            CHECK(p.best_score == expect.paths[m].best);
            CHECK(p.best_iteration.value_or(-1) == expect.paths[m].best_iteration);
            int running = 0;
            for (int v: p.scores)
            {
                running = std::max(running, v);
                CHECK(running <= p.best_score);
            }
            coder += p.coder_calls;
            evals += p.evaluator_calls;
        }
        CHECK(static_cast<int>(backend.call_count("coder")) == coder);
        CHECK(static_cast<int>(backend.call_count("evaluator")) == evals);
        CHECK(trace.selected.value_or(0) == expect.selected);
    }
}

TEST_CASE("selection is invariant under monotone rescaling")
{
    // Doubling all scores (capped at 10 by the rubric) keeps the winner when the threshold moves with them.
    const std::vector<std::vector<int>> low{{1, 3, 2}, {4, 2, 1}, {4, 4, 4}};
    std::vector<std::vector<int>> high = low;
    for (auto& row: high)
        for (auto& v: row)
            v *= 2;
    ScriptedBackend a(scripts::keyed_paths("n", low));
    ScriptedBackend b(scripts::keyed_paths("n", high));
    Session sa(a, scripts::roles(), scripts::small_options(3, 3, 5));
    Session sb(b, scripts::roles(), scripts::small_options(3, 3, 10));
    CHECK(model_shape(sa, scripts::bounded_graph({"n"})).traces[0].selected ==
          model_shape(sb, scripts::bounded_graph({"n"})).traces[0].selected);
}

TEST_CASE("parallel and serial runs agree")
{
    std::vector<ScriptEntry> entries;
    for (const char* node: {"a", "b", "c"})
    {
        auto e = scripts::keyed_paths(node, {{3, 9, 2}, {8, 4, 7}});
        entries.insert(entries.end(), e.begin(), e.end());
    }
    ScriptedBackend serial(entries), parallel(entries);
    auto opts = scripts::small_options(2, 3, 9);
    opts.parallel = false;
    Session s1(serial, scripts::roles(), opts);
    opts.parallel = true;
    Session s2(parallel, scripts::roles(), opts);
    CHECK(s2.concurrent());
    const auto g = scripts::bounded_graph({"a", "b", "c"});
    const auto r1 = model_shape(s1, g);
    const auto r2 = model_shape(s2, g);
    CHECK(r1.graph == r2.graph);
    CHECK(serial.call_count() == parallel.call_count());
}

TEST_CASE("run artifacts and log replay")
{
    const fs::path dir = fresh_dir("artifacts");
    scripts::Script sc;
    sc.program("sphere(segments=8, rings=4)\n");
    sc.score(6);
    sc.program("sphere(segments=12, rings=6)\n");
    sc.score(9);
    GpsGraph first;
    {
        Session s(sc.backend, scripts::roles(), scripts::small_options(1, 3, 9), dir);
        first = model_shape(s, scripts::bounded_graph({"ball"})).graph;
    }
    for (int t = 0; t < 2; ++t)
    {
        const fs::path iter = dir / "node" / "ball" / "path1" / fmt::format("iter{}", t);
        CHECK(fs::exists(iter / "program.dsl"));
        CHECK(fs::exists(iter / "eval.json"));
        for (const auto& v: view_names())
            CHECK(fs::exists(iter / fmt::format("render_{}.png", v)));
    }
    CHECK(slurp(dir / "node" / "ball" / "path1" / "iter1" / "program.dsl") == "sphere(segments=12, rings=6)\n");
    CHECK(contains(slurp(dir / "node" / "ball" / "path1" / "iter0" / "eval.json"), "\"score\":6"));

    auto replay = ScriptedBackend::load(dir / "run_log.jsonl");
    CHECK(replay.remaining() == 4);
    CHECK(replay.order_independent());
    Session s(replay, scripts::roles(), scripts::small_options(1, 3, 9));
    CHECK(model_shape(s, scripts::bounded_graph({"ball"})).graph == first);
    CHECK(replay.remaining() == 0);
    fs::remove_all(dir);
}

TEST_CASE("edit reply sections")
{
    const auto sections = parse_edit_reply("Sure.\n## seat\n```python\n# comment\ncube()\n```\n## `legs`:\ntext\n```\ncylinder()\n```\n```\nignored()\n```\n");
    REQUIRE(sections.size() == 2);
    CHECK(sections[0] == std::pair<std::string, std::string>{"seat", "# comment\ncube()\n"});
    CHECK(sections[1] == std::pair<std::string, std::string>{"legs", "cylinder()\n"});
}

TEST_CASE("edit_shape")
{
    GpsGraph g = scripts::bounded_graph({"a", "b", "c"});
    g.nodes[0].code = "cube()\n";
    g.nodes[1].code = "sphere(segments=8, rings=4)\n";
    g.nodes[2].code = "cylinder(vertices=8)\n";

    SUBCASE("no change")
    {
        scripts::Script sc;
        sc.coder("## a\n```\ncube()\n```\n## b\n```\nsphere(segments=8, rings=4)\n```\n");
        Session s(sc.backend, scripts::roles(), scripts::small_options());
        const auto r = edit_shape(s, g, "no change");
        CHECK(r.graph == g);
        CHECK(r.changed.empty());
        CHECK(contains(sc.backend.calls()[0].messages[1].text, "sphere(segments=8, rings=4)"));
    }
    SUBCASE("one node edited")
    {
        scripts::Script sc;
        sc.coder("## b\n```\nsphere(segments=16, rings=8)\n```\n");
        Session s(sc.backend, scripts::roles(), scripts::small_options());
        const auto r = edit_shape(s, g, "make b smoother");
        REQUIRE(r.changed == std::vector<std::string>{"b"});
        int differing = 0;
        for (std::size_t i = 0; i < 3; ++i)
            differing += r.graph.nodes[i].code != g.nodes[i].code;
        CHECK(differing == 1);
        CHECK(r.graph.nodes[1].code == "sphere(segments=16, rings=8)\n");
    }
    SUBCASE("syntax error keeps the old program")
    {
        scripts::Script sc;
        sc.coder("## c\n```\ncylinder(vertices=8\n```\n## ghost\n```\ncube()\n```\n");
        Session s(sc.backend, scripts::roles(), scripts::small_options());
        const auto r = edit_shape(s, g, "break it");
        CHECK(r.graph == g);
        REQUIRE(r.failures.size() == 1);
        CHECK(r.failures[0].node == "c");
        CHECK(contains(shapecraft::program::render(r.failures[0].diagnostics), "unbalanced parenthesis"));
        REQUIRE(s.warnings().size() == 1);
        CHECK(contains(s.warnings()[0], "ghost"));
    }
    SUBCASE("needs code")
    {
        scripts::Script sc;
        Session s(sc.backend, scripts::roles(), scripts::small_options());
        CHECK_THROWS_AS(edit_shape(s, scripts::bounded_graph({"x"}), "anything"), AgentError);
        CHECK(sc.backend.call_count() == 0);
    }
}

TEST_CASE("sampling config validation")
{
    SamplingConfig c;
    CHECK_NOTHROW(validate(c));
    CHECK(c.M == 3);
    CHECK(c.T == 3);
    CHECK(c.s_tau == 9.0);
    CHECK(c.N == 2);
    CHECK(c.temperature == 0.5);
    c.M = 0;
    CHECK_THROWS_AS(validate(c), AgentError);
    c = {};
    c.s_tau = 11;
    CHECK_THROWS_AS(validate(c), AgentError);
    c = {};
    c.N = -1;
    CHECK_THROWS_AS(validate(c), AgentError);
}
