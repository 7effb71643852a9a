// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/agents/agents.hpp"

#include "shapecraft/agents/prompts.hpp"
#include "shapecraft/program/builtins.hpp"
#include "shapecraft/program/parser.hpp"
#include "shapecraft/util/fences.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <future>
#include <json.hpp>

namespace shapecraft::agents
{

using json = nlohmann::ordered_json;
using llm::ChatMessage;
using llm::Role;
using program::Diagnostic;
using program::Severity;

namespace
{

constexpr int max_parse_attempts = 3;
constexpr int max_eval_reasks = 3;

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string with_newline(std::string s)
{
    if (!s.empty() && s.back() != '\n')
        s.push_back('\n');
    return s;
}

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

// Runs f(0..n-1), concurrently when allowed, and returns results in index order.
template <class F>
auto run_all(bool parallel, std::size_t n, F f) -> std::vector<decltype(f(std::size_t{0}))>
{
    using R = decltype(f(std::size_t{0}));
    std::vector<R> out;
    out.reserve(n);
    if (!parallel || n < 2)
    {
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(f(i));
        return out;
    }
    std::vector<std::future<R>> futures;
    futures.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        futures.push_back(std::async(std::launch::async, f, i));
    for (auto& fut: futures)
        fut.wait();
    for (auto& fut: futures)
        out.push_back(fut.get());
    return out;
}

std::vector<render::Image> render_views(const geometry::Mesh& mesh, int size)
{
    std::vector<render::Image> out;
    for (const auto& cam: render::preset_cameras())
        out.push_back(render::render(std::span<const geometry::Mesh>(&mesh, 1), cam, size));
    return out;
}

void write_views(const Session& s, const std::filesystem::path& dir, const std::vector<render::Image>& images)
{
    for (std::size_t i = 0; i < images.size(); ++i)
        s.write(dir / fmt::format("render_{}.png", view_names()[i]), render::encode_png(images[i]));
}

// One iteration's result inside a refinement path.
struct Outcome
{
    int score = 0;
    std::string feedback;
    std::string diagnostics;  // rendered interpreter output, fed back verbatim
    bool compiled = false;
    bool evaluated = false;
};

struct PathRun
{
    PathTrace trace;
    std::optional<std::string> best_code;
};

// Iterates one path whose conversation already ends with the Coder's first
// reply: evaluate, keep the best, stop at the threshold, otherwise refine.
PathRun run_path(Session& s, const std::string& thread, std::vector<ChatMessage> conversation, int path, int iterations,
                 double s_tau, std::optional<double> temperature,
                 const std::function<Outcome(const std::string& code, int t)>& attempt,
                 const std::function<std::string(const Outcome&)>& refine_text)
{
    PathRun run;
    run.trace.path = path;
    run.trace.coder_calls = 1;
    for (int t = 0; t < iterations; ++t)
    {
        auto block = llm::extract_code_block(conversation.back().text);
        Outcome o = attempt(block.text, t);
        if (block.warning)
            o.diagnostics = program::render(*block.warning) + "\n" + o.diagnostics;
        run.trace.scores.push_back(o.score);
        run.trace.compiled.push_back(o.compiled);
        run.trace.evaluator_calls += o.evaluated;
        if (o.score > run.trace.best_score)
        {
            run.trace.best_score = o.score;
            run.trace.best_iteration = t;
            run.best_code = block.text;
        }
        if (o.score >= s_tau)
        {
            run.trace.stopped_early = true;
            break;
        }
        if (t + 1 == iterations)
            break;
        conversation.push_back({Role::User, refine_text(o), {}});
        conversation.push_back({Role::Assistant, s.ask(Agent::Coder, thread, conversation, temperature), {}});
        ++run.trace.coder_calls;
    }
    return run;
}

std::string diagnostics_block(const Outcome& o)
{
    if (o.diagnostics.empty())
        return "The program ran without interpreter messages.\n";
    return "Interpreter output:\n" + with_newline(o.diagnostics);
}

// Executes a bounding-box program and checks the single-box rule.
struct BoxResult
{
    std::optional<gps::BoundingVolume> bounds;
    std::vector<Diagnostic> diagnostics;
};

BoxResult run_bbox_program(const std::string& code, const program::ExecutionLimits& limits)
{
    BoxResult out;
    const auto parsed = program::parse(code);
    if (parsed.program)
    {
        int boxes = 0;
        for (const auto& st: parsed.program->statements)
            if (st.callee == "cube_bounding_box" && ++boxes == 2)
                out.diagnostics.push_back(
                    {st.line, Severity::Error,
                     "only one cube_bounding_box call is allowed per node; use a single box that encloses the whole part"});
        if (boxes == 0)
        {
            const int line = parsed.program->statements.empty() ? 1 : parsed.program->statements.back().line;
            out.diagnostics.push_back({line, Severity::Error, "the program must create the node's box with cube_bounding_box"});
        }
        if (!out.diagnostics.empty())
            return out;
    }
    auto r = program::run_source(code, limits);
    out.diagnostics = std::move(r.diagnostics);
    if (!r.ok())
        return out;
    const auto& objects = r.scene->objects;
    const int last_line = parsed.program && !parsed.program->statements.empty() ? parsed.program->statements.back().line : 1;
    if (objects.size() != 1 || objects[0].builtin != "cube_bounding_box")
    {
        out.diagnostics.push_back({last_line, Severity::Error,
                                   fmt::format("the program must leave exactly one object, the node's bounding box (found {})",
                                               objects.size())});
        return out;
    }
    const auto b = gps::BoundingVolume::from_aabb(geometry::compute_aabb(objects[0].mesh));
    if (!gps::is_valid(b))
    {
        out.diagnostics.push_back({last_line, Severity::Error, "the bounding box must have a positive size along every axis"});
        return out;
    }
    out.bounds = b;
    return out;
}

gps::GpsGraph bounded_only(const gps::GpsGraph& graph)
{
    gps::GpsGraph out;
    out.root_summary = graph.root_summary;
    for (const auto& n: graph.nodes)
        if (n.bounds)
            out.nodes.push_back(n);
    return out;
}

std::string object_line(const gps::GpsGraph& graph)
{
    return graph.root_summary.empty() ? std::string("(unnamed object)") : graph.root_summary;
}

gps::GpsGraph generate_bboxes_in(Session& s, gps::GpsGraph graph, const std::set<std::string>* only,
                                 const std::string& prefix)
{
    std::vector<std::size_t> targets;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i)
        if (only == nullptr || only->count(graph.nodes[i].name))
            targets.push_back(i);
    if (targets.empty())
        return graph;

    const auto& opts = s.options();
    const std::string overview = gps::graph_overview(graph);
    const std::string system = render_prompt("bbox_system", {});

    // Every initial program first, so refinement renders see all boxes.
    struct Start
    {
        std::vector<ChatMessage> conversation;
        BoxResult box;
    };
    auto starts = run_all(s.concurrent(), targets.size(), [&](std::size_t k) {
        const auto& node = graph.nodes[targets[k]];
        Start st;
        st.conversation = {{Role::System, system, {}},
                           {Role::User,
                            render_prompt("bbox_node", {{"object", object_line(graph)}, {"overview", overview}, {"node", node.name}}),
                            {}}};
        st.conversation.push_back(
            {Role::Assistant, s.ask(Agent::Coder, fmt::format("{}/{}", prefix, node.name), st.conversation), {}});
        st.box = run_bbox_program(llm::extract_code_block(st.conversation.back().text).text, opts.exec.limits);
        return st;
    });

    gps::GpsGraph context = graph;
    for (std::size_t k = 0; k < targets.size(); ++k)
        context.nodes[targets[k]].bounds = starts[k].box.bounds;

    const auto cameras = render::preset_cameras();
    auto results = run_all(s.concurrent(), targets.size(), [&](std::size_t k) -> std::optional<gps::BoundingVolume> {
        const auto& node = graph.nodes[targets[k]];
        const std::string thread = fmt::format("{}/{}", prefix, node.name);
        std::vector<std::optional<gps::BoundingVolume>> candidates;

        auto attempt = [&](const std::string& code, int t) {
            const std::filesystem::path dir = std::filesystem::path(prefix) / node.name / fmt::format("iter{}", t);
            s.write(dir / "program.dsl", code);
            Outcome o;
            const BoxResult box = t == 0 ? starts[k].box : run_bbox_program(code, opts.exec.limits);
            candidates.push_back(box.bounds);
            o.diagnostics = program::render(box.diagnostics);
            if (box.bounds)
            {
                o.compiled = true;
                gps::GpsGraph view = context;
                view.nodes[targets[k]].bounds = box.bounds;
                view = bounded_only(view);
                std::vector<render::Image> images;
                std::vector<render::LegendEntry> legend;
                for (const auto& cam: cameras)
                {
                    auto r = render::render_bboxes(view, cam, opts.image_size);
                    images.push_back(std::move(r.image));
                    legend = std::move(r.legend);
                }
                write_views(s, dir, images);
                std::string color;
                for (const auto& e: legend)
                    if (e.node == node.name)
                        color = e.color_name;
                const std::string ctx = fmt::format(
                    "The images show bounding boxes for the parts of: {}\n"
                    "Under review is the box of `{}`, drawn in {}. Its placement note: {}\n"
                    "Colour key:\n{}\nProgram for `{}`:\n```\n{}```\n",
                    object_line(graph), node.name, color, node.positional_desc, render::legend_text(legend), node.name,
                    with_newline(code));
                try
                {
                    const EvalReport rep = evaluate(s, thread + "/eval", images, ctx, Rubric::BoundingBox);
                    o.score = rep.score;
                    o.feedback = rep.feedback;
                }
                catch (const AgentError& e)
                {
                    s.warn(fmt::format("node '{}': bounding box evaluation failed, scored 0: {}", node.name, e.what()));
                    o.feedback = "The review could not be read.";
                }
                o.evaluated = true;
            }
            else
                o.feedback = "The program did not produce a valid box, so nothing was rendered.";
            s.write(dir / "eval.json", dump({{"score", o.score}, {"feedback", o.feedback}, {"diagnostics", o.diagnostics},
                                             {"compiled", o.compiled}}) +
                                           "\n");
            return o;
        };
        auto refine = [&](const Outcome& o) {
            return render_prompt("bbox_refine", {{"score", std::to_string(o.score)},
                                                 {"feedback", o.feedback},
                                                 {"diagnostics", diagnostics_block(o)},
                                                 {"node", node.name}});
        };
        const PathRun run = run_path(s, thread, starts[k].conversation, 1, opts.bbox_iterations, opts.sampling.s_tau,
                                     std::nullopt, attempt, refine);
        if (run.trace.best_iteration)
            return candidates[static_cast<std::size_t>(*run.trace.best_iteration)];
        for (const auto& c: candidates)
            if (c)
                return c;
        return std::nullopt;
    });

    for (std::size_t k = 0; k < targets.size(); ++k)
    {
        auto& node = graph.nodes[targets[k]];
        if (results[k])
            node.bounds = results[k];
        else
        {
            node.bounds = gps::BoundingVolume{{0, 0, 0}, {2, 2, 2}};
            s.warn(fmt::format("node '{}': no valid bounding box after {} rounds; using a 2x2x2 box at the origin",
                               node.name, opts.bbox_iterations));
        }
    }
    return graph;
}

// The previous Parser answer rebuilt from the graph, for the update conversation.
std::string previous_answer(const gps::GpsGraph& graph)
{
    std::string out = fmt::format("- root: {}\n\n```jsonl\n", object_line(graph));
    for (const auto& n: graph.nodes)
    {
        json obj;
        obj["node"] = n.name;
        obj["shape_description"] = n.geometric_desc;
        obj["bounding_volume"] = n.positional_desc;
        out += dump(obj) + "\n";
    }
    return out + "```\n";
}

std::string programs_text(const gps::GpsGraph& graph)
{
    std::string out;
    for (const auto& n: graph.nodes)
    {
        const bool has_code = n.code && !trim(*n.code).empty();
        out += fmt::format("## {}\n```\n{}```\n\n", n.name,
                           has_code ? with_newline(*n.code) : std::string("# no program yet; the part is a plain box\n"));
    }
    return out;
}

} // namespace

const std::vector<std::string>& view_names()
{
    static const std::vector<std::string> names{"front_left", "front_right", "top_rear"};
    return names;
}

std::optional<EvalReport> parse_evaluation(std::string_view reply, std::string* reason)
{
    auto fail = [&](std::string why) -> std::optional<EvalReport> {
        if (reason)
            *reason = std::move(why);
        return std::nullopt;
    };
    std::string text;
    if (auto block = util::find_fenced_block(reply, {"json"}))
        text = block->body;
    else
    {
        const auto open = reply.find('{');
        const auto close = reply.rfind('}');
        if (open == std::string_view::npos || close == std::string_view::npos || close < open)
            return fail("no JSON object found");
        text = std::string(reply.substr(open, close - open + 1));
    }
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::exception&)
    {
        return fail("the JSON object is malformed");
    }
    if (!doc.is_object())
        return fail("the reply is not a JSON object");
    if (!doc.contains("score") || !doc["score"].is_number())
        return fail("\"score\" is missing or not a number");
    const double raw = doc["score"].get<double>();
    if (!std::isfinite(raw))
        return fail("\"score\" is not finite");
    if (!doc.contains("feedback") || !doc["feedback"].is_string())
        return fail("\"feedback\" is missing or not a string");
    EvalReport r;
    r.score = static_cast<int>(std::lround(std::clamp(raw, -1000.0, 1000.0)));
    r.feedback = doc["feedback"].get<std::string>();
    return r;
}

std::optional<std::string> root_line(std::string_view reply)
{
    std::size_t pos = 0;
    while (pos <= reply.size())
    {
        const auto end = std::min(reply.find('\n', pos), reply.size());
        std::string line = trim(reply.substr(pos, end - pos));
        const auto start = line.find_first_not_of("-*+ \t");
        if (start != std::string::npos)
        {
            std::string body = line.substr(start);
            std::string lower = body;
            std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
            if (lower.rfind("root:", 0) == 0)
            {
                std::string rest = trim(std::string_view(body).substr(5));
                if (!rest.empty())
                    return rest;
            }
        }
        if (end == reply.size())
            break;
        pos = end + 1;
    }
    return std::nullopt;
}

EvalReport evaluate(Session& s, std::string_view thread, const std::vector<render::Image>& images,
                    std::string_view context, Rubric rubric)
{
    if (images.empty())
        throw AgentError(AgentErrc::InvalidInput, "evaluation needs at least one image");
    ChatMessage request{Role::User,
                        render_prompt("eval", {{"context", with_newline(std::string(context))},
                                               {"criteria", prompt_template(rubric == Rubric::Shape ? "eval_criteria_shape"
                                                                                                    : "eval_criteria_bbox")}}),
                        {}};
    for (const auto& img: images)
        request.images.push_back(render::encode_png(img));
    std::vector<ChatMessage> conversation{std::move(request)};

    std::string reason;
    for (int attempt = 0; attempt <= max_eval_reasks; ++attempt)
    {
        const std::string reply = s.ask(Agent::Evaluator, thread, conversation);
        if (auto report = parse_evaluation(reply, &reason))
        {
            if (report->score < 0 || report->score > 10)
            {
                const int clamped = std::clamp(report->score, 0, 10);
                s.warn(fmt::format("evaluator score {} clamped to {}", report->score, clamped));
                report->score = clamped;
            }
            return *report;
        }
        conversation.push_back({Role::Assistant, reply, {}});
        conversation.push_back({Role::User, render_prompt("reask_eval", {{"reason", reason}}), {}});
    }
    throw AgentError(AgentErrc::UnparseableEvaluation,
                     fmt::format("evaluator reply unreadable after {} attempts: {}", max_eval_reasks + 1, reason));
}

gps::GpsGraph parse_shape(Session& s, std::string_view prompt)
{
    const std::string x = trim(prompt);
    if (x.empty())
        throw AgentError(AgentErrc::InvalidInput, "the shape description is empty");
    std::vector<ChatMessage> conversation{{Role::User, render_prompt("parse", {{"shape", x}}), {}}};
    std::string last;
    for (int attempt = 1; attempt <= max_parse_attempts; ++attempt)
    {
        const std::string reply = s.ask(Agent::Parser, "parse", conversation);
        auto parsed = gps::parse_graph_jsonl(reply);
        if (parsed.graph)
        {
            for (const auto& d: parsed.diagnostics)
                s.warn("parse: " + program::render(d));
            gps::GpsGraph graph = std::move(*parsed.graph);
            if (auto root = root_line(reply))
                graph.root_summary = *root;
            else if (graph.root_summary.empty())
                graph.root_summary = x.substr(0, x.find('\n'));
            s.log("parsed", {{"nodes", std::to_string(graph.nodes.size())}, {"attempt", std::to_string(attempt)}});
            return graph;
        }
        last = program::render(parsed.diagnostics);
        conversation.push_back({Role::Assistant, reply, {}});
        conversation.push_back({Role::User, render_prompt("reask_graph", {{"diagnostics", last}}), {}});
    }
    throw AgentError(AgentErrc::UnparseableGraph,
                     fmt::format("no usable graph after {} attempts:\n{}", max_parse_attempts, last));
}

gps::GpsGraph generate_bboxes(Session& s, gps::GpsGraph graph, const std::set<std::string>* only)
{
    return generate_bboxes_in(s, std::move(graph), only, "bbox");
}

gps::GpsGraph bootstrap(Session& s, gps::GpsGraph graph, std::string_view prompt, int rounds)
{
    if (rounds < 0)
        throw AgentError(AgentErrc::InvalidConfig, "bootstrap rounds must not be negative");
    const std::string x = trim(prompt);
    const int size = s.options().image_size;
    for (int round = 1; round <= rounds; ++round)
    {
        for (const auto& n: graph.nodes)
            if (!n.bounds)
                throw AgentError(AgentErrc::InvalidInput,
                                 fmt::format("node '{}' has no bounds; generate bounding boxes first", n.name));
        const std::string dir = fmt::format("bootstrap/round{}", round);
        ChatMessage look{Role::User, {}, {}};
        std::string legend;
        for (std::size_t i = 0; i < render::preset_cameras().size(); ++i)
        {
            auto r = render::render_bboxes(graph, render::preset_cameras()[i], size);
            legend = render::legend_text(r.legend);
            look.images.push_back(render::encode_png(r.image));
            s.write(std::filesystem::path(dir) / fmt::format("render_{}.png", view_names()[i]), look.images.back());
        }
        look.text = render_prompt("dag_feedback", {{"object", object_line(graph)}, {"legend", legend}});
        const std::string feedback = s.ask(Agent::Evaluator, dir + "/eval", {look});
        s.write(std::filesystem::path(dir) / "feedback.txt", feedback);

        const std::vector<ChatMessage> update{
            {Role::User, render_prompt("parse", {{"shape", x}}), {}},
            {Role::Assistant, previous_answer(graph), {}},
            {Role::User, render_prompt("dag_update", {{"feedback", trim(feedback)}}), {}},
        };
        const std::string reply = s.ask(Agent::Parser, dir + "/parse", update);
        auto parsed = gps::parse_graph_jsonl(reply);
        if (!parsed.graph)
        {
            s.warn(fmt::format("bootstrap round {}: updated graph unusable, keeping the previous one:\n{}", round,
                               program::render(parsed.diagnostics)));
            continue;
        }
        gps::GpsGraph next = std::move(*parsed.graph);
        if (auto root = root_line(reply))
            next.root_summary = *root;
        else if (next.root_summary.empty())
            next.root_summary = graph.root_summary;

        std::set<std::string> changed;
        for (auto& n: next.nodes)
        {
            const gps::GpsNode* old = graph.find(n.name);
            if (old && old->geometric_desc == n.geometric_desc && old->positional_desc == n.positional_desc && old->bounds)
            {
                n.bounds = old->bounds;
                if (!n.code)
                    n.code = old->code;
            }
            else if (!n.bounds)
                changed.insert(n.name);
        }
        s.log("bootstrap", {{"round", std::to_string(round)}, {"nodes", std::to_string(next.nodes.size())},
                            {"regenerated", std::to_string(changed.size())}});
        graph = generate_bboxes_in(s, std::move(next), &changed, dir + "/bbox");
    }
    return graph;
}

ModelResult model_shape(Session& s, gps::GpsGraph graph)
{
    const auto& opts = s.options();
    const auto& cfg = opts.sampling;
    validate(cfg);
    for (const auto& n: graph.nodes)
        if (!n.bounds)
            throw AgentError(AgentErrc::InvalidInput,
                             fmt::format("node '{}' has no bounds; generate bounding boxes first", n.name));

    const std::string overview = gps::graph_overview(graph);
    const std::string system = render_prompt("node_system", {{"library", program::library_reference()}});
    const std::size_t M = static_cast<std::size_t>(cfg.M);

    // Workers see immutable node snapshots; results merge by (node, path).
    auto runs = run_all(s.concurrent(), graph.nodes.size() * M, [&](std::size_t job) {
        const gps::GpsNode& node = graph.nodes[job / M];
        const int m = static_cast<int>(job % M) + 1;
        const std::string thread = fmt::format("node/{}/path{}", node.name, m);

        std::vector<ChatMessage> conversation{
            {Role::System, system, {}},
            {Role::User,
             render_prompt("node_request", {{"overview", overview}, {"node", node.name}, {"shape", node.geometric_desc}}),
             {}}};
        conversation.push_back({Role::Assistant, s.ask(Agent::Coder, thread, conversation, cfg.temperature), {}});

        auto attempt = [&](const std::string& code, int t) {
            const std::filesystem::path dir = std::filesystem::path("node") / node.name / fmt::format("path{}", m) /
                                              fmt::format("iter{}", t);
            s.write(dir / "program.dsl", code);
            Outcome o;
            if (trim(code).empty())
            {
                o.diagnostics = "line 1: error: the reply contained no program\n";
                o.feedback = "There was no program to run.";
            }
            else
            {
                gps::GpsNode candidate = node;
                candidate.code = code;
                const auto r = executor::execute_node(candidate, opts.exec);
                o.diagnostics = program::render(r.diagnostics);
                if (r.ok())
                {
                    o.compiled = true;
                    const auto images = render_views(*r.mesh, opts.image_size);
                    write_views(s, dir, images);
                    const std::string ctx = fmt::format(
                        "The object: {}\nThe part shown: `{}`\nIntended shape: {}\nPlacement in the object: {}\n"
                        "Program:\n```\n{}```\n",
                        object_line(graph), node.name, node.geometric_desc, node.positional_desc, with_newline(code));
                    try
                    {
                        const EvalReport rep = evaluate(s, thread + "/eval", images, ctx, Rubric::Shape);
                        o.score = rep.score;
                        o.feedback = rep.feedback;
                    }
                    catch (const AgentError& e)
                    {
                        s.warn(fmt::format("node '{}' path {}: evaluation failed, scored 0: {}", node.name, m, e.what()));
                        o.feedback = "The review could not be read.";
                    }
                    o.evaluated = true;
                }
                else
                    o.feedback = "The program failed, so nothing was rendered. Fix the errors below.";
            }
            s.write(dir / "eval.json", dump({{"score", o.score}, {"feedback", o.feedback}, {"diagnostics", o.diagnostics},
                                             {"compiled", o.compiled}}) +
                                           "\n");
            return o;
        };
        auto refine = [&](const Outcome& o) {
            return render_prompt("node_refine", {{"node", node.name},
                                                 {"diagnostics", diagnostics_block(o)},
                                                 {"score", std::to_string(o.score)},
                                                 {"feedback", o.feedback},
                                                 {"shape", node.geometric_desc}});
        };
        return run_path(s, thread, std::move(conversation), m, cfg.T, cfg.s_tau, cfg.temperature, attempt, refine);
    });

    ModelResult result;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i)
    {
        auto& node = graph.nodes[i];
        NodeTrace trace;
        trace.node = node.name;
        const PathRun* best = nullptr;
        for (std::size_t m = 0; m < M; ++m)
        {
            const PathRun& run = runs[i * M + m];
            trace.paths.push_back(run.trace);
            // Strict comparison keeps the lowest path index on ties.
            if (run.best_code && (best == nullptr || run.trace.best_score > best->trace.best_score))
                best = &run;
        }
        if (best)
        {
            trace.selected = best->trace.path;
            node.code = best->best_code;
            node.best_score = best->trace.best_score;
            s.log("selected", {{"node", node.name}, {"path", std::to_string(best->trace.path)},
                               {"score", std::to_string(best->trace.best_score)}});
        }
        else
        {
            node.code.reset();
            node.best_score = 0;
            s.warn(fmt::format("node '{}': every path scored 0; falling back to the default cube", node.name));
        }
        result.traces.push_back(std::move(trace));
    }
    result.graph = std::move(graph);
    return result;
}

std::vector<std::pair<std::string, std::string>> parse_edit_reply(std::string_view reply)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::optional<std::string> current;
    bool in_fence = false;
    bool capturing = false;
    bool captured = false;
    std::string body;
    std::size_t pos = 0;
    while (pos < reply.size())
    {
        const auto end = std::min(reply.find('\n', pos), reply.size());
        const std::string_view line = reply.substr(pos, end - pos);
        pos = end + 1;
        const std::string t = trim(line);
        if (t.rfind("```", 0) == 0)
        {
            if (!in_fence)
            {
                in_fence = true;
                capturing = current && !captured;
                body.clear();
            }
            else
            {
                in_fence = false;
                if (capturing)
                {
                    out.emplace_back(*current, body);
                    captured = true;
                    capturing = false;
                }
            }
            continue;
        }
        if (in_fence)
        {
            if (capturing)
                body.append(line).push_back('\n');
            continue;
        }
        if (t.rfind("##", 0) == 0)
        {
            std::string name = t.substr(t.find_first_not_of('#'));
            name.erase(std::remove(name.begin(), name.end(), '`'), name.end());
            name = trim(name);
            while (!name.empty() && name.back() == ':')
                name.pop_back();
            current = trim(name);
            captured = false;
        }
    }
    if (in_fence && capturing)
        out.emplace_back(*current, body);
    return out;
}

EditResult edit_shape(Session& s, const gps::GpsGraph& graph, std::string_view instruction)
{
    const bool any_code = std::any_of(graph.nodes.begin(), graph.nodes.end(),
                                      [](const gps::GpsNode& n) { return n.code && !trim(*n.code).empty(); });
    if (!any_code)
        throw AgentError(AgentErrc::InvalidInput, "editing needs a graph with at least one node program");
    if (trim(instruction).empty())
        throw AgentError(AgentErrc::InvalidInput, "the edit instruction is empty");

    const std::vector<ChatMessage> conversation{
        {Role::System, render_prompt("node_system", {{"library", program::library_reference()}}), {}},
        {Role::User,
         render_prompt("edit", {{"overview", gps::graph_overview(graph)},
                                {"programs", programs_text(graph)},
                                {"instruction", trim(instruction)}}),
         {}}};
    const std::string reply = s.ask(Agent::Coder, "edit", conversation);

    EditResult result;
    result.graph = graph;
    const auto sections = parse_edit_reply(reply);
    if (sections.empty())
        s.warn("edit: the reply has no `## <part>` sections with code; nothing changed");
    for (const auto& [name, code]: sections)
    {
        gps::GpsNode* node = result.graph.find(name);
        if (node == nullptr)
        {
            s.warn(fmt::format("edit: the reply names unknown part '{}'", name));
            continue;
        }
        if (trim(code) == trim(node->code.value_or("")))
            continue;
        gps::GpsNode candidate = *node;
        candidate.code = code;
        executor::NodeResult r;
        try
        {
            r = executor::execute_node(candidate, s.options().exec);
        }
        catch (const executor::ExecutorError& e)
        {
            r.diagnostics.push_back({1, Severity::Error, e.what()});
        }
        if (!r.ok())
        {
            result.failures.push_back({name, std::move(r.diagnostics)});
            continue;
        }
        node->code = code;
        node->best_score.reset();
        result.changed.push_back(name);
    }
    return result;
}

} // namespace shapecraft::agents
