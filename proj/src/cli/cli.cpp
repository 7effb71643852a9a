// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/cli/cli.hpp"

#include "shapecraft/agents/agents.hpp"
#include "shapecraft/cli/config.hpp"
#include "shapecraft/geometry/errors.hpp"
#include "shapecraft/geometry/mesh_io.hpp"
#include "shapecraft/llm/http_backend.hpp"
#include "shapecraft/llm/scripted_backend.hpp"
#include "shapecraft/metrics/metrics.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <memory>
#include <sstream>

namespace shapecraft::cli
{

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace
{

// Unreadable or corrupt input files.
class InputError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// A failure attributed to one pipeline stage, with the exit code it maps to.
class StageError : public std::runtime_error
{
public:
    StageError(int code, std::string message) : std::runtime_error(std::move(message)), code(code) {}
    int code;
};

int exit_code_for(const std::exception& e)
{
    if (const auto* l = dynamic_cast<const llm::LlmError*>(&e))
        return l->code() == llm::LlmErrc::Auth || l->code() == llm::LlmErrc::InvalidRequest ? Usage : Failure;
    if (const auto* a = dynamic_cast<const agents::AgentError*>(&e))
        return a->code() == agents::AgentErrc::InvalidInput || a->code() == agents::AgentErrc::InvalidConfig ? Usage
                                                                                                            : Failure;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InputError*>(&e))
        return Usage;
    return Failure;
}

template <class F>
auto stage(std::string_view name, F f) -> decltype(f())
{
    try
    {
        return f();
    }
    catch (const StageError&)
    {
        throw;
    }
    catch (const std::exception& e)
    {
        throw StageError(exit_code_for(e), fmt::format("{} stage failed: {}", name, e.what()));
    }
}

// Shared by every subcommand; only the one that parsed fills it.
struct Flags
{
    std::optional<int> m, t, n_bootstrap, img_size, voxel_res, sample_points;
    std::optional<double> s_tau, temperature;
    std::optional<std::uint64_t> seed;
    bool uniform_fit = false, trace = false;
    std::string out, scripted, config;
};

void add_flags(CLI::App& app, Flags& f)
{
    app.add_option("--m", f.m, "paths per node")->check(CLI::PositiveNumber);
    app.add_option("--t", f.t, "refinement iterations per path")->check(CLI::PositiveNumber);
    app.add_option("--s-tau", f.s_tau, "early-stop score threshold (0-10)")->check(CLI::Range(0.0, 10.0));
    app.add_option("--n-bootstrap", f.n_bootstrap, "bootstrap rounds")->check(CLI::NonNegativeNumber);
    app.add_option("--temperature", f.temperature, "sampling temperature for every role")->check(CLI::Range(0.0, 2.0));
    app.add_option("--img-size", f.img_size, "render size in pixels")->check(CLI::Range(16, 4096));
    app.add_option("--voxel-res", f.voxel_res, "IoGT voxel resolution")->check(CLI::Range(8, 1024));
    app.add_option("--sample-points", f.sample_points, "points per mesh for Hausdorff")->check(CLI::PositiveNumber);
    app.add_option("--seed", f.seed, "seed for point sampling");
    app.add_flag("--uniform-fit", f.uniform_fit, "fit parts with one uniform scale instead of per axis");
    app.add_option("--out", f.out, "output directory");
    app.add_option("--scripted", f.scripted, "replay replies from a JSONL transcript instead of calling a backend");
    app.add_flag("--trace", f.trace, "log HTTP traffic to stderr with the API key redacted");
    app.add_option("--config", f.config, "configuration file (default ./shapecraft.json)");
}

Settings resolve(const Flags& f)
{
    Settings s = load_settings(f.config.empty() ? std::nullopt : std::optional<fs::path>(f.config));
    auto& sam = s.options.sampling;
    sam.M = f.m.value_or(sam.M);
    sam.T = f.t.value_or(sam.T);
    sam.s_tau = f.s_tau.value_or(sam.s_tau);
    sam.N = f.n_bootstrap.value_or(sam.N);
    if (f.temperature)
    {
        sam.temperature = *f.temperature;
        for (auto* role: {&s.roles.parser, &s.roles.coder, &s.roles.evaluator})
            role->temperature = *f.temperature;
    }
    s.options.image_size = f.img_size.value_or(s.options.image_size);
    s.voxel_res = f.voxel_res.value_or(s.voxel_res);
    s.sample_points = f.sample_points.value_or(s.sample_points);
    s.seed = f.seed.value_or(s.seed);
    if (f.uniform_fit)
        s.options.exec.fit = executor::FitMode::Uniform;
    agents::validate(sam);
    return s;
}

std::unique_ptr<llm::Backend> make_backend(const Flags& f, const Settings& s, std::ostream& err)
{
    if (!f.scripted.empty())
    {
        if (!fs::is_regular_file(f.scripted))
            throw InputError(fmt::format("cannot read transcript '{}'", f.scripted));
        return std::unique_ptr<llm::Backend>(new llm::ScriptedBackend(llm::ScriptedBackend::load(f.scripted)));
    }
    std::string key = llm::api_key_from_env();
    require_live_backends(s);
    return std::make_unique<llm::HttpBackend>(std::move(key), f.trace ? &err : nullptr);
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw InputError(fmt::format("cannot read '{}'", p.string()));
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& p, std::string_view bytes)
{
    if (p.has_parent_path())
        fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw std::runtime_error(fmt::format("cannot write '{}'", p.string()));
}

gps::GpsGraph read_graph(const fs::path& p)
{
    auto parsed = gps::parse_graph_jsonl(read_file(p));
    if (!parsed.graph)
        throw InputError(fmt::format("'{}' is not a valid graph:\n{}", p.string(), program::render(parsed.diagnostics)));
    return std::move(*parsed.graph);
}

void write_graph(const fs::path& p, const gps::GpsGraph& g) { write_file(p, gps::serialize_graph(g)); }

std::vector<geometry::Mesh> read_mesh(const fs::path& p)
{
    const std::string text = read_file(p);
    try
    {
        return geometry::parse_obj(text);
    }
    catch (const std::exception& e)
    {
        throw InputError(fmt::format("'{}' is not a readable OBJ file: {}", p.string(), e.what()));
    }
}

void write_renders(const fs::path& dir, std::string_view prefix, std::span<const geometry::Mesh> meshes, int size)
{
    std::vector<render::Rgb> colors;
    for (const auto& [name, rgb]: render::distinct_palette(meshes.size()))
        colors.push_back(rgb);
    const auto cams = render::preset_cameras();
    for (std::size_t i = 0; i < cams.size(); ++i)
        render::write_png(dir / fmt::format("{}{}.png", prefix, agents::view_names()[i]),
                          render::render(meshes, cams[i], size, colors));
}

// Assembles, exports and reports. Returns whether the shape compiled.
bool export_shape(const fs::path& dir, std::string_view obj_name, const gps::GpsGraph& graph, const Settings& s,
                  bool renders, std::ostream& out, std::ostream& err)
{
    const auto assembly = executor::assemble(graph, s.options.exec);
    geometry::write_obj(dir / obj_name, assembly.components);
    if (renders && !assembly.mesh.empty())
        write_renders(dir, "render_", assembly.components, s.options.image_size);
    if (!assembly.complete())
        err << assembly.failure_report();
    const bool compiled = metrics::outcome_of(assembly).ok();
    out << fmt::format("wrote {} ({} of {} parts)\n", (dir / obj_name).string(), assembly.components.size(),
                       graph.nodes.size());
    return compiled;
}

void write_summary(const fs::path& dir, std::string_view command, bool compiled, const gps::GpsGraph& graph,
                   const agents::Session& session)
{
    json j;
    j["command"] = command;
    j["compiled"] = compiled;
    j["nodes"] = graph.nodes.size();
    j["warnings"] = session.warnings();
    j["calls"] = {{"parser", session.calls(agents::Agent::Parser)},
                  {"coder", session.calls(agents::Agent::Coder)},
                  {"evaluator", session.calls(agents::Agent::Evaluator)}};
    json scores = json::object();
    for (const auto& n: graph.nodes)
        if (n.best_score)
            scores[n.name] = *n.best_score;
    j["scores"] = scores;
    write_file(dir / "summary.json", j.dump(2) + "\n");
}

void report_unused(const llm::Backend& backend, std::ostream& err)
{
    if (const auto* sb = dynamic_cast<const llm::ScriptedBackend*>(&backend); sb && sb->remaining() > 0)
        err << fmt::format("note: {} scripted replies were not used\n", sb->remaining());
}

void print_warnings(const agents::Session& session, std::ostream& err)
{
    for (const auto& w: session.warnings())
        err << "warning: " << w << '\n';
}

fs::path graph_input(const fs::path& p) { return fs::is_directory(p) ? p / "graph.gps.jsonl" : p; }

fs::path out_dir(const Flags& f, const fs::path& input)
{
    if (!f.out.empty())
        return f.out;
    const fs::path parent = fs::is_directory(input) ? input : input.parent_path();
    return parent.empty() ? fs::path(".") : parent;
}

// Latest edit version in a run directory, 0 for the original graph.
int latest_version(const fs::path& dir)
{
    int k = 0;
    while (fs::exists(dir / fmt::format("graph.v{}.gps.jsonl", k + 1)))
        ++k;
    return k;
}

fs::path graph_version(const fs::path& dir, int k)
{
    return k == 0 ? dir / "graph.gps.jsonl" : dir / fmt::format("graph.v{}.gps.jsonl", k);
}

int cmd_generate(const Flags& f, const std::string& prompt, bool full, std::ostream& out, std::ostream& err)
{
    const Settings s = stage("config", [&] { return resolve(f); });
    auto backend = stage("backend", [&] { return make_backend(f, s, err); });
    const fs::path dir = f.out.empty() ? fs::path("shapecraft_run") : fs::path(f.out);
    fs::create_directories(dir);
    fs::remove(dir / "run_log.jsonl");
    write_file(dir / "prompt.txt", prompt + "\n");
    agents::Session session(*backend, s.roles, s.options, dir);

    auto graph = stage("parse", [&] { return agents::parse_shape(session, prompt); });
    write_graph(dir / "graph.parsed.gps.jsonl", graph);
    graph = stage("bboxes", [&] { return agents::generate_bboxes(session, graph); });
    write_graph(dir / "graph.bboxes.gps.jsonl", graph);
    graph = stage("bootstrap", [&] { return agents::bootstrap(session, graph, prompt, s.options.sampling.N); });
    write_graph(dir / "graph.bootstrap.gps.jsonl", graph);
    if (!full)
    {
        write_graph(dir / "graph.gps.jsonl", graph);
        print_warnings(session, err);
        report_unused(*backend, err);
        out << fmt::format("wrote {} ({} parts with bounding boxes)\n", (dir / "graph.gps.jsonl").string(),
                           graph.nodes.size());
        return Success;
    }
    graph = stage("model", [&] { return agents::model_shape(session, graph).graph; });
    write_graph(dir / "graph.gps.jsonl", graph);
    const bool compiled = stage("assemble", [&] { return export_shape(dir, "assembled.obj", graph, s, true, out, err); });
    write_summary(dir, "generate", compiled, graph, session);
    print_warnings(session, err);
    report_unused(*backend, err);
    if (!compiled)
    {
        err << "error: the shape did not compile\n";
        return Failure;
    }
    return Success;
}

int cmd_model(const Flags& f, const fs::path& input, std::ostream& out, std::ostream& err)
{
    const Settings s = stage("config", [&] { return resolve(f); });
    const auto graph_in = stage("input", [&] { return read_graph(graph_input(input)); });
    auto backend = stage("backend", [&] { return make_backend(f, s, err); });
    const fs::path dir = out_dir(f, input);
    agents::Session session(*backend, s.roles, s.options, dir);
    const auto graph = stage("model", [&] { return agents::model_shape(session, graph_in).graph; });
    write_graph(dir / "graph.gps.jsonl", graph);
    const bool compiled = stage("assemble", [&] { return export_shape(dir, "assembled.obj", graph, s, true, out, err); });
    write_summary(dir, "model", compiled, graph, session);
    print_warnings(session, err);
    report_unused(*backend, err);
    return compiled ? Success : Failure;
}

int cmd_assemble(const Flags& f, const fs::path& input, std::ostream& out, std::ostream& err)
{
    const Settings s = stage("config", [&] { return resolve(f); });
    const auto graph = stage("input", [&] { return read_graph(graph_input(input)); });
    const fs::path dir = out_dir(f, input);
    fs::create_directories(dir);
    const bool compiled = stage("assemble", [&] { return export_shape(dir, "assembled.obj", graph, s, false, out, err); });
    return compiled ? Success : Failure;
}

int cmd_render(const Flags& f, const fs::path& input, std::ostream& out)
{
    const Settings s = stage("config", [&] { return resolve(f); });
    const fs::path mesh_path = fs::is_directory(input) ? input / "assembled.obj" : input;
    const auto meshes = stage("input", [&] { return read_mesh(mesh_path); });
    const fs::path dir = out_dir(f, input);
    fs::create_directories(dir);
    stage("render", [&] { write_renders(dir, "render_", meshes, s.options.image_size); });
    out << fmt::format("wrote {} views to {}\n", agents::view_names().size(), dir.string());
    return Success;
}

std::vector<std::string> read_questions(const fs::path& p)
{
    std::vector<std::string> qs;
    std::istringstream in(read_file(p));
    std::string line;
    while (std::getline(in, line))
    {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos)
            qs.push_back(line);
    }
    return qs;
}

int cmd_metrics(const Flags& f, const fs::path& gen_path, const fs::path& gt_path, const std::string& questions,
                const std::vector<std::string>& runs, std::ostream& out, std::ostream& err)
{
    const Settings s = stage("config", [&] { return resolve(f); });
    const auto gen_parts = stage("input", [&] { return read_mesh(gen_path); });
    const auto gt_parts = stage("input", [&] { return read_mesh(gt_path); });
    const auto gen = geometry::concatenate(gen_parts);
    const auto gt = geometry::concatenate(gt_parts);

    json report;
    report["hausdorff"] = stage("hausdorff", [&] {
        return metrics::hausdorff(metrics::sample_points(gen, s.sample_points, s.seed),
                                  metrics::sample_points(gt, s.sample_points, s.seed));
    });
    report["iogt"] = stage("iogt", [&] { return metrics::iogt(gen, gt, s.voxel_res); });
    report["clip"] = "unavailable";
    if (!runs.empty())
    {
        report["compile_rate"] = stage("compile_rate", [&] {
            std::vector<metrics::RunOutcome> outcomes;
            for (const auto& r: runs)
            {
                json summary;
                try
                {
                    summary = json::parse(read_file(fs::path(r) / "summary.json"));
                }
                catch (const json::exception& e)
                {
                    throw InputError(fmt::format("'{}/summary.json' is not valid JSON: {}", r, e.what()));
                }
                const bool ok = summary.value("compiled", false);
                outcomes.push_back({ok, ok});
            }
            return metrics::compile_rate(outcomes);
        });
    }
    if (!questions.empty())
    {
        const auto qs = stage("input", [&] { return read_questions(questions); });
        auto backend = stage("backend", [&] { return make_backend(f, s, err); });
        const auto result = stage("vqa", [&] {
            std::vector<render::Image> views;
            for (const auto& cam: render::preset_cameras())
                views.push_back(render::render(gen_parts, cam, s.options.image_size));
            llm::BackendConfig cfg = s.roles.evaluator;
            cfg.agent = "evaluator";
            return metrics::vqa_pass_rate(views, qs, *backend, cfg);
        });
        json answers = json::array();
        for (auto a: result.answers)
            answers.push_back(metrics::answer_name(a));
        report["vqa"] = {{"pass_rate", result.pass_rate}, {"answers", answers}};
    }
    report["settings"] = {{"sample_points", s.sample_points}, {"voxel_res", s.voxel_res}, {"seed", s.seed}};
    const std::string text = report.dump(2) + "\n";
    if (!f.out.empty())
        write_file(fs::path(f.out) / "metrics.json", text);
    out << text;
    return Success;
}

int cmd_edit(const Flags& f, const fs::path& dir, const std::string& instruction, std::ostream& out, std::ostream& err)
{
    const Settings s = stage("config", [&] { return resolve(f); });
    if (!fs::is_directory(dir))
        throw StageError(Usage, fmt::format("input stage failed: '{}' is not a run directory", dir.string()));
    const int k = latest_version(dir);
    const auto graph = stage("input", [&] { return read_graph(graph_version(dir, k)); });
    auto backend = stage("backend", [&] { return make_backend(f, s, err); });
    agents::Session session(*backend, s.roles, s.options, dir);
    const auto result = stage("edit", [&] { return agents::edit_shape(session, graph, instruction); });
    for (const auto& fail: result.failures)
        err << fmt::format("node '{}' kept its previous program:\n{}", fail.node, program::render(fail.diagnostics));
    write_graph(graph_version(dir, k + 1), result.graph);
    const std::string obj = fmt::format("assembled.v{}.obj", k + 1);
    const bool compiled = stage("assemble", [&] { return export_shape(dir, obj, result.graph, s, false, out, err); });
    out << fmt::format("changed: {}\n", result.changed.empty() ? std::string("(none)") : fmt::format("{}", fmt::join(result.changed, ", ")));
    print_warnings(session, err);
    report_unused(*backend, err);
    return compiled ? Success : Failure;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Text to 3D shapes through agent-written shape programs", "shapecraft"};
    app.require_subcommand(1);
    Flags f;
    std::string prompt, input, input2, instruction, questions;
    std::vector<std::string> runs;

    auto* gen = app.add_subcommand("generate", "run the whole pipeline for a shape description");
    gen->add_option("prompt", prompt, "shape description")->required();
    add_flags(*gen, f);
    auto* bbx = app.add_subcommand("bboxes", "parse a description and place bounding boxes, with bootstrap rounds");
    bbx->add_option("prompt", prompt, "shape description")->required();
    add_flags(*bbx, f);
    auto* mdl = app.add_subcommand("model", "model every part of a graph with bounding boxes");
    mdl->add_option("graph", input, "graph file or run directory")->required();
    add_flags(*mdl, f);
    auto* asm_ = app.add_subcommand("assemble", "execute a graph and export the assembled OBJ");
    asm_->add_option("graph", input, "graph file or run directory")->required();
    add_flags(*asm_, f);
    auto* rnd = app.add_subcommand("render", "render an OBJ from the three preset views");
    rnd->add_option("mesh", input, "OBJ file or run directory")->required();
    add_flags(*rnd, f);
    auto* met = app.add_subcommand("metrics", "compare a generated mesh with a ground truth mesh");
    met->add_option("generated", input, "generated OBJ")->required();
    met->add_option("ground_truth", input2, "ground truth OBJ")->required();
    met->add_option("--questions", questions, "yes/no questions, one per line, asked about the generated mesh");
    met->add_option("--runs", runs, "run directories whose summaries feed the compile rate");
    add_flags(*met, f);
    auto* edt = app.add_subcommand("edit", "apply a text instruction to the programs of a finished run");
    edt->add_option("run_dir", input, "run directory")->required();
    edt->add_option("instruction", instruction, "what to change")->required();
    add_flags(*edt, f);

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try
    {
        app.parse(argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? Success : Usage;
    }

    try
    {
        if (*gen)
            return cmd_generate(f, prompt, true, out, err);
        if (*bbx)
            return cmd_generate(f, prompt, false, out, err);
        if (*mdl)
            return cmd_model(f, input, out, err);
        if (*asm_)
            return cmd_assemble(f, input, out, err);
        if (*rnd)
            return cmd_render(f, input, out);
        if (*met)
            return cmd_metrics(f, input, input2, questions, runs, out, err);
        return cmd_edit(f, input, instruction, out, err);
    }
    catch (const StageError& e)
    {
        err << "error: " << e.what() << '\n';
        return e.code;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

} // namespace shapecraft::cli
