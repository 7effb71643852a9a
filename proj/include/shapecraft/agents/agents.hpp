// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/agents/session.hpp"
#include "shapecraft/gps/graph.hpp"
#include "shapecraft/render/render.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace shapecraft::agents
{

struct EvalReport
{
    int score = 0;  // 0..10
    std::string feedback;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

enum class Rubric
{
    Shape,        // all five criteria
    BoundingBox,  // without visual quality
};

/// Names of the preset views, matching render::preset_cameras.
const std::vector<std::string>& view_names();

/// Reads `{"score": int, "feedback": str}` out of a reply, possibly fenced or
/// surrounded by prose. Returns the reason on failure.
std::optional<EvalReport> parse_evaluation(std::string_view reply, std::string* reason = nullptr);

/// The text after `- root:` in the hierarchical layers, if present.
std::optional<std::string> root_line(std::string_view reply);

/// Asks the Evaluator for a score and feedback; re-asks up to 3 times on replies
/// that are not the JSON envelope, then throws AgentError(UnparseableEvaluation).
/// Scores outside [0, 10] are clamped with a warning.
EvalReport evaluate(Session& s, std::string_view thread, const std::vector<render::Image>& images,
                    std::string_view context, Rubric rubric = Rubric::Shape);

/// Hierarchical parse of the prompt into a flat graph, up to 3 attempts.
gps::GpsGraph parse_shape(Session& s, std::string_view prompt);

/// Bounding boxes for every node (or only the named ones), each refined as a single path.
gps::GpsGraph generate_bboxes(Session& s, gps::GpsGraph graph, const std::set<std::string>* only = nullptr);

/// N rounds of bounding-box feedback and re-parsing.
gps::GpsGraph bootstrap(Session& s, gps::GpsGraph graph, std::string_view prompt, int rounds);

struct PathTrace
{
    int path = 0;                 // 1-based
    std::vector<int> scores;      // one per executed iteration
    std::vector<bool> compiled;   // whether the iteration produced geometry
    int best_score = 0;
    std::optional<int> best_iteration;
    bool stopped_early = false;
    int coder_calls = 0;
    int evaluator_calls = 0;
};

struct NodeTrace
{
    std::string node;
    std::vector<PathTrace> paths;
    std::optional<int> selected;  // 1-based path, unset when every path scored 0
};

struct ModelResult
{
    gps::GpsGraph graph;
    std::vector<NodeTrace> traces;
};

/// Multi-path iterative modeling of every node.
ModelResult model_shape(Session& s, gps::GpsGraph graph);

struct EditResult
{
    gps::GpsGraph graph;
    std::vector<std::string> changed;
    std::vector<executor::NodeFailure> failures;
};

/// One Coder round over all node programs. Nodes whose new program fails keep
/// their previous code and are reported in `failures`.
EditResult edit_shape(Session& s, const gps::GpsGraph& graph, std::string_view instruction);

/// `## name` sections with their first fenced block, in reply order.
std::vector<std::pair<std::string, std::string>> parse_edit_reply(std::string_view reply);

} // namespace shapecraft::agents
