// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/executor/executor.hpp"
#include "shapecraft/llm/backend.hpp"

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shapecraft::agents
{

enum class Agent
{
    Parser,
    Coder,
    Evaluator,
};

std::string_view agent_name(Agent agent);

struct SamplingConfig
{
    int M = 3;          // paths per node
    int T = 3;          // iterations per path
    double s_tau = 9;   // early-stop threshold
    double temperature = 0.5;
    int N = 2;          // bootstrap rounds
};

struct AgentOptions
{
    SamplingConfig sampling;
    int bbox_iterations = 3;  // bounding-box refinement runs a single path
    int image_size = 512;
    executor::ExecutorOptions exec;
    bool parallel = true;  // only honoured when the backend is order independent
};

enum class AgentErrc
{
    InvalidInput,
    InvalidConfig,
    UnparseableGraph,
    UnparseableEvaluation,
};

class AgentError : public std::runtime_error
{
public:
    AgentError(AgentErrc code, std::string message) : std::runtime_error(std::move(message)), _code(code) {}
    AgentErrc code() const noexcept { return _code; }

private:
    AgentErrc _code;
};

/// Throws AgentError(InvalidConfig).
void validate(const SamplingConfig& cfg);

struct Roles
{
    llm::BackendConfig parser;
    llm::BackendConfig coder;
    llm::BackendConfig evaluator;
};

/// Shared state of one run: the backend, per-role configs, warnings and the
/// optional run directory with its run_log.jsonl. Thread safe.
class Session
{
public:
    Session(llm::Backend& backend, Roles roles, AgentOptions options = {},
            std::optional<std::filesystem::path> run_dir = std::nullopt);

    const AgentOptions& options() const { return _options; }
    const std::optional<std::filesystem::path>& run_dir() const { return _dir; }
    bool concurrent() const;

    /// One completion, logged with its conversation key.
    std::string ask(Agent agent, std::string_view thread, const std::vector<llm::ChatMessage>& messages,
                    std::optional<double> temperature = std::nullopt);

    void warn(std::string message);
    std::vector<std::string> warnings() const;

    /// Appends one JSON object line to run_log.jsonl; `fields` are string values.
    void log(std::string_view event, const std::vector<std::pair<std::string, std::string>>& fields);

    /// Writes a file below the run directory; no-op without one.
    void write(const std::filesystem::path& relative, std::string_view bytes) const;
    void write(const std::filesystem::path& relative, const std::vector<std::uint8_t>& bytes) const;

    std::size_t calls(Agent agent) const;

private:
    llm::Backend& _backend;
    Roles _roles;
    AgentOptions _options;
    std::optional<std::filesystem::path> _dir;
    mutable std::mutex _mutex;
    std::ofstream _log;
    std::vector<std::string> _warnings;
    std::size_t _calls[3] = {0, 0, 0};
};

} // namespace shapecraft::agents
