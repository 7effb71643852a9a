// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/agents/session.hpp"

#include <fmt/format.h>
#include <json.hpp>

namespace shapecraft::agents
{

using json = nlohmann::ordered_json;

std::string_view agent_name(Agent agent)
{
    switch (agent)
    {
    case Agent::Parser: return "parser";
    case Agent::Coder: return "coder";
    case Agent::Evaluator: return "evaluator";
    }
    return "coder";
}

void validate(const SamplingConfig& cfg)
{
    if (cfg.M < 1)
        throw AgentError(AgentErrc::InvalidConfig, fmt::format("M must be at least 1, got {}", cfg.M));
    if (cfg.T < 1)
        throw AgentError(AgentErrc::InvalidConfig, fmt::format("T must be at least 1, got {}", cfg.T));
    if (!(cfg.s_tau >= 0.0 && cfg.s_tau <= 10.0))
        throw AgentError(AgentErrc::InvalidConfig, fmt::format("s_tau must lie in [0, 10], got {}", cfg.s_tau));
    if (cfg.N < 0)
        throw AgentError(AgentErrc::InvalidConfig, fmt::format("N must not be negative, got {}", cfg.N));
    if (!(cfg.temperature >= 0.0 && cfg.temperature <= 2.0))
        throw AgentError(AgentErrc::InvalidConfig, fmt::format("temperature must lie in [0, 2], got {}", cfg.temperature));
}

Session::Session(llm::Backend& backend, Roles roles, AgentOptions options, std::optional<std::filesystem::path> run_dir)
    : _backend(backend), _roles(std::move(roles)), _options(std::move(options)), _dir(std::move(run_dir))
{
    validate(_options.sampling);
    if (_options.bbox_iterations < 1)
        throw AgentError(AgentErrc::InvalidConfig, "bounding-box iterations must be at least 1");
    if (_dir)
    {
        std::filesystem::create_directories(*_dir);
        _log.open(*_dir / "run_log.jsonl", std::ios::app | std::ios::binary);
        if (!_log)
            throw std::runtime_error(fmt::format("cannot write '{}'", (*_dir / "run_log.jsonl").string()));
    }
}

bool Session::concurrent() const { return _options.parallel && _backend.order_independent(); }

std::string Session::ask(Agent agent, std::string_view thread, const std::vector<llm::ChatMessage>& messages,
                         std::optional<double> temperature)
{
    llm::BackendConfig cfg = agent == Agent::Parser ? _roles.parser : agent == Agent::Coder ? _roles.coder : _roles.evaluator;
    cfg.agent = agent_name(agent);
    cfg.thread = thread;
    if (temperature)
        cfg.temperature = *temperature;
    std::string reply = _backend.complete(messages, cfg);
    {
        std::lock_guard lock(_mutex);
        ++_calls[static_cast<int>(agent)];
    }
    log("llm", {{"agent", cfg.agent}, {"thread", cfg.thread}, {"digest", llm::prompt_digest(messages)}, {"response", reply}});
    return reply;
}

void Session::warn(std::string message)
{
    log("warning", {{"message", message}});
    std::lock_guard lock(_mutex);
    _warnings.push_back(std::move(message));
}

std::vector<std::string> Session::warnings() const
{
    std::lock_guard lock(_mutex);
    return _warnings;
}

void Session::log(std::string_view event, const std::vector<std::pair<std::string, std::string>>& fields)
{
    json obj;
    obj["event"] = event;
    for (const auto& [k, v]: fields)
        obj[k] = v;
    const std::string line = obj.dump(-1, ' ', false, json::error_handler_t::replace);
    std::lock_guard lock(_mutex);
    if (_log.is_open())
    {
        _log << line << '\n';
        _log.flush();
    }
}

void Session::write(const std::filesystem::path& relative, std::string_view bytes) const
{
    if (!_dir)
        return;
    const auto path = *_dir / relative;
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
}

void Session::write(const std::filesystem::path& relative, const std::vector<std::uint8_t>& bytes) const
{
    write(relative, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::size_t Session::calls(Agent agent) const
{
    std::lock_guard lock(_mutex);
    return _calls[static_cast<int>(agent)];
}

} // namespace shapecraft::agents
