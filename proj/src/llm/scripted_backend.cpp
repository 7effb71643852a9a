// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/llm/scripted_backend.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace shapecraft::llm
{

using json = nlohmann::ordered_json;

ScriptedBackend::ScriptedBackend(std::vector<ScriptEntry> entries)
    : _entries(std::move(entries)), _used(_entries.size(), false)
{
}

bool ScriptedBackend::keyed() const
{
    if (_entries.empty())
        return false;
    for (const auto& e: _entries)
        if (!e.thread)
            return false;
    return true;
}

bool ScriptedBackend::order_independent() const
{
    std::lock_guard lock(_mutex);
    return keyed();
}

std::size_t ScriptedBackend::take(const BackendConfig& cfg)
{
    if (!keyed())
        return _next < _entries.size() ? _next : _entries.size();
    for (std::size_t i = 0; i < _entries.size(); ++i)
        if (!_used[i] && *_entries[i].thread == cfg.thread)
            return i;
    return _entries.size();
}

ScriptedBackend ScriptedBackend::from_jsonl(std::string_view text)
{
    std::vector<ScriptEntry> entries;
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line))
    {
        ++number;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        json obj;
        try
        {
            obj = json::parse(line);
        }
        catch (const json::exception& e)
        {
            throw LlmError(LlmErrc::MalformedResponse, fmt::format("transcript line {}: {}", number, e.what()));
        }
        if (!obj.is_object() || !obj.contains("response"))
            continue;
        if (!obj["response"].is_string())
            throw LlmError(LlmErrc::MalformedResponse, fmt::format("transcript line {}: response must be a string", number));
        ScriptEntry e;
        e.response = obj["response"].get<std::string>();
        if (obj.contains("agent") && obj["agent"].is_string())
            e.agent = obj["agent"].get<std::string>();
        if (obj.contains("thread") && obj["thread"].is_string())
            e.thread = obj["thread"].get<std::string>();
        if (obj.contains("digest") && obj["digest"].is_string())
            e.digest = obj["digest"].get<std::string>();
        entries.push_back(std::move(e));
    }
    return ScriptedBackend(std::move(entries));
}

ScriptedBackend ScriptedBackend::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw LlmError(LlmErrc::InvalidRequest, fmt::format("cannot read transcript '{}'", path.string()));
    std::ostringstream text;
    text << in.rdbuf();
    return from_jsonl(text.str());
}

void ScriptedBackend::push(std::string response, std::optional<std::string> agent)
{
    std::lock_guard lock(_mutex);
    _entries.push_back({std::move(agent), std::nullopt, std::nullopt, std::move(response)});
    _used.push_back(false);
}

std::string ScriptedBackend::complete(const std::vector<ChatMessage>& messages, const BackendConfig& cfg)
{
    validate(messages, cfg);
    const std::string digest = prompt_digest(messages);
    std::lock_guard lock(_mutex);
    const std::size_t index = take(cfg);
    if (index >= _entries.size())
        throw LlmError(LlmErrc::ScriptExhausted,
                       fmt::format("scripted transcript exhausted after {} responses ({} request{})", _calls.size(),
                                   cfg.agent.empty() ? "unlabelled" : cfg.agent,
                                   cfg.thread.empty() ? "" : " in " + cfg.thread));
    const ScriptEntry& e = _entries[index];
    if (e.agent && *e.agent != cfg.agent)
        throw LlmError(LlmErrc::ScriptMismatch, fmt::format("scripted response {} expects a {} request, got {}", index + 1,
                                                            *e.agent, cfg.agent.empty() ? "unlabelled" : cfg.agent));
    if (e.digest && *e.digest != digest)
        throw LlmError(LlmErrc::ScriptMismatch,
                       fmt::format("scripted response {} expects prompt digest {}, got {}", index + 1, *e.digest, digest));
    _used[index] = true;
    while (_next < _used.size() && _used[_next])
        ++_next;
    _calls.push_back({cfg.agent, cfg.thread, digest, messages, e.response});
    return e.response;
}

std::vector<ScriptedCall> ScriptedBackend::calls() const
{
    std::lock_guard lock(_mutex);
    return _calls;
}

std::size_t ScriptedBackend::call_count() const
{
    std::lock_guard lock(_mutex);
    return _calls.size();
}

std::size_t ScriptedBackend::call_count(std::string_view agent) const
{
    std::lock_guard lock(_mutex);
    std::size_t n = 0;
    for (const auto& c: _calls)
        n += c.agent == agent;
    return n;
}

std::size_t ScriptedBackend::remaining() const
{
    std::lock_guard lock(_mutex);
    return static_cast<std::size_t>(std::count(_used.begin(), _used.end(), false));
}

std::string ScriptedBackend::pinned_transcript() const
{
    std::lock_guard lock(_mutex);
    std::string out;
    for (const auto& c: _calls)
    {
        json obj;
        obj["agent"] = c.agent;
        if (!c.thread.empty())
            obj["thread"] = c.thread;
        obj["digest"] = c.digest;
        obj["response"] = c.response;
        out += obj.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
    }
    return out;
}

} // namespace shapecraft::llm
