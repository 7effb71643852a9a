// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/llm/backend.hpp"

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shapecraft::llm
{

struct ScriptEntry
{
    std::optional<std::string> agent;   // checked against BackendConfig::agent when set
    std::optional<std::string> digest;  // checked against prompt_digest when set
    std::optional<std::string> thread;
    std::string response;
};

struct ScriptedCall
{
    std::string agent;
    std::string thread;
    std::string digest;
    std::vector<ChatMessage> messages;
    std::string response;
};

/// Replays queued responses in order. Any mismatch or an exhausted queue throws.
/// When every entry names a thread, each thread is its own queue and calls may
/// arrive in any interleaving; otherwise there is one global queue.
class ScriptedBackend : public Backend
{
public:
    ScriptedBackend() = default;
    explicit ScriptedBackend(std::vector<ScriptEntry> entries);

    /// JSONL with one {"agent"?, "thread"?, "digest"?, "response"} object per line. Lines
    /// without a "response" key and lines starting with # are skipped, so a run log replays directly.
    static ScriptedBackend from_jsonl(std::string_view text);
    static ScriptedBackend load(const std::filesystem::path& path);

    void push(std::string response, std::optional<std::string> agent = std::nullopt);

    std::string complete(const std::vector<ChatMessage>& messages, const BackendConfig& cfg) override;
    bool order_independent() const override;

    std::vector<ScriptedCall> calls() const;
    std::size_t call_count() const;
    std::size_t call_count(std::string_view agent) const;
    std::size_t remaining() const;

    /// The consumed transcript with every digest filled in.
    std::string pinned_transcript() const;

private:
    bool keyed() const;
    std::size_t take(const BackendConfig& cfg);

    mutable std::mutex _mutex;
    std::vector<ScriptEntry> _entries;
    std::vector<bool> _used;
    std::size_t _next = 0;
    std::vector<ScriptedCall> _calls;
};

} // namespace shapecraft::llm
