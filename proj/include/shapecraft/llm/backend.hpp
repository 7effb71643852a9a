// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/program/diagnostic.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shapecraft::llm
{

enum class Role
{
    System,
    User,
    Assistant,
};

std::string_view role_name(Role role);

struct ChatMessage
{
    Role role = Role::User;
    std::string text;
    std::vector<std::vector<std::uint8_t>> images;  // PNG payloads

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct BackendConfig
{
    std::string endpoint;  // base URL, `/chat/completions` is appended
    std::string model;
    double temperature = 0.5;
    int retries = 3;
    double timeout_seconds = 120.0;
    double backoff_seconds = 1.0;  // first retry delay, doubled each time
    std::string agent;             // role label (parser, coder, evaluator), checked by scripted replay
    std::string thread;            // conversation key, lets replay match calls issued concurrently
};

enum class LlmErrc
{
    InvalidRequest,
    Transport,
    Auth,
    MalformedResponse,
    ScriptExhausted,
    ScriptMismatch,
};

class LlmError : public std::runtime_error
{
public:
    LlmError(LlmErrc code, std::string message) : std::runtime_error(std::move(message)), _code(code) {}
    LlmErrc code() const noexcept { return _code; }

private:
    LlmErrc _code;
};

class Backend
{
public:
    virtual ~Backend() = default;

    /// Throws LlmError. Safe to call from several threads.
    virtual std::string complete(const std::vector<ChatMessage>& messages, const BackendConfig& cfg) = 0;

    /// False when replies depend on call order, so callers must serialize their requests.
    virtual bool order_independent() const { return true; }
};

/// Throws LlmError(InvalidRequest) for empty conversations or empty messages.
void validate(const std::vector<ChatMessage>& messages, const BackendConfig& cfg);

/// Hex SHA-256 over each message's role, text and image count. Image bytes are
/// left out so renderer changes do not invalidate recorded transcripts.
std::string prompt_digest(const std::vector<ChatMessage>& messages);

struct CodeBlock
{
    std::string text;
    std::optional<program::Diagnostic> warning;  // set when the reply had no usable fence
};

/// Body of the first fence tagged `language_tag` (any fence when unset); the
/// whole reply plus a warning when there is none.
CodeBlock extract_code_block(std::string_view reply, std::optional<std::string_view> language_tag = std::nullopt);

} // namespace shapecraft::llm
