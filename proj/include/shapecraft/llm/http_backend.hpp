// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/llm/backend.hpp"

#include <mutex>
#include <ostream>
#include <string>

namespace shapecraft::llm
{

inline constexpr const char* api_key_variable = "SHAPECRAFT_API_KEY";

/// Reads SHAPECRAFT_API_KEY. Throws LlmError(Auth) when it is unset or empty.
std::string api_key_from_env();

/// Replaces every occurrence of `secret` in `text`.
std::string redact(std::string text, std::string_view secret);

/// OpenAI-compatible chat completions client. Images are sent as base64 PNG data URLs.
class HttpBackend : public Backend
{
public:
    explicit HttpBackend(std::string api_key, std::ostream* trace = nullptr);

    std::string complete(const std::vector<ChatMessage>& messages, const BackendConfig& cfg) override;

    /// The JSON request body, exposed for tests.
    static std::string request_body(const std::vector<ChatMessage>& messages, const BackendConfig& cfg);

    /// Assistant text of a chat completion response. Throws LlmError(MalformedResponse).
    static std::string parse_response(std::string_view body);

private:
    void log(const std::string& text);

    std::string _key;
    std::ostream* _trace;
    std::mutex _trace_mutex;
};

} // namespace shapecraft::llm
