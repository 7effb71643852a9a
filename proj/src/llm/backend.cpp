// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/llm/backend.hpp"

#include "shapecraft/util/fences.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

namespace shapecraft::llm
{

std::string_view role_name(Role role)
{
    switch (role)
    {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    }
    return "user";
}

void validate(const std::vector<ChatMessage>& messages, const BackendConfig& cfg)
{
    if (messages.empty())
        throw LlmError(LlmErrc::InvalidRequest, "a completion needs at least one message");
    for (std::size_t i = 0; i < messages.size(); ++i)
        if (messages[i].text.empty() && messages[i].images.empty())
            throw LlmError(LlmErrc::InvalidRequest, fmt::format("message {} has neither text nor images", i));
    if (!(cfg.temperature >= 0.0 && cfg.temperature <= 2.0))
        throw LlmError(LlmErrc::InvalidRequest, fmt::format("temperature {} is outside [0, 2]", cfg.temperature));
    if (cfg.retries < 0)
        throw LlmError(LlmErrc::InvalidRequest, "retries must not be negative");
}

std::string prompt_digest(const std::vector<ChatMessage>& messages)
{
    std::string data;
    for (const auto& m: messages)
    {
        data += role_name(m.role);
        data.push_back('\0');
        data += m.text;
        data.push_back('\0');
        data += std::to_string(m.images.size());
        data.push_back('\n');
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i)
        hex += fmt::format("{:02x}", md[i]);
    return hex;
}

CodeBlock extract_code_block(std::string_view reply, std::optional<std::string_view> language_tag)
{
    std::vector<std::string> languages;
    if (language_tag)
        languages.emplace_back(*language_tag);
    if (auto block = util::find_fenced_block(reply, languages))
        return {std::move(block->body), std::nullopt};
    return {std::string(reply),
            program::Diagnostic{1, program::Severity::Warning, "reply has no fenced code block; using the whole reply"}};
}

} // namespace shapecraft::llm
