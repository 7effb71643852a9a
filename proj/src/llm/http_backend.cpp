// SPDX-License-Identifier: Apache-2.0
#include <httplib.h>

#include "shapecraft/llm/http_backend.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>
#include <thread>

namespace shapecraft::llm
{

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string api_key_from_env()
{
    const char* key = std::getenv(api_key_variable);
    if (key == nullptr || *key == '\0')
        throw LlmError(LlmErrc::Auth, fmt::format("{} is not set; export an API key or pass --scripted", api_key_variable));
    return key;
}

std::string redact(std::string text, std::string_view secret)
{
    if (secret.empty())
        return text;
    for (auto pos = text.find(secret); pos != std::string::npos; pos = text.find(secret, pos))
        text.replace(pos, secret.size(), "[REDACTED]");
    return text;
}

namespace
{

std::string base64(const std::vector<std::uint8_t>& bytes)
{
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

json build_body(const std::vector<ChatMessage>& messages, const BackendConfig& cfg, bool elide_images)
{
    json body;
    body["model"] = cfg.model;
    body["temperature"] = cfg.temperature;
    json list = json::array();
    for (const auto& m: messages)
    {
        json msg;
        msg["role"] = role_name(m.role);
        if (m.images.empty())
            msg["content"] = m.text;
        else
        {
            json parts = json::array();
            if (!m.text.empty())
                parts.push_back({{"type", "text"}, {"text", m.text}});
            for (const auto& png: m.images)
            {
                const std::string url = elide_images
                                            ? fmt::format("data:image/png;base64,<{} bytes>", png.size())
                                            : "data:image/png;base64," + base64(png);
                parts.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
            }
            msg["content"] = std::move(parts);
        }
        list.push_back(std::move(msg));
    }
    body["messages"] = std::move(list);
    return body;
}

struct Target
{
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Target split_endpoint(const std::string& endpoint)
{
    const auto scheme = endpoint.find("://");
    if (scheme == std::string::npos)
        throw LlmError(LlmErrc::InvalidRequest, fmt::format("endpoint '{}' has no scheme", endpoint));
    const auto slash = endpoint.find('/', scheme + 3);
    Target t{endpoint.substr(0, slash), slash == std::string::npos ? std::string() : endpoint.substr(slash)};
    while (!t.path.empty() && t.path.back() == '/')
        t.path.pop_back();
    const std::string_view suffix = "/chat/completions";
    if (t.path.size() < suffix.size() || t.path.compare(t.path.size() - suffix.size(), suffix.size(), suffix) != 0)
        t.path += suffix;
    return t;
}

void set_timeouts(httplib::Client& cli, double seconds)
{
    const auto us = std::chrono::microseconds(static_cast<long long>(std::max(seconds, 0.001) * 1e6));
    const time_t sec = static_cast<time_t>(us.count() / 1000000);
    const time_t usec = static_cast<time_t>(us.count() % 1000000);
    cli.set_connection_timeout(sec, usec);
    cli.set_read_timeout(sec, usec);
    cli.set_write_timeout(sec, usec);
}

std::string snippet(const std::string& body)
{
    return body.size() <= 200 ? body : body.substr(0, 200) + "...";
}

} // namespace

HttpBackend::HttpBackend(std::string api_key, std::ostream* trace) : _key(std::move(api_key)), _trace(trace) {}

std::string HttpBackend::request_body(const std::vector<ChatMessage>& messages, const BackendConfig& cfg)
{
    return build_body(messages, cfg, false).dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string HttpBackend::parse_response(std::string_view body)
{
    json doc;
    try
    {
        doc = json::parse(body);
    }
    catch (const json::exception& e)
    {
        throw LlmError(LlmErrc::MalformedResponse, fmt::format("response is not JSON: {}", e.what()));
    }
    if (doc.contains("error"))
        throw LlmError(LlmErrc::MalformedResponse, fmt::format("endpoint returned an error: {}", doc["error"].dump()));
    if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty())
        throw LlmError(LlmErrc::MalformedResponse, "response has no choices");
    const json& choice = doc["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content"))
        throw LlmError(LlmErrc::MalformedResponse, "response choice has no message content");
    const json& content = choice["message"]["content"];
    if (content.is_string())
        return content.get<std::string>();
    if (content.is_array())
    {
        std::string text;
        for (const auto& part: content)
            if (part.is_object() && part.value("type", "") == "text" && part.contains("text") && part["text"].is_string())
                text += part["text"].get<std::string>();
        return text;
    }
    throw LlmError(LlmErrc::MalformedResponse, "message content is neither text nor a list of parts");
}

void HttpBackend::log(const std::string& text)
{
    if (_trace == nullptr)
        return;
    std::lock_guard lock(_trace_mutex);
    *_trace << redact(text, _key) << '\n';
    _trace->flush();
}

std::string HttpBackend::complete(const std::vector<ChatMessage>& messages, const BackendConfig& cfg)
{
    validate(messages, cfg);
    const Target target = split_endpoint(cfg.endpoint);
    const std::string body = request_body(messages, cfg);
    const httplib::Headers headers{{"Authorization", "Bearer " + _key}};

    const auto start = Clock::now();
    const auto budget = std::chrono::duration<double>(cfg.timeout_seconds * (cfg.retries + 1));
    const auto deadline = start + std::chrono::duration_cast<Clock::duration>(budget);
    auto remaining = [&] { return std::chrono::duration<double>(deadline - Clock::now()).count(); };

    std::string last_error = "no attempt made";
    int attempts = 0;
    for (int attempt = 0; attempt <= cfg.retries; ++attempt)
    {
        const double left = remaining();
        if (left <= 0.0)
            break;
        ++attempts;
        log(fmt::format("--> POST {}{} [{}] attempt {}\nAuthorization: Bearer {}\n{}", target.origin, target.path,
                        cfg.agent, attempt + 1, _key,
                        build_body(messages, cfg, true).dump(-1, ' ', false, json::error_handler_t::replace)));

        httplib::Client cli(target.origin);
        set_timeouts(cli, std::min(cfg.timeout_seconds, left));
        const auto res = cli.Post(target.path, headers, body, "application/json");
        if (!res)
        {
            last_error = fmt::format("request failed: {}", httplib::to_string(res.error()));
            log("<-- " + last_error);
        }
        else
        {
            log(fmt::format("<-- HTTP {}\n{}", res->status, res->body));
            if (res->status == 401 || res->status == 403)
                throw LlmError(LlmErrc::Auth, fmt::format("endpoint rejected the API key (HTTP {})", res->status));
            if (res->status >= 200 && res->status < 300)
                return parse_response(res->body);
            last_error = fmt::format("HTTP {}: {}", res->status, snippet(res->body));
            if (res->status != 408 && res->status != 429 && res->status < 500)
                throw LlmError(LlmErrc::Transport, last_error);
        }
        if (attempt < cfg.retries)
        {
            const double delay = std::min(cfg.backoff_seconds * double(1 << std::min(attempt, 20)), remaining());
            if (delay > 0.0)
                std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
    }
    throw LlmError(LlmErrc::Transport, fmt::format("giving up after {} attempts: {}", attempts, last_error));
}

} // namespace shapecraft::llm
