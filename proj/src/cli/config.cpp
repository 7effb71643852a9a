// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace shapecraft::cli
{

using json = nlohmann::json;

namespace
{

bool looks_secret(std::string key)
{
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    key.erase(std::remove_if(key.begin(), key.end(), [](char c) { return c == '_' || c == '-'; }), key.end());
    for (const char* word: {"apikey", "token", "secret", "password", "authorization", "credential"})
        if (key.find(word) != std::string::npos)
            return true;
    return key == "key";
}

void reject_secrets(const json& j, const std::string& where)
{
    if (!j.is_object())
        return;
    for (const auto& [key, value]: j.items())
    {
        if (looks_secret(key))
            throw ConfigError(fmt::format("'{}{}' looks like a credential; secrets do not belong in {}. Set {} instead",
                                          where, key, config_file_name, "SHAPECRAFT_API_KEY"));
        reject_secrets(value, where + key + ".");
    }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object())
        throw ConfigError(fmt::format("'{}' must be a JSON object", where.empty() ? "<root>" : where));
    for (const auto& [key, value]: j.items())
        if (!allowed.count(key))
            throw ConfigError(fmt::format("unknown key '{}{}' in {}", where.empty() ? "" : where + ".", key, config_file_name));
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where)
{
    if (!j.contains(key))
        return;
    try
    {
        out = j.at(key).get<T>();
    }
    catch (const json::exception&)
    {
        throw ConfigError(fmt::format("'{}{}' has the wrong type", where.empty() ? "" : where + ".", key));
    }
}

void read_backend(const json& j, llm::BackendConfig& cfg, const std::string& where)
{
    check_keys(j, {"endpoint", "model", "temperature", "retries", "timeout_seconds", "backoff_seconds"}, where);
    read(j, "endpoint", cfg.endpoint, where);
    read(j, "model", cfg.model, where);
    read(j, "temperature", cfg.temperature, where);
    read(j, "retries", cfg.retries, where);
    read(j, "timeout_seconds", cfg.timeout_seconds, where);
    read(j, "backoff_seconds", cfg.backoff_seconds, where);
}

} // namespace

Settings default_settings()
{
    Settings s;
    s.options.sampling = agents::SamplingConfig{};
    s.options.image_size = 512;
    for (auto* role: {&s.roles.parser, &s.roles.coder, &s.roles.evaluator})
        role->temperature = s.options.sampling.temperature;
    return s;
}

Settings apply_config(Settings s, std::string_view json_text)
{
    json doc;
    try
    {
        doc = json::parse(json_text);
    }
    catch (const json::exception& e)
    {
        throw ConfigError(fmt::format("{} is not valid JSON: {}", config_file_name, e.what()));
    }
    reject_secrets(doc, "");
    check_keys(doc,
               {"backend", "roles", "m", "t", "s_tau", "n_bootstrap", "temperature", "img_size", "sample_points",
                "voxel_res", "seed", "uniform_fit", "bbox_iterations", "parallel"},
               "");
    auto& sam = s.options.sampling;
    read(doc, "m", sam.M, "");
    read(doc, "t", sam.T, "");
    read(doc, "s_tau", sam.s_tau, "");
    read(doc, "n_bootstrap", sam.N, "");
    read(doc, "img_size", s.options.image_size, "");
    read(doc, "sample_points", s.sample_points, "");
    read(doc, "voxel_res", s.voxel_res, "");
    read(doc, "seed", s.seed, "");
    read(doc, "bbox_iterations", s.options.bbox_iterations, "");
    read(doc, "parallel", s.options.parallel, "");
    bool uniform = s.options.exec.fit == executor::FitMode::Uniform;
    read(doc, "uniform_fit", uniform, "");
    s.options.exec.fit = uniform ? executor::FitMode::Uniform : executor::FitMode::Nonuniform;

    llm::BackendConfig base = s.roles.parser;
    if (doc.contains("temperature"))
    {
        read(doc, "temperature", sam.temperature, "");
        base.temperature = sam.temperature;
    }
    if (doc.contains("backend"))
        read_backend(doc["backend"], base, "backend");
    s.roles = {base, base, base};
    if (doc.contains("roles"))
    {
        const json& roles = doc["roles"];
        check_keys(roles, {"parser", "coder", "evaluator"}, "roles");
        if (roles.contains("parser"))
            read_backend(roles["parser"], s.roles.parser, "roles.parser");
        if (roles.contains("coder"))
            read_backend(roles["coder"], s.roles.coder, "roles.coder");
        if (roles.contains("evaluator"))
            read_backend(roles["evaluator"], s.roles.evaluator, "roles.evaluator");
    }
    return s;
}

Settings load_settings(const std::optional<std::filesystem::path>& path)
{
    std::filesystem::path file = path.value_or(std::filesystem::path(config_file_name));
    if (!path && !std::filesystem::exists(file))
        return default_settings();
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw ConfigError(fmt::format("cannot read config file '{}'", file.string()));
    std::ostringstream text;
    text << in.rdbuf();
    return apply_config(default_settings(), text.str());
}

void require_live_backends(const Settings& s)
{
    const std::pair<const char*, const llm::BackendConfig*> roles[] = {
        {"parser", &s.roles.parser}, {"coder", &s.roles.coder}, {"evaluator", &s.roles.evaluator}};
    for (const auto& [name, cfg]: roles)
        if (cfg->endpoint.empty() || cfg->model.empty())
            throw ConfigError(fmt::format("no endpoint or model configured for the {} role; set \"backend\" or "
                                          "\"roles.{}\" in {}, or pass --scripted",
                                          name, name, config_file_name));
}

} // namespace shapecraft::cli
