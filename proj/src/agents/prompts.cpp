// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/agents/prompts.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <stdexcept>

namespace shapecraft::agents
{

std::vector<std::string> prompt_names()
{
    std::vector<std::string> out;
    for (const auto& [name, body]: detail::embedded_templates())
        out.push_back(name);
    return out;
}

const std::string& prompt_template(std::string_view name)
{
    const auto& all = detail::embedded_templates();
    const auto it = all.find(name);
    if (it == all.end())
        throw std::out_of_range(fmt::format("no prompt template named '{}'", name));
    return it->second;
}

std::vector<std::string> placeholders(std::string_view name)
{
    const std::string& text = prompt_template(name);
    std::vector<std::string> out;
    for (auto open = text.find("{{"); open != std::string::npos; open = text.find("{{", open + 2))
    {
        const auto close = text.find("}}", open + 2);
        if (close == std::string::npos)
            break;
        std::string key = text.substr(open + 2, close - open - 2);
        if (std::find(out.begin(), out.end(), key) == out.end())
            out.push_back(std::move(key));
    }
    return out;
}

std::string render_prompt(std::string_view name, const PromptVars& vars)
{
    const std::string& text = prompt_template(name);
    const auto keys = placeholders(name);
    for (const auto& [key, value]: vars)
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw std::invalid_argument(fmt::format("prompt '{}' has no placeholder '{}'", name, key));

    std::string out;
    std::size_t pos = 0;
    for (auto open = text.find("{{"); open != std::string::npos; open = text.find("{{", pos))
    {
        const auto close = text.find("}}", open + 2);
        if (close == std::string::npos)
            break;
        const std::string key = text.substr(open + 2, close - open - 2);
        const auto it = vars.find(key);
        if (it == vars.end())
            throw std::invalid_argument(fmt::format("prompt '{}' needs a value for '{}'", name, key));
        out.append(text, pos, open - pos);
        out += it->second;
        pos = close + 2;
    }
    out.append(text, pos);
    return out;
}

} // namespace shapecraft::agents
