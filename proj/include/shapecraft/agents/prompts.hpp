// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace shapecraft::agents
{

namespace detail
{
const std::map<std::string, std::string, std::less<>>& embedded_templates();
}

using PromptVars = std::map<std::string, std::string, std::less<>>;

std::vector<std::string> prompt_names();

/// Raw template text. Throws std::out_of_range for unknown names.
const std::string& prompt_template(std::string_view name);

/// Placeholder names in order of first appearance.
std::vector<std::string> placeholders(std::string_view name);

/// Substitutes every `{{key}}`. Throws std::invalid_argument when a placeholder has
/// no value or a value matches no placeholder, so templates and callers stay in sync.
std::string render_prompt(std::string_view name, const PromptVars& vars);

} // namespace shapecraft::agents
