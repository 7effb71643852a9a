// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/util/fences.hpp"

#include <algorithm>
#include <cctype>

namespace shapecraft::util
{

namespace
{

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

} // namespace

std::vector<FencedBlock> fenced_blocks(std::string_view text)
{
    std::vector<FencedBlock> out;
    std::optional<FencedBlock> open;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < text.size())
    {
        ++line_no;
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        const std::string_view stripped = trim(line);
        pos = end + 1;
        if (stripped.rfind("```", 0) == 0)
        {
            if (open)
            {
                out.push_back(std::move(*open));
                open.reset();
            }
            else
            {
                open.emplace();
                open->first_line = line_no + 1;
                std::string lang(trim(stripped.substr(3)));
                std::transform(lang.begin(), lang.end(), lang.begin(),
                               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
                open->language = std::move(lang);
            }
            continue;
        }
        if (open)
        {
            open->body.append(line);
            open->body.push_back('\n');
        }
    }
    if (open)
        out.push_back(std::move(*open));
    return out;
}

std::optional<FencedBlock> find_fenced_block(std::string_view text, const std::vector<std::string>& languages)
{
    const auto blocks = fenced_blocks(text);
    for (auto it = blocks.begin(); it != blocks.end(); ++it)
        if (languages.empty() || std::find(languages.begin(), languages.end(), it->language) != languages.end())
            return *it;
    for (auto it = blocks.begin(); it != blocks.end(); ++it)
        if (it->language.empty())
            return *it;
    return std::nullopt;
}

std::optional<std::string> extract_fenced_block(std::string_view text, const std::vector<std::string>& languages)
{
    auto block = find_fenced_block(text, languages);
    if (!block)
        return std::nullopt;
    return std::move(block->body);
}

} // namespace shapecraft::util
