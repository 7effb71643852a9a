// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shapecraft::util
{

struct FencedBlock
{
    std::string language;  // info string after the opening fence, lowercased
    std::string body;
    int first_line = 1;  // 1-based line of the first body line in the original text
};

/// All ``` fenced blocks in order. An unterminated last fence runs to the end of the text.
std::vector<FencedBlock> fenced_blocks(std::string_view text);

/// The first block whose language is one of `languages` (any block when
/// `languages` is empty). Falls back to the first untagged block.
std::optional<FencedBlock> find_fenced_block(std::string_view text, const std::vector<std::string>& languages);

std::optional<std::string> extract_fenced_block(std::string_view text, const std::vector<std::string>& languages);

} // namespace shapecraft::util
