// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/program/ast.hpp"
#include "shapecraft/program/diagnostic.hpp"

#include <optional>
#include <string_view>

namespace shapecraft::program
{

struct ParseResult
{
    std::optional<ShapeProgram> program;  // set iff there are no errors
    std::vector<Diagnostic> diagnostics;
};

/// Parses DSL source. Syntax errors never throw; the parser resynchronizes at
/// the next top-level line break and keeps collecting diagnostics.
ParseResult parse(std::string_view source);

/// Canonical text: one statement per line, reals always carry a decimal point.
std::string print(const ShapeProgram& program);

std::string print(const Value& value);

} // namespace shapecraft::program
