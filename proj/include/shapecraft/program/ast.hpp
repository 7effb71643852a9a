// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace shapecraft::program
{

struct Identifier
{
    std::string name;
    friend bool operator==(const Identifier&, const Identifier&) = default;
};

using Scalar = std::variant<std::int64_t, double, bool>;

/// Parenthesized 2- or 3-element tuple of numbers or booleans.
struct TupleLit
{
    std::vector<Scalar> items;
    friend bool operator==(const TupleLit&, const TupleLit&) = default;
};

/// Bracketed list of tuples, used for curve control points.
struct ListLit
{
    std::vector<TupleLit> items;
    friend bool operator==(const ListLit&, const ListLit&) = default;
};

using Value = std::variant<std::int64_t, double, std::string, bool, TupleLit, ListLit, Identifier>;

struct KeywordArg
{
    std::string name;
    Value value;
    friend bool operator==(const KeywordArg&, const KeywordArg&) = default;
};

struct Statement
{
    int line = 1;
    std::optional<std::string> target;
    std::string callee;  // as written, e.g. "cube" or "Modifiers.bevel"
    std::vector<Value> positional;
    std::vector<KeywordArg> keywords;
};

struct ShapeProgram
{
    std::string source;
    std::vector<Statement> statements;
};

/// Equality of statement structure, ignoring line numbers and source text.
bool structurally_equal(const ShapeProgram& a, const ShapeProgram& b);

/// Short type name used in diagnostics ("string", "3-tuple", ...).
std::string describe(const Value& v);

} // namespace shapecraft::program
