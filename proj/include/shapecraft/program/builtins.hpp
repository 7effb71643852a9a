// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shapecraft::program
{

enum class ParamType
{
    Real,
    Int,
    Bool,
    String,
    Vec3,
    BoolTriple,
    PointList,
    Object,
};

struct ParamSpec
{
    std::string name;
    ParamType type;
    std::optional<std::string> default_text;  // unset means required, empty means optional with no default
};

struct BuiltinSpec
{
    std::string name;  // canonical spelling, e.g. "Modifiers.bevel"
    std::vector<ParamSpec> params;
    std::string summary;
};

const std::vector<BuiltinSpec>& builtin_registry();

/// Finds a builtin by its written name. Modifiers may be called with or
/// without the `Modifiers.` prefix.
const BuiltinSpec* find_builtin(std::string_view callee);

/// Names that exist in the modelling library but are deliberately unsupported.
bool is_unsupported_builtin(std::string_view callee);

/// Library reference handed to the Coder, generated from the registry.
std::string library_reference();

} // namespace shapecraft::program
