// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shapecraft::geometry
{

enum class GeometryErrc
{
    UnknownPrimitive,
    InvalidParam,
    EmptyMesh,
    MissingAuxMesh,
    NonManifoldOperand,
    DegenerateCurve,
};

std::string_view to_string(GeometryErrc code);

class GeometryError : public std::runtime_error
{
public:
    GeometryError(GeometryErrc code, std::string message, std::string param = {});

    GeometryErrc code() const noexcept { return _code; }
    /// Offending parameter name for InvalidParam, empty otherwise.
    const std::string& param() const noexcept { return _param; }

private:
    GeometryErrc _code;
    std::string _param;
};

[[noreturn]] void throw_invalid_param(std::string param, std::string reason);

/// Non-fatal kernel notes (zero scale, empty curve geometry, CSG perturbation).
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message)
{
    if (sink)
        sink->push_back(std::move(message));
}

} // namespace shapecraft::geometry
