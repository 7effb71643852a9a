// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/geometry/errors.hpp"

namespace shapecraft::geometry
{

std::string_view to_string(GeometryErrc code)
{
    switch (code)
    {
        case GeometryErrc::UnknownPrimitive: return "UnknownPrimitive";
        case GeometryErrc::InvalidParam: return "InvalidParam";
        case GeometryErrc::EmptyMesh: return "EmptyMesh";
        case GeometryErrc::MissingAuxMesh: return "MissingAuxMesh";
        case GeometryErrc::NonManifoldOperand: return "NonManifoldOperand";
        case GeometryErrc::DegenerateCurve: return "DegenerateCurve";
    }
    return "GeometryError";
}

GeometryError::GeometryError(GeometryErrc code, std::string message, std::string param):
    std::runtime_error(std::move(message)), _code(code), _param(std::move(param))
{
}

void throw_invalid_param(std::string param, std::string reason)
{
    auto message = "invalid parameter '" + param + "': " + reason;
    throw GeometryError(GeometryErrc::InvalidParam, std::move(message), std::move(param));
}

} // namespace shapecraft::geometry
