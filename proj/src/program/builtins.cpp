// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/program/builtins.hpp"

#include <fmt/format.h>

namespace shapecraft::program
{

namespace
{

using P = ParamSpec;
using T = ParamType;

std::vector<ParamSpec> placed(std::vector<ParamSpec> extra)
{
    std::vector<ParamSpec> out{
        P{"name", T::String, ""},
        P{"position", T::Vec3, "(0, 0, 0)"},
        P{"rotation", T::Vec3, "(0, 0, 0)"},
        P{"scale", T::Vec3, "(1, 1, 1)"},
    };
    out.insert(out.end(), extra.begin(), extra.end());
    return out;
}

std::vector<BuiltinSpec> make_registry()
{
    return {
        {"cube", placed({}), "Generates a cube spanning [-1, 1] on each axis before scaling."},
        {"sphere",
         placed({P{"segments", T::Int, "32"}, P{"rings", T::Int, "16"}}),
         "Creates a UV sphere of radius 1 with customizable segments and rings."},
        {"cylinder",
         placed({P{"vertices", T::Int, "32"}, P{"depth", T::Real, "2"}}),
         "Adds a cylinder of radius 1 along z with adjustable vertex count and height (depth)."},
        {"cone",
         placed({P{"vertices", T::Int, "32"}, P{"radius", T::Real, "1"}, P{"depth", T::Real, "2"}}),
         "Creates a cone along z with base radius, height (depth) and vertex count."},
        {"plane", placed({P{"size", T::Real, "2"}}), "Adds a flat square in the xy plane with side length size."},
        {"pyramid",
         placed({P{"base_size", T::Real, "2"}, P{"height", T::Real, "2"}}),
         "Constructs a square-based pyramid pointing up the z axis."},
        {"capsule",
         placed({P{"radius", T::Real, "1"}, P{"height", T::Real, "2"}, P{"segments", T::Int, "32"}}),
         "Creates a capsule along z: a cylinder of the given height capped by two hemispheres."},
        {"prism",
         placed({P{"sides", T::Int, "3"}, P{"radius", T::Real, "1"}, P{"height", T::Real, "2"}}),
         "Generates an n-sided prism along z."},
        {"bezier_curve",
         {P{"name", T::String, ""},
          P{"points", T::PointList, std::nullopt},
          P{"bevel_depth", T::Real, "0.0"},
          P{"extrude", T::Real, "0.0"},
          P{"fill_caps", T::Bool, "False"},
          P{"to_mesh", T::Bool, "True"}},
         "Creates a 3D Bezier curve through the anchor points. bevel_depth sweeps a round tube, extrude pulls a "
         "ribbon along z, fill_caps closes the ends when beveling. Usable as curve_obj for Modifiers.curve."},
        {"circle",
         {P{"name", T::String, ""},
          P{"location", T::Vec3, "(0, 0, 0)"},
          P{"radius", T::Real, "1.0"},
          P{"segments", T::Int, "32"},
          P{"bevel_depth", T::Real, "0.0"},
          P{"extrude", T::Real, "0.0"},
          P{"to_mesh", T::Bool, "True"}},
         "Generates a circle curve in the xy plane with the given radius and resolution."},
        {"polyline",
         {P{"name", T::String, ""},
          P{"points", T::PointList, std::nullopt},
          P{"closed", T::Bool, "False"},
          P{"bevel_depth", T::Real, "0.0"},
          P{"extrude", T::Real, "0.0"},
          P{"fill_caps", T::Bool, "False"},
          P{"to_mesh", T::Bool, "True"}},
         "Creates straight-line segments. closed links the ends; fill_caps closes the ends."},
        {"cube_bounding_box",
         {P{"name", T::String, ""}, P{"position", T::Vec3, "(0, 0, 0)"}, P{"scale", T::Vec3, "(1, 1, 1)"}},
         "Generates an axis-aligned box; scale holds the half-extents, so the box spans position +/- scale."},
        {"Modifiers.boolean",
         {P{"obj_a", T::Object, std::nullopt},
          P{"obj_b", T::Object, std::nullopt},
          P{"operation", T::String, "\"DIFFERENCE\""},
          P{"remove", T::Bool, "True"}},
         "Performs INTERSECT, UNION or DIFFERENCE on obj_a; removes obj_b if remove=True."},
        {"Modifiers.subdivision",
         {P{"obj", T::Object, std::nullopt}, P{"levels", T::Int, "2"}, P{"render_levels", T::Int, "3"}},
         "Smooths obj by Loop subdivision; levels is the number of rounds."},
        {"Modifiers.bevel",
         {P{"obj", T::Object, std::nullopt},
          P{"width", T::Real, "0.1"},
          P{"segments", T::Int, "3"},
          P{"affect", T::String, "\"EDGES\""}},
         "Rounds sharp edges (affect=\"EDGES\") or cuts corners (affect=\"VERTICES\")."},
        {"Modifiers.array",
         {P{"obj", T::Object, std::nullopt}, P{"count", T::Int, "5"}, P{"relative_offset", T::Vec3, "(1.2, 0, 0)"}},
         "Duplicates obj count times; each copy is offset by relative_offset times the object's size."},
        {"Modifiers.mirror",
         {P{"obj", T::Object, std::nullopt},
          P{"axis", T::BoolTriple, "(True, False, False)"},
          P{"use_clip", T::Bool, "True"}},
         "Mirrors obj across the world X/Y/Z planes through the origin; use_clip keeps vertices from crossing the "
         "plane."},
        {"Modifiers.curve",
         {P{"obj", T::Object, std::nullopt},
          P{"curve_obj", T::Object, std::nullopt},
          P{"deform_axis", T::String, "\"POS_X\""}},
         "Bends obj along curve_obj; deform_axis is one of POS_X, POS_Y, POS_Z, NEG_X, NEG_Y, NEG_Z."},
        {"Modifiers.solidify",
         {P{"obj", T::Object, std::nullopt}, P{"thickness", T::Real, "0.2"}},
         "Adds thickness to a surface mesh."},
        {"Modifiers.to_mesh", {P{"obj", T::Object, std::nullopt}}, "Applies all modifiers; objects are always meshes."},
    };
}

} // namespace

const std::vector<BuiltinSpec>& builtin_registry()
{
    static const std::vector<BuiltinSpec> registry = make_registry();
    return registry;
}

const BuiltinSpec* find_builtin(std::string_view callee)
{
    for (const auto& spec: builtin_registry())
    {
        if (spec.name == callee)
            return &spec;
        const std::string_view name = spec.name;
        if (name.rfind("Modifiers.", 0) == 0 && name.substr(10) == callee)
            return &spec;
    }
    return nullptr;
}

bool is_unsupported_builtin(std::string_view callee) { return callee == "text"; }

std::string library_reference()
{
    std::string out;
    for (const auto& spec: builtin_registry())
    {
        out += fmt::format("# {}\n{}(", spec.summary, spec.name);
        for (std::size_t i = 0; i < spec.params.size(); ++i)
        {
            const auto& p = spec.params[i];
            out += i ? ", " : "";
            out += p.name;
            if (p.default_text && !p.default_text->empty())
                out += "=" + *p.default_text;
        }
        out += ")\n\n";
    }
    return out;
}

} // namespace shapecraft::program
