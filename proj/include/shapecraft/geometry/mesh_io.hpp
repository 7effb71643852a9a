// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/geometry/mesh.hpp"

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace shapecraft::geometry
{

class MeshIoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// ASCII OBJ with one `o <tag>` group per component and 1-based global indices.
/// Numbers use the shortest round-trip representation, so output is byte-stable.
std::string to_obj(std::span<const Mesh> components);

/// Parses `v` and `f` records (n-gons fan-triangulated, negative indices allowed).
/// Each `o` or `g` record starts a new component.
std::vector<Mesh> parse_obj(std::string_view text);

std::vector<Mesh> read_obj(const std::filesystem::path& path);
void write_obj(const std::filesystem::path& path, std::span<const Mesh> components);

/// Binary STL of all components merged.
std::string to_binary_stl(std::span<const Mesh> components);
void write_binary_stl(const std::filesystem::path& path, std::span<const Mesh> components);

} // namespace shapecraft::geometry
