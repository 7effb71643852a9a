// SPDX-License-Identifier: Apache-2.0
#include "shapecraft/geometry/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fmt/format.h>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace shapecraft::geometry
{

namespace
{

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw MeshIoError(fmt::format("cannot read '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view data)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw MeshIoError(fmt::format("cannot write '{}'", path.string()));
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out)
        throw MeshIoError(fmt::format("write to '{}' failed", path.string()));
}

std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size())
    {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
            ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
            ++i;
        if (i > start)
            out.push_back(line.substr(start, i - start));
    }
    return out;
}

double parse_real(std::string_view token, std::size_t line_no)
{
    // from_chars for double is available in libstdc++ 11.
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw MeshIoError(fmt::format("line {}: bad number '{}'", line_no, token));
    return value;
}

long parse_index(std::string_view token, std::size_t line_no)
{
    const auto slash = token.find('/');
    const auto head = token.substr(0, slash);
    long value = 0;
    auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), value);
    if (ec != std::errc{} || ptr != head.data() + head.size() || value == 0)
        throw MeshIoError(fmt::format("line {}: bad face index '{}'", line_no, token));
    return value;
}

void put_f32(std::string& out, float value)
{
    char bytes[4];
    std::memcpy(bytes, &value, 4);
    out.append(bytes, 4);
}

} // namespace

std::string to_obj(std::span<const Mesh> components)
{
    std::string out;
    std::size_t base = 1;
    for (std::size_t c = 0; c < components.size(); ++c)
    {
        const Mesh& m = components[c];
        out += fmt::format("o {}\n", m.component_tag.value_or(fmt::format("component_{}", c)));
        for (const auto& v: m.vertices)
            out += fmt::format("v {} {} {}\n", v.x, v.y, v.z);
        for (const auto& t: m.triangles)
            out += fmt::format("f {} {} {}\n", t[0] + base, t[1] + base, t[2] + base);
        base += m.vertices.size();
    }
    return out;
}

std::vector<Mesh> parse_obj(std::string_view text)
{
    std::vector<Vec3> positions;
    struct Group
    {
        std::optional<std::string> tag;
        std::vector<std::array<std::size_t, 3>> faces;
    };
    std::vector<Group> groups(1);

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const auto end = std::min(text.find('\n', pos), text.size());
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const auto tokens = split_ws(line);
        if (tokens.empty() || tokens[0].front() == '#')
        {
            if (end == text.size())
                break;
            continue;
        }
        const auto kind = tokens[0];
        if (kind == "v")
        {
            if (tokens.size() < 4)
                throw MeshIoError(fmt::format("line {}: vertex needs 3 coordinates", line_no));
            positions.push_back(
                {parse_real(tokens[1], line_no), parse_real(tokens[2], line_no), parse_real(tokens[3], line_no)});
        }
        else if (kind == "f")
        {
            if (tokens.size() < 4)
                throw MeshIoError(fmt::format("line {}: face needs at least 3 vertices", line_no));
            std::vector<std::size_t> poly;
            for (std::size_t i = 1; i < tokens.size(); ++i)
            {
                const long raw = parse_index(tokens[i], line_no);
                const long resolved = raw > 0 ? raw - 1 : static_cast<long>(positions.size()) + raw;
                if (resolved < 0 || static_cast<std::size_t>(resolved) >= positions.size())
                    throw MeshIoError(fmt::format("line {}: face index {} out of range", line_no, raw));
                poly.push_back(static_cast<std::size_t>(resolved));
            }
            for (std::size_t i = 1; i + 1 < poly.size(); ++i)
                groups.back().faces.push_back({poly[0], poly[i], poly[i + 1]});
        }
        else if (kind == "o" || kind == "g")
        {
            Group g;
            if (tokens.size() > 1)
                g.tag = std::string(tokens[1]);
            if (groups.back().faces.empty() && !groups.back().tag)
                groups.back() = std::move(g);
            else
                groups.push_back(std::move(g));
        }
        if (end == text.size())
            break;
    }

    std::vector<Mesh> meshes;
    for (auto& g: groups)
    {
        if (g.faces.empty())
            continue;
        Mesh m;
        m.component_tag = g.tag;
        // Vertices keep their file order so written meshes read back unchanged.
        std::vector<std::size_t> used;
        for (const auto& f: g.faces)
            used.insert(used.end(), f.begin(), f.end());
        std::sort(used.begin(), used.end());
        used.erase(std::unique(used.begin(), used.end()), used.end());
        std::unordered_map<std::size_t, std::uint32_t> remap;
        for (auto i: used)
        {
            remap.emplace(i, static_cast<std::uint32_t>(m.vertices.size()));
            m.vertices.push_back(positions[i]);
        }
        for (const auto& f: g.faces)
        {
            Triangle t{};
            for (int k = 0; k < 3; ++k)
                t[k] = remap.at(f[k]);
            if (t[0] != t[1] && t[1] != t[2] && t[0] != t[2])
                m.triangles.push_back(t);
        }
        meshes.push_back(std::move(m));
    }
    return meshes;
}

std::vector<Mesh> read_obj(const std::filesystem::path& path)
{
    try
    {
        return parse_obj(read_file(path));
    }
    catch (const MeshIoError& e)
    {
        throw MeshIoError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

void write_obj(const std::filesystem::path& path, std::span<const Mesh> components)
{
    write_file(path, to_obj(components));
}

std::string to_binary_stl(std::span<const Mesh> components)
{
    std::string out(80, '\0');
    const std::string header = "shapecraft binary stl";
    std::memcpy(out.data(), header.data(), header.size());
    std::uint32_t count = 0;
    for (const auto& m: components)
        count += static_cast<std::uint32_t>(m.triangles.size());
    char count_bytes[4];
    std::memcpy(count_bytes, &count, 4);
    out.append(count_bytes, 4);
    for (const auto& m: components)
        for (std::size_t f = 0; f < m.triangles.size(); ++f)
        {
            const Vec3 n = triangle_normal(m, f);
            put_f32(out, static_cast<float>(n.x));
            put_f32(out, static_cast<float>(n.y));
            put_f32(out, static_cast<float>(n.z));
            for (auto i: m.triangles[f])
            {
                const Vec3& v = m.vertices[i];
                put_f32(out, static_cast<float>(v.x));
                put_f32(out, static_cast<float>(v.y));
                put_f32(out, static_cast<float>(v.z));
            }
            out.append(2, '\0');
        }
    return out;
}

void write_binary_stl(const std::filesystem::path& path, std::span<const Mesh> components)
{
    write_file(path, to_binary_stl(components));
}

} // namespace shapecraft::geometry
