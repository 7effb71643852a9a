// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/geometry/mesh.hpp"
#include "shapecraft/gps/graph.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace shapecraft::render
{

using Rgb = std::array<std::uint8_t, 3>;

/// Orbit camera around the scene box center. Azimuth 0 looks from the front
/// (-y side), positive azimuth swings toward -x; elevation is measured up from
/// the xy plane.
struct Camera
{
    double azimuth_deg = 45.0;
    double elevation_deg = 30.0;
    double fov_deg = 45.0;  // vertical

    friend bool operator==(const Camera&, const Camera&) = default;
};

/// Front-left and front-right three-quarter views plus a rear top-down view.
std::vector<Camera> preset_cameras();

struct Image
{
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, top row first

    Image() = default;
    Image(int w, int h, Rgb fill);

    Rgb pixel(int x, int y) const;
    void set(int x, int y, Rgb c);

    friend bool operator==(const Image&, const Image&) = default;
};

inline constexpr Rgb background_color{255, 255, 255};
inline constexpr Rgb default_mesh_color{180, 180, 185};

class RenderError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Z-buffered flat-Lambert rasterization with a headlight. `colors` gives one
/// base color per mesh (default grey when shorter). Throws RenderError when the
/// scene has no triangles or the camera is invalid.
Image render(std::span<const geometry::Mesh> meshes, const Camera& cam, int size = 512,
             std::span<const Rgb> colors = {});

struct LegendEntry
{
    std::string node;
    std::string color_name;
    Rgb color;
};

struct BboxRender
{
    Image image;
    std::vector<LegendEntry> legend;  // graph node order
};

/// `count` colors with pairwise RGB distance of at least 40, also kept away
/// from the white background.
std::vector<std::pair<std::string, Rgb>> distinct_palette(std::size_t count);

/// Translucent boxes with solid edges, one palette color per node. Throws
/// RenderError when a node has no bounds.
BboxRender render_bboxes(const gps::GpsGraph& graph, const Camera& cam, int size = 512);

/// "- seat: red (230, 25, 75)" lines for prompts.
std::string legend_text(const std::vector<LegendEntry>& legend);

std::vector<std::uint8_t> encode_png(const Image& image);
void write_png(const std::filesystem::path& path, const Image& image);

/// Projection helper shared by the rasterizer and tests: pixel coordinates of a
/// world point for a camera framed on `scene`.
struct Projector
{
    Projector(const geometry::Aabb& scene, const Camera& cam, int size);

    geometry::Vec3 project(const geometry::Vec3& p) const;  // (px, py, view depth)
    geometry::Vec3 eye;
    geometry::Vec3 forward;

private:
    geometry::Vec3 _right;
    geometry::Vec3 _up;
    double _tan_half = 0.0;
    int _size = 0;
};

} // namespace shapecraft::render
