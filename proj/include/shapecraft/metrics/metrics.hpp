// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/executor/executor.hpp"
#include "shapecraft/geometry/mesh.hpp"
#include "shapecraft/llm/backend.hpp"
#include "shapecraft/render/render.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace shapecraft::metrics
{

enum class MetricsErrc
{
    EmptyMesh,
    EmptyCloud,
    OpenMesh,
    EmptyVoxelization,
    InvalidArgument,
};

class MetricsError : public std::runtime_error
{
public:
    MetricsError(MetricsErrc code, std::string message) : std::runtime_error(std::move(message)), _code(code) {}
    MetricsErrc code() const noexcept { return _code; }

private:
    MetricsErrc _code;
};

using PointCloud = std::vector<geometry::Vec3>;

inline constexpr int default_sample_points = 10000;
inline constexpr int default_voxel_resolution = 64;

/// Area-weighted uniform surface samples, deterministic for a given seed.
PointCloud sample_points(const geometry::Mesh& mesh, int n, std::uint64_t seed);

/// Symmetric Hausdorff distance. Uses a k-d tree; the result equals the brute force value.
double hausdorff(const PointCloud& a, const PointCloud& b);

/// Maps the ground truth's bounding box into [0,1]^3 with one uniform scale, centred.
struct UnitFrame
{
    geometry::Vec3 center;
    double scale = 1.0;

    geometry::Vec3 apply(const geometry::Vec3& p) const;
};

UnitFrame unit_frame(const geometry::Mesh& ground_truth);

/// Solid occupancy on a res^3 grid over [0,1]^3, sampled at voxel centres, x fastest.
std::vector<std::uint8_t> voxelize(const geometry::Mesh& mesh, const UnitFrame& frame, int resolution);

/// |V_gen and V_gt| / |V_gt| in the ground truth's unit frame.
double iogt(const geometry::Mesh& generated, const geometry::Mesh& ground_truth, int resolution = default_voxel_resolution);

struct RunOutcome
{
    bool assembled_nonempty = false;
    bool nodes_ok = false;

    bool ok() const { return assembled_nonempty && nodes_ok; }
};

RunOutcome outcome_of(const executor::Assembly& assembly);

double compile_rate(const std::vector<RunOutcome>& outcomes);

enum class Answer
{
    Yes,
    No,
    Unclear,
};

std::string_view answer_name(Answer a);

/// First word of the reply; anything other than yes or no is unclear.
Answer normalize_answer(std::string_view reply);

struct VqaResult
{
    std::vector<Answer> answers;
    double pass_rate = 0.0;
};

/// Asks every question against all renders, one request per question.
VqaResult vqa_pass_rate(const std::vector<render::Image>& renders, const std::vector<std::string>& questions,
                        llm::Backend& backend, const llm::BackendConfig& cfg);

} // namespace shapecraft::metrics
