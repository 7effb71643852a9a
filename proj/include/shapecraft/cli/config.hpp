// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shapecraft/agents/session.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace shapecraft::cli
{

class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view config_file_name = "shapecraft.json";

/// Everything a run needs besides the backend itself.
struct Settings
{
    agents::AgentOptions options;
    agents::Roles roles;
    int sample_points = 10000;
    int voxel_res = 64;
    std::uint64_t seed = 0;
};

/// Built-in defaults: M=3, T=3, s_tau=9, N=2, temperature 0.5, 512 px, 10000 points, 64 voxels.
Settings default_settings();

/// Applies a shapecraft.json document on top of `base`. Unknown keys and anything
/// that looks like a credential are rejected with ConfigError.
Settings apply_config(Settings base, std::string_view json_text);

/// Reads `path` if given, else ./shapecraft.json when it exists.
Settings load_settings(const std::optional<std::filesystem::path>& path);

/// Non-empty endpoint and model for every role, checked before live calls.
void require_live_backends(const Settings& s);

} // namespace shapecraft::cli
