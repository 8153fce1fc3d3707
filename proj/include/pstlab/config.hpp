// Copyright 2026 The pstlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file config.hpp
 * JSON run configuration.
 *
 *     {
 *       "experiment": "sp_series",        // site_resolved, arbitrary_transfer,
 *                                         // rescale, grid_search, bayes_opt
 *       "name": "comprehensive",          // optional label for reports
 *       "chain": {"n": 4, "j0": 1.0},     // or {"couplings": [...]}
 *       "plan": {"total_time": "2pi", "steps": 80},
 *       "noise": {},                      // device defaults; null = ideal
 *       "initial": {"type": "single_excitation", "site": 1},
 *       "sites": [4],
 *       "shots": null,
 *       "seed": 0,
 *       "output_dir": "runs",
 *       "grid": {"lo": 0.1, "hi": 4.0, "step": 0.1},
 *       "bo": {"top": 3, "iterations": 5, ...}
 *     }
 *
 * Times may be numbers or multiples of π written as "0.5pi", "pi", "2*pi".
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pstlab/experiments.hpp"
#include "pstlab/optimizer.hpp"

namespace pstlab {

inline constexpr const char *kVersion = "0.1.0";

/// Schema violation in a run configuration.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
    SpSeries,
    SiteResolved,
    ArbitraryTransfer,
    Rescale,
    GridSearch,
    BayesOpt
};

ExperimentKind parse_experiment_kind(std::string_view name);
std::string_view to_string(ExperimentKind kind);

struct GridSettings {
    double lo = 0.1;
    double hi = 4.0;
    double step = 0.1;
};

struct BOSettings {
    /// Number of grid winners used as starting points.
    int top = 3;
    /// Explicit starting parameter vectors; replaces the grid when set.
    std::vector<std::vector<double>> starts;
    int iterations = 5;
    int batch_size = 256;
    double length_scale = 0.1;
    double noise_std = 1e-4;
    double xi = 0.01;
    double increment = 0.01;
    Parameterization parameterization = Parameterization::ScaleFactors;
};

struct RunConfig {
    ExperimentKind kind = ExperimentKind::SpSeries;
    std::string name;
    ExperimentConfig experiment;
    GridSettings grid;
    BOSettings bo;
    std::filesystem::path output_dir = "runs";
    /// Canonical echo of the effective configuration (defaults filled in).
    nlohmann::json canonical;
};

/// Number or π-multiple string ("0.5pi", "pi", "2*pi", "-pi").
double parse_time(const nlohmann::json &value);

/// Applies "a.b.c=value" overrides; the value is parsed as JSON when
/// possible and kept as a string otherwise.
void apply_override(nlohmann::json &config, const std::string &assignment);

/// Validates and converts. Throws ConfigError.
RunConfig parse_run_config(const nlohmann::json &config);

/// Reads the file, applies the overrides and an optional seed, then parses.
RunConfig load_run_config(const std::filesystem::path &path,
                          const std::vector<std::string> &overrides = {},
                          std::optional<std::uint64_t> seed = std::nullopt);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);

/// Hex digest of the canonical configuration (the seed is part of it).
std::string run_id(const RunConfig &config);

} // namespace pstlab
