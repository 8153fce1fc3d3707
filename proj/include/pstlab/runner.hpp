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
 * @file runner.hpp
 * Executes run configurations and joins their outputs into reports.
 *
 * A run writes into <output_dir>/<run id>/: data files in the requested
 * format(s) and manifest.json, which is written last. File references in a
 * manifest are relative to its directory.
 */
#pragma once

#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pstlab/config.hpp"
#include "pstlab/series_io.hpp"

namespace pstlab {

enum class OutputFormat { Csv, Json, Both };

OutputFormat parse_output_format(std::string_view name);

/// A failed invariant or numerical error while running an experiment.
class SimulationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// 2 for schema violations, 4 for I/O failures, 3 for everything else.
int exit_code_for(const std::exception &e);

struct RunManifest {
    std::string run_id;
    std::filesystem::path path;
    nlohmann::json json;
};

RunManifest run_config(const RunConfig &config, OutputFormat format = OutputFormat::Both);

struct Report {
    /// t plus one column per series, on the first series' time grid.
    Table joined;
    /// One row per series: t_star, sp_star, improvement over the noisy
    /// reference, and whether the series was resampled.
    Table peaks;
    /// rank, j0, objective, t_star for every grid-search manifest.
    Table ranking;
    std::vector<std::string> warnings;
    nlohmann::json json;
};

Report build_report(const std::vector<std::filesystem::path> &manifests);

/// Builds the report and writes report_series, report_peaks, report_ranking
/// (when present) and report.json into `out_dir`.
Report emit_report(const std::vector<std::filesystem::path> &manifests,
                   const std::filesystem::path &out_dir,
                   OutputFormat format = OutputFormat::Both);

/// Loads a table written by a run (CSV, or the "table" member of JSON).
Table load_table(const std::filesystem::path &path);

} // namespace pstlab
