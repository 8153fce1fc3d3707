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
 * @file series_io.hpp
 * Tables, CSV/JSON serialisation and atomic file output.
 *
 * Numbers are printed with %.12g so that re-runs produce byte-identical
 * files; missing values are empty CSV cells and JSON nulls.
 */
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pstlab/experiments.hpp"
#include "pstlab/mitigation.hpp"

namespace pstlab {

/// A rectangular table of optional numbers with named columns.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;
    /// Optional leading text column (empty name means none).
    std::string label_column;
    std::vector<std::string> labels;

    void add_row(std::vector<std::optional<double>> row);
    void add_row(std::string label, std::vector<std::optional<double>> row);
    [[nodiscard]] std::size_t column(std::string_view name) const;
    [[nodiscard]] bool has_column(std::string_view name) const;
};

std::string format_number(double value);

std::string to_csv(const Table &table);
/// Parses a CSV produced by to_csv. Empty cells become nullopt.
Table parse_csv(const std::string &text);
/// {"columns": [...], "rows": [[...], ...]} with nulls for missing cells.
nlohmann::json to_json(const Table &table);

/// Columns t, site, sp; one row per (time, site), time-major.
Table series_table(const SPTimeSeries &series);
/// Columns t, site, sp, sp_corrected. t is the raw noisy time; the corrected
/// value belongs to t·s.
Table corrected_table(const SPTimeSeries &noisy, const CorrectedSeries &corrected);
/// Columns t, site, sp, fidelity for the receiving qubit.
Table tomography_table(const TomographyRecord &record, int receiving_site);

nlohmann::json to_json(const SPTimeSeries &series);
nlohmann::json to_json(const TomographyRecord &record);

/// Writes through a sibling temporary file and renames it into place.
/// Throws IoError on failure.
void write_file_atomic(const std::filesystem::path &path, const std::string &content);
std::string read_file(const std::filesystem::path &path);

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace pstlab
