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

#include "pstlab/series_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pstlab {

namespace {

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::optional<double> finite_or_none(double v) {
    return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
}

} // namespace

void Table::add_row(std::vector<std::optional<double>> row) {
    if (row.size() != columns.size()) {
        throw std::invalid_argument("row width does not match the table");
    }
    rows.push_back(std::move(row));
}

void Table::add_row(std::string label, std::vector<std::optional<double>> row) {
    if (label_column.empty()) {
        throw std::invalid_argument("table has no label column");
    }
    add_row(std::move(row));
    // Labels are free text; keep the CSV single-field.
    std::replace(label.begin(), label.end(), ',', ';');
    labels.push_back(std::move(label));
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) {
            return i;
        }
    }
    throw std::out_of_range("no column '" + std::string(name) + "'");
}

bool Table::has_column(std::string_view name) const {
    for (const auto &c : columns) {
        if (c == name) {
            return true;
        }
    }
    return false;
}

std::string format_number(double value) {
    if (!std::isfinite(value)) {
        return "";
    }
    if (value == 0.0) {
        return "0"; // folds -0
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::string to_csv(const Table &table) {
    const bool labelled = !table.label_column.empty();
    std::string out = labelled ? table.label_column : "";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out += (i || labelled ? "," : "") + table.columns[i];
    }
    out += '\n';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto &row = table.rows[r];
        if (labelled) {
            out += table.labels[r];
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i || labelled) {
                out += ',';
            }
            if (row[i]) {
                out += format_number(*row[i]);
            }
        }
        out += '\n';
    }
    return out;
}

Table parse_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    Table table;
    if (!std::getline(in, line)) {
        throw IoError("empty CSV");
    }
    table.columns = split(line, ',');
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != table.columns.size()) {
            throw IoError("ragged CSV row: " + line);
        }
        std::vector<std::optional<double>> row;
        for (const auto &c : cells) {
            if (c.empty()) {
                row.emplace_back();
                continue;
            }
            try {
                std::size_t used = 0;
                row.emplace_back(std::stod(c, &used));
                if (used != c.size()) {
                    throw std::invalid_argument(c);
                }
            } catch (const std::exception &) {
                throw IoError("non-numeric CSV cell '" + c + "'");
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

nlohmann::json to_json(const Table &table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &row : table.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto &cell : row) {
            r.push_back(cell ? nlohmann::json(*cell) : nlohmann::json(nullptr));
        }
        rows.push_back(std::move(r));
    }
    nlohmann::json j{{"columns", table.columns}, {"rows", std::move(rows)}};
    if (!table.label_column.empty()) {
        j["label_column"] = table.label_column;
        j["labels"] = table.labels;
    }
    return j;
}

Table series_table(const SPTimeSeries &series) {
    Table t;
    t.columns = {"t", "site", "sp"};
    for (std::size_t k = 0; k < series.size(); ++k) {
        for (std::size_t s = 0; s < series.sites.size(); ++s) {
            t.add_row({series.times[k], static_cast<double>(series.sites[s]),
                       finite_or_none(series.values[s][k])});
        }
    }
    return t;
}

Table corrected_table(const SPTimeSeries &noisy, const CorrectedSeries &corrected) {
    Table t;
    t.columns = {"t", "site", "sp", "sp_corrected"};
    const double site = noisy.sites.empty() ? 0.0 : noisy.sites.front();
    for (std::size_t k = 0; k < noisy.size(); ++k) {
        t.add_row({noisy.times[k], site, finite_or_none(corrected.raw[k]),
                   finite_or_none(corrected.corrected.values[0][k])});
    }
    return t;
}

Table tomography_table(const TomographyRecord &record, int receiving_site) {
    Table t;
    t.columns = {"t", "site", "sp", "fidelity"};
    for (const auto &s : record.samples) {
        t.add_row({s.t, static_cast<double>(receiving_site), sp_from_z(s.z),
                   s.fidelity});
    }
    return t;
}

nlohmann::json to_json(const SPTimeSeries &series) {
    nlohmann::json values = nlohmann::json::array();
    for (const auto &v : series.values) {
        nlohmann::json row = nlohmann::json::array();
        for (const double x : v) {
            row.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
        }
        values.push_back(std::move(row));
    }
    nlohmann::json j{{"times", series.times},
                     {"sites", series.sites},
                     {"values", std::move(values)},
                     {"seed", series.seed},
                     {"config_hash", series.config_hash}};
    if (!series.projector.empty()) {
        j["projector"] = series.projector;
    }
    return j;
}

nlohmann::json to_json(const TomographyRecord &record) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto &s : record.samples) {
        samples.push_back({{"t", s.t},
                           {"x", s.x},
                           {"y", s.y},
                           {"z", s.z},
                           {"fidelity", s.fidelity},
                           {"fidelity_phase_corrected", s.fidelity_phase_corrected}});
    }
    return {{"a", {record.a.real(), record.a.imag()}},
            {"b", {record.b.real(), record.b.imag()}},
            {"samples", std::move(samples)}};
}

void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create " + path.parent_path().string() + ": " +
                          ec.message());
        }
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw IoError("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at " + path.string());
    }
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace pstlab
