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

#include "pstlab/runner.hpp"

#include <chrono>
#include <cmath>
#include <map>

#include "pstlab/mitigation.hpp"
#include "pstlab/optimizer.hpp"

namespace pstlab {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json peak_json(const std::vector<double> &times, const std::vector<double> &values) {
    try {
        const Peak p = detect_first_peak(times, values);
        return {{"index", p.index}, {"t_star", p.t_star}, {"sp_star", p.sp_star}};
    } catch (const Error &) {
        return nullptr;
    }
}

void check_probabilities(const std::vector<double> &values, const std::string &what) {
    for (const double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw SimulationError(what + " left [0, 1]: " + std::to_string(v));
        }
    }
}

class RunWriter {
  public:
    RunWriter(fs::path dir, OutputFormat format) : dir_(std::move(dir)), format_(format) {}

    /// Writes stem.csv and/or stem.json; returns the preferred file name.
    std::string table(const std::string &stem, const Table &t, const json &meta = {}) {
        std::string preferred;
        if (format_ != OutputFormat::Json) {
            preferred = stem + ".csv";
            put(preferred, to_csv(t));
        }
        if (format_ != OutputFormat::Csv) {
            json j{{"table", to_json(t)}};
            if (!meta.is_null()) {
                j["meta"] = meta;
            }
            put(stem + ".json", j.dump(2) + "\n");
            if (preferred.empty()) {
                preferred = stem + ".json";
            }
        }
        return preferred;
    }

    void put(const std::string &name, const std::string &content) {
        write_file_atomic(dir_ / name, content);
        files_.push_back(name);
    }

    [[nodiscard]] const std::vector<std::string> &files() const { return files_; }

  private:
    fs::path dir_;
    OutputFormat format_;
    std::vector<std::string> files_;
};

Table ranking_table(const std::vector<GridRecord> &records) {
    Table t;
    t.columns = {"rank", "j0", "objective", "t_star"};
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto &r = records[i];
        t.add_row({static_cast<double>(i + 1), r.j0, r.objective.value,
                   std::isfinite(r.objective.t_star)
                       ? std::optional<double>(r.objective.t_star)
                       : std::nullopt});
    }
    return t;
}

ObjectiveSettings objective_settings(const ExperimentConfig &ec) {
    ObjectiveSettings s;
    s.plan = ec.plan;
    s.noise = ec.noise ? *ec.noise : NoiseParams::none();
    return s;
}

bool is_noisy(const ExperimentConfig &ec) { return ec.noise && ec.noise->any_enabled(); }

} // namespace

OutputFormat parse_output_format(std::string_view name) {
    if (name == "csv") {
        return OutputFormat::Csv;
    }
    if (name == "json") {
        return OutputFormat::Json;
    }
    if (name == "both") {
        return OutputFormat::Both;
    }
    throw ConfigError("unknown format '" + std::string(name) + "' (csv, json or both)");
}

int exit_code_for(const std::exception &e) {
    if (dynamic_cast<const ConfigError *>(&e)) {
        return 2;
    }
    if (dynamic_cast<const IoError *>(&e) || dynamic_cast<const fs::filesystem_error *>(&e)) {
        return 4;
    }
    return 3;
}

RunManifest run_config(const RunConfig &config, OutputFormat format) {
    const auto started = std::chrono::steady_clock::now();
    const std::string id = run_id(config);
    const fs::path dir = config.output_dir / id;
    const ExperimentConfig &ec = config.experiment;
    RunWriter out(dir, format);

    json series = json::array();
    json results = json::object();

    switch (config.kind) {
    case ExperimentKind::SpSeries:
    case ExperimentKind::SiteResolved: {
        const SPTimeSeries s = config.kind == ExperimentKind::SpSeries
                                   ? run_sp_series(ec)
                                   : run_site_resolved(ec);
        json peaks = json::object();
        for (std::size_t i = 0; i < s.sites.size(); ++i) {
            check_probabilities(s.values[i], "success probability");
            peaks[std::to_string(s.sites[i])] = peak_json(s.times, s.values[i]);
        }
        results["peaks"] = std::move(peaks);
        const std::string file = out.table("series", series_table(s), to_json(s));
        series.push_back({{"file", file}, {"noisy", is_noisy(ec)}});
        break;
    }
    case ExperimentKind::ArbitraryTransfer: {
        const TomographyRecord rec = run_arbitrary_transfer(ec);
        std::vector<double> times;
        std::vector<double> fid;
        std::vector<double> fid_pc;
        for (const auto &smp : rec.samples) {
            times.push_back(smp.t);
            fid.push_back(smp.fidelity);
            fid_pc.push_back(smp.fidelity_phase_corrected);
        }
        check_probabilities(fid, "fidelity");
        auto max_of = [&](const std::vector<double> &v) {
            std::size_t best = 0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (v[i] > v[best]) {
                    best = i;
                }
            }
            return json{{"index", best}, {"t", times[best]}, {"value", v[best]}};
        };
        results["fidelity_first_peak"] = peak_json(times, fid);
        results["fidelity_max"] = max_of(fid);
        results["phase_corrected_first_peak"] = peak_json(times, fid_pc);
        results["phase_corrected_max"] = max_of(fid_pc);
        const std::string file =
            out.table("transfer", tomography_table(rec, ec.n_sites()), to_json(rec));
        series.push_back({{"file", file}, {"noisy", is_noisy(ec)}});
        break;
    }
    case ExperimentKind::Rescale: {
        ExperimentConfig ideal_cfg = ec;
        ideal_cfg.noise.reset();
        ideal_cfg.shots.reset();
        const SPTimeSeries ideal = run_sp_series(ideal_cfg);
        const SPTimeSeries noisy = run_sp_series(ec);
        check_probabilities(noisy.only(), "success probability");
        const RescaleFit fit = fit_rescaling(noisy, ideal);
        const CorrectedSeries corrected = apply_rescaling(noisy, ideal, fit.params);

        std::vector<double> ct;
        std::vector<double> cv;
        for (std::size_t k = 0; k < corrected.reliable.size(); ++k) {
            if (corrected.reliable[k]) {
                ct.push_back(corrected.corrected.times[k]);
                cv.push_back(corrected.corrected.values[0][k]);
            }
        }
        const json corrected_peak = peak_json(ct, cv);
        results["alpha"] = fit.params.alpha;
        results["beta"] = fit.params.beta;
        results["s"] = fit.params.s;
        results["sse"] = fit.sse;
        results["fit_samples"] = fit.samples;
        results["ideal_peak"] = {{"t_star", fit.ideal_peak.t_star},
                                 {"sp_star", fit.ideal_peak.sp_star}};
        results["noisy_peak"] = {{"t_star", fit.noisy_peak.t_star},
                                 {"sp_star", fit.noisy_peak.sp_star}};
        results["corrected_peak"] = corrected_peak;
        if (!corrected_peak.is_null()) {
            const double gain = corrected_peak["sp_star"].get<double>() - fit.noisy_peak.sp_star;
            results["improvement"] = gain;
            results["improvement_pct"] = 100.0 * gain / fit.noisy_peak.sp_star;
        }
        const std::string ideal_file = out.table("ideal", series_table(ideal), to_json(ideal));
        const std::string file = out.table("rescale", corrected_table(noisy, corrected),
                                           {{"alpha", fit.params.alpha},
                                            {"beta", fit.params.beta},
                                            {"s", fit.params.s}});
        series.push_back({{"file", ideal_file}, {"noisy", false}, {"label", "ideal"}});
        series.push_back({{"file", file},
                          {"noisy", is_noisy(ec)},
                          {"time_scale", {{"sp_corrected", fit.params.s}}}});
        break;
    }
    case ExperimentKind::GridSearch: {
        const PeakObjective objective(objective_settings(ec));
        const auto records = grid_search_j0(std::cref(objective), ec.n_sites(),
                                            config.grid.lo, config.grid.hi,
                                            config.grid.step);
        json top = json::array();
        for (const auto &r : records) {
            check_probabilities({r.objective.value}, "objective");
            if (top.size() < 3) {
                top.push_back({{"j0", r.j0}, {"objective", r.objective.value},
                               {"t_star", nullable(r.objective.t_star)}});
            }
        }
        results["top"] = std::move(top);
        results["points"] = records.size();
        results["ranking_file"] = out.table("ranking", ranking_table(records));
        break;
    }
    case ExperimentKind::BayesOpt: {
        const PeakObjective objective(objective_settings(ec));
        const int n = ec.n_sites();
        const Parameterization p = config.bo.parameterization;
        BOConfig bo;
        bo.iterations_per_start = config.bo.iterations;
        bo.batch_size = config.bo.batch_size;
        bo.length_scale = config.bo.length_scale;
        bo.noise_std = config.bo.noise_std;
        bo.xi = config.bo.xi;
        bo.increment = config.bo.increment;
        bo.seed = ec.seed;
        std::optional<double> grid_best;
        if (config.bo.starts.empty()) {
            const auto records = grid_search_j0(std::cref(objective), n, config.grid.lo,
                                                config.grid.hi, config.grid.step, p);
            results["ranking_file"] = out.table("ranking", ranking_table(records));
            grid_best = records.front().objective.value;
            for (std::size_t i = 0;
                 i < records.size() && i < static_cast<std::size_t>(config.bo.top); ++i) {
                bo.starts.push_back(Candidate::uniform(n, records[i].j0, p));
            }
        } else {
            for (const auto &s : config.bo.starts) {
                Candidate c;
                c.params = s;
                c.parameterization = p;
                bo.starts.push_back(std::move(c));
            }
        }
        const BOResult r = bayes_optimize(bo, std::cref(objective));
        for (const auto &rec : r.ledger) {
            check_probabilities({rec.objective.value}, "objective");
        }
        const ObjectiveValue baseline = objective(Candidate::uniform(n, 1.0, p));
        out.put("ledger.jsonl", ledger_jsonl(r.ledger));
        json report{{"best", to_json(r.best)},
                    {"best_index", r.best_index},
                    {"objective", r.best_objective.value},
                    {"t_star", nullable(r.best_objective.t_star)},
                    {"baseline_j0_1", baseline.value},
                    {"improvement_over_baseline", r.best_objective.value - baseline.value},
                    {"evaluations", r.ledger.size()}};
        if (grid_best) {
            report["grid_best"] = *grid_best;
        }
        out.put("bo_report.json", report.dump(2) + "\n");
        results = std::move(report);
        break;
    }
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json manifest{{"run_id", id},
                  {"version", kVersion},
                  {"experiment", std::string(to_string(config.kind))},
                  {"name", config.name},
                  {"config", config.canonical},
                  {"outputs", out.files()},
                  {"series", std::move(series)},
                  {"results", std::move(results)},
                  {"duration_s", seconds}};
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
    return {id, dir / "manifest.json", std::move(manifest)};
}

Table load_table(const fs::path &path) {
    const std::string text = read_file(path);
    if (path.extension() == ".csv") {
        return parse_csv(text);
    }
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.contains("table")) {
        throw IoError(path.string() + " holds no table");
    }
    Table t;
    t.columns = j["table"]["columns"].get<std::vector<std::string>>();
    for (const auto &row : j["table"]["rows"]) {
        std::vector<std::optional<double>> r;
        for (const auto &cell : row) {
            r.push_back(cell.is_null() ? std::nullopt : std::optional<double>(cell.get<double>()));
        }
        t.add_row(std::move(r));
    }
    return t;
}

namespace {

struct Column {
    std::string label;
    std::string kind;
    bool noisy;
    std::size_t manifest;
    std::vector<double> raw_times;
    std::vector<double> xs;
    std::vector<double> ys;
};

bool same_grid(const std::vector<double> &a, const std::vector<double> &b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > 1e-12) {
            return false;
        }
    }
    return true;
}

std::optional<double> interpolate_inside(const std::vector<double> &xs,
                                         const std::vector<double> &ys, double x) {
    if (xs.empty() || x < xs.front() - 1e-12 || x > xs.back() + 1e-12) {
        return std::nullopt;
    }
    return interpolate(xs, ys, x);
}

} // namespace

Report build_report(const std::vector<fs::path> &manifests) {
    if (manifests.empty()) {
        throw ConfigError("report needs at least one manifest");
    }
    Report report;
    report.ranking.label_column = "run";
    report.ranking.columns = {"rank", "j0", "objective", "t_star"};
    report.peaks.label_column = "series";
    report.peaks.columns = {"t_star", "sp_star", "improvement", "improvement_pct",
                            "resampled"};

    std::vector<Column> columns;
    json ids = json::array();
    for (const auto &mpath : manifests) {
        const json m = json::parse(read_file(mpath), nullptr, false);
        if (m.is_discarded() || !m.contains("run_id")) {
            throw IoError(mpath.string() + " is not a run manifest");
        }
        ids.push_back(m["run_id"]);
        const fs::path dir = mpath.parent_path();
        const std::string name = m.value("name", m["run_id"].get<std::string>());

        if (m["results"].contains("ranking_file")) {
            const Table r = load_table(dir / m["results"]["ranking_file"].get<std::string>());
            for (const auto &row : r.rows) {
                report.ranking.add_row(name, row);
            }
        }
        for (const auto &entry : m.value("series", json::array())) {
            const Table t = load_table(dir / entry["file"].get<std::string>());
            const std::string prefix = name + (entry.contains("label")
                                                   ? "/" + entry["label"].get<std::string>()
                                                   : "");
            const std::size_t tc = t.column("t");
            const std::size_t sc = t.column("site");
            std::map<int, std::vector<std::size_t>> by_site;
            for (std::size_t r = 0; r < t.rows.size(); ++r) {
                by_site[static_cast<int>(*t.rows[r][sc])].push_back(r);
            }
            for (const std::string kind : {"sp", "sp_corrected", "fidelity"}) {
                if (!t.has_column(kind)) {
                    continue;
                }
                const std::size_t vc = t.column(kind);
                const double scale =
                    entry.contains("time_scale") && entry["time_scale"].contains(kind)
                        ? entry["time_scale"][kind].get<double>()
                        : 1.0;
                for (const auto &[site, rows] : by_site) {
                    Column col;
                    col.label = prefix + ":" + kind +
                                (by_site.size() > 1 ? "@site" + std::to_string(site) : "");
                    col.kind = kind;
                    col.noisy = entry.value("noisy", false);
                    col.manifest = static_cast<std::size_t>(ids.size() - 1);
                    for (const std::size_t r : rows) {
                        const double tt = *t.rows[r][tc];
                        col.raw_times.push_back(tt);
                        if (t.rows[r][vc]) {
                            col.xs.push_back(tt * scale);
                            col.ys.push_back(*t.rows[r][vc]);
                        }
                    }
                    columns.push_back(std::move(col));
                }
            }
        }
    }

    if (!columns.empty()) {
        const std::vector<double> base = columns.front().raw_times;
        report.joined.columns.push_back("t");
        for (const auto &c : columns) {
            report.joined.columns.push_back(c.label);
        }
        std::vector<bool> resampled(columns.size(), false);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (!same_grid(columns[c].raw_times, base)) {
                resampled[c] = true;
                report.warnings.push_back("warning: " + columns[c].label +
                                          " resampled onto the common time grid by "
                                          "linear interpolation");
            }
        }
        for (std::size_t k = 0; k < base.size(); ++k) {
            std::vector<std::optional<double>> row{base[k]};
            for (std::size_t c = 0; c < columns.size(); ++c) {
                const Column &col = columns[c];
                const bool direct = !resampled[c] && same_grid(col.xs, col.raw_times);
                row.push_back(direct ? std::optional<double>(col.ys[k])
                                     : interpolate_inside(col.xs, col.ys, base[k]));
            }
            report.joined.add_row(std::move(row));
        }

        // A corrected column is compared with the raw noisy series of its own
        // run, falling back to the first noisy series of the report.
        auto reference_for = [&](const Column &target) -> std::optional<double> {
            const Column *fallback = nullptr;
            const Column *own = nullptr;
            for (const auto &col : columns) {
                if (col.kind != "sp" || !col.noisy) {
                    continue;
                }
                if (!fallback) {
                    fallback = &col;
                }
                if (!own && col.manifest == target.manifest) {
                    own = &col;
                }
            }
            const Column *ref = own ? own : fallback;
            if (!ref) {
                return std::nullopt;
            }
            try {
                return detect_first_peak(ref->xs, ref->ys).sp_star;
            } catch (const Error &) {
                return std::nullopt;
            }
        };
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const Column &col = columns[c];
            std::vector<std::optional<double>> row(5);
            try {
                const Peak p = detect_first_peak(col.xs, col.ys);
                row[0] = p.t_star;
                row[1] = p.sp_star;
                const auto reference =
                    col.kind == "sp_corrected" ? reference_for(col) : std::nullopt;
                if (reference && *reference > 0.0) {
                    row[2] = p.sp_star - *reference;
                    row[3] = 100.0 * (p.sp_star - *reference) / *reference;
                }
            } catch (const Error &) {
            }
            row[4] = resampled[c] ? 1.0 : 0.0;
            report.peaks.add_row(col.label, std::move(row));
        }
        for (const auto &w : report.warnings) {
            report.peaks.add_row(w, std::vector<std::optional<double>>(5));
        }
    }

    report.json = {{"manifests", ids},
                   {"joined", to_json(report.joined)},
                   {"peaks", to_json(report.peaks)},
                   {"ranking", to_json(report.ranking)},
                   {"warnings", report.warnings}};
    return report;
}

Report emit_report(const std::vector<fs::path> &manifests, const fs::path &out_dir,
                   OutputFormat format) {
    Report report = build_report(manifests);
    if (format != OutputFormat::Json) {
        write_file_atomic(out_dir / "report_series.csv", to_csv(report.joined));
        write_file_atomic(out_dir / "report_peaks.csv", to_csv(report.peaks));
        if (!report.ranking.rows.empty()) {
            write_file_atomic(out_dir / "report_ranking.csv", to_csv(report.ranking));
        }
    }
    if (format != OutputFormat::Csv) {
        write_file_atomic(out_dir / "report.json", report.json.dump(2) + "\n");
    }
    return report;
}

} // namespace pstlab
