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


#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <unistd.h>

#include "pstlab/config.hpp"
#include "pstlab/runner.hpp"

using namespace pstlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
    const fs::path dir = fs::temp_directory_path() /
                         ("pstlab_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json ideal_json(const fs::path &out) {
    return json{{"experiment", "sp_series"},
                {"name", "ideal"},
                {"chain", {{"n", 4}, {"j0", 1.0}}},
                {"plan", {{"total_time", "2pi"}, {"steps", 80}}},
                {"noise", nullptr},
                {"output_dir", out.string()}};
}

} // namespace

TEST_CASE("time strings") {
    CHECK(parse_time(json(1.5)) == 1.5);
    CHECK(parse_time(json("pi")) == doctest::Approx(kPi));
    CHECK(parse_time(json("0.5pi")) == doctest::Approx(kPi / 2));
    CHECK(parse_time(json("2*pi")) == doctest::Approx(2 * kPi));
    CHECK(parse_time(json("-pi")) == doctest::Approx(-kPi));
    CHECK(parse_time(json("2.5")) == 2.5);
    CHECK_THROWS_AS(parse_time(json("tau")), ConfigError);
    CHECK_THROWS_AS(parse_time(json(true)), ConfigError);
}

TEST_CASE("dotted overrides") {
    json cfg = ideal_json("runs");
    apply_override(cfg, "chain.n=6");
    apply_override(cfg, "plan.total_time=pi");
    apply_override(cfg, "noise={\"t1\": 1e-4}");
    apply_override(cfg, "initial.site=2");
    CHECK(cfg["chain"]["n"] == 6);
    CHECK(cfg["plan"]["total_time"] == "pi");
    CHECK(cfg["noise"]["t1"] == 1e-4);
    CHECK(cfg["initial"]["site"] == 2);
    CHECK_THROWS_AS(apply_override(cfg, "no_equals_sign"), ConfigError);
    const auto parsed = parse_run_config(cfg);
    CHECK(parsed.experiment.n_sites() == 6);
    CHECK(parsed.experiment.plan.total_time == doctest::Approx(kPi));
}

TEST_CASE("schema violations are config errors") {
    json one = ideal_json("runs");
    one["chain"]["n"] = 1;
    CHECK_THROWS_AS(parse_run_config(one), ConfigError);

    json unknown = ideal_json("runs");
    unknown["colour"] = "blue";
    CHECK_THROWS_AS(parse_run_config(unknown), ConfigError);

    json both = ideal_json("runs");
    both["chain"]["couplings"] = {1.0, 2.0, 1.0};
    CHECK_THROWS_AS(parse_run_config(both), ConfigError);

    json kind = ideal_json("runs");
    kind["experiment"] = "teleport";
    CHECK_THROWS_AS(parse_run_config(kind), ConfigError);

    json noise = ideal_json("runs");
    noise["noise"] = {{"t1", -1.0}};
    CHECK_THROWS_AS(parse_run_config(noise), ConfigError);

    json steps = ideal_json("runs");
    steps["plan"]["steps"] = 0;
    CHECK_THROWS_AS(parse_run_config(steps), ConfigError);

    json rescale = ideal_json("runs");
    rescale["experiment"] = "rescale";
    rescale["sites"] = {3, 4};
    CHECK_THROWS_AS(parse_run_config(rescale), ConfigError);

    const ConfigError err("x");
    CHECK(exit_code_for(err) == 2);
    CHECK(exit_code_for(IoError("x")) == 4);
    CHECK(exit_code_for(SimulationError("x")) == 3);
    CHECK(exit_code_for(std::runtime_error("x")) == 3);
}

TEST_CASE("defaults are filled into the canonical config") {
    const auto cfg = parse_run_config(json{{"experiment", "sp_series"}, {"chain", {{"n", 4}}}});
    CHECK(cfg.experiment.noise.has_value());
    CHECK(cfg.experiment.plan.n_steps == 80);
    CHECK(cfg.canonical["noise"]["q_depol"] == 2.5e-3);
    CHECK(cfg.canonical["sites"] == json{4});
    const auto plus = parse_run_config(
        json{{"experiment", "arbitrary_transfer"}, {"chain", {{"n", 4}}}});
    CHECK(plus.experiment.initial.type == InitialKind::Type::PlusOnFirst);
}

TEST_CASE("run ids are stable and seed dependent") {
    const auto a = parse_run_config(ideal_json("a"));
    const auto b = parse_run_config(ideal_json("b"));
    CHECK(run_id(a) == run_id(b)); // output location is not part of the identity
    CHECK(run_id(a).size() == 16);
    json seeded = ideal_json("a");
    seeded["seed"] = 3;
    CHECK(run_id(parse_run_config(seeded)) != run_id(a));
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("a run writes 81 samples and re-runs byte for byte") {
    const fs::path out = scratch("rerun");
    json j = ideal_json(out);
    j["noise"] = json::object();
    const auto cfg = parse_run_config(j);
    const auto first = run_config(cfg, OutputFormat::Both);
    CHECK(first.path == out / run_id(cfg) / "manifest.json");
    const Table t = load_table(first.path.parent_path() / "series.csv");
    CHECK(t.rows.size() == 81);
    CHECK(load_table(first.path.parent_path() / "series.json").rows.size() == 81);
    const std::string csv = read_file(first.path.parent_path() / "series.csv");
    const auto second = run_config(cfg, OutputFormat::Both);
    CHECK(read_file(second.path.parent_path() / "series.csv") == csv);
    CHECK(first.json["results"]["peaks"]["4"]["index"] == 20);
    CHECK(first.json["run_id"] == run_id(cfg));
}

TEST_CASE("csv round trip") {
    Table t;
    t.columns = {"a", "b"};
    t.add_row({1.5, std::nullopt});
    t.add_row({-0.0, 1e-13});
    const std::string text = to_csv(t);
    CHECK(text == "a,b\n1.5,\n0,1e-13\n");
    const Table back = parse_csv(text);
    CHECK(back.columns == t.columns);
    CHECK_FALSE(back.rows[0][1].has_value());
    CHECK(*back.rows[1][1] == 1e-13);
    CHECK(format_number(std::nan("")) == "");
    CHECK(format_number(0.1 + 0.2) == "0.3");
}

TEST_CASE("a single-manifest report reproduces its series") {
    const fs::path out = scratch("single");
    const auto m = run_config(parse_run_config(ideal_json(out)), OutputFormat::Csv);
    const Report r = build_report({m.path});
    const Table series = load_table(m.path.parent_path() / "series.csv");
    REQUIRE(r.joined.rows.size() == series.rows.size());
    REQUIRE(r.joined.columns.size() == 2);
    for (std::size_t k = 0; k < series.rows.size(); ++k) {
        CHECK(*r.joined.rows[k][0] == *series.rows[k][0]);
        CHECK(*r.joined.rows[k][1] == *series.rows[k][2]);
    }
    CHECK(r.warnings.empty());
    REQUIRE(r.peaks.rows.size() == 1);
    CHECK(*r.peaks.rows[0][0] == doctest::Approx(kPi / 2));

    const fs::path rep = scratch("single_report");
    emit_report({m.path}, rep, OutputFormat::Both);
    CHECK(fs::exists(rep / "report_series.csv"));
    CHECK(fs::exists(rep / "report_peaks.csv"));
    CHECK(fs::exists(rep / "report.json"));
}

TEST_CASE("grid search manifests feed the ranking table") {
    const fs::path out = scratch("grid");
    json j = ideal_json(out);
    j["experiment"] = "grid_search";
    j["chain"] = {{"n", 4}};
    const auto m = run_config(parse_run_config(j), OutputFormat::Csv);
    const Report r = build_report({m.path});
    CHECK(r.ranking.rows.size() == 40);
    CHECK(r.ranking.labels.front() == "ideal");
    CHECK(*r.ranking.rows.front()[0] == 1.0);
}

TEST_CASE("series on different grids are resampled with a warning") {
    const fs::path out = scratch("mixed");
    const auto fine = run_config(parse_run_config(ideal_json(out)), OutputFormat::Csv);
    json coarse_json = ideal_json(out);
    coarse_json["name"] = "coarse";
    coarse_json["plan"]["steps"] = 40;
    const auto coarse = run_config(parse_run_config(coarse_json), OutputFormat::Csv);
    const Report r = build_report({fine.path, coarse.path});
    CHECK(r.joined.columns.size() == 3);
    CHECK(r.joined.rows.size() == 81);
    CHECK_FALSE(r.warnings.empty());
    CHECK_THROWS(build_report({}));
    CHECK_THROWS_AS(build_report({out / "missing.json"}), IoError);
}
