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

// pstlab: run experiment configs, join their outputs, draw circuits.
//
//   pstlab run --config cfg.json [--set noise.zeta=0.2] [--seed 7]
//              [--out runs] [--format csv|json|both]
//   pstlab report runs/<id>/manifest.json ... [--out reports]
//   pstlab circuit --config cfg.json [--no-noise]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pstlab/config.hpp"
#include "pstlab/experiments.hpp"
#include "pstlab/runner.hpp"

namespace {

int guarded(const std::function<void()> &body) {
    try {
        body();
        return 0;
    } catch (const std::exception &e) {
        const int code = pstlab::exit_code_for(e);
        const char *kind = code == 2 ? "config error" : code == 4 ? "i/o error" : "simulation error";
        std::cerr << "pstlab: " << kind << ": " << e.what() << '\n';
        return code;
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Noisy perfect-state-transfer laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", pstlab::kVersion);

    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string format = "both";

    auto *run = app.add_subcommand("run", "Run one experiment config");
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--set", overrides, "Dotted-path override key=value (repeatable)");
    run->add_option("--seed", seed, "Seed override");
    run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    run->add_option("--format", format, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    std::vector<std::string> manifests;
    std::string report_out = ".";
    auto *report = app.add_subcommand("report", "Join run manifests into comparison tables");
    report->add_option("manifests", manifests, "manifest.json files")->required();
    report->add_option("--out", report_out, "Directory for report files");
    report->add_option("--format", format, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    bool no_noise = false;
    auto *circuit = app.add_subcommand("circuit", "Print the circuit of a config");
    circuit->add_option("--config", config_path, "JSON config file")->required();
    circuit->add_option("--set", overrides, "Dotted-path override key=value");
    circuit->add_flag("--no-noise", no_noise, "Hide attached channels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*run) {
        return guarded([&] {
            std::vector<std::string> all = overrides;
            if (!out_dir.empty()) {
                all.push_back("output_dir=\"" + out_dir + "\"");
            }
            const auto cfg = pstlab::load_run_config(config_path, all, seed);
            const auto manifest =
                pstlab::run_config(cfg, pstlab::parse_output_format(format));
            std::cout << manifest.path.string() << '\n';
        });
    }
    if (*report) {
        return guarded([&] {
            std::vector<std::filesystem::path> paths(manifests.begin(), manifests.end());
            const auto r = pstlab::emit_report(paths, report_out,
                                               pstlab::parse_output_format(format));
            for (const auto &w : r.warnings) {
                std::cerr << w << '\n';
            }
            std::cout << pstlab::to_csv(r.peaks);
        });
    }
    return guarded([&] {
        const auto cfg = pstlab::load_run_config(config_path, overrides);
        const auto c = pstlab::build_experiment_circuit(cfg.experiment);
        std::cout << pstlab::render_circuit(c, !no_noise);
    });
}
