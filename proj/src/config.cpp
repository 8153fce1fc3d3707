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

#include "pstlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "pstlab/series_io.hpp"

namespace pstlab {

namespace {

using nlohmann::json;

void check_keys(const json &j, const std::set<std::string> &allowed,
                const std::string &where) {
    if (!j.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto &[key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

double number(const json &j, const std::string &what) {
    if (!j.is_number()) {
        throw ConfigError(what + " must be a number");
    }
    return j.get<double>();
}

long long integer(const json &j, const std::string &what) {
    if (!j.is_number_integer()) {
        throw ConfigError(what + " must be an integer");
    }
    return j.get<long long>();
}

Complex complex_value(const json &j, const std::string &what) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ConfigError(what + " must be a number or [re, im]");
}

InitialKind parse_initial(const json &j) {
    check_keys(j, {"type", "site", "a", "b"}, "initial");
    const std::string type = j.value("type", "single_excitation");
    if (type == "single_excitation") {
        return InitialKind::single_excitation(
            static_cast<int>(integer(j.value("site", json(1)), "initial.site")));
    }
    if (type == "plus") {
        return InitialKind::plus_on_first();
    }
    if (type == "amplitudes") {
        if (!j.contains("a") || !j.contains("b")) {
            throw ConfigError("initial amplitudes need both 'a' and 'b'");
        }
        return InitialKind::amplitudes(complex_value(j["a"], "initial.a"),
                                       complex_value(j["b"], "initial.b"));
    }
    throw ConfigError("unknown initial type '" + type +
                      "' (expected single_excitation, plus or amplitudes)");
}

json initial_to_json(const InitialKind &k) {
    switch (k.type) {
    case InitialKind::Type::SingleExcitation:
        return {{"type", "single_excitation"}, {"site", k.site}};
    case InitialKind::Type::PlusOnFirst:
        return {{"type", "plus"}};
    case InitialKind::Type::Amplitudes:
        return {{"type", "amplitudes"},
                {"a", {k.a.real(), k.a.imag()}},
                {"b", {k.b.real(), k.b.imag()}}};
    }
    return {};
}

} // namespace

ExperimentKind parse_experiment_kind(std::string_view name) {
    static const std::pair<std::string_view, ExperimentKind> table[] = {
        {"sp_series", ExperimentKind::SpSeries},
        {"site_resolved", ExperimentKind::SiteResolved},
        {"arbitrary_transfer", ExperimentKind::ArbitraryTransfer},
        {"rescale", ExperimentKind::Rescale},
        {"grid_search", ExperimentKind::GridSearch},
        {"bayes_opt", ExperimentKind::BayesOpt},
    };
    for (const auto &[n, k] : table) {
        if (n == name) {
            return k;
        }
    }
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::SpSeries:
        return "sp_series";
    case ExperimentKind::SiteResolved:
        return "site_resolved";
    case ExperimentKind::ArbitraryTransfer:
        return "arbitrary_transfer";
    case ExperimentKind::Rescale:
        return "rescale";
    case ExperimentKind::GridSearch:
        return "grid_search";
    case ExperimentKind::BayesOpt:
        return "bayes_opt";
    }
    return "?";
}

double parse_time(const json &value) {
    if (value.is_number()) {
        return value.get<double>();
    }
    if (!value.is_string()) {
        throw ConfigError("time must be a number or a string like \"0.5pi\"");
    }
    std::string s = value.get<std::string>();
    std::erase(s, ' ');
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
        std::string factor = s.substr(0, s.size() - 2);
        if (!factor.empty() && factor.back() == '*') {
            factor.pop_back();
        }
        if (factor.empty() || factor == "+") {
            return kPi;
        }
        if (factor == "-") {
            return -kPi;
        }
        try {
            std::size_t used = 0;
            const double f = std::stod(factor, &used);
            if (used == factor.size()) {
                return f * kPi;
            }
        } catch (const std::exception &) {
        }
        throw ConfigError("cannot parse time '" + value.get<std::string>() + "'");
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) {
            return v;
        }
    } catch (const std::exception &) {
    }
    throw ConfigError("cannot parse time '" + value.get<std::string>() + "'");
}

void apply_override(json &config, const std::string &assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + assignment + "' is not key=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) {
        value = text;
    }
    json *node = &config;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) {
            throw ConfigError("empty key in override '" + assignment + "'");
        }
        if (!node->is_object()) {
            if (!node->is_null()) {
                throw ConfigError("override '" + path + "' descends into a non-object");
            }
            *node = json::object();
        }
        if (dot == std::string::npos) {
            (*node)[key] = std::move(value);
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

RunConfig parse_run_config(const json &j) {
    check_keys(j,
               {"experiment", "name", "chain", "plan", "noise", "initial", "sites",
                "shots", "seed", "output_dir", "grid", "bo"},
               "config");
    RunConfig rc;
    if (!j.contains("experiment") || !j["experiment"].is_string()) {
        throw ConfigError("config needs a string 'experiment'");
    }
    rc.kind = parse_experiment_kind(j["experiment"].get<std::string>());
    if (j.contains("name")) {
        if (!j["name"].is_string()) {
            throw ConfigError("name must be a string");
        }
        rc.name = j["name"].get<std::string>();
    }
    if (rc.name.empty()) {
        rc.name = std::string(to_string(rc.kind));
    }

    ExperimentConfig &ec = rc.experiment;
    try {
        const json chain = j.value("chain", json::object());
        check_keys(chain, {"n", "j0", "couplings"}, "chain");
        if (chain.contains("couplings")) {
            if (chain.contains("j0")) {
                throw ConfigError("chain takes either j0 or couplings, not both");
            }
            const json &c = chain["couplings"];
            if (!c.is_array()) {
                throw ConfigError("chain.couplings must be an array");
            }
            std::vector<double> bonds;
            for (const auto &b : c) {
                bonds.push_back(number(b, "chain.couplings[]"));
            }
            if (chain.contains("n") &&
                integer(chain["n"], "chain.n") != static_cast<long long>(bonds.size()) + 1) {
                throw ConfigError("chain.n does not match the number of couplings");
            }
            if (bonds.empty()) {
                throw ConfigError("chain needs at least two sites");
            }
            ec.couplings = CouplingProfile(std::move(bonds));
        } else {
            const long long n = integer(chain.value("n", json(4)), "chain.n");
            if (n < 2) {
                throw ConfigError("chain.n must be >= 2 (got " + std::to_string(n) + ")");
            }
            if (n > 12) {
                throw ConfigError("chain.n must be <= 12");
            }
            const double j0 = number(chain.value("j0", json(1.0)), "chain.j0");
            if (!(j0 > 0.0)) {
                throw ConfigError("chain.j0 must be > 0");
            }
            ec.couplings = pst_couplings(static_cast<int>(n), j0);
        }

        const json plan = j.value("plan", json::object());
        check_keys(plan, {"total_time", "steps"}, "plan");
        const double total = plan.contains("total_time")
                                 ? parse_time(plan["total_time"])
                                 : 2.0 * kPi;
        const long long steps = integer(plan.value("steps", json(80)), "plan.steps");
        if (steps < 1 || steps > 100000) {
            throw ConfigError("plan.steps must lie in [1, 100000]");
        }
        ec.plan = TrotterPlan(total, static_cast<int>(steps));

        if (!j.contains("noise")) {
            ec.noise = NoiseParams{};
        } else if (j["noise"].is_null()) {
            ec.noise.reset();
        } else {
            ec.noise = noise_params_from_json(j["noise"]);
        }

        if (j.contains("initial")) {
            ec.initial = parse_initial(j["initial"]);
        } else if (rc.kind == ExperimentKind::ArbitraryTransfer) {
            ec.initial = InitialKind::plus_on_first();
        }

        if (j.contains("sites")) {
            if (!j["sites"].is_array()) {
                throw ConfigError("sites must be an array of 1-based site indices");
            }
            for (const auto &s : j["sites"]) {
                ec.measured_sites.push_back(static_cast<int>(integer(s, "sites[]")));
            }
        } else if (rc.kind == ExperimentKind::SiteResolved) {
            for (int s = 1; s <= ec.n_sites(); ++s) {
                ec.measured_sites.push_back(s);
            }
        }

        if (j.contains("shots") && !j["shots"].is_null()) {
            const long long shots = integer(j["shots"], "shots");
            if (shots < 1) {
                throw ConfigError("shots must be >= 1");
            }
            ec.shots = static_cast<std::uint64_t>(shots);
        }
        if (j.contains("seed")) {
            if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
                throw ConfigError("seed must be a non-negative integer");
            }
            if (j["seed"].is_number_integer() && j["seed"].get<long long>() < 0) {
                throw ConfigError("seed must be a non-negative integer");
            }
            ec.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("output_dir")) {
            if (!j["output_dir"].is_string()) {
                throw ConfigError("output_dir must be a string");
            }
            rc.output_dir = j["output_dir"].get<std::string>();
        }

        const json grid = j.value("grid", json::object());
        check_keys(grid, {"lo", "hi", "step"}, "grid");
        rc.grid.lo = number(grid.value("lo", json(0.1)), "grid.lo");
        rc.grid.hi = number(grid.value("hi", json(4.0)), "grid.hi");
        rc.grid.step = number(grid.value("step", json(0.1)), "grid.step");
        if (!(rc.grid.lo > 0.0 && rc.grid.hi >= rc.grid.lo && rc.grid.step > 0.0)) {
            throw ConfigError("grid needs 0 < lo <= hi and step > 0");
        }

        const json bo = j.value("bo", json::object());
        check_keys(bo,
                   {"top", "starts", "iterations", "batch_size", "length_scale",
                    "noise_std", "xi", "increment", "parameterization"},
                   "bo");
        BOSettings &b = rc.bo;
        b.top = static_cast<int>(integer(bo.value("top", json(3)), "bo.top"));
        b.iterations = static_cast<int>(integer(bo.value("iterations", json(5)), "bo.iterations"));
        b.batch_size = static_cast<int>(integer(bo.value("batch_size", json(256)), "bo.batch_size"));
        b.length_scale = number(bo.value("length_scale", json(0.1)), "bo.length_scale");
        b.noise_std = number(bo.value("noise_std", json(1e-4)), "bo.noise_std");
        b.xi = number(bo.value("xi", json(0.01)), "bo.xi");
        b.increment = number(bo.value("increment", json(0.01)), "bo.increment");
        if (bo.contains("parameterization")) {
            if (!bo["parameterization"].is_string()) {
                throw ConfigError("bo.parameterization must be a string");
            }
            b.parameterization =
                parse_parameterization(bo["parameterization"].get<std::string>());
        }
        if (bo.contains("starts")) {
            if (!bo["starts"].is_array()) {
                throw ConfigError("bo.starts must be an array of parameter vectors");
            }
            for (const auto &s : bo["starts"]) {
                if (!s.is_array() ||
                    s.size() != static_cast<std::size_t>(ec.n_sites() - 1)) {
                    throw ConfigError("each bo.starts entry needs one value per bond");
                }
                std::vector<double> v;
                for (const auto &x : s) {
                    v.push_back(number(x, "bo.starts[][]"));
                }
                b.starts.push_back(std::move(v));
            }
        }
        if (b.top < 1 || b.iterations < 0 || b.batch_size < 1 ||
            !(b.length_scale > 0.0) || !(b.noise_std >= 0.0) || !(b.xi >= 0.0) ||
            !(b.increment > 0.0)) {
            throw ConfigError("bo settings out of range");
        }

        if (rc.kind == ExperimentKind::SpSeries || rc.kind == ExperimentKind::Rescale ||
            rc.kind == ExperimentKind::SiteResolved) {
            if (ec.initial.type != InitialKind::Type::SingleExcitation) {
                throw ConfigError(std::string(to_string(rc.kind)) +
                                  " needs a single_excitation initial state");
            }
        }
        if (rc.kind == ExperimentKind::Rescale && ec.sites_or_last().size() != 1) {
            throw ConfigError("rescale works on exactly one measured site");
        }
        if (rc.kind == ExperimentKind::ArbitraryTransfer &&
            ec.initial.type == InitialKind::Type::SingleExcitation) {
            throw ConfigError("arbitrary_transfer needs a plus or amplitudes initial state");
        }
        ec.validate();
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw ConfigError(e.what());
    }

    json canon;
    canon["experiment"] = std::string(to_string(rc.kind));
    canon["name"] = rc.name;
    canon["chain"] = {{"n", ec.n_sites()}, {"couplings", ec.couplings.couplings()}};
    if (ec.couplings.j0()) {
        canon["chain"]["j0"] = *ec.couplings.j0();
    }
    canon["plan"] = {{"total_time", ec.plan.total_time}, {"steps", ec.plan.n_steps}};
    canon["noise"] = ec.noise ? to_json(*ec.noise) : json(nullptr);
    canon["initial"] = initial_to_json(ec.initial);
    canon["sites"] = ec.sites_or_last();
    canon["shots"] = ec.shots ? json(*ec.shots) : json(nullptr);
    canon["seed"] = ec.seed;
    canon["output_dir"] = rc.output_dir.string();
    if (rc.kind == ExperimentKind::GridSearch || rc.kind == ExperimentKind::BayesOpt) {
        canon["grid"] = {{"lo", rc.grid.lo}, {"hi", rc.grid.hi}, {"step", rc.grid.step}};
    }
    if (rc.kind == ExperimentKind::BayesOpt) {
        const BOSettings &b = rc.bo;
        canon["bo"] = {{"top", b.top},
                       {"starts", b.starts},
                       {"iterations", b.iterations},
                       {"batch_size", b.batch_size},
                       {"length_scale", b.length_scale},
                       {"noise_std", b.noise_std},
                       {"xi", b.xi},
                       {"increment", b.increment},
                       {"parameterization", std::string(to_string(b.parameterization))}};
    }
    rc.canonical = std::move(canon);
    return rc;
}

RunConfig load_run_config(const std::filesystem::path &path,
                          const std::vector<std::string> &overrides,
                          std::optional<std::uint64_t> seed) {
    const std::string text = read_file(path);
    json j = json::parse(text, nullptr, false, true);
    if (j.is_discarded()) {
        throw ConfigError("config " + path.string() + " is not valid JSON");
    }
    for (const auto &o : overrides) {
        apply_override(j, o);
    }
    if (seed) {
        j["seed"] = *seed;
    }
    return parse_run_config(j);
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string run_id(const RunConfig &config) {
    // Where results go does not change what they are.
    json content = config.canonical;
    content.erase("output_dir");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(content.dump())));
    return buf;
}

} // namespace pstlab
