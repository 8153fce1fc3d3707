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

#include "pstlab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "pstlab/experiments.hpp"
#include "pstlab/gp.hpp"

namespace pstlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double bond_weight(int i, int n_sites) {
    return std::sqrt(static_cast<double>(i * (n_sites - i)));
}

RealVector to_eigen(const std::vector<double> &v) {
    RealVector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = v[i];
    }
    return out;
}

} // namespace

Parameterization parse_parameterization(std::string_view name) {
    if (name == "scale_factors") {
        return Parameterization::ScaleFactors;
    }
    if (name == "raw_bonds") {
        return Parameterization::RawBonds;
    }
    throw std::invalid_argument("unknown parameterization '" + std::string(name) +
                                "' (expected scale_factors or raw_bonds)");
}

std::string_view to_string(Parameterization p) {
    return p == Parameterization::ScaleFactors ? "scale_factors" : "raw_bonds";
}

Candidate Candidate::uniform(int n_sites, double j0, Parameterization p) {
    if (n_sites < 2) {
        throw std::invalid_argument("a chain needs at least two sites");
    }
    Candidate c;
    c.parameterization = p;
    c.j0 = j0;
    for (int i = 1; i < n_sites; ++i) {
        c.params.push_back(p == Parameterization::ScaleFactors
                               ? j0
                               : j0 * bond_weight(i, n_sites));
    }
    return c;
}

CouplingProfile Candidate::couplings() const {
    if (params.empty()) {
        throw std::invalid_argument("candidate has no parameters");
    }
    if (j0) {
        return pst_couplings(n_sites(), *j0);
    }
    std::vector<double> bonds = params;
    if (parameterization == Parameterization::ScaleFactors) {
        for (std::size_t i = 0; i < bonds.size(); ++i) {
            bonds[i] *= bond_weight(static_cast<int>(i) + 1, n_sites());
        }
    }
    return CouplingProfile(std::move(bonds));
}

bool satisfies_constraint(const std::vector<double> &params) {
    if (params.size() < 3) {
        return true;
    }
    const double left = params.front();
    const double right = params.back();
    for (std::size_t i = 1; i + 1 < params.size(); ++i) {
        if (!(params[i] > left && params[i] > right)) {
            return false;
        }
    }
    return true;
}

bool Candidate::satisfies_constraint() const {
    return pstlab::satisfies_constraint(params);
}

bool Candidate::all_positive() const {
    return std::all_of(params.begin(), params.end(),
                       [](double p) { return std::isfinite(p) && p > 0.0; });
}

PeakObjective::PeakObjective(ObjectiveSettings settings)
    : settings_(std::move(settings)) {
    settings_.noise.validate();
}

ObjectiveValue PeakObjective::operator()(const Candidate &candidate) const {
    const CouplingProfile couplings = candidate.couplings();
    const std::vector<double> &key = couplings.couplings();
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) {
            return it->second;
        }
    }

    ExperimentConfig config;
    config.couplings = couplings;
    config.plan = settings_.plan;
    config.noise = settings_.noise;
    config.initial = InitialKind::single_excitation(1);
    const SPTimeSeries series = run_sp_series(config);

    ObjectiveValue value{0.0, kNaN};
    try {
        const Peak peak = detect_first_peak(series, settings_.min_prominence);
        value = {peak.sp_star, peak.t_star};
    } catch (const Error &) {
        // No qualifying peak: no transfer within the window.
    }

    std::lock_guard lock(mutex_);
    cache_.emplace(key, value);
    return value;
}

std::size_t PeakObjective::evaluations() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

ObjectiveValue oracle_first_peak(const CouplingProfile &couplings, double horizon) {
    if (!(horizon > 0.0)) {
        throw std::invalid_argument("oracle horizon must be positive");
    }
    // The scan runs to 2·horizon so the peak window (t ≤ end/2) is exactly
    // (0, horizon].
    constexpr int kSamples = 8000;
    std::vector<double> times(kSamples + 1);
    std::vector<double> values(kSamples + 1);
    for (int i = 0; i <= kSamples; ++i) {
        times[static_cast<std::size_t>(i)] = 2.0 * horizon * i / kSamples;
        values[static_cast<std::size_t>(i)] =
            exact_sp_oracle(couplings, times[static_cast<std::size_t>(i)]);
    }
    Peak peak{};
    try {
        peak = detect_first_peak(times, values);
    } catch (const Error &) {
        return {0.0, kNaN};
    }

    const double h = times[1];
    double a = std::max(peak.t_star - h, 0.0);
    double b = peak.t_star + h;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = exact_sp_oracle(couplings, c);
    double fd = exact_sp_oracle(couplings, d);
    while (b - a > 1e-12) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = exact_sp_oracle(couplings, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = exact_sp_oracle(couplings, d);
        }
    }
    const double t = 0.5 * (a + b);
    const double v = exact_sp_oracle(couplings, t);
    if (v < peak.sp_star) {
        return {peak.sp_star, peak.t_star};
    }
    return {v, t};
}

ObjectiveFn make_oracle_objective(double horizon) {
    return [horizon](const Candidate &c) {
        return oracle_first_peak(c.couplings(), horizon);
    };
}

std::vector<GridRecord> grid_search_j0(const ObjectiveFn &objective, int n_sites,
                                       double lo, double hi, double step,
                                       Parameterization p) {
    if (!(step > 0.0) || !(lo > 0.0) || !(hi >= lo)) {
        throw std::invalid_argument("grid needs 0 < lo <= hi and step > 0");
    }
    const auto count =
        static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
    std::vector<double> j0s(count);
    for (std::size_t i = 0; i < count; ++i) {
        // Round to 1e-10 so 0.1 + 28·0.1 prints and hashes as 2.9.
        j0s[i] = std::round((lo + static_cast<double>(i) * step) * 1e10) / 1e10;
    }
    auto records = parallel_map<GridRecord>(
        count, std::function<GridRecord(std::size_t)>([&](std::size_t i) {
            return GridRecord{j0s[i],
                              objective(Candidate::uniform(n_sites, j0s[i], p))};
        }));
    std::stable_sort(records.begin(), records.end(),
                     [](const GridRecord &a, const GridRecord &b) {
                         return a.objective.value > b.objective.value;
                     });
    return records;
}

double delta_from_sensitivity(double sensitivity, double lo, double hi) {
    return std::min(hi, std::max(lo, 0.1 / (sensitivity + 1e-6)));
}

Sensitivity sensitivity_and_delta(const ObjectiveFn &objective,
                                  const Candidate &candidate, int dimension,
                                  double increment, double lo, double hi) {
    if (dimension < 0 || static_cast<std::size_t>(dimension) >= candidate.params.size()) {
        throw std::out_of_range("sensitivity dimension out of range");
    }
    if (!(increment > 0.0)) {
        throw std::invalid_argument("finite-difference increment must be > 0");
    }
    Candidate bumped = candidate;
    bumped.j0.reset();
    bumped.params[static_cast<std::size_t>(dimension)] += increment;
    const double base = objective(candidate).value;
    const double moved = objective(bumped).value;
    const double s = std::abs(moved - base) / increment;
    return {s, delta_from_sensitivity(s, lo, hi)};
}

void BOConfig::validate() const {
    if (starts.empty()) {
        throw std::invalid_argument("bayes_optimize needs at least one start");
    }
    const std::size_t dim = starts.front().params.size();
    for (const auto &s : starts) {
        if (s.params.size() != dim || dim == 0) {
            throw std::invalid_argument("starting points differ in dimension");
        }
        if (!s.all_positive()) {
            throw std::invalid_argument("starting points must be positive");
        }
    }
    if (iterations_per_start < 0) {
        throw std::invalid_argument("iterations_per_start must be >= 0");
    }
    if (!(increment > 0.0)) {
        throw std::invalid_argument("increment must be > 0");
    }
    if (!(delta_lo > 0.0 && delta_lo <= delta_hi)) {
        throw std::invalid_argument("delta bounds must satisfy 0 < lo <= hi");
    }
    if (!(length_scale > 0.0) || !(noise_std >= 0.0) || !(xi >= 0.0)) {
        throw std::invalid_argument("invalid GP or acquisition hyperparameters");
    }
    if (batch_size < 1) {
        throw std::invalid_argument("batch_size must be >= 1");
    }
}

BOResult bayes_optimize(const BOConfig &config, const ObjectiveFn &objective) {
    config.validate();
    const std::size_t dim = config.starts.front().params.size();
    const Parameterization param = config.starts.front().parameterization;

    BOResult result;
    auto &ledger = result.ledger;
    auto append = [&](EvalRecord rec) {
        rec.timestamp = ledger.size();
        ledger.push_back(std::move(rec));
        return ledger.size() - 1;
    };

    std::vector<std::size_t> start_records;
    const auto start_values = parallel_map<ObjectiveValue>(
        config.starts.size(),
        std::function<ObjectiveValue(std::size_t)>(
            [&](std::size_t i) { return objective(config.starts[i]); }));
    for (std::size_t i = 0; i < config.starts.size(); ++i) {
        start_records.push_back(append(EvalRecord{config.starts[i], start_values[i],
                                                  "start", static_cast<int>(i), -1,
                                                  derive_seed(config.seed, i), 0}));
    }

    for (std::size_t si = 0; si < config.starts.size(); ++si) {
        std::size_t current = start_records[si];
        std::mt19937_64 rng(derive_seed(config.seed, si, 0x424fULL));
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        for (int it = 0; it < config.iterations_per_start; ++it) {
            std::vector<RealVector> xs;
            std::vector<double> ys;
            double incumbent = -std::numeric_limits<double>::infinity();
            for (const auto &rec : ledger) {
                xs.push_back(to_eigen(rec.candidate.params));
                ys.push_back(rec.objective.value);
                incumbent = std::max(incumbent, rec.objective.value);
            }
            const GaussianProcess gp(
                xs, ys,
                RealVector::Constant(static_cast<Eigen::Index>(dim), config.length_scale),
                config.noise_std);

            const Candidate centre = ledger[current].candidate;
            const auto sens = parallel_map<Sensitivity>(
                dim, std::function<Sensitivity(std::size_t)>([&](std::size_t d) {
                    return sensitivity_and_delta(objective, centre,
                                                 static_cast<int>(d), config.increment,
                                                 config.delta_lo, config.delta_hi);
                }));
            double max_sens = 0.0;
            for (const auto &s : sens) {
                max_sens = std::max(max_sens, s.sensitivity);
            }
            std::vector<double> weight(dim, 1.0);
            std::vector<double> delta(dim);
            std::size_t lead = 0;
            for (std::size_t d = 0; d < dim; ++d) {
                delta[d] = sens[d].delta;
                if (max_sens > 0.0) {
                    weight[d] = sens[d].sensitivity / max_sens;
                }
                if (weight[d] > weight[lead]) {
                    lead = d;
                }
            }

            auto sample_batch = [&](double widen, bool all_dims) {
                std::vector<Candidate> batch;
                for (int b = 0; b < config.batch_size; ++b) {
                    Candidate c = centre;
                    c.j0.reset();
                    c.parameterization = param;
                    bool moved = false;
                    for (std::size_t d = 0; d < dim; ++d) {
                        const double u = unit(rng);
                        const double r = unit(rng);
                        if (all_dims || u < weight[d]) {
                            c.params[d] = centre.params[d] +
                                          (2.0 * r - 1.0) * widen * delta[d];
                            moved = true;
                        }
                    }
                    if (!moved) {
                        c.params[lead] = centre.params[lead] +
                                         (2.0 * unit(rng) - 1.0) * widen * delta[lead];
                    }
                    if (!c.all_positive()) {
                        continue;
                    }
                    if (config.enforce_constraint && !c.satisfies_constraint()) {
                        continue;
                    }
                    batch.push_back(std::move(c));
                }
                return batch;
            };

            auto batch = sample_batch(1.0, false);
            if (batch.empty()) {
                batch = sample_batch(2.0, true);
            }
            if (batch.empty()) {
                throw Error("every BO candidate violated the constraint, even "
                            "after widening the search box");
            }

            std::size_t pick = 0;
            double best_ei = -1.0;
            for (std::size_t i = 0; i < batch.size(); ++i) {
                const auto pred = gp.predict(to_eigen(batch[i].params));
                const double ei =
                    expected_improvement(pred.mean, pred.variance, incumbent, config.xi);
                if (ei > best_ei) {
                    best_ei = ei;
                    pick = i;
                }
            }

            const ObjectiveValue value = objective(batch[pick]);
            const std::size_t idx =
                append(EvalRecord{batch[pick], value, "bo", static_cast<int>(si), it,
                                  derive_seed(config.seed, si, static_cast<std::uint64_t>(it) + 1),
                                  0});
            if (value.value > ledger[current].objective.value) {
                current = idx;
            }
        }
    }

    for (std::size_t i = 0; i < ledger.size(); ++i) {
        if (ledger[i].objective.value > ledger[result.best_index].objective.value) {
            result.best_index = i;
        }
    }
    result.best = ledger[result.best_index].candidate;
    result.best_objective = ledger[result.best_index].objective;
    return result;
}

nlohmann::json to_json(const Candidate &candidate) {
    nlohmann::json j;
    j["params"] = candidate.params;
    j["parameterization"] = std::string(to_string(candidate.parameterization));
    j["couplings"] = candidate.couplings().couplings();
    j["j0"] = candidate.j0 ? nlohmann::json(*candidate.j0) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const EvalRecord &record) {
    nlohmann::json j;
    j["timestamp"] = record.timestamp;
    j["kind"] = record.kind;
    j["start"] = record.start_index;
    j["iteration"] = record.iteration;
    j["candidate"] = to_json(record.candidate);
    j["objective"] = record.objective.value;
    j["t_star"] = std::isfinite(record.objective.t_star)
                      ? nlohmann::json(record.objective.t_star)
                      : nlohmann::json(nullptr);
    j["seed"] = record.seed;
    return j;
}

std::string ledger_jsonl(const std::vector<EvalRecord> &ledger) {
    std::ostringstream out;
    for (const auto &rec : ledger) {
        out << to_json(rec).dump() << '\n';
    }
    return out.str();
}

unsigned worker_threads() {
    if (const char *env = std::getenv("PSTLAB_THREADS")) {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace pstlab
