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
 * @file optimizer.hpp
 * Coupling optimisation: a uniform-j0 grid search followed by GP Bayesian
 * optimisation over per-bond parameters.
 *
 * Candidates are parameter vectors with one entry per bond. Two
 * interpretations are supported:
 *
 *  - ScaleFactors (default): bond i is f_i √(i(N − i)), so a uniform profile
 *    j0 is the vector (j0, …, j0);
 *  - RawBonds: the entries are the bond strengths themselves, and a uniform
 *    j0 maps to j0 √(i(N − i)).
 */
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pstlab/chain.hpp"
#include "pstlab/noise.hpp"

namespace pstlab {

enum class Parameterization { ScaleFactors, RawBonds };

Parameterization parse_parameterization(std::string_view name);
std::string_view to_string(Parameterization p);

struct Candidate {
    std::vector<double> params;
    Parameterization parameterization = Parameterization::ScaleFactors;
    /// Set for profiles of the form pst_couplings(N, j0).
    std::optional<double> j0;

    static Candidate uniform(int n_sites, double j0,
                             Parameterization p = Parameterization::ScaleFactors);

    [[nodiscard]] int n_sites() const { return static_cast<int>(params.size()) + 1; }
    [[nodiscard]] CouplingProfile couplings() const;
    /// Every interior parameter strictly exceeds both edge parameters.
    /// Vacuous with fewer than three bonds.
    [[nodiscard]] bool satisfies_constraint() const;
    [[nodiscard]] bool all_positive() const;
};

/// Middle-over-edge check on a raw parameter vector.
bool satisfies_constraint(const std::vector<double> &params);

struct ObjectiveValue {
    /// First-period peak SP, or 0 when no peak qualifies.
    double value = 0.0;
    /// NaN when no peak qualifies.
    double t_star = 0.0;
};

using ObjectiveFn = std::function<ObjectiveValue(const Candidate &)>;

struct ObjectiveSettings {
    TrotterPlan plan{2.0 * kPi, 80};
    NoiseParams noise{};
    double min_prominence = 0.05;
};

/// Peak SP of the Trotterised noisy series for the candidate couplings.
/// Exact mode, deterministic; evaluations are memoised and thread-safe.
class PeakObjective {
  public:
    explicit PeakObjective(ObjectiveSettings settings = {});

    ObjectiveValue operator()(const Candidate &candidate) const;
    [[nodiscard]] std::size_t evaluations() const;
    [[nodiscard]] const ObjectiveSettings &settings() const noexcept {
        return settings_;
    }

  private:
    ObjectiveSettings settings_;
    mutable std::mutex mutex_;
    mutable std::map<std::vector<double>, ObjectiveValue> cache_;
};

/// First maximum of the exact single-excitation oracle within (0, horizon],
/// located on a fine scan and refined by golden-section search. Useful as a
/// noiseless, grid-free objective.
ObjectiveValue oracle_first_peak(const CouplingProfile &couplings, double horizon);

/// Objective wrapper around oracle_first_peak.
ObjectiveFn make_oracle_objective(double horizon);

struct GridRecord {
    double j0;
    ObjectiveValue objective;
};

/// Evaluates the uniform profiles j0 = lo, lo + step, …, hi (inclusive, with
/// the count rounded to the nearest integer) and ranks them by objective,
/// descending; ties keep ascending j0 order.
std::vector<GridRecord> grid_search_j0(const ObjectiveFn &objective, int n_sites,
                                       double lo = 0.1, double hi = 4.0,
                                       double step = 0.1,
                                       Parameterization p = Parameterization::ScaleFactors);

struct Sensitivity {
    double sensitivity;
    double delta;
};

/// Δ = min(hi, max(lo, 0.1 / (sensitivity + 1e-6))).
double delta_from_sensitivity(double sensitivity, double lo = 0.05,
                              double hi = 0.15);

/// Forward difference of the objective along one parameter.
Sensitivity sensitivity_and_delta(const ObjectiveFn &objective,
                                  const Candidate &candidate, int dimension,
                                  double increment = 0.01, double lo = 0.05,
                                  double hi = 0.15);

struct BOConfig {
    std::vector<Candidate> starts;
    int iterations_per_start = 5;
    double increment = 0.01;
    double delta_lo = 0.05;
    double delta_hi = 0.15;
    double length_scale = 0.1;
    double noise_std = 1e-4;
    double xi = 0.01;
    int batch_size = 256;
    bool enforce_constraint = true;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EvalRecord {
    Candidate candidate;
    ObjectiveValue objective;
    /// "start" or "bo".
    std::string kind;
    int start_index = 0;
    int iteration = -1;
    std::uint64_t seed = 0;
    /// Logical ordinal in the ledger; wall-clock time would break determinism.
    std::uint64_t timestamp = 0;
};

struct BOResult {
    Candidate best;
    ObjectiveValue best_objective;
    std::size_t best_index = 0;
    std::vector<EvalRecord> ledger;
};

BOResult bayes_optimize(const BOConfig &config, const ObjectiveFn &objective);

nlohmann::json to_json(const Candidate &candidate);
nlohmann::json to_json(const EvalRecord &record);
/// One compact JSON object per line.
std::string ledger_jsonl(const std::vector<EvalRecord> &ledger);

/// Number of worker threads: PSTLAB_THREADS when set and positive, else the
/// hardware concurrency (at least 1).
unsigned worker_threads();

/// Runs f(0) … f(n − 1) on up to worker_threads() threads. Results are
/// indexed, so the output order does not depend on scheduling.
template <typename T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)> &f);

} // namespace pstlab

#include "pstlab/detail/parallel_map.hpp"
