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

#include "pstlab/mitigation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace pstlab {

void RescaleParams::validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("beta must be >= 0");
    }
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw std::invalid_argument("time scale s must be > 0");
    }
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in [0, 1)");
    }
}

double time_scale_factor(double t_ideal, double t_noisy) {
    if (!(t_noisy > 0.0)) {
        throw std::invalid_argument("noisy hitting time must be positive");
    }
    return t_ideal / t_noisy;
}

double interpolate(const std::vector<double> &xs, const std::vector<double> &ys,
                   double x) {
    if (xs.empty() || xs.size() != ys.size()) {
        throw std::invalid_argument("interpolation grid is empty or ragged");
    }
    if (x <= xs.front()) {
        return ys.front();
    }
    if (x >= xs.back()) {
        return ys.back();
    }
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const auto hi = static_cast<std::size_t>(it - xs.begin());
    const auto lo = hi - 1;
    const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + w * (ys[hi] - ys[lo]);
}

CorrectedSeries apply_rescaling(const SPTimeSeries &noisy,
                                const SPTimeSeries &ideal,
                                const RescaleParams &params) {
    params.validate();
    const auto &raw = noisy.only();
    const auto &ideal_values = ideal.only();
    if (noisy.size() == 0 || ideal.size() == 0) {
        throw std::invalid_argument("rescaling needs non-empty series");
    }

    CorrectedSeries out;
    out.raw = raw;
    out.corrected.sites = noisy.sites;
    out.corrected.seed = noisy.seed;
    out.corrected.config_hash = noisy.config_hash;
    out.corrected.values.assign(1, {});
    for (std::size_t k = 0; k < noisy.size(); ++k) {
        const double t_scaled = noisy.times[k] * params.s;
        const double decay = std::exp(-params.beta * static_cast<double>(k));
        out.corrected.times.push_back(t_scaled);
        out.ideal_reference.push_back(
            interpolate(ideal.times, ideal_values, t_scaled));
        if (decay < kMinDecayFactor) {
            out.reliable.push_back(false);
            out.corrected.values[0].push_back(
                std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double n = (raw[k] - params.alpha * (1.0 - decay)) / decay;
        out.reliable.push_back(true);
        out.corrected.values[0].push_back(std::clamp(n, 0.0, 1.0));
    }
    return out;
}

SPTimeSeries forward_decay(const SPTimeSeries &ideal, double alpha, double beta) {
    SPTimeSeries out = ideal;
    for (auto &series : out.values) {
        for (std::size_t k = 0; k < series.size(); ++k) {
            const double decay = std::exp(-beta * static_cast<double>(k));
            series[k] = decay * series[k] + alpha * (1.0 - decay);
        }
    }
    return out;
}

double rescale_residual(const SPTimeSeries &noisy, const SPTimeSeries &ideal,
                        const RescaleParams &params, double window_end,
                        std::size_t *samples) {
    const auto result = apply_rescaling(noisy, ideal, params);
    double sse = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < result.reliable.size(); ++k) {
        if (!result.reliable[k] || result.corrected.times[k] > window_end) {
            continue;
        }
        const double d = result.corrected.values[0][k] - result.ideal_reference[k];
        sse += d * d;
        ++count;
    }
    if (samples) {
        *samples = count;
    }
    return sse;
}

RescaleFit fit_rescaling(const SPTimeSeries &noisy, const SPTimeSeries &ideal) {
    if (noisy.size() == 0 || ideal.size() == 0) {
        throw std::invalid_argument("rescaling fit needs non-empty series");
    }
    const Peak ideal_peak = detect_first_peak(ideal);
    const Peak noisy_peak = detect_first_peak(noisy);
    const double s = time_scale_factor(ideal_peak.t_star, noisy_peak.t_star);
    const double window_end =
        std::min(4.0 * ideal_peak.t_star, ideal.times.back()) + 1e-9;

    auto cost = [&](double alpha, double beta) {
        return rescale_residual(noisy, ideal, RescaleParams{alpha, beta, s},
                                window_end);
    };

    double best_alpha = 0.0;
    double best_beta = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int ia = 0; ia <= 80; ++ia) {
        const double alpha = 0.01 * ia;
        for (int ib = 0; ib <= 100; ++ib) {
            const double beta = 0.002 * ib;
            const double c = cost(alpha, beta);
            if (c < best) {
                best = c;
                best_alpha = alpha;
                best_beta = beta;
            }
        }
    }

    // Pattern search: try ±step on each axis, halve the steps when stuck.
    double step_a = 0.005;
    double step_b = 0.001;
    while (step_a > 1e-7 || step_b > 1e-8) {
        bool moved = false;
        const std::array<std::pair<double, double>, 4> moves{
            std::pair{step_a, 0.0}, {-step_a, 0.0}, {0.0, step_b}, {0.0, -step_b}};
        for (const auto &[da, db] : moves) {
            const double a = best_alpha + da;
            const double b = best_beta + db;
            if (a < 0.0 || a >= 1.0 || b < 0.0) {
                continue;
            }
            const double c = cost(a, b);
            if (c < best - 1e-15) {
                best = c;
                best_alpha = a;
                best_beta = b;
                moved = true;
                break;
            }
        }
        if (!moved) {
            step_a *= 0.5;
            step_b *= 0.5;
        }
    }

    std::size_t samples = 0;
    rescale_residual(noisy, ideal, RescaleParams{best_alpha, best_beta, s},
                     window_end, &samples);
    return RescaleFit{RescaleParams{best_alpha, best_beta, s}, best, samples,
                      ideal_peak, noisy_peak};
}

} // namespace pstlab
