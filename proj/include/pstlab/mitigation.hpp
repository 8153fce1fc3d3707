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
 * @file mitigation.hpp
 * Rescaling error mitigation.
 *
 * The noisy time axis is stretched by s = t*_ideal / t*_noisy, and each
 * sample at Trotter index k is corrected by inverting the decay model
 *
 *     n̂ = e^{−βk} n + α (1 − e^{−βk})
 *
 * i.e. n = (n̂ − α(1 − e^{−βk})) / e^{−βk}. The ideal reference at the
 * scaled times comes from linear interpolation of the ideal series.
 */
#pragma once

#include <vector>

#include "pstlab/experiments.hpp"

namespace pstlab {

struct RescaleParams {
    double alpha = 0.0;
    double beta = 0.0;
    double s = 1.0;

    /// β ≥ 0, s > 0, α ∈ [0, 1).
    void validate() const;
};

struct CorrectedSeries {
    /// Times t_k · s with the corrected SP of the measured site; samples
    /// flagged unreliable hold NaN.
    SPTimeSeries corrected;
    std::vector<double> raw;
    std::vector<double> ideal_reference;
    std::vector<bool> reliable;
};

/// Decay factors below this are reported as unreliable instead of divided by.
inline constexpr double kMinDecayFactor = 1e-6;

/// s = t_ideal / t_noisy.
double time_scale_factor(double t_ideal, double t_noisy);

/// Linear interpolation on an increasing grid; clamps outside the range.
double interpolate(const std::vector<double> &xs, const std::vector<double> &ys,
                   double x);

/// Inverts the decay model at Trotter index k = sample index.
CorrectedSeries apply_rescaling(const SPTimeSeries &noisy,
                                const SPTimeSeries &ideal,
                                const RescaleParams &params);

/// The forward decay model applied to `ideal` (used to test the inversion).
SPTimeSeries forward_decay(const SPTimeSeries &ideal, double alpha, double beta);

struct RescaleFit {
    RescaleParams params;
    double sse;
    std::size_t samples;
    Peak ideal_peak;
    Peak noisy_peak;
};

/// Least-squares fit of (α, β) over t_scaled ≤ 4 t*_ideal (two transfer
/// periods): coarse grid α ∈ [0, 0.8] step 0.01, β ∈ [0, 0.2] step 0.002,
/// then a shrinking pattern search. Deterministic.
RescaleFit fit_rescaling(const SPTimeSeries &noisy, const SPTimeSeries &ideal);

/// SSE of the corrected series against the interpolated ideal over the fit
/// window, counting only reliable samples.
double rescale_residual(const SPTimeSeries &noisy, const SPTimeSeries &ideal,
                        const RescaleParams &params, double window_end,
                        std::size_t *samples = nullptr);

} // namespace pstlab
