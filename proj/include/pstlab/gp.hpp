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

#pragma once

#include <vector>

#include "pstlab/linalg.hpp"

namespace pstlab {

/// Gaussian-process regression with a squared-exponential kernel
///
///     k(x, x') = σ_f² exp(−½ Σ_d (x_d − x'_d)² / ℓ_d²)
///
/// a constant prior mean equal to the sample mean, and σ_f² set to the
/// sample variance of the observations (floored at 1e-8).
class GaussianProcess {
  public:
    struct Prediction {
        double mean;
        double variance;
    };

    GaussianProcess(std::vector<RealVector> inputs, std::vector<double> outputs,
                    RealVector length_scales, double noise_std);

    [[nodiscard]] Prediction predict(const RealVector &x) const;
    [[nodiscard]] double signal_variance() const noexcept { return signal_var_; }
    [[nodiscard]] double prior_mean() const noexcept { return mean_; }
    [[nodiscard]] std::size_t size() const noexcept { return inputs_.size(); }

  private:
    [[nodiscard]] double kernel(const RealVector &a, const RealVector &b) const;

    std::vector<RealVector> inputs_;
    RealVector length_scales_;
    double noise_var_;
    double mean_ = 0.0;
    double signal_var_ = 1.0;
    Eigen::LLT<RealMatrix> chol_;
    RealVector alpha_;
};

/// EI for maximisation with exploration jitter ξ:
/// (μ − f* − ξ) Φ(z) + σ φ(z), z = (μ − f* − ξ)/σ.
double expected_improvement(double mean, double variance, double best,
                            double xi = 0.01);

double normal_cdf(double z);
double normal_pdf(double z);

} // namespace pstlab
