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

#include "pstlab/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pstlab {

GaussianProcess::GaussianProcess(std::vector<RealVector> inputs,
                                 std::vector<double> outputs,
                                 RealVector length_scales, double noise_std)
    : inputs_(std::move(inputs)), length_scales_(std::move(length_scales)),
      noise_var_(noise_std * noise_std) {
    if (inputs_.empty() || inputs_.size() != outputs.size()) {
        throw std::invalid_argument("GP needs matching, non-empty data");
    }
    for (const auto &x : inputs_) {
        if (x.size() != length_scales_.size()) {
            throw std::invalid_argument("GP input dimension mismatch");
        }
    }
    if ((length_scales_.array() <= 0.0).any() || !(noise_std >= 0.0)) {
        throw std::invalid_argument("GP hyperparameters must be positive");
    }

    const auto n = static_cast<Eigen::Index>(inputs_.size());
    mean_ = std::accumulate(outputs.begin(), outputs.end(), 0.0) /
            static_cast<double>(n);
    double var = 0.0;
    for (const double y : outputs) {
        var += (y - mean_) * (y - mean_);
    }
    signal_var_ = std::max(var / static_cast<double>(n), 1e-8);

    RealMatrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            k(i, j) = k(j, i) = kernel(inputs_[static_cast<std::size_t>(i)],
                                       inputs_[static_cast<std::size_t>(j)]);
        }
    }
    RealVector centred(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        centred(i) = outputs[static_cast<std::size_t>(i)] - mean_;
    }
    // Escalate diagonal jitter until the factorisation succeeds; coincident
    // inputs otherwise make K singular at tiny noise levels.
    double jitter = noise_var_;
    for (int attempt = 0; attempt < 12; ++attempt) {
        RealMatrix kn = k;
        kn.diagonal().array() += std::max(jitter, 1e-14 * signal_var_);
        chol_.compute(kn);
        if (chol_.info() == Eigen::Success) {
            break;
        }
        jitter = std::max(jitter * 10.0, 1e-12 * signal_var_);
    }
    if (chol_.info() != Eigen::Success) {
        throw std::runtime_error("GP covariance is not positive definite");
    }
    alpha_ = chol_.solve(centred);
}

double GaussianProcess::kernel(const RealVector &a, const RealVector &b) const {
    const double r2 = ((a - b).array() / length_scales_.array()).square().sum();
    return signal_var_ * std::exp(-0.5 * r2);
}

GaussianProcess::Prediction GaussianProcess::predict(const RealVector &x) const {
    const auto n = static_cast<Eigen::Index>(inputs_.size());
    RealVector ks(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        ks(i) = kernel(x, inputs_[static_cast<std::size_t>(i)]);
    }
    const double mean = mean_ + ks.dot(alpha_);
    const RealVector v = chol_.solve(ks);
    const double var = std::max(signal_var_ - ks.dot(v), 0.0);
    return {mean, var};
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
}

double expected_improvement(double mean, double variance, double best,
                            double xi) {
    const double sigma = std::sqrt(std::max(variance, 0.0));
    const double delta = mean - best - xi;
    if (sigma < 1e-12) {
        return std::max(delta, 0.0);
    }
    const double z = delta / sigma;
    return delta * normal_cdf(z) + sigma * normal_pdf(z);
}

} // namespace pstlab
