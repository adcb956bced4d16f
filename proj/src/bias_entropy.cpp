/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * This file is part of pufstat, a statistics toolkit for ring-oscillator
 * PUF frequency datasets.
 */

#include "pufstat/bias_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pufstat::bias {

std::vector<double> bias_binary(const BitMatrix &bits) {
    if (bits.cols() < 1)
        fail(ErrorCategory::Configuration, "bias: no devices");
    std::vector<double> p(static_cast<std::size_t>(bits.rows()));
    for (Eigen::Index k = 0; k < bits.rows(); ++k) {
        std::size_t ones = 0;
        for (Eigen::Index j = 0; j < bits.cols(); ++j)
            ones += bits(k, j);
        p[static_cast<std::size_t>(k)] =
            static_cast<double>(ones) / static_cast<double>(bits.cols());
    }
    return p;
}

std::vector<double> bias_normal(const DiffMatrix &diff) {
    const Eigen::Index n = diff.cols();
    if (n < 2)
        fail(ErrorCategory::Configuration, "bias: need two devices for a spread");
    std::vector<double> p(static_cast<std::size_t>(diff.rows()));
    for (Eigen::Index k = 0; k < diff.rows(); ++k) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            s += diff(k, j);
        const double mean = s / static_cast<double>(n);
        double ss = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            ss += (diff(k, j) - mean) * (diff(k, j) - mean);
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (!(sd > 0.0))
            fail(ErrorCategory::Degenerate,
                 "row " + std::to_string(k) + ": pair difference has zero spread");
        p[static_cast<std::size_t>(k)] =
            0.5 * (1.0 + std::erf(mean / (std::numbers::sqrt2 * sd)));
    }
    return p;
}

double entropy(std::span<const double> p) {
    double h = 0.0;
    for (double pk : p) {
        if (!(pk >= 0.0 && pk <= 1.0))
            fail(ErrorCategory::Validation, "probability outside [0, 1]");
        if (pk > 0.0)
            h -= pk * std::log2(pk);
        if (pk < 1.0)
            h -= (1.0 - pk) * std::log2(1.0 - pk);
    }
    return h;
}

double key_logprob(std::span<const std::uint8_t> key, std::span<const double> p,
                   std::size_t num_devices) {
    if (key.size() != p.size())
        fail(ErrorCategory::Structural, "key has " + std::to_string(key.size()) +
                                            " bits, model has " +
                                            std::to_string(p.size()));
    if (num_devices == 0)
        fail(ErrorCategory::Configuration, "key_logprob: device count is zero");
    const double lo = 1.0 / (2.0 * static_cast<double>(num_devices));
    const double hi = 1.0 - lo;
    double score = 0.0;
    for (std::size_t k = 0; k < key.size(); ++k) {
        if (!(p[k] >= 0.0 && p[k] <= 1.0))
            fail(ErrorCategory::Validation, "probability outside [0, 1]");
        const double pk = std::clamp(p[k], lo, hi);
        score += std::log2(key[k] ? pk : 1.0 - pk);
    }
    return score;
}

std::array<std::size_t, kHistogramBins> bias_histogram(std::span<const double> p) {
    std::array<std::size_t, kHistogramBins> counts{};
    for (double pk : p) {
        // Bias is p - 0.5, so the bin index follows directly from p. The
        // small offset keeps bin edges such as p = 0.4 on the closed side.
        auto bin = static_cast<long>(std::floor(pk * 10.0 + 1e-9));
        bin = std::clamp<long>(bin, 0, static_cast<long>(kHistogramBins) - 1);
        ++counts[static_cast<std::size_t>(bin)];
    }
    return counts;
}

BiasReport analyze(const DiffMatrix &diff, const BitMatrix &bits) {
    BiasReport r;
    r.p_binary = bias_binary(bits);
    r.p_normal = bias_normal(diff);
    for (double p : r.p_binary)
        r.bias_binary.push_back(p - 0.5);
    for (double p : r.p_normal)
        r.bias_normal.push_back(p - 0.5);
    r.h_binary = entropy(r.p_binary);
    r.h_normal = entropy(r.p_normal);
    return r;
}

} // namespace pufstat::bias
