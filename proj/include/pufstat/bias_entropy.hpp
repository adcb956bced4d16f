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

#pragma once

#include "pufstat/core_data.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pufstat::bias {

/// Convention used for the Gaussian estimate: Pr(R=1) = Pr(B > 0)
/// = 1/2 (1 + erf(mu / (sqrt(2) sigma))).
inline constexpr const char *kNormalConvention =
    "Pr(R=1) = 0.5*(1 + erf(mean/(sqrt(2)*sd))), sd with N-1 divisor";

/// Fraction of ones per row of R.
std::vector<double> bias_binary(const BitMatrix &bits);

/// Gaussian-model probability of a one per row of B. Throws Degenerate for a
/// row with zero spread.
std::vector<double> bias_normal(const DiffMatrix &diff);

/// Sum of binary entropies in bits, with 0 log 0 = 0.
double entropy(std::span<const double> p);

/// log2 probability of `key` under independent bits with P(1) = p[k].
/// Probabilities are clamped to [1/(2J), 1 - 1/(2J)] with J = num_devices.
double key_logprob(std::span<const std::uint8_t> key, std::span<const double> p,
                   std::size_t num_devices);

/// Ten left-closed bins of width 0.1 over [-0.5, 0.5]; the last bin also
/// holds +0.5.
inline constexpr std::size_t kHistogramBins = 10;
std::array<std::size_t, kHistogramBins> bias_histogram(std::span<const double> p);

struct BiasReport {
    std::vector<double> p_binary;
    std::vector<double> p_normal;
    std::vector<double> bias_binary;
    std::vector<double> bias_normal;
    double h_binary = 0.0;
    double h_normal = 0.0;
    std::string normal_convention = kNormalConvention;
};

BiasReport analyze(const DiffMatrix &diff, const BitMatrix &bits);

} // namespace pufstat::bias
