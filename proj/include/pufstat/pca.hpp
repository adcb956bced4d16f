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
#include "pufstat/geometry.hpp"

#include <cstddef>
#include <vector>

namespace pufstat::pca {

/// Devices x ROs, every column centered and scaled to unit sample variance.
struct ScaledData {
    Matrix y;
    Vector col_means; ///< MHz
    Vector col_stds;  ///< MHz, N-1 divisor
};

/// Standardizes F^T. Throws Degenerate listing every zero-variance RO.
ScaledData standardize(const FreqMatrix &freq);

/// Thin SVD Y = U S V^T. Components are ordered by decreasing singular
/// value, and each loading column is signed so that its largest-magnitude
/// entry is positive.
struct PCAResult {
    Matrix loadings;           ///< ROs x r, columns of V
    Matrix left;               ///< devices x r, columns of U
    Matrix scores;             ///< devices x r, U S
    Vector singular_values;    ///< r, nonincreasing
    Vector variance_fractions; ///< r, sums to 1
    ChipGeometry geometry;

    std::size_t components() const { return static_cast<std::size_t>(singular_values.size()); }
};

PCAResult pca(const ScaledData &scaled, const ChipGeometry &geometry = {});

/// Loading column `pc` (1-based) as a geometry.rows x geometry.cols grid,
/// indexed (y, x).
Matrix loading_map(const PCAResult &result, std::size_t pc, const ChipGeometry &geometry);

struct TruncatedBits {
    BitMatrix bits;
    double agreement = 0.0;
};

/// Rebuilds F from the first r components and derives the response bits.
/// Agreement is measured against the bits of the standardized data itself.
TruncatedBits truncated_bits(const PCAResult &result, const ScaledData &scaled,
                             std::size_t r);
/// As above, measured against the given bits.
TruncatedBits truncated_bits(const PCAResult &result, const ScaledData &scaled,
                             std::size_t r, const BitMatrix &truth);

/// Pearson correlation between each device's count of ones and its score on
/// component `pc` (1-based).
double pc_key_correlation(const PCAResult &result, const BitMatrix &bits, std::size_t pc);

struct Histogram {
    double low = 0.0;
    double width = 0.0;
    std::vector<std::size_t> counts;
};

/// Equal-width histogram of the scores of component `pc` (1-based).
Histogram score_histogram(const PCAResult &result, std::size_t pc, std::size_t bins);

} // namespace pufstat::pca
