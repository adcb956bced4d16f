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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace pufstat::correlation {

/// Pearson product-moment correlation. Both inputs must have equal length
/// (at least 3) and be nonconstant, otherwise Degenerate/Configuration.
double pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationProfile {
    std::size_t reference_index = 0;
    std::vector<double> coefficients;
};

/// Correlation of every row of `m` with the reference row, taken across
/// columns (devices). Defaults to the last row.
CorrelationProfile profile(const Matrix &m,
                           std::optional<std::size_t> reference_index = std::nullopt,
                           unsigned threads = 1);

/// Population covariance of the rows of `b` (divide by the column count).
/// The result is exactly symmetric.
Matrix covariance_matrix(const Matrix &b);

/// Row means of `b`, summed sequentially.
Vector row_means(const Matrix &b);

/// Least-squares slope of values against their index.
double index_slope(std::span<const double> values);

} // namespace pufstat::correlation
