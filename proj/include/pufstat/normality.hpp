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
#include <span>
#include <vector>

namespace pufstat::normality {

/// Critical value of the corrected statistic at the 1% significance level.
inline constexpr double kCriticalValue1Pct = 1.047;

/// Standard normal CDF.
double normal_cdf(double x);
/// ln(Phi(x)), accurate deep into the lower tail.
double log_normal_cdf(double x);
/// ln(1 - Phi(x)), accurate deep into the upper tail.
double log_normal_sf(double x);

struct ADResult {
    std::size_t row_index = 0;
    double a2 = 0.0;
    double a2_star = 0.0;
    bool reject_at_1pct = false;
};

struct ADSummary {
    double quantile_50 = 0.0;
    double quantile_90 = 0.0;
    double quantile_99 = 0.0;
    double max = 0.0;
    std::size_t rejected = 0;
    std::size_t rows = 0;
};

struct ADOptions {
    /// Below this the small-sample correction is not trustworthy.
    std::size_t min_samples = 8;
};

/// Corrected statistic A*^2 = A^2 (1 + 4/N + 25/N^2).
double corrected_statistic(double a2, std::size_t n);

/// Anderson-Darling test for normality with estimated mean and variance.
ADResult anderson_darling(std::span<const double> sample, const ADOptions &opts = {});

/// Nearest-rank quantile of an ascending sorted sequence, p in (0, 1].
double nearest_rank(std::span<const double> sorted, double p);

struct RowTestResult {
    std::vector<ADResult> rows;
    ADSummary summary;
};

/// Tests every row of `m`. A degenerate row fails the whole call, naming the
/// row. `threads` bounds internal parallelism; results are ordered by row.
RowTestResult test_rows(const Matrix &m, const ADOptions &opts = {},
                        unsigned threads = 1);

ADSummary summarize(const std::vector<ADResult> &rows);

} // namespace pufstat::normality
