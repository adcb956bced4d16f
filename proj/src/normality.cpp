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

#include "pufstat/normality.hpp"

#include "pufstat/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pufstat::normality {

namespace {

// Below this the complementary error function leaves the normal range.
constexpr double kAsymptoticTail = -38.0;
constexpr double kLogSpaceThreshold = 5.0;

// ln Phi(x) for x <= kAsymptoticTail from the Mills ratio series.
double log_cdf_asymptotic(double x) {
    const double z = 1.0 / (x * x);
    double series = 1.0;
    double term = 1.0;
    for (int k = 1; k <= 6; ++k) {
        term *= -static_cast<double>(2 * k - 1) * z;
        series += term;
    }
    return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) +
           std::log(series);
}

} // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_normal_cdf(double x) {
    if (std::abs(x) <= kLogSpaceThreshold)
        return std::log(normal_cdf(x));
    if (x > 0.0)
        return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
    if (x > kAsymptoticTail)
        return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
    return log_cdf_asymptotic(x);
}

double log_normal_sf(double x) { return log_normal_cdf(-x); }

double corrected_statistic(double a2, std::size_t n) {
    const double nd = static_cast<double>(n);
    return a2 * (1.0 + 4.0 / nd + 25.0 / (nd * nd));
}

ADResult anderson_darling(std::span<const double> sample, const ADOptions &opts) {
    const std::size_t n = sample.size();
    if (n < opts.min_samples)
        fail(ErrorCategory::Validation,
             "Anderson-Darling test needs at least " +
                 std::to_string(opts.min_samples) + " samples, got " +
                 std::to_string(n));
    if (n < 2)
        fail(ErrorCategory::Validation, "Anderson-Darling test needs two samples");

    const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
    double sum = 0.0;
    for (double v : sample)
        sum += v;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : sample)
        ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (*lo == *hi || !(sd > 0.0) || !std::isfinite(sd))
        fail(ErrorCategory::Degenerate,
             "sample has zero standard deviation; normality is undefined");

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = (sample[i] - mean) / sd;
    std::sort(y.begin(), y.end());

    const double nd = static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double weight = static_cast<double>(2 * i + 1) / nd;
        acc += weight * (log_normal_cdf(y[i]) + log_normal_sf(y[n - 1 - i]));
    }
    ADResult r;
    r.a2 = -nd - acc;
    if (!std::isfinite(r.a2))
        fail(ErrorCategory::Numeric, "Anderson-Darling statistic is not finite");
    r.a2_star = corrected_statistic(r.a2, n);
    r.reject_at_1pct = r.a2_star > kCriticalValue1Pct;
    return r;
}

double nearest_rank(std::span<const double> sorted, double p) {
    if (sorted.empty())
        fail(ErrorCategory::Configuration, "quantile of an empty sequence");
    if (!(p > 0.0 && p <= 1.0))
        fail(ErrorCategory::Configuration, "quantile level must be in (0, 1]");
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

ADSummary summarize(const std::vector<ADResult> &rows) {
    std::vector<double> values;
    values.reserve(rows.size());
    ADSummary s;
    for (const auto &r : rows) {
        values.push_back(r.a2_star);
        s.rejected += r.reject_at_1pct ? 1 : 0;
    }
    std::sort(values.begin(), values.end());
    s.rows = rows.size();
    s.quantile_50 = nearest_rank(values, 0.50);
    s.quantile_90 = nearest_rank(values, 0.90);
    s.quantile_99 = nearest_rank(values, 0.99);
    s.max = values.back();
    return s;
}

RowTestResult test_rows(const Matrix &m, const ADOptions &opts, unsigned threads) {
    RowTestResult out;
    out.rows.resize(static_cast<std::size_t>(m.rows()));
    parallel_for(out.rows.size(), threads, [&](std::size_t r) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row[static_cast<std::size_t>(c)] = m(static_cast<Eigen::Index>(r), c);
        try {
            out.rows[r] = anderson_darling(row, opts);
        } catch (const Error &e) {
            throw Error(e.category(), "row " + std::to_string(r) + ": " + e.what());
        }
        out.rows[r].row_index = r;
    });
    out.summary = summarize(out.rows);
    return out;
}

} // namespace pufstat::normality
