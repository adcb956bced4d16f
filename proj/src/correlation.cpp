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

#include "pufstat/correlation.hpp"

#include "pufstat/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace pufstat::correlation {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        fail(ErrorCategory::Configuration,
             "pearson: lengths differ (" + std::to_string(x.size()) + " vs " +
                 std::to_string(y.size()) + ")");
    const std::size_t n = x.size();
    if (n < 3)
        fail(ErrorCategory::Configuration, "pearson: need at least 3 points");
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    bool x_const = true, y_const = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
        x_const = x_const && x[i] == x[0];
        y_const = y_const && y[i] == y[0];
    }
    if (x_const || y_const || !(sxx > 0.0) || !(syy > 0.0))
        fail(ErrorCategory::Degenerate, "pearson: constant input series");
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

CorrelationProfile profile(const Matrix &m, std::optional<std::size_t> reference_index,
                           unsigned threads) {
    if (m.rows() == 0)
        fail(ErrorCategory::Configuration, "profile: empty matrix");
    const auto rows = static_cast<std::size_t>(m.rows());
    const std::size_t ref = reference_index.value_or(rows - 1);
    if (ref >= rows)
        fail(ErrorCategory::Configuration,
             "profile: reference row " + std::to_string(ref) + " out of range");
    auto row_of = [&](std::size_t r) {
        std::vector<double> v(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            v[static_cast<std::size_t>(c)] = m(static_cast<Eigen::Index>(r), c);
        return v;
    };
    const auto reference = row_of(ref);
    try {
        (void)pearson(reference, reference);
    } catch (const Error &e) {
        throw Error(e.category(), "row " + std::to_string(ref) + ": " + e.what());
    }
    CorrelationProfile p{ref, std::vector<double>(rows)};
    parallel_for(rows, threads, [&](std::size_t r) {
        if (r == ref) {
            p.coefficients[r] = 1.0;
            return;
        }
        try {
            p.coefficients[r] = pearson(row_of(r), reference);
        } catch (const Error &e) {
            throw Error(e.category(), "row " + std::to_string(r) + ": " + e.what());
        }
    });
    return p;
}

Vector row_means(const Matrix &b) {
    Vector mu(b.rows());
    for (Eigen::Index k = 0; k < b.rows(); ++k) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < b.cols(); ++j)
            s += b(k, j);
        mu(k) = s / static_cast<double>(b.cols());
    }
    return mu;
}

Matrix covariance_matrix(const Matrix &b) {
    if (b.cols() < 1)
        fail(ErrorCategory::Configuration, "covariance: no columns");
    const Vector mu = row_means(b);
    const Matrix centered = b.colwise() - mu;
    const double n = static_cast<double>(b.cols());
    Matrix c(b.rows(), b.rows());
    for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = k; l < b.rows(); ++l) {
            double s = 0.0;
            for (Eigen::Index m = 0; m < b.cols(); ++m)
                s += centered(k, m) * centered(l, m);
            c(k, l) = s / n;
            c(l, k) = c(k, l);
        }
    return c;
}

double index_slope(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2)
        fail(ErrorCategory::Configuration, "slope: need at least 2 points");
    const double mx = (static_cast<double>(n) - 1.0) / 2.0;
    double my = 0.0;
    for (double v : values)
        my += v;
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - mx;
        sxy += dx * (values[i] - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

} // namespace pufstat::correlation
