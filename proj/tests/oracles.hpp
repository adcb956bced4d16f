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

// Independent reference computations for the test suites. Nothing here calls
// into the library code paths it is used to check.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace oracle {

/// Phi(x) by adaptive Gauss-Kronrod quadrature of the Gaussian density.
inline double normal_cdf_quadrature(double x) {
    auto density = [](double t) {
        return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
    };
    using boost::math::quadrature::gauss_kronrod;
    // Integrate the short side so that tail values keep absolute accuracy.
    if (x <= 0.0) {
        const double lower = std::min(x, -40.0);
        return gauss_kronrod<double, 61>::integrate(density, lower, x, 15, 1e-16);
    }
    return 1.0 - gauss_kronrod<double, 61>::integrate(density, -40.0, -x, 15, 1e-16);
}

/// Anderson-Darling A^2 written out term by term, quadrature-grade Phi.
inline double anderson_darling_a2(std::vector<double> x) {
    const std::size_t n = x.size();
    long double mean = 0.0L;
    for (double v : x)
        mean += v;
    mean /= static_cast<long double>(n);
    long double var = 0.0L;
    for (double v : x)
        var += (v - mean) * (v - mean);
    const long double sd = std::sqrt(var / static_cast<long double>(n - 1));
    std::vector<double> y;
    for (double v : x)
        y.push_back(static_cast<double>((v - mean) / sd));
    std::sort(y.begin(), y.end());
    long double sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const long double lo = std::log(static_cast<long double>(normal_cdf_quadrature(y[i])));
        const long double hi =
            std::log(static_cast<long double>(normal_cdf_quadrature(-y[n - 1 - i])));
        sum += (static_cast<long double>(2 * i + 1) / n) * (lo + hi) + 1.0L;
    }
    return static_cast<double>(-sum);
}

/// Population covariance by a plain double loop.
inline Eigen::MatrixXd covariance_naive(const Eigen::MatrixXd &b) {
    const auto k = b.rows(), n = b.cols();
    Eigen::MatrixXd c(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
        for (Eigen::Index s = 0; s < k; ++s) {
            double mr = 0, ms = 0;
            for (Eigen::Index m = 0; m < n; ++m) {
                mr += b(r, m);
                ms += b(s, m);
            }
            mr /= n;
            ms /= n;
            double acc = 0;
            for (Eigen::Index m = 0; m < n; ++m)
                acc += (b(r, m) - mr) * (b(s, m) - ms);
            c(r, s) = acc / n;
        }
    return c;
}

/// Mean over rows of the sample variance within columns a..b, brute force.
inline double group_variance_naive(const Eigen::MatrixXd &d, std::size_t a, std::size_t b) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        double var = 0.0;
        // Pairwise form: sum over pairs (x_p - x_q)^2 / (n (n-1)).
        const double n = static_cast<double>(b - a + 1);
        for (std::size_t p = a; p <= b; ++p)
            for (std::size_t q = a; q <= b; ++q) {
                const double diff = d(i, static_cast<Eigen::Index>(p)) -
                                    d(i, static_cast<Eigen::Index>(q));
                var += diff * diff;
            }
        total += var / (2.0 * n * (n - 1.0));
    }
    return total / static_cast<double>(d.rows());
}

} // namespace oracle
