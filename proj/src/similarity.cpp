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

#include "pufstat/similarity.hpp"

#include "pufstat/correlation.hpp"

#include <algorithm>
#include <limits>

namespace pufstat::similarity {

double group_variance(const DevMatrix &dev, std::size_t a, std::size_t b) {
    if (b < a || b - a + 1 < 2)
        fail(ErrorCategory::Configuration,
             "group variance needs a window of at least two devices");
    if (b >= static_cast<std::size_t>(dev.cols()))
        fail(ErrorCategory::Configuration,
             "device index " + std::to_string(b) + " out of range");
    const auto first = static_cast<Eigen::Index>(a);
    const auto n = static_cast<Eigen::Index>(b - a + 1);
    double total = 0.0;
    for (Eigen::Index i = 0; i < dev.rows(); ++i) {
        double s = 0.0;
        for (Eigen::Index j = first; j < first + n; ++j)
            s += dev(i, j);
        const double mean = s / static_cast<double>(n);
        double ss = 0.0;
        for (Eigen::Index j = first; j < first + n; ++j)
            ss += (dev(i, j) - mean) * (dev(i, j) - mean);
        total += ss / static_cast<double>(n - 1);
    }
    return total / static_cast<double>(dev.rows());
}

GroupVarianceMap::GroupVarianceMap(std::size_t num_devices, std::size_t min_group)
    : devices_(num_devices), min_group_(min_group),
      values_(num_devices * num_devices, std::numeric_limits<double>::quiet_NaN()) {
    if (min_group_ < 2)
        fail(ErrorCategory::Configuration, "minimum group size must be at least 2");
}

double GroupVarianceMap::at(std::size_t a, std::size_t b) const {
    if (!contains(a, b))
        fail(ErrorCategory::Configuration,
             "window (" + std::to_string(a) + ", " + std::to_string(b) +
                 ") is not part of the group variance map");
    return values_[a * devices_ + b];
}

void GroupVarianceMap::set(std::size_t a, std::size_t b, double s2) {
    if (!contains(a, b))
        fail(ErrorCategory::Configuration, "window outside the group variance map");
    values_[a * devices_ + b] = s2;
}

GroupVarianceMap group_variance_map(const DevMatrix &dev, std::size_t min_group) {
    const auto devices = static_cast<std::size_t>(dev.cols());
    GroupVarianceMap map(devices, min_group);
    if (devices < min_group)
        return map;

    std::vector<double> acc(devices * devices, 0.0);
    std::vector<double> p1(devices + 1), p2(devices + 1);
    for (Eigen::Index i = 0; i < dev.rows(); ++i) {
        // Shift by the row mean so the prefix sums stay small.
        double shift = 0.0;
        for (Eigen::Index j = 0; j < dev.cols(); ++j)
            shift += dev(i, j);
        shift /= static_cast<double>(devices);
        p1[0] = p2[0] = 0.0;
        for (std::size_t j = 0; j < devices; ++j) {
            const double v = dev(i, static_cast<Eigen::Index>(j)) - shift;
            p1[j + 1] = p1[j] + v;
            p2[j + 1] = p2[j] + v * v;
        }
        for (std::size_t a = 0; a < devices; ++a)
            for (std::size_t b = a + min_group - 1; b < devices; ++b) {
                const double n = static_cast<double>(b - a + 1);
                const double s1 = p1[b + 1] - p1[a];
                const double s2 = p2[b + 1] - p2[a];
                acc[a * devices + b] += std::max(0.0, (s2 - s1 * s1 / n) / (n - 1.0));
            }
    }
    const double rows = static_cast<double>(dev.rows());
    for (std::size_t a = 0; a < devices; ++a)
        for (std::size_t b = a + min_group - 1; b < devices; ++b)
            map.set(a, b, acc[a * devices + b] / rows);
    return map;
}

double serial_correlation(const GroupVarianceMap &gv,
                          const std::optional<DeviceMeta> &meta,
                          std::size_t group_size) {
    if (!meta)
        fail(ErrorCategory::Unavailable,
             "serial correlation needs device metadata (serial numbers)");
    if (meta->serials.size() != gv.num_devices())
        fail(ErrorCategory::Structural,
             "metadata lists " + std::to_string(meta->serials.size()) +
                 " serials for " + std::to_string(gv.num_devices()) + " devices");
    if (group_size < gv.min_group())
        fail(ErrorCategory::Configuration,
             "group size " + std::to_string(group_size) +
                 " is below the map's minimum of " + std::to_string(gv.min_group()));
    if (group_size > gv.num_devices() || gv.num_devices() - group_size + 1 < 3)
        fail(ErrorCategory::Configuration,
             "fewer than 3 windows of " + std::to_string(group_size) + " devices");
    const std::size_t windows = gv.num_devices() - group_size + 1;
    std::vector<double> s2(windows), distance(windows);
    for (std::size_t a = 0; a < windows; ++a) {
        const std::size_t b = a + group_size - 1;
        s2[a] = gv.at(a, b);
        distance[a] = static_cast<double>(meta->serials[b] - meta->serials[a]);
    }
    return correlation::pearson(s2, distance);
}

} // namespace pufstat::similarity
