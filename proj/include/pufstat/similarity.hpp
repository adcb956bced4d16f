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
#include <vector>

namespace pufstat::similarity {

/// Mean over ROs of the sample variance of D within devices a..b inclusive.
double group_variance(const DevMatrix &dev, std::size_t a, std::size_t b);

/// s^2 for every window a <= b with b - a + 1 >= min_group.
class GroupVarianceMap {
public:
    GroupVarianceMap() = default;
    GroupVarianceMap(std::size_t num_devices, std::size_t min_group);

    std::size_t num_devices() const { return devices_; }
    std::size_t min_group() const { return min_group_; }
    bool contains(std::size_t a, std::size_t b) const {
        return a <= b && b < devices_ && b - a + 1 >= min_group_;
    }
    double at(std::size_t a, std::size_t b) const;
    void set(std::size_t a, std::size_t b, double s2);

private:
    std::size_t devices_ = 0;
    std::size_t min_group_ = 0;
    std::vector<double> values_; // row-major J x J, upper triangle used
};

inline constexpr std::size_t kDefaultMinGroup = 5;

/// All windows via per-RO prefix sums, O(I J^2).
GroupVarianceMap group_variance_map(const DevMatrix &dev,
                                    std::size_t min_group = kDefaultMinGroup);

/// Pearson correlation between s^2 of every window of `group_size` devices
/// and the serial number difference of its last and first device.
double serial_correlation(const GroupVarianceMap &gv,
                          const std::optional<DeviceMeta> &meta,
                          std::size_t group_size);

} // namespace pufstat::similarity
