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
#include "pufstat/syngen.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pufstat;
using namespace pufstat::similarity;

namespace {

DevMatrix random_dev(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 2.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = n(rng) + 50.0;
    return DevMatrix{m};
}

DeviceMeta serials_from(std::vector<long long> s) { return DeviceMeta{std::move(s)}; }

} // namespace

TEST(GroupVariance, TwoDeviceExample) {
    Matrix m(1, 2);
    m << -1.0, 1.0;
    EXPECT_DOUBLE_EQ(group_variance(DevMatrix{m}, 0, 1), 2.0);
}

TEST(GroupVariance, MapMatchesPairwiseOracle) {
    const auto d = random_dev(16, 40, 9);
    const auto map = group_variance_map(d, 5);
    for (std::size_t a = 0; a < 40; ++a)
        for (std::size_t b = a; b < 40; ++b) {
            if (b - a + 1 < 5) {
                EXPECT_FALSE(map.contains(a, b));
                continue;
            }
            const double ref = oracle::group_variance_naive(d.values, a, b);
            EXPECT_NEAR(map.at(a, b), ref, 1e-10 * std::max(1.0, ref)) << a << "," << b;
            EXPECT_NEAR(group_variance(d, a, b), ref, 1e-10 * std::max(1.0, ref));
        }
}

TEST(GroupVariance, InvariantToOrderWithinWindow) {
    auto d = random_dev(8, 12, 4);
    const double before = group_variance(d, 2, 9);
    d.values.col(3).swap(d.values.col(8));
    d.values.col(2).swap(d.values.col(5));
    EXPECT_NEAR(group_variance(d, 2, 9), before, 1e-12);
}

TEST(GroupVariance, WindowErrors) {
    const auto d = random_dev(2, 6, 1);
    EXPECT_THROW(group_variance(d, 3, 3), Error);
    EXPECT_THROW(group_variance(d, 2, 6), Error);
    const auto map = group_variance_map(d, 5);
    EXPECT_THROW(map.at(0, 2), Error);
}

TEST(SerialCorrelation, RequiresMetadata) {
    const auto map = group_variance_map(random_dev(4, 20, 2), 5);
    try {
        serial_correlation(map, std::nullopt, 10);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.category(), ErrorCategory::Unavailable);
    }
}

TEST(SerialCorrelation, ConfigurationLimits) {
    const auto map = group_variance_map(random_dev(4, 12, 2), 5);
    std::vector<long long> s(12);
    for (std::size_t j = 0; j < 12; ++j)
        s[j] = static_cast<long long>(j * j);
    const auto meta = serials_from(s);
    EXPECT_THROW(serial_correlation(map, meta, 4), Error);
    try {
        serial_correlation(map, meta, 11);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.category(), ErrorCategory::Configuration);
    }
    EXPECT_NO_THROW(serial_correlation(map, meta, 10));
}

TEST(SerialCorrelation, ShiftInvariantInSerials) {
    const auto map = group_variance_map(random_dev(4, 30, 5), 5);
    std::mt19937_64 rng(8);
    std::vector<long long> s(30);
    long long v = 1000;
    for (auto &x : s) {
        x = v;
        v += 1 + static_cast<long long>(rng() % 50);
    }
    auto shifted = s;
    for (auto &x : shifted)
        x += 987654;
    EXPECT_NEAR(serial_correlation(map, serials_from(s), 10),
                serial_correlation(map, serials_from(shifted), 10), 1e-12);
}

TEST(SerialCorrelation, EquallySpacedSerialsAreDegenerate) {
    const auto map = group_variance_map(random_dev(4, 30, 5), 5);
    std::vector<long long> s(30);
    for (std::size_t j = 0; j < 30; ++j)
        s[j] = 100 + static_cast<long long>(j);
    try {
        serial_correlation(map, serials_from(s), 10);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.category(), ErrorCategory::Degenerate);
    }
}

TEST(SerialCorrelation, NullModelShowsNoTrend) {
    // Overlapping windows make single-seed values noisy (median |r| near 0.14,
    // 95th percentile near 0.35 over 300 seeds), so the bound is on the mean.
    double sum = 0.0;
    const int seeds = 40;
    for (int s = 0; s < seeds; ++s) {
        auto cfg = syngen::preset("null", 1000 + static_cast<std::uint64_t>(s));
        cfg.devices = 200;
        cfg.samples = 4;
        const auto data = syngen::generate(cfg);
        const auto m = build_matrices(data.readings);
        const double r = serial_correlation(group_variance_map(m.dev), data.meta, 10);
        EXPECT_LT(std::abs(r), 0.6);
        sum += r;
    }
    EXPECT_LT(std::abs(sum / seeds), 0.15);
}
