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
#include "pufstat/syngen.hpp"

#include "../oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace pufstat;
using namespace pufstat::normality;

TEST(NormalCdf, KnownValues) {
    EXPECT_EQ(normal_cdf(0.0), 0.5);
    // mpmath quadrature at 40 digits: 0.84134474606854294858...
    EXPECT_NEAR(normal_cdf(1.0), 0.841344746068543, 1e-15);
    EXPECT_NEAR(normal_cdf(3.0), 0.99865010196837, 1e-14);
}

TEST(NormalCdf, SymmetryAndMonotonicity) {
    double prev = 0.0;
    for (double x = -9.0; x <= 9.0; x += 0.0625) {
        EXPECT_NEAR(normal_cdf(x) + normal_cdf(-x), 1.0, 1e-14);
        const double v = normal_cdf(x);
        EXPECT_GE(v, prev);
        EXPECT_GT(v, 0.0);
        EXPECT_LE(v, 1.0);
        prev = v;
    }
}

TEST(NormalCdf, MatchesQuadrature) {
    for (int n = 0; n < 25; ++n) {
        const double x = -8.0 + 16.0 * n / 24.0;
        EXPECT_NEAR(normal_cdf(x), oracle::normal_cdf_quadrature(x), 1e-12) << x;
    }
}

TEST(NormalCdf, LogTailsStayFinite) {
    EXPECT_NEAR(log_normal_cdf(0.0), std::log(0.5), 1e-15);
    // Continuity across the branch points.
    for (double edge : {-5.0, 5.0, -38.0}) {
        const double below = log_normal_cdf(std::nextafter(edge, -100.0));
        const double above = log_normal_cdf(std::nextafter(edge, 100.0));
        EXPECT_NEAR(below, above, 1e-9 * std::max(1.0, std::abs(above)));
    }
    EXPECT_TRUE(std::isfinite(log_normal_cdf(-60.0)));
    EXPECT_LT(log_normal_cdf(-60.0), -1800.0);
    EXPECT_TRUE(std::isfinite(log_normal_sf(60.0)));
    EXPECT_NEAR(log_normal_sf(-10.0), std::log1p(-normal_cdf(-10.0)), 1e-18);
    // ln Phi(-10) = -53.2312851... (closed form via erfc in long double)
    const long double ref = std::log(0.5L * std::erfc(10.0L / std::sqrt(2.0L)));
    EXPECT_NEAR(log_normal_cdf(-10.0), static_cast<double>(ref), 1e-12);
}

TEST(AndersonDarling, FixedVectorMatchesOracle) {
    const std::vector<double> x{-1.2, -0.5, 0.0, 0.4, 1.3};
    ADOptions opts;
    opts.min_samples = 5;
    const auto r = anderson_darling(x, opts);
    // mpmath at 40 digits: A2 = 0.13919800686561896..., A2* = 0.38975441922373308...
    EXPECT_NEAR(r.a2, 0.139198006865619, 1e-13);
    EXPECT_NEAR(r.a2_star, 0.389754419223733, 1e-13);
    EXPECT_NEAR(r.a2, oracle::anderson_darling_a2(x), 1e-12);
    EXPECT_FALSE(r.reject_at_1pct);
}

TEST(AndersonDarling, OracleEquivalenceOnRandomSamples) {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(8 + rng() % 200);
        for (double &v : x)
            v = 3.0 * n(rng) + 10.0;
        EXPECT_NEAR(anderson_darling(x).a2, oracle::anderson_darling_a2(x), 1e-10);
    }
}

TEST(AndersonDarling, AffineAndPermutationInvariance) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(193);
        for (double &v : x)
            v = n(rng);
        const auto base = anderson_darling(x);
        std::vector<double> y = x;
        for (double &v : y)
            v = 3.0 * v + 5.0;
        EXPECT_NEAR(anderson_darling(y).a2_star, base.a2_star, 1e-12);
        std::shuffle(x.begin(), x.end(), rng);
        EXPECT_NEAR(anderson_darling(x).a2, base.a2, 1e-12);
    }
}

TEST(AndersonDarling, CorrectionAndThreshold) {
    EXPECT_DOUBLE_EQ(corrected_statistic(1.0, 10), 1.0 + 0.4 + 0.25);
    // A uniform sample is far from normal in the tails at this size.
    std::vector<double> u;
    for (int i = 0; i < 400; ++i)
        u.push_back(i);
    const auto r = anderson_darling(u);
    EXPECT_EQ(r.reject_at_1pct, r.a2_star > 1.047);
    EXPECT_TRUE(r.reject_at_1pct);
}

TEST(AndersonDarling, Errors) {
    const std::vector<double> constant(20, 4.2);
    try {
        anderson_darling(constant);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.category(), ErrorCategory::Degenerate);
    }
    const std::vector<double> small{1, 2, 3, 4, 5, 6, 7};
    try {
        anderson_darling(small);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.category(), ErrorCategory::Validation);
    }
}

TEST(AndersonDarling, NearestRankQuantiles) {
    const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    EXPECT_EQ(nearest_rank(v, 0.5), 5);
    EXPECT_EQ(nearest_rank(v, 0.9), 9);
    EXPECT_EQ(nearest_rank(v, 0.99), 10);
    EXPECT_EQ(nearest_rank(v, 1.0), 10);
}

TEST(TestRows, DegenerateRowIsNamed) {
    Matrix m = Matrix::Random(4, 30);
    m.row(2).setConstant(1.0);
    try {
        test_rows(m);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.category(), ErrorCategory::Degenerate);
        EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
    }
}

TEST(TestRows, CalibratedRejectionOnSyntheticRows) {
    // Rows of F from the null generator are i.i.d. Gaussian across devices.
    const auto data = syngen::generate(syngen::preset("null", 17));
    const auto m = build_matrices(data.readings);
    const auto seq = test_rows(m.freq.values, {}, 1);
    const auto par = test_rows(m.freq.values, {}, 4);
    ASSERT_EQ(seq.rows.size(), 512u);
    for (std::size_t r = 0; r < seq.rows.size(); ++r) {
        EXPECT_EQ(seq.rows[r].row_index, r);
        EXPECT_EQ(seq.rows[r].a2_star, par.rows[r].a2_star);
    }
    const double fraction = static_cast<double>(seq.summary.rejected) / 512.0;
    EXPECT_LE(fraction, 0.03);
    EXPECT_LE(seq.summary.quantile_50, seq.summary.quantile_90);
    EXPECT_LE(seq.summary.quantile_90, seq.summary.quantile_99);
    EXPECT_LE(seq.summary.quantile_99, seq.summary.max);
}
