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

#include "pufstat/covfit.hpp"
#include "pufstat/correlation.hpp"
#include "pufstat/syngen.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>

using namespace pufstat;
using namespace pufstat::covfit;

namespace {

Matrix random_training(Eigen::Index k, Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    Matrix mix(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            mix(i, j) = z(rng) * (i == j ? 2.0 : 0.5);
    Matrix b(k, n);
    for (Eigen::Index m = 0; m < n; ++m) {
        Vector v(k);
        for (Eigen::Index i = 0; i < k; ++i)
            v(i) = z(rng);
        b.col(m) = mix * v;
        for (Eigen::Index i = 0; i < k; ++i)
            b(i, m) += 0.3 * static_cast<double>(i) - 1.0;
    }
    return b;
}

CovFitProblem free_problem(const Matrix &c, const Vector &mu, std::size_t n) {
    CovFitProblem p;
    p.covariance = c;
    p.row_means = mu;
    p.num_training = n;
    p.fixed_mask.assign(static_cast<std::size_t>(mu.size()), false);
    p.fixed_values = Vector::Zero(mu.size());
    return p;
}

Vector random_vector(Eigen::Index k, double scale, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, scale);
    Vector v(k);
    for (Eigen::Index i = 0; i < k; ++i)
        v(i) = z(rng);
    return v;
}

} // namespace

TEST(Residual, ZeroDeviation) {
    const Matrix b = random_training(5, 40, 1);
    const Matrix c = oracle::covariance_naive(b);
    const Vector mu = b.rowwise().mean();
    const Matrix r = expanded_cov_residual(c, mu, mu, 40);
    EXPECT_LT((r + c / 41.0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Residual, RankOneMatchIsExactlyZero) {
    Vector c(3), mu(3);
    c << 0.5, -1.25, 2.0;
    mu << 1.0, 2.0, -3.0;
    const Matrix cov = c * c.transpose();
    const Matrix r = expanded_cov_residual(cov, mu, mu + c, 10);
    EXPECT_EQ(r.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Residual, RankOneIdentityMatchesDirectExpansion) {
    // Direct form: covariance of the N training columns plus the new column,
    // taken about the training means with divisor N + 1.
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Eigen::Index k = 6, n = 50;
        const Matrix b = random_training(k, n, 100 + seed);
        const Matrix c = oracle::covariance_naive(b);
        Vector mu(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            double s = 0.0;
            for (Eigen::Index m = 0; m < n; ++m)
                s += b(i, m);
            mu(i) = s / static_cast<double>(n);
        }
        const Vector extra = random_vector(k, 3.0, 900 + seed);
        Matrix direct = Matrix::Zero(k, k);
        for (Eigen::Index m = 0; m <= n; ++m) {
            const Vector col = m < n ? Vector(b.col(m)) : extra;
            for (Eigen::Index r = 0; r < k; ++r)
                for (Eigen::Index s = 0; s < k; ++s)
                    direct(r, s) += (col(r) - mu(r)) * (col(s) - mu(s));
        }
        direct /= static_cast<double>(n + 1);
        const Matrix residual = expanded_cov_residual(c, mu, extra, n);
        EXPECT_LT((residual - (direct - c)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Objective, GradientMatchesFiniteDifferences) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix b = random_training(8, 60, 200 + seed);
        const Matrix c = oracle::covariance_naive(b);
        const Vector d = random_vector(8, 2.0, 300 + seed);
        const Vector g = gradient(c, 60, d);
        const double h = 1e-5;
        for (Eigen::Index i = 0; i < 8; ++i) {
            Vector up = d, down = d;
            up(i) += h;
            down(i) -= h;
            const double fd = (objective(c, 60, up) - objective(c, 60, down)) / (2.0 * h);
            // Relative error, measured against the gradient's overall size.
            EXPECT_LE(std::abs(g(i) - fd), 1e-6 * std::max(std::abs(fd), g.norm()))
                << "seed " << seed << " i " << i;
        }
    }
}

TEST(Fit, RankOneRecoversFactor) {
    Vector c(5);
    c << 1.5, -0.7, 2.2, 0.3, -1.1;
    const Vector mu = Vector::Constant(5, 4.0);
    auto p = free_problem(c * c.transpose(), mu, 30);
    SolverOptions opts;
    opts.start_offset = random_vector(5, 0.1, 42);
    const auto r = fit(p, opts);
    const Vector d = r.b_hat - mu;
    EXPECT_LT((d.cwiseAbs() - c.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-6);
    // One global sign: either d = c or d = -c.
    const double s = d.dot(c) > 0.0 ? 1.0 : -1.0;
    EXPECT_LT((d - s * c).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT(r.objective, 1e-12);
}

TEST(Fit, RankOneAgreesWithCoarseGridOnThreeCoordinates) {
    Vector c(3);
    c << 0.8, -0.4, 1.2;
    const Matrix cov = c * c.transpose();
    double best = std::numeric_limits<double>::infinity();
    for (int a = -40; a <= 40; ++a)
        for (int b = -40; b <= 40; ++b)
            for (int e = -40; e <= 40; ++e) {
                Vector d(3);
                d << a * 0.05, b * 0.05, e * 0.05;
                best = std::min(best, objective(cov, 9, d));
            }
    auto p = free_problem(cov, Vector::Zero(3), 9);
    SolverOptions opts;
    opts.start_offset = random_vector(3, 0.2, 5);
    const auto r = fit(p, opts);
    EXPECT_LE(r.objective, best + 1e-12);
    EXPECT_NEAR(std::abs(r.b_hat(2)), 1.2, 1e-6);
}

TEST(Fit, ZeroStartWithoutFixedEntriesIsStationary) {
    const Matrix b = random_training(4, 20, 3);
    auto p = free_problem(oracle::covariance_naive(b), b.rowwise().mean(), 20);
    const auto r = fit(p);
    EXPECT_EQ(r.iterations, 0u);
    EXPECT_EQ(r.termination, Termination::Gradient);
    EXPECT_EQ(r.b_hat, p.row_means);
}

TEST(Fit, AllFixedIsConfigurationError) {
    const Matrix b = random_training(4, 20, 3);
    auto p = free_problem(oracle::covariance_naive(b), b.rowwise().mean(), 20);
    p.fixed_mask.assign(4, true);
    p.fixed_values = Vector::Ones(4);
    try {
        fit(p);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.category(), ErrorCategory::Configuration);
    }
}

TEST(Fit, ValidationErrors) {
    const Matrix b = random_training(4, 20, 3);
    auto p = free_problem(oracle::covariance_naive(b), b.rowwise().mean(), 20);
    auto bad = p;
    bad.covariance(0, 1) += 1.0;
    EXPECT_THROW(fit(bad), Error);
    bad = p;
    bad.covariance = -bad.covariance;
    EXPECT_THROW(fit(bad), Error);
    bad = p;
    bad.mode = FixMode::Trend;
    bad.fixed_mask[1] = true;
    bad.fixed_values(1) = 0.5;
    EXPECT_THROW(fit(bad), Error);
    bad.fixed_values(1) = -1.0;
    EXPECT_NO_THROW(fit(bad));
}

TEST(Fit, TwoFreeCoordinatesMatchGridSearch) {
    // K = 4, J = 30: train on 29 devices, fix two entries of the held-out one.
    const Eigen::Index k = 4, n = 29;
    const Matrix all = random_training(k, n + 1, 77);
    const Matrix train = all.leftCols(n);
    const Vector truth = all.col(n);
    const Matrix cov = correlation::covariance_matrix(train);
    const Vector mu = correlation::row_means(train);
    auto p = free_problem(cov, mu, static_cast<std::size_t>(n));
    p.fixed_mask = {true, false, true, false};
    p.fixed_values(0) = truth(0);
    p.fixed_values(2) = truth(2);
    p.truth = truth;
    const auto r = fit(p);
    EXPECT_EQ(r.b_hat(0), truth(0));
    EXPECT_EQ(r.b_hat(2), truth(2));
    ASSERT_TRUE(r.delta_correct.has_value());

    Vector d = Vector::Zero(k);
    d(0) = truth(0) - mu(0);
    d(2) = truth(2) - mu(2);
    const double s1 = 3.0 * std::sqrt(cov(1, 1)), s3 = 3.0 * std::sqrt(cov(3, 3));
    double best = std::numeric_limits<double>::infinity();
    for (double x = -s1; x <= s1; x += 0.01)
        for (double y = -s3; y <= s3; y += 0.01) {
            d(1) = x;
            d(3) = y;
            best = std::min(best, objective(cov, static_cast<std::size_t>(n), d));
        }
    EXPECT_NEAR(r.objective, best, 1e-4);
    EXPECT_LE(r.objective, best + 1e-12);
}

TEST(Fit, ObjectiveNeverIncreases) {
    const Matrix b = random_training(12, 40, 8);
    auto p = free_problem(oracle::covariance_naive(b), b.rowwise().mean(), 40);
    for (int i = 0; i < 12; i += 3) {
        p.fixed_mask[static_cast<std::size_t>(i)] = true;
        p.fixed_values(i) = b(i, 5);
    }
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t iters = 0; iters <= 60; ++iters) {
        SolverOptions opts;
        opts.max_iter = iters;
        const auto r = fit(p, opts);
        EXPECT_LE(r.objective, r.start_objective);
        EXPECT_LE(r.objective, previous);
        previous = r.objective;
    }
}

TEST(Fit, SignSymmetryWithoutFixedEntries) {
    const Matrix b = random_training(8, 50, 13);
    const Matrix cov = oracle::covariance_naive(b);
    auto p = free_problem(cov, Vector::Zero(8), 50);
    SolverOptions plus, minus;
    plus.start_offset = random_vector(8, 0.5, 99);
    minus.start_offset = -*plus.start_offset;
    const auto rp = fit(p, plus);
    const auto rm = fit(p, minus);
    EXPECT_NEAR(rp.objective, rm.objective, 1e-12 * std::max(1.0, rp.objective));
    EXPECT_LT((rp.b_hat + rm.b_hat).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(objective(cov, 50, rp.b_hat), objective(cov, 50, -rp.b_hat), 1e-15);
}

TEST(Positions, EvenAndRandom) {
    EXPECT_EQ(fixed_positions(8, 4, Selection::Even, 0),
              (std::vector<std::size_t>{0, 2, 4, 6}));
    EXPECT_EQ(fixed_positions(10, 3, Selection::Even, 0),
              (std::vector<std::size_t>{0, 3, 6}));
    EXPECT_TRUE(fixed_positions(10, 0, Selection::Even, 0).empty());
    const auto a = fixed_positions(256, 32, Selection::Random, 5);
    EXPECT_EQ(a, fixed_positions(256, 32, Selection::Random, 5));
    EXPECT_EQ(a.size(), 32u);
    EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
    EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
    EXPECT_THROW(fixed_positions(4, 5, Selection::Even, 0), Error);
    const auto devs = choose_devices(193, 8, 1);
    EXPECT_EQ(devs.size(), 8u);
    EXPECT_EQ(devs, choose_devices(193, 8, 1));
}

TEST(Attack, FullyPinnedCellAndErrorsRecorded) {
    const Matrix b = random_training(8, 12, 21);
    AttackOptions opts;
    opts.fixed_counts = {0, 4, 8};
    const auto cells = evaluate_attack(DiffMatrix{b}, 3, opts);
    ASSERT_EQ(cells.size(), 3u);
    for (const auto &c : cells)
        EXPECT_TRUE(c.ok) << c.error;
    EXPECT_EQ(cells[0].delta_correct, 0);
    EXPECT_EQ(cells[0].iterations, 0u);
    EXPECT_EQ(cells[2].delta_correct, 0);
    EXPECT_EQ(cells[2].iterations, 0u);

    opts.fixed_counts = {9};
    const auto bad = evaluate_attack(DiffMatrix{b}, 3, opts);
    EXPECT_FALSE(bad[0].ok);
    EXPECT_NE(bad[0].error.find("configuration"), std::string::npos);
    EXPECT_THROW(evaluate_attack(DiffMatrix{b}, 12, opts), Error);
}

TEST(Attack, ParallelMatchesSequential) {
    const Matrix b = random_training(16, 30, 4);
    AttackOptions opts;
    opts.fixed_counts = {0, 2, 4, 6, 8, 10, 12, 14};
    opts.mode = FixMode::Trend;
    const auto seq = evaluate_attack(DiffMatrix{b}, 7, opts);
    opts.threads = 4;
    const auto par = evaluate_attack(DiffMatrix{b}, 7, opts);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        EXPECT_EQ(seq[i].delta_correct, par[i].delta_correct);
        EXPECT_EQ(seq[i].objective, par[i].objective);
    }
}

TEST(Attack, NullModelGainsNothingOnAverage) {
    // Independent rows: the fitted signs carry no information beyond the start.
    double total = 0.0;
    std::size_t cells = 0;
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        auto cfg = syngen::preset("null", 500 + trial);
        cfg.devices = 60;
        cfg.ros = 64;
        cfg.samples = 2;
        cfg.geometry = ChipGeometry{16, 4, ChipGeometry::Order::ColumnMajor};
        const auto m = build_matrices(syngen::generate(cfg).readings);
        AttackOptions opts;
        opts.fixed_counts = {4, 8, 16, 24};
        opts.mode = trial % 2 ? FixMode::Trend : FixMode::Exact;
        for (const auto &c : evaluate_attack(m.diff, trial % 60, opts)) {
            ASSERT_TRUE(c.ok) << c.error;
            total += c.delta_correct;
            ++cells;
        }
    }
    EXPECT_LT(std::abs(total / static_cast<double>(cells)), 1.0);
}

TEST(Attack, Envelope) {
    std::vector<AttackCell> cells(4);
    for (std::size_t i = 0; i < 4; ++i) {
        cells[i].ok = true;
        cells[i].fixed_count = i < 3 ? 8 : 16;
        cells[i].delta_correct = static_cast<int>(i) - 1;
    }
    cells.push_back(AttackCell{});
    const auto env = envelope(cells);
    ASSERT_EQ(env.size(), 2u);
    EXPECT_EQ(env[0].fixed_count, 8u);
    EXPECT_EQ(env[0].min, -1);
    EXPECT_EQ(env[0].max, 1);
    EXPECT_NEAR(env[0].mean_abs, 2.0 / 3.0, 1e-15);
    EXPECT_EQ(env[0].cells, 3u);
    EXPECT_EQ(env[1].min, 2);
}
