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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pufstat::covfit {

/// How the known entries of the target difference vector are pinned.
enum class FixMode {
    Trend, ///< only the sign is known, pinned to +/- trend magnitude
    Exact, ///< the measured difference itself
};

std::string_view mode_name(FixMode mode);
FixMode parse_mode(std::string_view name);

struct CovFitProblem {
    Matrix covariance;            ///< K x K, trained on num_training devices
    Vector row_means;             ///< K means over the training devices, MHz
    std::size_t num_training = 0; ///< N
    std::vector<bool> fixed_mask; ///< K flags
    Vector fixed_values;          ///< K values, read only where fixed_mask is set
    FixMode mode = FixMode::Exact;
    double trend_magnitude = 1.0;
    std::optional<Vector> truth; ///< true difference vector, for scoring

    std::size_t size() const { return static_cast<std::size_t>(row_means.size()); }
    /// Throws Configuration when shapes or fixed values are inconsistent.
    void validate() const;
};

enum class Termination { Gradient, ObjectiveStall, MaxIterations, LineSearch };
std::string_view termination_name(Termination t);

struct SolverOptions {
    double tol_g = 1e-8;  ///< on the gradient of ||d d^T - C||_F^2
    double tol_f = 1e-12; ///< relative objective decrease
    std::size_t max_iter = 5000;
    double armijo = 1e-4;
    /// Added to the free coordinates of the starting point (zero by default,
    /// i.e. the free differences start at their training means).
    std::optional<Vector> start_offset;
};

struct CovFitResult {
    Vector b_hat;                ///< estimated difference vector, MHz
    double objective = 0.0;      ///< ||C_hat - C||_F^2 at b_hat
    double start_objective = 0.0;
    std::size_t iterations = 0;
    Termination termination = Termination::Gradient;
    std::vector<std::uint8_t> bits_hat;
    std::vector<std::uint8_t> start_bits;
    std::optional<int> delta_correct; ///< set when the problem carries truth
};

/// C_hat - C for the expanded covariance of N+1 devices, computed through
/// the rank-one identity (d d^T - C) / (N+1) with d = b - mu.
Matrix expanded_cov_residual(const Matrix &covariance, const Vector &row_means,
                             const Vector &b, std::size_t num_training);

/// ||d d^T - C||_F^2 / (N+1)^2.
double objective(const Matrix &covariance, std::size_t num_training, const Vector &d);
/// 4 (d d^T - C) d / (N+1)^2, for every coordinate.
Vector gradient(const Matrix &covariance, std::size_t num_training, const Vector &d);

/// Projected gradient descent with Armijo backtracking over the free
/// coordinates of d = b - mu. Throws Configuration if nothing is free and
/// Numeric on a non-finite objective.
CovFitResult fit(const CovFitProblem &problem, const SolverOptions &opts = {});

enum class Selection { Even, Random };

/// Indices of the m pinned positions out of K.
std::vector<std::size_t> fixed_positions(std::size_t num_pairs, std::size_t count,
                                         Selection selection, std::uint64_t seed);

/// Seeded choice of `count` distinct devices, in ascending order.
std::vector<std::size_t> choose_devices(std::size_t num_devices, std::size_t count,
                                        std::uint64_t seed);

struct AttackOptions {
    FixMode mode = FixMode::Exact;
    std::vector<std::size_t> fixed_counts;
    Selection selection = Selection::Even;
    std::uint64_t seed = 0;
    double trend_magnitude = 1.0;
    SolverOptions solver;
    unsigned threads = 1;
};

struct AttackCell {
    std::size_t device = 0;
    FixMode mode = FixMode::Exact;
    std::size_t fixed_count = 0;
    bool ok = false;
    std::string error;
    int delta_correct = 0;
    double objective = 0.0;
    std::size_t iterations = 0;
};

/// Leave-one-out attack on one device: train C and mu on the other devices,
/// pin `m` entries of the target for every m in fixed_counts and fit the
/// rest. Cell failures are recorded in the cell, not thrown.
std::vector<AttackCell> evaluate_attack(const DiffMatrix &diff, std::size_t device,
                                        const AttackOptions &opts);

struct EnvelopePoint {
    FixMode mode = FixMode::Exact;
    std::size_t fixed_count = 0;
    int min = 0;
    int max = 0;
    double mean_abs = 0.0;
    std::size_t cells = 0;
};

/// Min/max of delta_correct per (mode, fixed count) over successful cells.
std::vector<EnvelopePoint> envelope(const std::vector<AttackCell> &cells);

} // namespace pufstat::covfit
