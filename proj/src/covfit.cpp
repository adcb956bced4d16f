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
#include "pufstat/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace pufstat::covfit {

std::string_view mode_name(FixMode mode) {
    return mode == FixMode::Trend ? "trend" : "exact";
}

FixMode parse_mode(std::string_view name) {
    if (name == "trend")
        return FixMode::Trend;
    if (name == "exact")
        return FixMode::Exact;
    fail(ErrorCategory::Configuration,
         "unknown fit mode '" + std::string(name) + "' (expected trend or exact)");
}

std::string_view termination_name(Termination t) {
    switch (t) {
    case Termination::Gradient:
        return "gradient";
    case Termination::ObjectiveStall:
        return "objective_stall";
    case Termination::MaxIterations:
        return "max_iterations";
    case Termination::LineSearch:
        return "line_search";
    }
    return "unknown";
}

void CovFitProblem::validate() const {
    const auto k = row_means.size();
    if (k == 0)
        fail(ErrorCategory::Configuration, "covfit: empty problem");
    if (covariance.rows() != k || covariance.cols() != k)
        fail(ErrorCategory::Configuration, "covfit: covariance is not K x K");
    if (fixed_mask.size() != static_cast<std::size_t>(k) || fixed_values.size() != k)
        fail(ErrorCategory::Configuration, "covfit: fixed mask/values are not length K");
    if (truth && truth->size() != k)
        fail(ErrorCategory::Configuration, "covfit: truth vector is not length K");
    if (num_training == 0)
        fail(ErrorCategory::Configuration, "covfit: no training devices");
    const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        fail(ErrorCategory::Configuration, "covfit: covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(covariance, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success ||
        eig.eigenvalues().minCoeff() < -1e-10 * std::max(covariance.trace(), 1e-300))
        fail(ErrorCategory::Configuration,
             "covfit: covariance is not positive semidefinite");
    for (Eigen::Index i = 0; i < k; ++i) {
        if (!fixed_mask[static_cast<std::size_t>(i)])
            continue;
        if (!std::isfinite(fixed_values(i)))
            fail(ErrorCategory::Configuration, "covfit: non-finite fixed value");
        if (mode == FixMode::Trend && std::abs(fixed_values(i)) != trend_magnitude)
            fail(ErrorCategory::Configuration,
                 "covfit: trend value at " + std::to_string(i) + " is not +/-" +
                     std::to_string(trend_magnitude));
    }
}

Matrix expanded_cov_residual(const Matrix &covariance, const Vector &row_means,
                             const Vector &b, std::size_t num_training) {
    if (b.size() != row_means.size() || covariance.rows() != b.size() ||
        covariance.cols() != b.size())
        fail(ErrorCategory::Configuration, "expanded_cov_residual: shape mismatch");
    const Vector d = b - row_means;
    return (d * d.transpose() - covariance) / static_cast<double>(num_training + 1);
}

namespace {

// ||d d^T - C||_F^2, summed in a fixed order.
double raw_objective(const Matrix &c, const Vector &d) {
    double s = 0.0;
    for (Eigen::Index l = 0; l < c.cols(); ++l)
        for (Eigen::Index k = 0; k < c.rows(); ++k) {
            const double r = d(k) * d(l) - c(k, l);
            s += r * r;
        }
    return s;
}

// 4 (d d^T - C) d
Vector raw_gradient(const Matrix &c, const Vector &d) {
    return 4.0 * (d.squaredNorm() * d - c * d);
}

std::vector<std::uint8_t> signs(const Vector &b) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(b.size()));
    for (Eigen::Index i = 0; i < b.size(); ++i)
        bits[static_cast<std::size_t>(i)] = b(i) > 0.0 ? 1 : 0;
    return bits;
}

int count_correct(const std::vector<std::uint8_t> &bits, const Vector &truth) {
    int n = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
        n += bits[i] == (truth(static_cast<Eigen::Index>(i)) > 0.0 ? 1 : 0);
    return n;
}

} // namespace

double objective(const Matrix &covariance, std::size_t num_training, const Vector &d) {
    const double scale = static_cast<double>(num_training + 1);
    return raw_objective(covariance, d) / (scale * scale);
}

Vector gradient(const Matrix &covariance, std::size_t num_training, const Vector &d) {
    const double scale = static_cast<double>(num_training + 1);
    return raw_gradient(covariance, d) / (scale * scale);
}

CovFitResult fit(const CovFitProblem &problem, const SolverOptions &opts) {
    problem.validate();
    const auto k = static_cast<Eigen::Index>(problem.size());
    const Matrix &c = problem.covariance;

    std::vector<Eigen::Index> free;
    Vector d = Vector::Zero(k);
    Vector baseline = problem.row_means;
    for (Eigen::Index i = 0; i < k; ++i) {
        if (problem.fixed_mask[static_cast<std::size_t>(i)]) {
            d(i) = problem.fixed_values(i) - problem.row_means(i);
            baseline(i) = problem.fixed_values(i);
        } else {
            free.push_back(i);
        }
    }
    if (free.empty())
        fail(ErrorCategory::Configuration, "covfit: no free variables to fit");
    if (opts.start_offset) {
        if (opts.start_offset->size() != k)
            fail(ErrorCategory::Configuration, "covfit: start offset is not length K");
        for (Eigen::Index i : free)
            d(i) += (*opts.start_offset)(i);
    }

    auto project = [&](const Vector &g) {
        Vector p = Vector::Zero(k);
        for (Eigen::Index i : free)
            p(i) = g(i);
        return p;
    };

    double h = raw_objective(c, d);
    if (!std::isfinite(h))
        fail(ErrorCategory::Numeric, "covfit: objective is not finite at the start");
    CovFitResult result;
    result.start_objective = objective(c, problem.num_training, d);

    // First trial step from a curvature bound of the quartic around d.
    double alpha = 1.0 / std::max(4.0 * (c.norm() + 3.0 * d.squaredNorm()),
                                  std::numeric_limits<double>::min());
    std::size_t iter = 0;
    Termination why = Termination::MaxIterations;
    while (iter < opts.max_iter) {
        const Vector g = project(raw_gradient(c, d));
        const double g2 = g.squaredNorm();
        if (std::sqrt(g2) < opts.tol_g) {
            why = Termination::Gradient;
            break;
        }
        bool accepted = false;
        Vector trial;
        double h_trial = 0.0;
        for (int halvings = 0; halvings < 80; ++halvings) {
            trial = d - alpha * g;
            h_trial = raw_objective(c, trial);
            if (!std::isfinite(h_trial))
                fail(ErrorCategory::Numeric, "covfit: objective is not finite");
            if (h_trial <= h - opts.armijo * alpha * g2) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            why = Termination::LineSearch;
            break;
        }
        ++iter;
        const double decrease = h - h_trial;
        d = std::move(trial);
        const double previous = h;
        h = h_trial;
        if (decrease <= opts.tol_f * std::max(previous, std::numeric_limits<double>::min())) {
            why = Termination::ObjectiveStall;
            break;
        }
        alpha *= 2.0;
    }

    result.b_hat = problem.row_means + d;
    for (Eigen::Index i = 0; i < k; ++i)
        if (problem.fixed_mask[static_cast<std::size_t>(i)])
            result.b_hat(i) = problem.fixed_values(i);
    result.objective = objective(c, problem.num_training, d);
    result.iterations = iter;
    result.termination = why;
    result.bits_hat = signs(result.b_hat);
    result.start_bits = signs(baseline);
    if (problem.truth)
        result.delta_correct = count_correct(result.bits_hat, *problem.truth) -
                               count_correct(result.start_bits, *problem.truth);
    return result;
}

std::vector<std::size_t> fixed_positions(std::size_t num_pairs, std::size_t count,
                                         Selection selection, std::uint64_t seed) {
    if (count > num_pairs)
        fail(ErrorCategory::Configuration,
             "cannot fix " + std::to_string(count) + " of " +
                 std::to_string(num_pairs) + " positions");
    std::vector<std::size_t> pos;
    if (selection == Selection::Even) {
        for (std::size_t t = 0; t < count; ++t)
            pos.push_back(t * num_pairs / count);
        return pos;
    }
    pos.resize(num_pairs);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(count)};
    std::mt19937_64 rng(seq);
    std::shuffle(pos.begin(), pos.end(), rng);
    pos.resize(count);
    std::sort(pos.begin(), pos.end());
    return pos;
}

std::vector<std::size_t> choose_devices(std::size_t num_devices, std::size_t count,
                                        std::uint64_t seed) {
    if (count > num_devices)
        fail(ErrorCategory::Configuration, "cannot choose " + std::to_string(count) +
                                               " of " + std::to_string(num_devices) +
                                               " devices");
    std::vector<std::size_t> all(num_devices);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      0x64657673u};
    std::mt19937_64 rng(seq);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(count);
    std::sort(all.begin(), all.end());
    return all;
}

std::vector<AttackCell> evaluate_attack(const DiffMatrix &diff, std::size_t device,
                                        const AttackOptions &opts) {
    const auto devices = static_cast<std::size_t>(diff.cols());
    if (devices < 3)
        fail(ErrorCategory::Configuration, "attack needs at least 3 devices");
    if (device >= devices)
        fail(ErrorCategory::Configuration,
             "target device " + std::to_string(device) + " out of range");
    const Eigen::Index k = diff.rows();

    Matrix training(k, static_cast<Eigen::Index>(devices - 1));
    for (std::size_t j = 0, t = 0; j < devices; ++j)
        if (j != device)
            training.col(static_cast<Eigen::Index>(t++)) =
                diff.values.col(static_cast<Eigen::Index>(j));
    const Vector truth = diff.values.col(static_cast<Eigen::Index>(device));
    const Vector mu = correlation::row_means(training);
    const Matrix cov = correlation::covariance_matrix(training);

    std::vector<AttackCell> cells(opts.fixed_counts.size());
    parallel_for(cells.size(), opts.threads, [&](std::size_t n) {
        AttackCell &cell = cells[n];
        cell.device = device;
        cell.mode = opts.mode;
        cell.fixed_count = opts.fixed_counts[n];
        try {
            CovFitProblem p;
            p.covariance = cov;
            p.row_means = mu;
            p.num_training = devices - 1;
            p.mode = opts.mode;
            p.trend_magnitude = opts.trend_magnitude;
            p.truth = truth;
            p.fixed_mask.assign(static_cast<std::size_t>(k), false);
            p.fixed_values = Vector::Zero(k);
            const auto seed = opts.seed ^ (static_cast<std::uint64_t>(device) << 32);
            for (std::size_t i : fixed_positions(static_cast<std::size_t>(k),
                                                 cell.fixed_count, opts.selection, seed)) {
                const auto e = static_cast<Eigen::Index>(i);
                p.fixed_mask[i] = true;
                p.fixed_values(e) =
                    opts.mode == FixMode::Exact
                        ? truth(e)
                        : (truth(e) > 0.0 ? opts.trend_magnitude : -opts.trend_magnitude);
            }
            if (cell.fixed_count == static_cast<std::size_t>(k)) {
                // Everything is pinned: the estimate is the pinned vector.
                p.validate();
                cell.objective = objective(cov, p.num_training, p.fixed_values - mu);
                cell.delta_correct = 0;
                cell.iterations = 0;
                cell.ok = true;
                return;
            }
            const CovFitResult r = fit(p, opts.solver);
            cell.delta_correct = *r.delta_correct;
            cell.objective = r.objective;
            cell.iterations = r.iterations;
            cell.ok = true;
        } catch (const Error &e) {
            cell.ok = false;
            cell.error = std::string(category_name(e.category())) + ": " + e.what();
        }
    });
    return cells;
}

std::vector<EnvelopePoint> envelope(const std::vector<AttackCell> &cells) {
    std::map<std::pair<int, std::size_t>, EnvelopePoint> points;
    for (const auto &c : cells) {
        if (!c.ok)
            continue;
        auto key = std::make_pair(static_cast<int>(c.mode), c.fixed_count);
        auto [it, inserted] = points.try_emplace(key);
        EnvelopePoint &p = it->second;
        if (inserted) {
            p.mode = c.mode;
            p.fixed_count = c.fixed_count;
            p.min = p.max = c.delta_correct;
        }
        p.min = std::min(p.min, c.delta_correct);
        p.max = std::max(p.max, c.delta_correct);
        p.mean_abs += std::abs(c.delta_correct);
        ++p.cells;
    }
    std::vector<EnvelopePoint> out;
    for (auto &[key, p] : points) {
        p.mean_abs /= static_cast<double>(p.cells);
        out.push_back(p);
    }
    return out;
}

} // namespace pufstat::covfit
