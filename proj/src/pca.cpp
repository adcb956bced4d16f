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

#include "pufstat/pca.hpp"

#include "pufstat/correlation.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace pufstat::pca {

namespace {

void check_pc(const PCAResult &result, std::size_t pc) {
    if (pc < 1 || pc > result.components())
        fail(ErrorCategory::Configuration,
             "principal component " + std::to_string(pc) + " out of range 1.." +
                 std::to_string(result.components()));
}

FreqMatrix unstandardize(const Matrix &y, const ScaledData &scaled) {
    FreqMatrix f{Matrix(y.cols(), y.rows())};
    for (Eigen::Index j = 0; j < y.rows(); ++j)
        for (Eigen::Index i = 0; i < y.cols(); ++i)
            f.values(i, j) = y(j, i) * scaled.col_stds(i) + scaled.col_means(i);
    return f;
}

} // namespace

ScaledData standardize(const FreqMatrix &freq) {
    const Eigen::Index ros = freq.rows();
    const Eigen::Index devices = freq.cols();
    if (devices < 2)
        fail(ErrorCategory::Configuration, "standardize: need at least two devices");
    ScaledData s{Matrix(devices, ros), Vector(ros), Vector(ros)};
    std::string degenerate;
    for (Eigen::Index i = 0; i < ros; ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < devices; ++j)
            sum += freq(i, j);
        const double mean = sum / static_cast<double>(devices);
        double ss = 0.0;
        for (Eigen::Index j = 0; j < devices; ++j)
            ss += (freq(i, j) - mean) * (freq(i, j) - mean);
        const double sd = std::sqrt(ss / static_cast<double>(devices - 1));
        const bool constant = freq.values.row(i).maxCoeff() == freq.values.row(i).minCoeff();
        if (constant || !(sd > 0.0)) {
            degenerate += (degenerate.empty() ? "" : ", ") + std::to_string(i);
            continue;
        }
        s.col_means(i) = mean;
        s.col_stds(i) = sd;
        for (Eigen::Index j = 0; j < devices; ++j)
            s.y(j, i) = (freq(i, j) - mean) / sd;
    }
    if (!degenerate.empty())
        fail(ErrorCategory::Degenerate,
             "zero variance across devices for RO(s) " + degenerate);
    return s;
}

PCAResult pca(const ScaledData &scaled, const ChipGeometry &geometry) {
    const Matrix &y = scaled.y;
    if (!y.allFinite())
        fail(ErrorCategory::Numeric, "pca: scaled data contains non-finite values");
    Eigen::BDCSVD<Matrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        fail(ErrorCategory::Numeric, "pca: SVD did not converge");

    PCAResult r;
    r.geometry = geometry;
    r.singular_values = svd.singularValues();
    r.loadings = svd.matrixV();
    r.left = svd.matrixU();
    for (Eigen::Index c = 0; c < r.loadings.cols(); ++c) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < r.loadings.rows(); ++i)
            if (std::abs(r.loadings(i, c)) > best) {
                best = std::abs(r.loadings(i, c));
                arg = i;
            }
        if (r.loadings(arg, c) < 0.0) {
            r.loadings.col(c) *= -1.0;
            r.left.col(c) *= -1.0;
        }
    }
    r.scores = r.left * r.singular_values.asDiagonal();
    const double total = r.singular_values.squaredNorm();
    if (!(total > 0.0))
        fail(ErrorCategory::Degenerate, "pca: data has no variance");
    r.variance_fractions = r.singular_values.array().square() / total;
    return r;
}

Matrix loading_map(const PCAResult &result, std::size_t pc, const ChipGeometry &geometry) {
    check_pc(result, pc);
    if (geometry.size() != static_cast<std::size_t>(result.loadings.rows()))
        fail(ErrorCategory::Configuration,
             "geometry " + geometry.describe() + " holds " +
                 std::to_string(geometry.size()) + " ROs, loadings have " +
                 std::to_string(result.loadings.rows()));
    Matrix grid(static_cast<Eigen::Index>(geometry.rows),
                static_cast<Eigen::Index>(geometry.cols));
    const auto c = static_cast<Eigen::Index>(pc - 1);
    for (std::size_t i = 0; i < geometry.size(); ++i)
        grid(static_cast<Eigen::Index>(geometry.y(i)), static_cast<Eigen::Index>(geometry.x(i))) =
            result.loadings(static_cast<Eigen::Index>(i), c);
    return grid;
}

TruncatedBits truncated_bits(const PCAResult &result, const ScaledData &scaled,
                             std::size_t r) {
    const BitMatrix truth = response_bits(pair_differences(unstandardize(scaled.y, scaled)));
    return truncated_bits(result, scaled, r, truth);
}

TruncatedBits truncated_bits(const PCAResult &result, const ScaledData &scaled,
                             std::size_t r, const BitMatrix &truth) {
    if (r < 1 || r > result.components())
        fail(ErrorCategory::Configuration,
             "truncation rank " + std::to_string(r) + " out of range 1.." +
                 std::to_string(result.components()));
    const auto n = static_cast<Eigen::Index>(r);
    const Matrix approx =
        result.scores.leftCols(n) * result.loadings.leftCols(n).transpose();
    TruncatedBits out;
    out.bits = response_bits(pair_differences(unstandardize(approx, scaled)));
    if (truth.rows() != out.bits.rows() || truth.cols() != out.bits.cols())
        fail(ErrorCategory::Structural, "truncated_bits: reference bits have the wrong shape");
    std::size_t agree = 0;
    for (Eigen::Index j = 0; j < truth.cols(); ++j)
        for (Eigen::Index k = 0; k < truth.rows(); ++k)
            agree += out.bits(k, j) == truth(k, j);
    out.agreement = static_cast<double>(agree) / static_cast<double>(truth.values.size());
    return out;
}

double pc_key_correlation(const PCAResult &result, const BitMatrix &bits, std::size_t pc) {
    check_pc(result, pc);
    if (bits.cols() != result.scores.rows())
        fail(ErrorCategory::Structural, "pc_key_correlation: device counts differ");
    std::vector<double> ones(static_cast<std::size_t>(bits.cols()));
    std::vector<double> score(ones.size());
    for (Eigen::Index j = 0; j < bits.cols(); ++j) {
        double n = 0.0;
        for (Eigen::Index k = 0; k < bits.rows(); ++k)
            n += bits(k, j);
        ones[static_cast<std::size_t>(j)] = n;
        score[static_cast<std::size_t>(j)] = result.scores(j, static_cast<Eigen::Index>(pc - 1));
    }
    return correlation::pearson(ones, score);
}

Histogram score_histogram(const PCAResult &result, std::size_t pc, std::size_t bins) {
    check_pc(result, pc);
    if (bins == 0)
        fail(ErrorCategory::Configuration, "histogram needs at least one bin");
    const auto col = result.scores.col(static_cast<Eigen::Index>(pc - 1));
    Histogram h;
    h.low = col.minCoeff();
    const double high = col.maxCoeff();
    h.width = high > h.low ? (high - h.low) / static_cast<double>(bins) : 1.0;
    h.counts.assign(bins, 0);
    for (Eigen::Index j = 0; j < col.size(); ++j) {
        auto b = static_cast<std::size_t>((col(j) - h.low) / h.width);
        ++h.counts[std::min(b, bins - 1)];
    }
    return h;
}

} // namespace pufstat::pca
