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
#include "pufstat/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace pufstat::syngen {

/// Parameters of the synthetic RO-PUF model. Frequencies are in MHz.
///
/// For device j and RO i at chip position (x, y), centered on the chip:
///
///     f = base + offset_j + gx_j * x + gy_j * y + local_ij + ro_offset_i
///
/// with offset, gx, gy and local drawn as zero-mean Gaussians of the
/// configured spreads. Every sample adds Gaussian measurement noise.
struct SynthConfig {
    std::size_t devices = 193;
    std::size_t ros = 512;
    std::size_t samples = 100;
    ChipGeometry geometry;
    double base_freq = 200.0;
    double device_sigma = 0.0;
    double gradient_x_sigma = 0.0;
    double gradient_y_sigma = 0.0;
    double local_sigma = 0.0;
    double meas_sigma = 0.0;
    std::optional<std::vector<double>> ro_mean_offsets;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Named configurations: `null` (no spatial structure, unbiased pairs),
/// `reference` (reference-sized with gradients and a periodic RO pattern)
/// and `ygrad` (device offset plus a pure y gradient).
SynthConfig preset(std::string_view name, std::uint64_t seed);

struct GroundTruth {
    std::vector<double> device_offsets;
    std::vector<double> gradient_x;
    std::vector<double> gradient_y;
    Matrix local;                     ///< ROs x devices
    std::vector<double> ro_mean_offsets;
    Matrix noiseless;                 ///< ROs x devices, f without sample noise
};

struct SynthDataset {
    ReadingsTensor readings;
    DeviceMeta meta;
    GroundTruth truth;
};

/// Centered chip coordinates used by the generator.
double centered_x(const ChipGeometry &g, std::size_t ro);
double centered_y(const ChipGeometry &g, std::size_t ro);

/// Deterministic given config.seed. Device j draws from its own engine,
/// seeded with seed_seq{seed_lo, seed_hi, j, 'devs'}, so devices can be
/// generated in any order. Serial numbers use seed_seq{seed_lo, seed_hi,
/// 'seri'} and increase by 1 plus an exponential jitter.
SynthDataset generate(const SynthConfig &config);

/// Writes `<dir>/dataset/dev*.txt`, `<dir>/meta.csv` and `<dir>/truth.json`.
void write_dataset(const std::filesystem::path &dir, const SynthDataset &data,
                   const SynthConfig &config);

} // namespace pufstat::syngen
