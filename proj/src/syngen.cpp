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

#include "pufstat/syngen.hpp"

#include "pufstat/io.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace pufstat::syngen {

namespace {

constexpr std::uint32_t kDeviceStream = 0x64657673;  // "devs"
constexpr std::uint32_t kSerialStream = 0x73657269;  // "seri"
constexpr long long kFirstSerial = 100000;
constexpr double kSerialJitter = 1000.0;

std::mt19937_64 make_engine(std::uint64_t seed, std::initializer_list<std::uint32_t> tail) {
    std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed),
                                     static_cast<std::uint32_t>(seed >> 32)};
    words.insert(words.end(), tail.begin(), tail.end());
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

} // namespace

void SynthConfig::validate() const {
    if (devices == 0 || ros == 0 || samples == 0)
        fail(ErrorCategory::Configuration, "synth: counts must be positive");
    if (geometry.size() != ros)
        fail(ErrorCategory::Configuration,
             "synth: geometry " + geometry.describe() + " does not hold " +
                 std::to_string(ros) + " ROs");
    for (double s : {device_sigma, gradient_x_sigma, gradient_y_sigma, local_sigma,
                     meas_sigma})
        if (!(s >= 0.0) || !std::isfinite(s))
            fail(ErrorCategory::Configuration, "synth: spreads must be finite and >= 0");
    if (!(base_freq > 0.0) || !std::isfinite(base_freq))
        fail(ErrorCategory::Configuration, "synth: base frequency must be positive");
    if (ro_mean_offsets && ro_mean_offsets->size() != ros)
        fail(ErrorCategory::Configuration, "synth: RO offsets must have one entry per RO");
}

SynthConfig preset(std::string_view name, std::uint64_t seed) {
    SynthConfig c;
    c.seed = seed;
    if (name == "null") {
        c.device_sigma = 2.0;
        c.local_sigma = 0.7;
        c.meas_sigma = 0.05;
    } else if (name == "reference") {
        c.device_sigma = 5.0;
        c.gradient_x_sigma = 0.02;
        c.gradient_y_sigma = 0.08;
        c.local_sigma = 0.5;
        c.meas_sigma = 0.05;
        std::vector<double> offsets(c.ros);
        for (std::size_t i = 0; i < c.ros; ++i) {
            // Mean shape repeating with every chip column, plus a slow drift.
            const double within = centered_y(c.geometry, i) / 8.0;
            const double across = centered_x(c.geometry, i) / 16.0;
            offsets[i] = 0.6 * within + 0.8 * across +
                         0.3 * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 7.0);
        }
        c.ro_mean_offsets = std::move(offsets);
    } else if (name == "ygrad") {
        c.device_sigma = 5.0;
        c.gradient_y_sigma = 0.2;
    } else {
        fail(ErrorCategory::Configuration,
             "unknown synth preset '" + std::string(name) + "' (null, reference, ygrad)");
    }
    return c;
}

double centered_x(const ChipGeometry &g, std::size_t ro) {
    return static_cast<double>(g.x(ro)) - (static_cast<double>(g.cols) - 1.0) / 2.0;
}

double centered_y(const ChipGeometry &g, std::size_t ro) {
    return static_cast<double>(g.y(ro)) - (static_cast<double>(g.rows) - 1.0) / 2.0;
}

SynthDataset generate(const SynthConfig &config) {
    config.validate();
    const std::size_t J = config.devices, I = config.ros, T = config.samples;
    GroundTruth truth;
    truth.device_offsets.resize(J);
    truth.gradient_x.resize(J);
    truth.gradient_y.resize(J);
    truth.local = Matrix(static_cast<Eigen::Index>(I), static_cast<Eigen::Index>(J));
    truth.noiseless = truth.local;
    truth.ro_mean_offsets = config.ro_mean_offsets.value_or(std::vector<double>(I, 0.0));

    std::vector<double> values(J * I * T);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t j = 0; j < J; ++j) {
        auto rng = make_engine(config.seed, {static_cast<std::uint32_t>(j), kDeviceStream});
        normal.reset();
        truth.device_offsets[j] = config.device_sigma * normal(rng);
        truth.gradient_x[j] = config.gradient_x_sigma * normal(rng);
        truth.gradient_y[j] = config.gradient_y_sigma * normal(rng);
        for (std::size_t i = 0; i < I; ++i) {
            const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
            truth.local(ii, jj) = config.local_sigma * normal(rng);
            truth.noiseless(ii, jj) =
                config.base_freq + truth.device_offsets[j] +
                truth.gradient_x[j] * centered_x(config.geometry, i) +
                truth.gradient_y[j] * centered_y(config.geometry, i) +
                truth.local(ii, jj) + truth.ro_mean_offsets[i];
        }
        for (std::size_t i = 0; i < I; ++i) {
            const double f = truth.noiseless(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(j));
            for (std::size_t t = 0; t < T; ++t)
                values[(j * I + i) * T + t] = f + config.meas_sigma * normal(rng);
        }
    }

    DeviceMeta meta;
    meta.serials.resize(J);
    auto serial_rng = make_engine(config.seed, {kSerialStream});
    std::exponential_distribution<double> jitter(1.0 / kSerialJitter);
    long long serial = kFirstSerial;
    for (std::size_t j = 0; j < J; ++j) {
        meta.serials[j] = serial;
        serial += 1 + static_cast<long long>(std::floor(jitter(serial_rng)));
    }

    Provenance prov{"synthetic", "memory", 0, 0, 0};
    return {ReadingsTensor(J, I, T, std::move(values), std::move(prov)), std::move(meta),
            std::move(truth)};
}

void write_dataset(const std::filesystem::path &dir, const SynthDataset &data,
                   const SynthConfig &config) {
    write_device_files(dir / "dataset", data.readings);
    std::ostringstream meta;
    write_meta_csv(meta, data.meta);
    atomic_write(dir / "meta.csv", meta.str());

    using nlohmann::json;
    json truth;
    truth["units"] = "MHz";
    truth["config"] = {
        {"devices", config.devices},
        {"ros", config.ros},
        {"samples", config.samples},
        {"geometry", config.geometry.describe()},
        {"base_freq", config.base_freq},
        {"device_sigma", config.device_sigma},
        {"gradient_x_sigma", config.gradient_x_sigma},
        {"gradient_y_sigma", config.gradient_y_sigma},
        {"local_sigma", config.local_sigma},
        {"meas_sigma", config.meas_sigma},
        {"seed", config.seed},
    };
    truth["device_offsets"] = data.truth.device_offsets;
    truth["gradient_x"] = data.truth.gradient_x;
    truth["gradient_y"] = data.truth.gradient_y;
    truth["ro_mean_offsets"] = data.truth.ro_mean_offsets;
    json local = json::array();
    for (Eigen::Index j = 0; j < data.truth.local.cols(); ++j) {
        std::vector<double> col(data.truth.local.col(j).data(),
                                data.truth.local.col(j).data() + data.truth.local.rows());
        local.push_back(std::move(col));
    }
    truth["local_by_device"] = std::move(local);
    atomic_write(dir / "truth.json", truth.dump(1) + "\n");
}

} // namespace pufstat::syngen
