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

#include "pufstat/error.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pufstat {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BitArray = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// A matrix whose role (F, D, B or R) is part of its type.
template <class Tag, class Scalar = double> struct TaggedMatrix {
    using Storage = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Storage values;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
    Scalar operator()(Eigen::Index r, Eigen::Index c) const { return values(r, c); }

    friend bool operator==(const TaggedMatrix &a, const TaggedMatrix &b) {
        return a.values.rows() == b.values.rows() &&
               a.values.cols() == b.values.cols() && a.values == b.values;
    }
};

struct FreqTag;
struct DevTag;
struct DiffTag;
struct BitTag;

/// Mean RO frequencies in MHz, I rows (ROs) by J columns (devices).
using FreqMatrix = TaggedMatrix<FreqTag>;
/// Frequency deviation from the device mean in MHz, I x J.
using DevMatrix = TaggedMatrix<DevTag>;
/// Adjacent pair differences F[2k+1] - F[2k] in MHz, K x J with K = I/2.
using DiffMatrix = TaggedMatrix<DiffTag>;
/// Response bits, 1 iff the pair difference is strictly positive. K x J.
using BitMatrix = TaggedMatrix<BitTag, std::uint8_t>;

struct Provenance {
    std::string source;
    std::string layout;
    std::size_t num_devices = 0;
    std::size_t num_ros = 0;
    std::size_t num_samples = 0;
};

/// Raw readings indexed [device][ro][sample], in MHz.
class ReadingsTensor {
public:
    ReadingsTensor() = default;
    /// `values` is laid out device-major, then RO, then sample.
    /// Throws Structural on size mismatch and Validation on non-finite or
    /// non-positive values.
    ReadingsTensor(std::size_t devices, std::size_t ros, std::size_t samples,
                   std::vector<double> values, Provenance provenance = {});

    std::size_t num_devices() const { return devices_; }
    std::size_t num_ros() const { return ros_; }
    std::size_t num_samples() const { return samples_; }

    double at(std::size_t device, std::size_t ro, std::size_t sample) const {
        return values_[(device * ros_ + ro) * samples_ + sample];
    }
    std::span<const double> samples(std::size_t device, std::size_t ro) const {
        return {values_.data() + (device * ros_ + ro) * samples_, samples_};
    }
    const std::vector<double> &raw() const { return values_; }
    const Provenance &provenance() const { return provenance_; }

    friend bool operator==(const ReadingsTensor &a, const ReadingsTensor &b) {
        return a.devices_ == b.devices_ && a.ros_ == b.ros_ &&
               a.samples_ == b.samples_ && a.values_ == b.values_;
    }

private:
    std::size_t devices_ = 0;
    std::size_t ros_ = 0;
    std::size_t samples_ = 0;
    std::vector<double> values_;
    Provenance provenance_;
};

/// Serial numbers aligned with device columns. May repeat, need not be sorted.
struct DeviceMeta {
    std::vector<long long> serials;
};

/// How a dataset is stored on disk.
///
/// Descriptor syntax: `dir[:key=value,...]` or `csv`. Keys for `dir` are
/// `rows=ro|sample`, `delim=ws|comma|tab|semicolon` and `ext=<suffix>`.
/// The default `dir` means one whitespace separated `.txt` file per device
/// with one RO per row and one sample per column. Device files are ordered
/// by natural (digit-aware) sort of their file names.
struct Layout {
    enum class Kind { PerDeviceFiles, ConsolidatedCsv };
    enum class Orientation { RowsAreRos, RowsAreSamples };

    Kind kind = Kind::PerDeviceFiles;
    Orientation orientation = Orientation::RowsAreRos;
    char delimiter = '\0'; ///< '\0' means any run of whitespace
    std::string extension = ".txt";

    static Layout parse(std::string_view descriptor);
    std::string describe() const;
};

ReadingsTensor load_readings(const std::filesystem::path &path,
                             const Layout &layout);

/// Reads a `device,serial` CSV. Every device index in [0, num_devices) must
/// appear exactly once.
DeviceMeta load_meta(const std::filesystem::path &path, std::size_t num_devices);

struct PufMatrices {
    FreqMatrix freq;
    DevMatrix dev;
    DiffMatrix diff;
    BitMatrix bits;
};

/// Averages the samples (sequential summation in sample order) and derives
/// D, B and R. Throws Configuration if the RO count is odd.
PufMatrices build_matrices(const ReadingsTensor &readings);

/// Derives D, B and R from an existing frequency matrix.
PufMatrices derive_matrices(FreqMatrix freq);

DiffMatrix pair_differences(const FreqMatrix &freq);
BitMatrix response_bits(const DiffMatrix &diff);

/// Serializes R column by column, 8 bits per byte, first bit in the MSB.
/// K must be a multiple of 8.
std::vector<std::uint8_t> pack_bits(const BitMatrix &bits);
BitMatrix unpack_bits(std::span<const std::uint8_t> bytes, std::size_t num_pairs,
                      std::size_t num_devices);

/// Natural ordering of file names: runs of digits compare numerically.
bool natural_less(std::string_view a, std::string_view b);

void write_device_files(const std::filesystem::path &dir,
                        const ReadingsTensor &readings);
void write_readings_csv(std::ostream &os, const ReadingsTensor &readings);
void write_meta_csv(std::ostream &os, const DeviceMeta &meta);

template <class Tag, class Scalar>
void write_matrix_csv(std::ostream &os, const TaggedMatrix<Tag, Scalar> &m);

} // namespace pufstat
