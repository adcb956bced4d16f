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

#include "pufstat/core_data.hpp"

#include "pufstat/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace pufstat {

ReadingsTensor::ReadingsTensor(std::size_t devices, std::size_t ros,
                               std::size_t samples, std::vector<double> values,
                               Provenance provenance)
    : devices_(devices), ros_(ros), samples_(samples), values_(std::move(values)),
      provenance_(std::move(provenance)) {
    if (devices_ == 0 || ros_ == 0 || samples_ == 0)
        fail(ErrorCategory::Structural, "readings tensor has an empty dimension");
    if (values_.size() != devices_ * ros_ * samples_)
        fail(ErrorCategory::Structural,
             "readings tensor holds " + std::to_string(values_.size()) +
                 " values, expected " +
                 std::to_string(devices_ * ros_ * samples_));
    for (std::size_t n = 0; n < values_.size(); ++n) {
        const double v = values_[n];
        if (!std::isfinite(v) || v <= 0.0) {
            const std::size_t t = n % samples_;
            const std::size_t i = (n / samples_) % ros_;
            const std::size_t j = n / (samples_ * ros_);
            fail(ErrorCategory::Validation,
                 "frequency at device " + std::to_string(j) + ", ro " +
                     std::to_string(i) + ", sample " + std::to_string(t) +
                     " is not a positive finite number (" + format_double(v) +
                     ")");
        }
    }
    provenance_.num_devices = devices_;
    provenance_.num_ros = ros_;
    provenance_.num_samples = samples_;
}

// ---------------------------------------------------------------------------
// Layout descriptors

Layout Layout::parse(std::string_view descriptor) {
    Layout layout;
    const auto colon = descriptor.find(':');
    const std::string_view kind = descriptor.substr(0, colon);
    if (kind == "csv") {
        layout.kind = Kind::ConsolidatedCsv;
        layout.delimiter = ',';
        layout.extension.clear();
        if (colon != std::string_view::npos)
            fail(ErrorCategory::Configuration,
                 "layout 'csv' takes no options: " + std::string(descriptor));
        return layout;
    }
    if (kind != "dir")
        fail(ErrorCategory::Configuration,
             "unknown layout kind '" + std::string(kind) + "' (expected dir or csv)");
    if (colon == std::string_view::npos)
        return layout;

    std::string_view rest = descriptor.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view option = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{}
                                               : rest.substr(comma + 1);
        const auto eq = option.find('=');
        if (eq == std::string_view::npos)
            fail(ErrorCategory::Configuration,
                 "layout option without value: " + std::string(option));
        const std::string_view key = option.substr(0, eq);
        const std::string_view value = option.substr(eq + 1);
        if (key == "rows") {
            if (value == "ro")
                layout.orientation = Orientation::RowsAreRos;
            else if (value == "sample")
                layout.orientation = Orientation::RowsAreSamples;
            else
                fail(ErrorCategory::Configuration,
                     "layout rows must be 'ro' or 'sample', got " + std::string(value));
        } else if (key == "delim") {
            if (value == "ws")
                layout.delimiter = '\0';
            else if (value == "comma")
                layout.delimiter = ',';
            else if (value == "tab")
                layout.delimiter = '\t';
            else if (value == "semicolon")
                layout.delimiter = ';';
            else
                fail(ErrorCategory::Configuration,
                     "unknown layout delimiter " + std::string(value));
        } else if (key == "ext") {
            layout.extension = std::string(value);
        } else {
            fail(ErrorCategory::Configuration,
                 "unknown layout option " + std::string(key));
        }
    }
    return layout;
}

std::string Layout::describe() const {
    if (kind == Kind::ConsolidatedCsv)
        return "csv";
    std::string d = "dir:rows=";
    d += orientation == Orientation::RowsAreRos ? "ro" : "sample";
    d += ",delim=";
    switch (delimiter) {
    case '\0':
        d += "ws";
        break;
    case ',':
        d += "comma";
        break;
    case '\t':
        d += "tab";
        break;
    default:
        d += "semicolon";
        break;
    }
    d += ",ext=" + extension;
    return d;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> tokens;
    if (delimiter == '\0') {
        std::size_t pos = 0;
        while (pos < line.size()) {
            pos = line.find_first_not_of(" \t\r", pos);
            if (pos == std::string_view::npos)
                break;
            auto end = line.find_first_of(" \t\r", pos);
            if (end == std::string_view::npos)
                end = line.size();
            tokens.push_back(line.substr(pos, end - pos));
            pos = end;
        }
        return tokens;
    }
    std::size_t pos = 0;
    while (true) {
        const auto end = line.find(delimiter, pos);
        tokens.push_back(trim(line.substr(pos, end - pos)));
        if (end == std::string_view::npos)
            break;
        pos = end + 1;
    }
    return tokens;
}

bool parse_number(std::string_view token, double &out) {
    if (!token.empty() && token.front() == '+')
        token.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc() && ptr == token.data() + token.size();
}

bool parse_integer(std::string_view token, long long &out) {
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc() && ptr == token.data() + token.size();
}

bool skip_line(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

std::string location(const std::filesystem::path &file, std::size_t line,
                     std::size_t column) {
    return file.string() + ":" + std::to_string(line) + ":" + std::to_string(column);
}

using Table = std::vector<std::vector<double>>;

Table read_table(const std::filesystem::path &file, char delimiter) {
    std::ifstream is(file);
    if (!is)
        fail(ErrorCategory::Io, "cannot open " + file.string());
    Table table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (skip_line(line))
            continue;
        const auto tokens = split(line, delimiter);
        std::vector<double> row;
        row.reserve(tokens.size());
        for (std::size_t c = 0; c < tokens.size(); ++c) {
            double v = 0.0;
            if (!parse_number(tokens[c], v))
                fail(ErrorCategory::Parse, "non-numeric token '" +
                                               std::string(tokens[c]) + "' at " +
                                               location(file, line_no, c + 1));
            if (!std::isfinite(v) || v <= 0.0)
                fail(ErrorCategory::Validation,
                     "non-positive frequency " + std::string(tokens[c]) + " at " +
                         location(file, line_no, c + 1));
            row.push_back(v);
        }
        table.push_back(std::move(row));
    }
    return table;
}

ReadingsTensor load_device_files(const std::filesystem::path &dir,
                                 const Layout &layout) {
    if (!std::filesystem::is_directory(dir))
        fail(ErrorCategory::Io, dir.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto &entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file())
            continue;
        const auto name = entry.path().filename().string();
        if (name.size() >= layout.extension.size() &&
            name.compare(name.size() - layout.extension.size(),
                         layout.extension.size(), layout.extension) == 0)
            files.push_back(entry.path());
    }
    if (files.empty())
        fail(ErrorCategory::Structural,
             "no '*" + layout.extension + "' device files in " + dir.string());
    std::sort(files.begin(), files.end(), [](const auto &a, const auto &b) {
        return natural_less(a.filename().string(), b.filename().string());
    });

    const bool rows_are_ros = layout.orientation == Layout::Orientation::RowsAreRos;
    std::size_t ros = 0;
    std::size_t samples = 0;
    std::vector<double> values;
    for (std::size_t j = 0; j < files.size(); ++j) {
        const Table table = read_table(files[j], layout.delimiter);
        const std::string device =
            "device " + std::to_string(j) + " (" + files[j].filename().string() + ")";
        if (table.empty())
            fail(ErrorCategory::Structural, device + " contains no readings");
        const std::size_t width = table.front().size();
        for (std::size_t r = 0; r < table.size(); ++r)
            if (table[r].size() != width)
                fail(ErrorCategory::Structural,
                     device + ": row " + std::to_string(r) + " has " +
                         std::to_string(table[r].size()) + " values, expected " +
                         std::to_string(width));
        const std::size_t file_ros = rows_are_ros ? table.size() : width;
        const std::size_t file_samples = rows_are_ros ? width : table.size();
        if (j == 0) {
            ros = file_ros;
            samples = file_samples;
            values.reserve(files.size() * ros * samples);
        } else if (file_ros != ros || file_samples != samples) {
            fail(ErrorCategory::Structural,
                 device + " has " + std::to_string(file_ros) + " ROs x " +
                     std::to_string(file_samples) + " samples, expected " +
                     std::to_string(ros) + " x " + std::to_string(samples));
        }
        for (std::size_t i = 0; i < ros; ++i)
            for (std::size_t t = 0; t < samples; ++t)
                values.push_back(rows_are_ros ? table[i][t] : table[t][i]);
    }
    Provenance prov{dir.string(), layout.describe(), 0, 0, 0};
    return ReadingsTensor(files.size(), ros, samples, std::move(values),
                          std::move(prov));
}

ReadingsTensor load_consolidated_csv(const std::filesystem::path &file,
                                     const Layout &layout) {
    std::ifstream is(file);
    if (!is)
        fail(ErrorCategory::Io, "cannot open " + file.string());
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    struct Entry {
        std::size_t device, ro, sample;
        double value;
    };
    std::vector<Entry> entries;
    std::size_t devices = 0, ros = 0, samples = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (skip_line(line))
            continue;
        const auto tokens = split(line, ',');
        if (!header_seen) {
            if (tokens.size() != 4 || tokens[0] != "device" || tokens[1] != "ro" ||
                tokens[2] != "sample" || tokens[3] != "freq_mhz")
                fail(ErrorCategory::Structural,
                     file.string() + ": expected header 'device,ro,sample,freq_mhz'");
            header_seen = true;
            continue;
        }
        if (tokens.size() != 4)
            fail(ErrorCategory::Structural, "expected 4 fields at " +
                                                location(file, line_no, 1));
        long long idx[3];
        for (int c = 0; c < 3; ++c)
            if (!parse_integer(tokens[c], idx[c]) || idx[c] < 0)
                fail(ErrorCategory::Parse, "invalid index '" + std::string(tokens[c]) +
                                               "' at " + location(file, line_no, c + 1));
        double v = 0.0;
        if (!parse_number(tokens[3], v))
            fail(ErrorCategory::Parse, "non-numeric token '" + std::string(tokens[3]) +
                                           "' at " + location(file, line_no, 4));
        if (!std::isfinite(v) || v <= 0.0)
            fail(ErrorCategory::Validation, "non-positive frequency " +
                                                std::string(tokens[3]) + " at " +
                                                location(file, line_no, 4));
        Entry e{static_cast<std::size_t>(idx[0]), static_cast<std::size_t>(idx[1]),
                static_cast<std::size_t>(idx[2]), v};
        devices = std::max(devices, e.device + 1);
        ros = std::max(ros, e.ro + 1);
        samples = std::max(samples, e.sample + 1);
        entries.push_back(e);
    }
    if (!header_seen || entries.empty())
        fail(ErrorCategory::Structural, file.string() + " contains no readings");

    std::vector<double> values(devices * ros * samples,
                               std::numeric_limits<double>::quiet_NaN());
    for (const auto &e : entries) {
        double &slot = values[(e.device * ros + e.ro) * samples + e.sample];
        if (!std::isnan(slot))
            fail(ErrorCategory::Structural,
                 "duplicate reading for device " + std::to_string(e.device) +
                     ", ro " + std::to_string(e.ro) + ", sample " +
                     std::to_string(e.sample));
        slot = e.value;
    }
    for (std::size_t n = 0; n < values.size(); ++n)
        if (std::isnan(values[n])) {
            const std::size_t j = n / (ros * samples);
            const std::size_t i = (n / samples) % ros;
            fail(ErrorCategory::Structural,
                 "ragged data: device " + std::to_string(j) + " lacks readings for ro " +
                     std::to_string(i) + " (expected " + std::to_string(ros) +
                     " ROs x " + std::to_string(samples) + " samples)");
        }
    Provenance prov{file.string(), layout.describe(), 0, 0, 0};
    return ReadingsTensor(devices, ros, samples, std::move(values), std::move(prov));
}

} // namespace

bool natural_less(std::string_view a, std::string_view b) {
    std::size_t i = 0, j = 0;
    auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
    while (i < a.size() && j < b.size()) {
        if (is_digit(a[i]) && is_digit(b[j])) {
            std::size_t ie = i, je = j;
            while (ie < a.size() && is_digit(a[ie]))
                ++ie;
            while (je < b.size() && is_digit(b[je]))
                ++je;
            std::string_view da = a.substr(i, ie - i), db = b.substr(j, je - j);
            while (da.size() > 1 && da.front() == '0')
                da.remove_prefix(1);
            while (db.size() > 1 && db.front() == '0')
                db.remove_prefix(1);
            if (da.size() != db.size())
                return da.size() < db.size();
            if (da != db)
                return da < db;
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j])
                return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    if ((a.size() - i) != (b.size() - j))
        return (a.size() - i) < (b.size() - j);
    return a < b;
}

ReadingsTensor load_readings(const std::filesystem::path &path,
                             const Layout &layout) {
    if (!std::filesystem::exists(path))
        fail(ErrorCategory::Io, "dataset path " + path.string() + " does not exist");
    if (layout.kind == Layout::Kind::ConsolidatedCsv)
        return load_consolidated_csv(path, layout);
    return load_device_files(path, layout);
}

DeviceMeta load_meta(const std::filesystem::path &path, std::size_t num_devices) {
    std::ifstream is(path);
    if (!is)
        fail(ErrorCategory::Io, "cannot open " + path.string());
    std::vector<long long> serials(num_devices);
    std::vector<bool> seen(num_devices, false);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (skip_line(line))
            continue;
        const auto tokens = split(line, ',');
        if (!header_seen) {
            if (tokens.size() != 2 || tokens[0] != "device" || tokens[1] != "serial")
                fail(ErrorCategory::Structural,
                     path.string() + ": expected header 'device,serial'");
            header_seen = true;
            continue;
        }
        long long device = 0, serial = 0;
        if (tokens.size() != 2 || !parse_integer(tokens[0], device) ||
            !parse_integer(tokens[1], serial))
            fail(ErrorCategory::Parse, "malformed metadata row at " +
                                           location(path, line_no, 1));
        if (device < 0 || static_cast<std::size_t>(device) >= num_devices)
            fail(ErrorCategory::Structural,
                 "metadata device index " + std::to_string(device) +
                     " out of range at " + location(path, line_no, 1));
        if (seen[device])
            fail(ErrorCategory::Structural,
                 "metadata lists device " + std::to_string(device) + " twice");
        seen[device] = true;
        serials[device] = serial;
    }
    for (std::size_t j = 0; j < num_devices; ++j)
        if (!seen[j])
            fail(ErrorCategory::Structural,
                 "metadata has no serial for device " + std::to_string(j));
    return DeviceMeta{std::move(serials)};
}

// ---------------------------------------------------------------------------
// Matrices

PufMatrices build_matrices(const ReadingsTensor &readings) {
    const auto ros = static_cast<Eigen::Index>(readings.num_ros());
    const auto devices = static_cast<Eigen::Index>(readings.num_devices());
    if (ros % 2 != 0)
        fail(ErrorCategory::Configuration,
             "RO count " + std::to_string(ros) + " is odd; pairs need an even count");
    FreqMatrix freq{Matrix(ros, devices)};
    const double samples = static_cast<double>(readings.num_samples());
    for (Eigen::Index j = 0; j < devices; ++j)
        for (Eigen::Index i = 0; i < ros; ++i) {
            double sum = 0.0;
            for (double v : readings.samples(j, i))
                sum += v;
            freq.values(i, j) = sum / samples;
        }
    return derive_matrices(std::move(freq));
}

DiffMatrix pair_differences(const FreqMatrix &freq) {
    if (freq.rows() % 2 != 0)
        fail(ErrorCategory::Configuration, "RO count " + std::to_string(freq.rows()) +
                                               " is odd; pairs need an even count");
    const Eigen::Index pairs = freq.rows() / 2;
    DiffMatrix diff{Matrix(pairs, freq.cols())};
    for (Eigen::Index j = 0; j < freq.cols(); ++j)
        for (Eigen::Index k = 0; k < pairs; ++k)
            diff.values(k, j) = freq(2 * k + 1, j) - freq(2 * k, j);
    return diff;
}

BitMatrix response_bits(const DiffMatrix &diff) {
    BitMatrix bits{BitArray(diff.rows(), diff.cols())};
    for (Eigen::Index j = 0; j < diff.cols(); ++j)
        for (Eigen::Index k = 0; k < diff.rows(); ++k)
            bits.values(k, j) = diff(k, j) > 0.0 ? 1 : 0;
    return bits;
}

PufMatrices derive_matrices(FreqMatrix freq) {
    DevMatrix dev{Matrix(freq.rows(), freq.cols())};
    for (Eigen::Index j = 0; j < freq.cols(); ++j) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < freq.rows(); ++i)
            sum += freq(i, j);
        const double mean = sum / static_cast<double>(freq.rows());
        for (Eigen::Index i = 0; i < freq.rows(); ++i)
            dev.values(i, j) = freq(i, j) - mean;
    }
    DiffMatrix diff = pair_differences(freq);
    BitMatrix bits = response_bits(diff);
    return {std::move(freq), std::move(dev), std::move(diff), std::move(bits)};
}

// ---------------------------------------------------------------------------
// Bit packing

std::vector<std::uint8_t> pack_bits(const BitMatrix &bits) {
    const auto pairs = static_cast<std::size_t>(bits.rows());
    if (pairs % 8 != 0)
        fail(ErrorCategory::Configuration,
             "cannot pack " + std::to_string(pairs) +
                 " bits per device: not a multiple of 8");
    std::vector<std::uint8_t> out;
    out.reserve(pairs / 8 * static_cast<std::size_t>(bits.cols()));
    for (Eigen::Index j = 0; j < bits.cols(); ++j)
        for (std::size_t k = 0; k < pairs; k += 8) {
            std::uint8_t byte = 0;
            for (std::size_t b = 0; b < 8; ++b)
                byte = static_cast<std::uint8_t>(
                    (byte << 1) | (bits(static_cast<Eigen::Index>(k + b), j) & 1u));
            out.push_back(byte);
        }
    return out;
}

BitMatrix unpack_bits(std::span<const std::uint8_t> bytes, std::size_t num_pairs,
                      std::size_t num_devices) {
    if (num_pairs % 8 != 0)
        fail(ErrorCategory::Configuration,
             "bit count " + std::to_string(num_pairs) + " is not a multiple of 8");
    const std::size_t expected = num_pairs / 8 * num_devices;
    if (bytes.size() != expected)
        fail(ErrorCategory::Structural,
             "packed bit stream has " + std::to_string(bytes.size()) +
                 " bytes, expected " + std::to_string(expected));
    BitMatrix bits{BitArray(static_cast<Eigen::Index>(num_pairs),
                            static_cast<Eigen::Index>(num_devices))};
    std::size_t n = 0;
    for (std::size_t j = 0; j < num_devices; ++j)
        for (std::size_t k = 0; k < num_pairs; k += 8, ++n)
            for (std::size_t b = 0; b < 8; ++b)
                bits.values(static_cast<Eigen::Index>(k + b),
                            static_cast<Eigen::Index>(j)) = (bytes[n] >> (7 - b)) & 1u;
    return bits;
}

// ---------------------------------------------------------------------------
// Writers

void write_device_files(const std::filesystem::path &dir,
                        const ReadingsTensor &readings) {
    std::filesystem::create_directories(dir);
    const std::size_t width = std::to_string(readings.num_devices()).size();
    for (std::size_t j = 0; j < readings.num_devices(); ++j) {
        std::string body;
        for (std::size_t i = 0; i < readings.num_ros(); ++i) {
            const auto row = readings.samples(j, i);
            for (std::size_t t = 0; t < row.size(); ++t) {
                if (t)
                    body += ' ';
                body += format_double(row[t]);
            }
            body += '\n';
        }
        std::string name = std::to_string(j);
        name.insert(0, width - name.size(), '0');
        atomic_write(dir / ("dev" + name + ".txt"), body);
    }
}

void write_readings_csv(std::ostream &os, const ReadingsTensor &readings) {
    os << "device,ro,sample,freq_mhz\n";
    for (std::size_t j = 0; j < readings.num_devices(); ++j)
        for (std::size_t i = 0; i < readings.num_ros(); ++i)
            for (std::size_t t = 0; t < readings.num_samples(); ++t)
                os << j << ',' << i << ',' << t << ','
                   << format_double(readings.at(j, i, t)) << '\n';
}

void write_meta_csv(std::ostream &os, const DeviceMeta &meta) {
    os << "device,serial\n";
    for (std::size_t j = 0; j < meta.serials.size(); ++j)
        os << j << ',' << meta.serials[j] << '\n';
}

template <class Tag, class Scalar>
void write_matrix_csv(std::ostream &os, const TaggedMatrix<Tag, Scalar> &m) {
    os << "row";
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        os << ',' << j;
    os << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        os << r;
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if constexpr (std::is_same_v<Scalar, double>)
                os << ',' << format_double(m(r, j));
            else
                os << ',' << static_cast<int>(m(r, j));
        }
        os << '\n';
    }
}

template void write_matrix_csv(std::ostream &, const FreqMatrix &);
template void write_matrix_csv(std::ostream &, const DevMatrix &);
template void write_matrix_csv(std::ostream &, const DiffMatrix &);
template void write_matrix_csv(std::ostream &, const BitMatrix &);

} // namespace pufstat
