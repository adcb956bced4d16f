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

#include "pufstat/io.hpp"

#include "pufstat/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace pufstat {

std::string_view category_name(ErrorCategory category) {
    switch (category) {
    case ErrorCategory::Configuration:
        return "configuration";
    case ErrorCategory::Structural:
        return "structural";
    case ErrorCategory::Parse:
        return "parse";
    case ErrorCategory::Validation:
        return "validation";
    case ErrorCategory::Degenerate:
        return "degenerate";
    case ErrorCategory::Numeric:
        return "numeric";
    case ErrorCategory::Unavailable:
        return "unavailable";
    case ErrorCategory::Io:
        return "io";
    }
    return "unknown";
}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc())
        fail(ErrorCategory::Numeric, "cannot format floating point value");
    return std::string(buf.data(), end);
}

namespace {

void write_bytes(const std::filesystem::path &path, const char *data,
                 std::size_t size) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            fail(ErrorCategory::Io, "cannot open " + tmp.string() + " for writing");
        os.write(data, static_cast<std::streamsize>(size));
        if (!os)
            fail(ErrorCategory::Io, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        fail(ErrorCategory::Io, "cannot rename " + tmp.string() + " to " +
                                    path.string() + ": " + ec.message());
}

} // namespace

void atomic_write(const std::filesystem::path &path, std::string_view contents) {
    write_bytes(path, contents.data(), contents.size());
}

void atomic_write(const std::filesystem::path &path,
                  std::span<const std::uint8_t> contents) {
    write_bytes(path, reinterpret_cast<const char *>(contents.data()),
                contents.size());
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        fail(ErrorCategory::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(),
                   nullptr) != 1)
        fail(ErrorCategory::Numeric, "SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

} // namespace pufstat
