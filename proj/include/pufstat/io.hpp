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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace pufstat {

/// Shortest round-trip decimal representation.
std::string format_double(double value);

/// Writes `contents` to a temporary sibling and renames it over `path`.
void atomic_write(const std::filesystem::path &path, std::string_view contents);
void atomic_write(const std::filesystem::path &path,
                  std::span<const std::uint8_t> contents);

std::string read_file(const std::filesystem::path &path);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

} // namespace pufstat
