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

#include "pufstat/geometry.hpp"

#include "pufstat/error.hpp"

#include <charconv>

namespace pufstat {

namespace {

std::size_t parse_count(std::string_view s, std::string_view descriptor) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v == 0)
        fail(ErrorCategory::Configuration,
             "invalid geometry '" + std::string(descriptor) +
                 "' (expected ROWSxCOLS[:col|:row])");
    return v;
}

} // namespace

ChipGeometry ChipGeometry::parse(std::string_view descriptor) {
    ChipGeometry g;
    std::string_view dims = descriptor;
    const auto colon = descriptor.find(':');
    if (colon != std::string_view::npos) {
        dims = descriptor.substr(0, colon);
        const auto order = descriptor.substr(colon + 1);
        if (order == "col")
            g.order = Order::ColumnMajor;
        else if (order == "row")
            g.order = Order::RowMajor;
        else
            fail(ErrorCategory::Configuration,
                 "geometry order must be 'col' or 'row', got '" + std::string(order) + "'");
    }
    const auto x = dims.find('x');
    if (x == std::string_view::npos)
        fail(ErrorCategory::Configuration, "invalid geometry '" + std::string(descriptor) +
                                               "' (expected ROWSxCOLS[:col|:row])");
    g.rows = parse_count(dims.substr(0, x), descriptor);
    g.cols = parse_count(dims.substr(x + 1), descriptor);
    return g;
}

std::string ChipGeometry::describe() const {
    return std::to_string(rows) + "x" + std::to_string(cols) +
           (order == Order::ColumnMajor ? ":col" : ":row");
}

} // namespace pufstat
