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

#include <cstddef>
#include <string>
#include <string_view>

namespace pufstat {

/// Placement of RO indices on the chip as a rows x cols grid.
///
/// Column-major means consecutive RO indices fill one column (of `rows`
/// ROs) before moving to the next column. The default is 16 rows by 32
/// columns, column-major, which gives 512 ROs in 32 columns of 16.
struct ChipGeometry {
    enum class Order { ColumnMajor, RowMajor };

    std::size_t rows = 16;
    std::size_t cols = 32;
    Order order = Order::ColumnMajor;

    std::size_t size() const { return rows * cols; }
    std::size_t x(std::size_t ro) const {
        return order == Order::ColumnMajor ? ro / rows : ro % cols;
    }
    std::size_t y(std::size_t ro) const {
        return order == Order::ColumnMajor ? ro % rows : ro / cols;
    }

    /// Parses `ROWSxCOLS[:col|:row]`, e.g. `16x32:col`.
    static ChipGeometry parse(std::string_view descriptor);
    std::string describe() const;
};

} // namespace pufstat
