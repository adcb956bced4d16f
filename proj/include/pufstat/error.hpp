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

#include <stdexcept>
#include <string>
#include <string_view>

namespace pufstat {

/// Broad classes of failure. The CLI maps these onto exit codes.
enum class ErrorCategory {
    Configuration,  ///< bad parameters or shapes requested by the caller
    Structural,     ///< input data has the wrong shape (ragged, wrong length)
    Parse,          ///< a token could not be read as a number
    Validation,     ///< values outside their admissible domain
    Degenerate,     ///< zero variance or similar, statistic undefined
    Numeric,        ///< non-finite intermediate or solver failure
    Unavailable,    ///< analysis needs inputs that are not present
    Io,             ///< file system failure
};

std::string_view category_name(ErrorCategory category);

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string &what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string &what) {
    throw Error(category, what);
}

} // namespace pufstat
