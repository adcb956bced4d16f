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

#include <string>
#include <vector>

namespace pufstat::cli {

inline constexpr const char *kToolVersion = "0.1.0";

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitAnalysis = 1,
    kExitUsage = 2,
    kExitIo = 3,
};

/// Parses the command line and runs one subcommand. Never throws.
int run(int argc, const char *const *argv);
int run(const std::vector<std::string> &args);

} // namespace pufstat::cli
