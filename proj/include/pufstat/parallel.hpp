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

#include <algorithm>
#include <cstddef>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

namespace pufstat {

/// Runs fn(0..n-1) on up to `threads` workers with a static interleaved
/// schedule. If any call throws, the exception of the lowest failing index
/// is rethrown, so failures are reported the same way as a sequential loop.
template <class Fn> void parallel_for(std::size_t n, unsigned threads, Fn &&fn) {
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::size_t> failed_at(workers, none);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += workers) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[w] = std::current_exception();
                        failed_at[w] = i;
                        return;
                    }
                }
            });
    }
    std::size_t first = none, which = 0;
    for (std::size_t w = 0; w < workers; ++w)
        if (failed_at[w] < first) {
            first = failed_at[w];
            which = w;
        }
    if (first != none)
        std::rethrow_exception(errors[which]);
}

} // namespace pufstat
