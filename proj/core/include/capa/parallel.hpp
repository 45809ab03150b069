// SPDX-License-Identifier: Apache-2.0
//
// capa-sense: CRB-optimal probing-current design for continuous-aperture
// near-field sensing
// Copyright (C) 2026 The capa-sense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CAPA_PARALLEL_HPP
#define CAPA_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace capa::detail
{
    // Fixed block size: the partition (and therefore every floating-point
    // summation order) is independent of the number of worker threads.
    inline constexpr std::size_t kBlockSize = 1024;

    inline std::size_t block_count(std::size_t n)
    {
        return (n + kBlockSize - 1) / kBlockSize;
    }

    inline unsigned worker_count(std::size_t blocks)
    {
        unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        return static_cast<unsigned>(std::min<std::size_t>(hw, blocks));
    }

    // Runs body(block, begin, end) for every block of [0, n). Blocks are
    // handed out dynamically; callers write to per-block slots only.
    template <class Body>
    void for_each_block(std::size_t n, Body &&body)
    {
        const std::size_t blocks = block_count(n);
        const unsigned workers = worker_count(blocks);
        auto run_block = [&](std::size_t b)
        {
            const std::size_t begin = b * kBlockSize;
            body(b, begin, std::min(n, begin + kBlockSize));
        };
        if (workers <= 1)
        {
            for (std::size_t b = 0; b < blocks; ++b)
                run_block(b);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t)
            pool.emplace_back([&]
                              {
                for (std::size_t b = next++; b < blocks; b = next++)
                {
                    try
                    {
                        run_block(b);
                    }
                    catch (...)
                    {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                    }
                } });
        pool.clear();
        if (failure)
            std::rethrow_exception(failure);
    }

    // Pairwise (tree) reduction in index order; deterministic for a fixed
    // number of parts.
    template <class T>
    T pairwise_reduce(std::vector<T> parts)
    {
        if (parts.empty())
            return T{};
        while (parts.size() > 1)
        {
            std::size_t half = (parts.size() + 1) / 2;
            for (std::size_t i = 0; i + half < parts.size(); ++i)
                parts[i] = parts[i] + parts[i + half];
            parts.resize(half);
        }
        return parts.front();
    }

    // Maps every block to a partial result and reduces them pairwise.
    template <class T, class BlockFn>
    T block_reduce(std::size_t n, const T &zero, BlockFn &&fn)
    {
        std::vector<T> parts(block_count(n), zero);
        for_each_block(n, [&](std::size_t b, std::size_t begin, std::size_t end)
                       { parts[b] = fn(begin, end); });
        if (parts.empty())
            return zero;
        return pairwise_reduce(std::move(parts));
    }

} // namespace capa::detail

#endif
