// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace copx::detail
{

inline int resolve_workers(int workers)
{
    if (workers > 0)
    {
        return workers;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs f(i) for i in [0, n). Each index is visited once; results must be
/// written to per-index slots so the outcome does not depend on scheduling.
/// The first exception thrown by a task is rethrown.
template <typename F>
void parallel_for(std::size_t n, int workers, F&& f)
{
    const auto w = std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(workers)), n);
    if (w <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            f(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(w);
        for (std::size_t t = 0; t < w; ++t)
        {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++)
                {
                    try
                    {
                        f(i);
                    }
                    catch (...)
                    {
                        std::lock_guard lock(error_mutex);
                        if (!error)
                        {
                            error = std::current_exception();
                        }
                        next = n;
                    }
                }
            });
        }
    }
    if (error)
    {
        std::rethrow_exception(error);
    }
}

} // namespace copx::detail
