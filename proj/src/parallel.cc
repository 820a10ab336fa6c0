// Copyright 2026 The mipt-quan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mipt/parallel.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mipt {

namespace {

std::atomic<size_t> g_workers{0};

size_t default_workers() {
    if (const char *env = std::getenv("MIPT_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) {
            return static_cast<size_t>(v);
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace

size_t worker_count() {
    size_t w = g_workers.load();
    if (w == 0) {
        w = default_workers();
        g_workers.store(w);
    }
    return w;
}

void set_worker_count(size_t n) {
    g_workers.store(std::max<size_t>(1, n));
}

void parallel_for(size_t n, const std::function<void(size_t)> &body) {
    size_t workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; i++) {
            body(i);
        }
        return;
    }

    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(n);
                return;
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    for (size_t w = 1; w < workers; w++) {
        threads.emplace_back(run);
    }
    run();
    for (auto &t : threads) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace mipt
