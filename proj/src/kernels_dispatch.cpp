// Copyright 2026-present the mmc-tdgl project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mmctdgl/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

#include "mmctdgl/errors.hpp"

namespace mmctdgl::kernels {

#if defined(MMC_TDGL_HAVE_AVX2)
// Defined in kernels_avx2.cpp; null when the CPU lacks AVX2.
const KernelTable* avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#if defined(MMC_TDGL_HAVE_AVX2)
    return avx2_table_impl();
#else
    return nullptr;
#endif
}

namespace {

const KernelTable* lane_by_name(const std::string& name) {
    if (name == "scalar") return &scalar_table();
    if (name == "avx2") {
        const KernelTable* t = avx2_table();
        if (t == nullptr) throw Error("kernel lane 'avx2' is not available on this build or CPU");
        return t;
    }
    if (name == "auto") {
        const KernelTable* t = avx2_table();
        return t != nullptr ? t : &scalar_table();
    }
    throw Error("unknown kernel lane '" + name + "' (expected auto, scalar or avx2)");
}

std::atomic<const KernelTable*> g_active{nullptr};
std::atomic<int> g_thread_cap{0};

}  // namespace

const KernelTable& active() {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (t == nullptr) {
        const char* env = std::getenv("MMC_TDGL_SIMD");
        t = lane_by_name(env != nullptr ? env : "auto");
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

void select_lane(const std::string& name) {
    g_active.store(lane_by_name(name), std::memory_order_release);
}

void set_thread_cap(int cap) {
    g_thread_cap.store(cap < 0 ? 0 : cap, std::memory_order_relaxed);
}

int thread_cap() { return g_thread_cap.load(std::memory_order_relaxed); }

void for_rows(int ny, void* ctx, void (*fn)(void* ctx, int j0, int j1)) {
    int nt = g_thread_cap.load(std::memory_order_relaxed);
    if (nt == 0) nt = static_cast<int>(std::thread::hardware_concurrency());
    if (nt < 1) nt = 1;
    if (nt > ny) nt = ny;
    // Small sweeps stay serial; thread spawn costs more than the arithmetic.
    if (nt == 1 || ny < 4096 || ny / nt < 512) {
        fn(ctx, 0, ny);
        return;
    }
    const int base = ny / nt;
    const int rem = ny % nt;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt) - 1);
    int j0 = 0;
    for (int k = 0; k < nt; ++k) {
        const int j1 = j0 + base + (k < rem ? 1 : 0);
        if (k + 1 == nt) {
            fn(ctx, j0, j1);
        } else {
            pool.emplace_back([ctx, fn, j0, j1] { fn(ctx, j0, j1); });
        }
        j0 = j1;
    }
    for (std::thread& th : pool) th.join();
}

}  // namespace mmctdgl::kernels
