#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace colcheck {

inline unsigned hardware_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// Runs fn(begin, end) over a chunked partition of [0, n). Chunk boundaries are a
// function of (n, threads) only, so per-chunk results merged in chunk order are
// deterministic for any thread count. Exceptions are rethrown on the caller.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (nt == 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    const std::size_t chunk = (n + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t) {
        const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(t) * chunk, n);
        const std::size_t e = std::min(b + chunk, n);
        pool.emplace_back([&, t, b, e] {
            try {
                if (b < e) fn(b, e);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& ep : errs)
        if (ep) std::rethrow_exception(ep);
}

// Persistent worker pool for hot paths where per-call std::thread spawning or
// condvar wake latency would dominate (sub-millisecond batched inference).
// Workers spin briefly on a generation counter before parking, so dispatch
// costs ~a microsecond while the pool is hot. run() dispatches one task per
// index round-robin and blocks until all complete.
class ThreadPool {
public:
    explicit ThreadPool(unsigned threads) {
        const unsigned nt = std::max(1u, threads) - 1; // caller acts as worker 0
        for (unsigned t = 0; t < nt; ++t)
            workers_.emplace_back([this, t] { worker_loop(t + 1); });
    }

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    ~ThreadPool() {
        stop_.store(true, std::memory_order_release);
        {
            std::lock_guard<std::mutex> lock(mu_);
        }
        cv_.notify_all();
        for (auto& w : workers_) w.join();
    }

    unsigned size() const { return static_cast<unsigned>(workers_.size()) + 1; }

    void run(std::size_t n, const std::function<void(std::size_t)>& task) {
        if (n == 0) return;
        if (workers_.empty()) {
            for (std::size_t i = 0; i < n; ++i) task(i);
            return;
        }
        task_ = &task;
        n_ = n;
        pending_.store(size(), std::memory_order_relaxed);
        generation_.fetch_add(1, std::memory_order_release);
        {
            std::lock_guard<std::mutex> lock(mu_); // pairs with parked waiters
        }
        cv_.notify_all();
        run_strided(0);
        while (pending_.load(std::memory_order_acquire) != 0) cpu_pause();
        task_ = nullptr;
    }

private:
    static void cpu_pause() {
#if defined(__x86_64__) || defined(__i386__)
        __builtin_ia32_pause();
#else
        std::this_thread::yield();
#endif
    }

    void run_strided(unsigned worker) {
        const unsigned nt = size();
        for (std::size_t i = worker; i < n_; i += nt) (*task_)(i);
        pending_.fetch_sub(1, std::memory_order_release);
    }

    void worker_loop(unsigned worker) {
        std::uint64_t seen = 0;
        while (true) {
            // spin for a while, then park on the condition variable
            std::size_t spins = 0;
            while (generation_.load(std::memory_order_acquire) == seen &&
                   !stop_.load(std::memory_order_acquire)) {
                if (++spins < 200000) {
                    cpu_pause();
                } else {
                    std::unique_lock<std::mutex> lock(mu_);
                    cv_.wait_for(lock, std::chrono::milliseconds(50), [&] {
                        return generation_.load(std::memory_order_acquire) != seen ||
                               stop_.load(std::memory_order_acquire);
                    });
                    spins = 0;
                }
            }
            if (stop_.load(std::memory_order_acquire)) return;
            seen = generation_.load(std::memory_order_acquire);
            run_strided(worker);
        }
    }

    std::vector<std::thread> workers_;
    std::mutex mu_;
    std::condition_variable cv_;
    const std::function<void(std::size_t)>* task_ = nullptr;
    std::size_t n_ = 0;
    std::atomic<unsigned> pending_{0};
    std::atomic<std::uint64_t> generation_{0};
    std::atomic<bool> stop_{false};
};

// One task per index, work-stealing not needed at our task counts: tasks are
// dealt round-robin so long tasks (large L, big nets) spread across workers.
inline void parallel_tasks(std::size_t n, unsigned threads,
                           const std::function<void(std::size_t)>& task) {
    if (n == 0) return;
    const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (nt == 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += nt) task(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& ep : errs)
        if (ep) std::rethrow_exception(ep);
}

} // namespace colcheck
