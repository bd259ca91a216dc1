#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <sstream>
#include <thread>
#include <vector>

#include "faraday/error.hpp"

namespace faraday::detail {

struct ParallelFailure {
    std::size_t index = 0;
    std::exception_ptr error;
    explicit operator bool() const { return static_cast<bool>(error); }
};

/// Calls fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// default). Reports the failure with the lowest index, if any.
template <class Fn>
ParallelFailure parallel_for(std::size_t count, unsigned threads, Fn&& fn)
{
    std::atomic<std::size_t> next{0};
    std::mutex mutex;
    ParallelFailure failure{count, nullptr};

    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (i < failure.index) {
                    failure.index = i;
                    failure.error = std::current_exception();
                }
            }
        }
    };

    unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(count, 1)));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n);
        for (unsigned t = 0; t < n; ++t)
            pool.emplace_back(worker);
    }
    return failure;
}

/// Rethrows a sweep failure with the offending tau in the message,
/// keeping input errors distinct from numerical ones.
inline void rethrow_at_tau(const ParallelFailure& failure, std::span<const double> taus)
{
    if (!failure)
        return;
    std::ostringstream msg;
    msg << "sweep failed at tau=" << taus[failure.index] << ": ";
    try {
        std::rethrow_exception(failure.error);
    } catch (const InvalidInput& e) {
        throw InvalidInput(msg.str() + e.what());
    } catch (const std::exception& e) {
        throw NumericalFailure(msg.str() + e.what());
    }
}

} // namespace faraday::detail
