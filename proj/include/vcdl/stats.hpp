#pragma once
// Binomial frequency summaries and the replication thread pool.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/beta.hpp>

namespace vcdl {

enum class CiMethod { Normal, ClopperPearson };

struct BinomialSummary {
    std::uint64_t events{0};
    std::uint64_t trials{0};
    double frequency{0.0};
    double lo{0.0};
    double hi{1.0};
};

inline constexpr double kZ99 = 2.5758293035489004;

/// Two-sided 99% interval for events/trials. The normal interval is widened
/// by 1/(2 trials) on each side so it never collapses at 0 or 1.
inline BinomialSummary binomial_summary(std::uint64_t events, std::uint64_t trials,
                                        CiMethod method = CiMethod::Normal) {
    BinomialSummary s{events, trials, 0.0, 0.0, 1.0};
    if (trials == 0) return s;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(events) / n;
    s.frequency = p;
    if (method == CiMethod::Normal) {
        const double half = kZ99 * std::sqrt(p * (1.0 - p) / n) + 0.5 / n;
        s.lo = std::max(0.0, p - half);
        s.hi = std::min(1.0, p + half);
        return s;
    }
    const double a = 0.005;
    const double k = static_cast<double>(events);
    s.lo = events == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<double>(k, n - k + 1.0), a);
    s.hi = events == trials ? 1.0
                            : boost::math::quantile(boost::math::beta_distribution<double>(k + 1.0, n - k), 1.0 - a);
    return s;
}

/// delta + 3 sqrt(delta (1 - delta) / reps): the finite-replication allowance
/// used by every failure-rate check.
inline double binomial_slack_limit(double p, std::uint64_t reps) {
    return p + 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

/// Worker count: VCDL_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("VCDL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, count) on thread_count() workers. Work items are
/// claimed one at a time; the first exception is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace vcdl
