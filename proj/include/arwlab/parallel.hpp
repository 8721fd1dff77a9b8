#ifndef ARWLAB_PARALLEL_HPP
#define ARWLAB_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace arwlab {

inline unsigned default_jobs()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs f(0..count-1) on `jobs` threads; results are stored by replica index, so the
// output does not depend on scheduling. The first exception is rethrown after joining.
template <class F>
auto run_replicas(long count, unsigned jobs, F&& f) -> std::vector<std::invoke_result_t<F&, long>>
{
    using result = std::invoke_result_t<F&, long>;
    std::vector<result> out(static_cast<std::size_t>(std::max(0L, count)));
    if (jobs == 0)
        jobs = default_jobs();
    jobs = static_cast<unsigned>(std::min<long>(jobs, std::max(1L, count)));
    std::atomic<long> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            long i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                out[static_cast<std::size_t>(i)] = f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

} // namespace arwlab

#endif
