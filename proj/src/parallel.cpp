#include "delaygeom/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "delaygeom/errors.hpp"

namespace delaygeom
{

unsigned worker_count()
{
    if (const char* env = std::getenv("DELAYGEOM_THREADS"))
    {
        try
        {
            int n = std::stoi(env);
            if (n > 0)
                return static_cast<unsigned>(n);
        }
        catch (const std::exception&)
        {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  const std::atomic<bool>* cancel)
{
    if (n == 0)
        return;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        while (!failed.load(std::memory_order_relaxed))
        {
            if (cancel && cancel->load(std::memory_order_relaxed))
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::make_exception_ptr(Cancelled());
                failed = true;
                return;
            }
            std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try
            {
                body(i);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                failed = true;
            }
        }
    };

    if (workers <= 1)
    {
        work();
    }
    else
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (unsigned w = 1; w < workers; ++w)
            pool.emplace_back(work);
        work();
    }
    if (error)
        std::rethrow_exception(error);
}

double pairwise_sum(std::span<const double> values)
{
    if (values.size() <= 8)
    {
        double s = 0.0;
        for (double v : values)
            s += v;
        return s;
    }
    std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

} // namespace delaygeom
