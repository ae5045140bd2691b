#include "bandflow/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>

namespace bandflow {

std::size_t worker_count(std::size_t tasks) {
    std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BANDFLOW_THREADS")) {
        std::size_t cap = 0;
        const char* end = env + std::strlen(env);
        auto [ptr, ec] = std::from_chars(env, end, cap);
        if (ec == std::errc{} && ptr == end && cap > 0) {
            n = std::min(n, cap);
        }
    }
    return std::max<std::size_t>(1, std::min(n, tasks));
}

} // namespace bandflow
