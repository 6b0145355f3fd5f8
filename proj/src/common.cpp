#include "maxpot/common.hpp"

#include <algorithm>

namespace maxpot {

double unit_ball_volume(int dim) {
    switch (dim) {
        case 2: return M_PI;
        case 3: return 4.0 * M_PI / 3.0;
        default: throw std::invalid_argument("unit_ball_volume: dimension must be 2 or 3");
    }
}

double unit_sphere_area(int dim) { return dim * unit_ball_volume(dim); }

int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("MAXPOT_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) hw = std::min<long>(v, 256);
    }
    return hw;
}

void parallel_for_blocked(std::size_t begin, std::size_t end,
                          const std::function<void(std::size_t, std::size_t)>& fn) {
    const std::size_t total = end > begin ? end - begin : 0;
    if (total == 0) return;
    const int workers = std::min<std::size_t>(worker_count(), total);
    if (workers <= 1 || total < 2048) {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (total + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = begin + chunk * static_cast<std::size_t>(w);
        if (lo >= end) break;
        const std::size_t hi = std::min(end, lo + chunk);
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn) {
    parallel_for_blocked(begin, end, [&fn](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 32) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace maxpot
