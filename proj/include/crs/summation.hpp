#pragma once

// Compensated summation plus a deterministic parallel reduction.
//
// All floating-point accumulations in this library go through these helpers.
// The work interval is cut into fixed-size blocks; each block is summed
// sequentially with Neumaier compensation and the block results are folded in
// index order. The thread count therefore changes scheduling only, never the
// result: sums are bit-identical for any CRS_THREADS setting.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace crs {

class NeumaierSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Resolved thread count: explicit argument wins, then CRS_THREADS, then the
// machine's parallelism. Always at least 1.
inline unsigned resolve_threads(unsigned requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CRS_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return unsigned(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

inline constexpr std::uint64_t kSumBlock = 1u << 16;

// Deterministic blocked sum of fn(n) for n in [lo, hi] (inclusive).
// extra_cuts, if given, adds block boundaries (used for checkpoint snapshots);
// the partition depends only on (lo, hi, extra_cuts), not on the thread count.
template <typename Fn>
double blocked_sum(std::uint64_t lo, std::uint64_t hi, Fn&& fn, unsigned threads = 0,
                   const std::vector<std::uint64_t>* extra_cuts = nullptr,
                   std::vector<std::pair<std::uint64_t, double>>* snapshots = nullptr) {
    if (hi < lo) return 0.0;
    // Build the block partition: fixed grid, split further at extra cuts.
    std::vector<std::uint64_t> ends;
    {
        std::uint64_t cursor = lo;
        std::size_t ci = 0;
        std::vector<std::uint64_t> cuts;
        if (extra_cuts)
            for (std::uint64_t c : *extra_cuts)
                if (c >= lo && c <= hi) cuts.push_back(c);
        while (cursor <= hi) {
            std::uint64_t grid_end = ((cursor / kSumBlock) + 1) * kSumBlock - 1;
            std::uint64_t end = grid_end < hi ? grid_end : hi;
            while (ci < cuts.size() && cuts[ci] < cursor) ++ci;
            if (ci < cuts.size() && cuts[ci] <= end) end = cuts[ci];
            ends.push_back(end);
            if (end == hi) break;
            cursor = end + 1;
        }
    }
    const std::size_t nblocks = ends.size();
    std::vector<double> partial(nblocks, 0.0);
    unsigned nthreads = resolve_threads(threads);
    if (nthreads > nblocks) nthreads = unsigned(nblocks ? nblocks : 1);

    auto run_block = [&](std::size_t b) {
        std::uint64_t start = b == 0 ? lo : ends[b - 1] + 1;
        NeumaierSum acc;
        for (std::uint64_t n = start; n <= ends[b]; ++n) acc.add(fn(n));
        partial[b] = acc.value();
    };

    if (nthreads <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (unsigned t = 0; t < nthreads; ++t)
            pool.emplace_back([&, t]() {
                for (std::size_t b = t; b < nblocks; b += nthreads) run_block(b);
            });
        for (auto& th : pool) th.join();
    }

    // Ordered fold; snapshot the running value after each requested cut.
    NeumaierSum total;
    std::size_t ci = 0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        total.add(partial[b]);
        if (snapshots && extra_cuts) {
            while (ci < extra_cuts->size() && (*extra_cuts)[ci] <= ends[b]) {
                if ((*extra_cuts)[ci] == ends[b])
                    snapshots->emplace_back(ends[b], total.value());
                ++ci;
            }
        }
    }
    return total.value();
}

}  // namespace crs
