#pragma once

// Worker control and reproducible reductions. Reductions split the index
// range into fixed-size chunks, reduce each chunk on whatever worker picks it
// up and combine the partials in chunk order, so results do not depend on the
// number of workers.

#include <cstdint>
#include <vector>

#include <omp.h>

namespace remlab::parallel {

inline constexpr std::uint64_t kChunk = 4096;

/// Cap the worker count; values < 1 restore the default (all cores).
inline void set_workers(int workers)
{
    omp_set_num_threads(workers >= 1 ? workers : omp_get_num_procs());
}

inline int workers() { return omp_get_max_threads(); }

template <class Body>
void for_each_index(std::uint64_t size, Body&& body)
{
    const auto n = static_cast<std::int64_t>(size);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        body(static_cast<std::uint64_t>(i));
    }
}

/// `chunk_fn(begin, end)` returns the partial for [begin, end);
/// `combine(acc, partial)` folds the partials in order.
template <class T, class ChunkFn, class Combine>
T chunked_reduce(std::uint64_t size, T init, ChunkFn&& chunk_fn, Combine&& combine)
{
    const std::uint64_t chunks = (size + kChunk - 1) / kChunk;
    std::vector<T> partial(chunks, init);
    const auto nchunks = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < nchunks; ++c) {
        const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunk;
        const std::uint64_t end = begin + kChunk < size ? begin + kChunk : size;
        partial[static_cast<std::size_t>(c)] = chunk_fn(begin, end);
    }
    T acc = init;
    for (const T& p : partial) {
        acc = combine(acc, p);
    }
    return acc;
}

}  // namespace remlab::parallel
