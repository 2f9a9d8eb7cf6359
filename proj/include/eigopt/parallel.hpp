#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eigopt::par {

// Fixed chunk width for reductions. Partial sums are formed per chunk and
// combined in chunk order, so results are bit-identical for any thread count.
inline constexpr std::size_t kReductionChunk = 4096;

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

template <class Body>
void parallel_for(std::size_t n, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        body(static_cast<std::size_t>(i));
    }
}

// Deterministic parallel sum of term(i) for i in [0, n).
template <class Term>
double deterministic_sum(std::size_t n, Term&& term) {
    if (n == 0) return 0.0;
    const std::size_t nchunks = (n + kReductionChunk - 1) / kReductionChunk;
    std::vector<double> partial(nchunks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * kReductionChunk;
        const std::size_t end = begin + kReductionChunk < n ? begin + kReductionChunk : n;
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += term(i);
        partial[static_cast<std::size_t>(c)] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

} // namespace eigopt::par
