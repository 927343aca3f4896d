#pragma once

#include <cstddef>
#include <exception>

namespace bregcr::detail {

// Runs f(i) for i in [0, n); the exception thrown by the smallest failing
// index is rethrown, so the reported failure does not depend on scheduling.
template <class F>
void for_each_index(std::size_t n, bool parallel, F&& f) {
    std::size_t first_bad = n;
    std::exception_ptr error;
    const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (parallel)
    for (long i = 0; i < count; ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(bregcr_for_each_index)
            {
                if (static_cast<std::size_t>(i) < first_bad) {
                    first_bad = static_cast<std::size_t>(i);
                    error = std::current_exception();
                }
            }
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace bregcr::detail
