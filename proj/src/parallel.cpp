#include "gqc/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gqc {

void for_each_index_serial(long n, const std::function<void(long)>& fn) {
    for (long i = 0; i < n; ++i) fn(i);
}

void for_each_index_omp(long n, const std::function<void(long)>& fn) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) fn(i);
}

void for_each_index(long n, const std::function<void(long)>& fn) {
    if (max_threads() > 1 && n > 1)
        for_each_index_omp(n, fn);
    else
        for_each_index_serial(n, fn);
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace gqc
