#pragma once

#include <functional>

namespace gqc {

// Per-index work dispatch. The omp variant threads over indices; results must
// be written to disjoint slots so both variants agree exactly.
void for_each_index_serial(long n, const std::function<void(long)>& fn);
void for_each_index_omp(long n, const std::function<void(long)>& fn);
void for_each_index(long n, const std::function<void(long)>& fn);

int max_threads();

} // namespace gqc
