#pragma once

#include <cstddef>
#include <functional>

namespace nvlab {

/// 0 means one worker per hardware thread.
int resolve_threads(int threads);

/// Calls body(i) once for every i in [0, count) using up to `threads`
/// workers. Bodies must only write to per-index state; callers reduce
/// afterwards in index order, which keeps results independent of the worker
/// count. If bodies throw, the exception from the smallest index is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace nvlab
