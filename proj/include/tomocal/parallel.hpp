#pragma once
// Minimal deterministic worker pool: results land in caller-indexed slots,
// so the outcome is independent of the worker count.

#include <cstddef>
#include <functional>

namespace tomocal::parallel {

// 0 = use hardware concurrency; 1 = serial (the default).
void set_thread_count(int n);
int thread_count();

// Runs body(i) for i in [0, n); blocks until done. body must only write
// to slots owned by its index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tomocal::parallel
