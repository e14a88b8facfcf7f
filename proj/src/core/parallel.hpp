#pragma once

#include <cstddef>
#include <functional>

namespace vmn {

// Global cap on worker threads (1 = fully serial, bit-reproducible).
void set_thread_count(int n);
int thread_count();

// Runs fn(begin, end) on static contiguous chunks of [0, n). Chunk boundaries
// depend only on n and the thread cap, so results are deterministic for a
// fixed thread count. With one thread this is a plain function call.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace vmn
