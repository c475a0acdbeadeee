#pragma once

#include <cstddef>
#include <functional>

namespace kinslab {

// Worker count for the data-parallel update loops. 1 (the default) runs
// everything on the calling thread. Results are bit-identical for any
// worker count: parallel regions only do independent element writes, and
// every reduction in the code base is a fixed-order serial sum.
void set_worker_count(int n);
int worker_count();

// Applies fn(i) for i in [begin, end). Chunking is by contiguous blocks;
// fn must not write outside its own index.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

}  // namespace kinslab
