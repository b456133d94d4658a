#pragma once

// Deterministic path-parallel execution. Paths are grouped into fixed-size
// blocks; each block is reduced into its own accumulator and accumulators are
// merged in block order, so results do not depend on the worker count or on
// scheduling.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace ruinlab {

inline constexpr std::uint64_t kPathsPerBlock = 4096;

/// Hardware concurrency, capped by the RUINLAB_WORKERS environment variable.
std::size_t worker_count();

/// Calls fn(i) for every i in [0, n) on up to `workers` threads (0 = auto).
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// Runs kernel(first_path, last_path, acc) over consecutive path blocks and
/// returns the per-block accumulators in block order.
template <class Acc, class Kernel>
std::vector<Acc> run_path_blocks(std::uint64_t paths, std::size_t workers, const Acc& prototype,
                                 Kernel&& kernel) {
  const std::size_t blocks = static_cast<std::size_t>((paths + kPathsPerBlock - 1) / kPathsPerBlock);
  std::vector<Acc> out(blocks, prototype);
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::uint64_t first = static_cast<std::uint64_t>(b) * kPathsPerBlock;
    const std::uint64_t last = std::min<std::uint64_t>(paths, first + kPathsPerBlock);
    kernel(first, last, out[b]);
  });
  return out;
}

}  // namespace ruinlab
