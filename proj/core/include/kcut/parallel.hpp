#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>

namespace kcut {

/// Worker-pool sizing plus the batch policy for the candidate streams.
/// With the automatic policy a stream of `total` candidates is split into
/// batches of max(1024, total / (64 * workers)); results are reduced by a
/// total order on (objective, canonical assignment), so any worker count
/// produces identical output.
struct ParallelConfig {
  int workers = 1;
  std::optional<std::int64_t> fixed_batch_size;

  std::int64_t batch_size_for(std::int64_t total) const {
    if (fixed_batch_size) return std::max<std::int64_t>(1, *fixed_batch_size);
    const std::int64_t w = std::max(1, workers);
    return std::max<std::int64_t>(1024, total / (64 * w));
  }
};

/// Cooperative timeout. Solvers poll between batches, so the granularity of
/// cancellation is one batch (or one uninterruptible factorization step).
class Deadline {
public:
  Deadline() = default;
  static Deadline after(std::chrono::duration<double> d) {
    Deadline dl;
    dl.at_ = std::chrono::steady_clock::now() +
             std::chrono::duration_cast<std::chrono::steady_clock::duration>(d);
    return dl;
  }
  bool expired() const {
    return at_ && std::chrono::steady_clock::now() >= *at_;
  }
  bool active() const { return at_.has_value(); }

private:
  std::optional<std::chrono::steady_clock::time_point> at_;
};

/// Runs fn(batch_index) for batch_index in [0, num_batches) on `workers`
/// threads pulling from a shared counter. fn must be safe to call
/// concurrently for distinct indices. Stops early once `stop` is set
/// (already-started batches still finish). workers == 1 runs inline.
void run_batches(std::int64_t num_batches, int workers,
                 std::atomic<bool>& stop,
                 const std::function<void(std::int64_t)>& fn);

} // namespace kcut
