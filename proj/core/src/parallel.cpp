#include "kcut/parallel.hpp"

#include <thread>
#include <vector>

namespace kcut {

void run_batches(std::int64_t num_batches, int workers,
                 std::atomic<bool>& stop,
                 const std::function<void(std::int64_t)>& fn) {
  workers = std::max(1, workers);
  std::atomic<std::int64_t> next{0};
  auto loop = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::int64_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= num_batches) return;
      fn(b);
    }
  };
  if (workers == 1) {
    loop();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back(loop);
  }
  for (auto& t : pool) t.join();
}

} // namespace kcut
