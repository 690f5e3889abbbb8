#include <cstdio>
#include <cstring>

#include "kcut/acceptance.hpp"

int main(int argc, char** argv) {
  kcut::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) {
      opts.quick = true;
    } else if (std::strcmp(argv[i], "--gset-dir") == 0 && i + 1 < argc) {
      opts.gset_dir = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--quick] [--gset-dir DIR]\n", argv[0]);
      return 1;
    }
  }

  const auto results = kcut::run_acceptance(opts);
  for (const auto& res : results) {
    std::printf("criterion %2d %-4s %-34s %s (%lld ms)\n", res.id,
                kcut::to_string(res.status), res.name.c_str(),
                res.detail.c_str(),
                static_cast<long long>(res.wall_time_ms));
  }
  return kcut::all_passed(results) ? 0 : 1;
}
