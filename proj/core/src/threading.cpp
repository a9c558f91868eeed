#include "vlab/threading.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace vlab {

namespace {
int g_num_threads = 1;
}

void set_num_threads(int n) { g_num_threads = std::max(1, n); }

int num_threads() { return g_num_threads; }

void parallel_for(std::size_t n_items, const std::function<void(std::size_t, std::size_t)>& fn) {
  const int nt = g_num_threads;
  if (nt <= 1 || n_items < 2) {
    fn(0, n_items);
    return;
  }
  const std::size_t chunk = (n_items + nt - 1) / nt;
  std::vector<std::thread> workers;
  workers.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    const std::size_t b = std::min(n_items, t * chunk);
    const std::size_t e = std::min(n_items, b + chunk);
    if (b >= e) break;
    workers.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& w : workers) w.join();
}

}  // namespace vlab
