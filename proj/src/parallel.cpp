#include "nqs/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nqs {

namespace {
std::atomic<unsigned> g_max_threads{0};
}

void set_max_threads(unsigned n) { g_max_threads.store(n ? n : 1); }

unsigned max_threads() {
  unsigned n = g_max_threads.load();
  if (n == 0) {
    n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    g_max_threads.store(n);
  }
  return n;
}

std::pair<std::size_t, std::size_t> block_range(std::size_t n,
                                                std::size_t nblocks,
                                                std::size_t b) {
  const std::size_t base = n / nblocks;
  const std::size_t rem = n % nblocks;
  const std::size_t begin = b * base + (b < rem ? b : rem);
  const std::size_t len = base + (b < rem ? 1 : 0);
  return {begin, begin + len};
}

void parallel_blocks(std::size_t nblocks,
                     const std::function<void(std::size_t)>& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(max_threads(), nblocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (;;) {
          const std::size_t b = next.fetch_add(1);
          if (b >= nblocks) return;
          fn(b);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(nblocks);  // stop handing out blocks
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace nqs
