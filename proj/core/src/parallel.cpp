#include "wipet/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wipet {
namespace {

std::atomic<unsigned> g_threads{0};

unsigned resolve_threads() {
  const unsigned requested = g_threads.load();
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

void set_num_threads(unsigned n) { g_threads.store(n); }

unsigned num_threads() { return resolve_threads(); }

void parallel_chunks(std::size_t n, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  chunks = std::clamp<std::size_t>(chunks, 1, n);
  auto bounds = [&](std::size_t c) { return std::pair{c * n / chunks, (c + 1) * n / chunks}; };

  const std::size_t workers = std::min<std::size_t>(resolve_threads(), chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      auto [b, e] = bounds(c);
      body(c, b, e);
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      try {
        auto [b, e] = bounds(c);
        body(c, b, e);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t chunks = std::min<std::size_t>(n, 4 * static_cast<std::size_t>(resolve_threads()));
  parallel_chunks(n, chunks, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) body(i);
  });
}

}  // namespace wipet
