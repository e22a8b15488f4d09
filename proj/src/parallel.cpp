#include "berezin/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

extern "C" void openblas_set_num_threads(int);

namespace berezin {

namespace {

std::atomic<int> g_threads{0};
thread_local bool t_in_worker = false;

int env_threads() {
  if (const char* s = std::getenv("BEREZIN_LAB_THREADS")) {
    const int n = std::atoi(s);
    if (n > 0) return n;
  }
  return 1;
}

struct BlasSingleThread {
  BlasSingleThread() { openblas_set_num_threads(1); }
} g_blas_init;

}  // namespace

void set_thread_count(int n) { g_threads = n; }

int thread_count() {
  const int n = g_threads.load();
  return n > 0 ? n : env_threads();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const int t = std::min<std::size_t>(thread_count(), n);
  if (t <= 1 || t_in_worker) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (int w = 0; w < t; ++w)
    pool.emplace_back([&] {
      t_in_worker = true;  // nested calls run inline
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace berezin
