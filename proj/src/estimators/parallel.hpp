#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "core/rng.hpp"

namespace recmax {

// Work is split into a fixed number of chunks regardless of worker count;
// chunk i draws from Rng(mix_seed(seed, i)) and results reduce in chunk
// order, so values are byte-identical for any number of workers.
inline constexpr int kChunks = 64;
inline constexpr int kMomBlocks = 32;

inline long long chunk_size(long long total, int n_chunks, int idx) {
  return total * (idx + 1) / n_chunks - total * idx / n_chunks;
}

int resolve_workers(int requested);  // <=0 means auto

// fn(chunk_index, chunk_seed, chunk_samples) -> T, run on a small pool.
template <typename T, typename Fn>
std::vector<T> run_chunks(long long total, int n_chunks, std::uint64_t seed,
                          int workers, Fn&& fn) {
  std::vector<T> results(static_cast<std::size_t>(n_chunks));
  const int pool = std::min(resolve_workers(workers), n_chunks);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    while (true) {
      const int idx = next.fetch_add(1);
      if (idx >= n_chunks || failed.load()) return;
      try {
        results[static_cast<std::size_t>(idx)] =
            fn(idx, mix_seed(seed, static_cast<std::uint64_t>(idx)),
               chunk_size(total, n_chunks, idx));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(pool));
    for (int i = 0; i < pool; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failed.load()) std::rethrow_exception(error);
  return results;
}

// Streaming mean/variance accumulator with an order-fixed merge.
struct MomentAcc {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d1 = x - mean;
    mean += d1 / static_cast<double>(n);
    m2 += d1 * (x - mean);
  }
  void merge(const MomentAcc& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double delta = o.mean - mean;
    const long long tot = n + o.n;
    mean += delta * static_cast<double>(o.n) / static_cast<double>(tot);
    m2 += o.m2 + delta * delta * static_cast<double>(n) *
                     static_cast<double>(o.n) / static_cast<double>(tot);
    n = tot;
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double std_error() const {
    return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

// Paired accumulator for ratio estimates on shared draws.
struct PairAcc {
  long long n = 0;
  double mean_x = 0.0, mean_y = 0.0;
  double m2_x = 0.0, m2_y = 0.0, cxy = 0.0;

  void add(double x, double y) {
    ++n;
    const double dx = x - mean_x;
    const double dy = y - mean_y;
    mean_x += dx / static_cast<double>(n);
    mean_y += dy / static_cast<double>(n);
    m2_x += dx * (x - mean_x);
    cxy += dx * (y - mean_y);
    m2_y += dy * (y - mean_y);
  }
  void merge(const PairAcc& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const long long tot = n + o.n;
    const double w = static_cast<double>(n) * static_cast<double>(o.n) /
                     static_cast<double>(tot);
    const double dx = o.mean_x - mean_x;
    const double dy = o.mean_y - mean_y;
    m2_x += o.m2_x + dx * dx * w;
    m2_y += o.m2_y + dy * dy * w;
    cxy += o.cxy + dx * dy * w;
    mean_x += dx * static_cast<double>(o.n) / static_cast<double>(tot);
    mean_y += dy * static_cast<double>(o.n) / static_cast<double>(tot);
    n = tot;
  }
};

}  // namespace recmax
