#pragma once

#include <algorithm>
#include <cstddef>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace disco::util {

// Worker count after applying the DISCO_PROJECT_THREADS cap. A request of 0
// means "hardware concurrency".
inline unsigned resolve_threads(unsigned requested) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency())
                              : requested;
  if (const char* cap = std::getenv("DISCO_PROJECT_THREADS")) {
    try {
      const long v = std::stol(cap);
      if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    } catch (const std::exception&) {
      // Unparseable caps are ignored.
    }
  }
  return std::max(1u, n);
}

// Contiguous shard boundaries for n items over k workers. Deterministic in
// (n, k).
inline std::vector<std::size_t> shard_bounds(std::size_t n, unsigned k) {
  k = std::max(1u, std::min<unsigned>(k, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::vector<std::size_t> bounds(k + 1);
  for (unsigned s = 0; s <= k; ++s) bounds[s] = n * s / k;
  return bounds;
}

// Runs fn(shard, begin, end) for each shard, one thread per shard. The first
// exception thrown by any shard is rethrown after all workers finish.
template <typename Fn>
void for_each_shard(const std::vector<std::size_t>& bounds, Fn&& fn) {
  const std::size_t shards = bounds.size() - 1;
  if (shards == 1) {
    fn(std::size_t{0}, bounds[0], bounds[1]);
    return;
  }
  std::vector<std::exception_ptr> errors(shards);
  std::vector<std::thread> workers;
  workers.reserve(shards);
  for (std::size_t s = 0; s < shards; ++s) {
    workers.emplace_back([&, s] {
      try {
        fn(s, bounds[s], bounds[s + 1]);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace disco::util
