#pragma once

#include <cstdint>
#include <vector>

namespace stent::rng {

// splitmix64 finalizer; the workhorse behind stream splitting.
std::uint64_t mix(std::uint64_t z);

// Deterministic random stream addressed by (seed, tag, a, b). Streams with
// distinct addresses are independent, so adding draws to one entity never
// perturbs another. Values are identical across runs and platforms.
class Stream {
 public:
  explicit Stream(std::uint64_t seed);
  Stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t a = 0, std::uint64_t b = 0);

  std::uint64_t next_u64();
  std::uint64_t below(std::uint64_t n);     // uniform in [0, n)
  double uniform01();                       // [0, 1)
  double uniform01_open();                  // (0, 1]
  double uniform(double lo, double hi);
  double normal(double mean = 0.0, double stddev = 1.0);
  int poisson(double lambda);
  double beta_int(int a, int b);            // Beta(a, b), integer shapes

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace stent::rng
