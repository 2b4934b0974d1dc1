#include "stent/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace stent::rng {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Stream::Stream(std::uint64_t seed) : state_(mix(seed + kGolden)) {}

Stream::Stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = mix(seed + kGolden);
  s = mix(s ^ (tag + kGolden));
  s = mix(s ^ (a + 2 * kGolden));
  s = mix(s ^ (b + 3 * kGolden));
  state_ = s;
}

std::uint64_t Stream::next_u64() {
  state_ += kGolden;
  return mix(state_);
}

std::uint64_t Stream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Stream::below: n must be positive");
  return static_cast<std::uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
}

double Stream::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Stream::uniform01_open() { return 1.0 - uniform01(); }

double Stream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double Stream::normal(double mean, double stddev) {
  // Box-Muller, cosine branch only; keeps one draw = two uniforms.
  const double u1 = uniform01_open();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

int Stream::poisson(double lambda) {
  if (lambda <= 0.0) return 0;
  const double limit = std::exp(-lambda);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform01_open();
  } while (p > limit);
  return k - 1;
}

double Stream::beta_int(int a, int b) {
  if (a < 1 || b < 1) throw std::invalid_argument("Stream::beta_int: shapes must be >= 1");
  // Beta(a,b) = Ga / (Ga + Gb) with gamma variates as sums of exponentials.
  double ga = 0.0, gb = 0.0;
  for (int i = 0; i < a; ++i) ga -= std::log(uniform01_open());
  for (int i = 0; i < b; ++i) gb -= std::log(uniform01_open());
  return ga / (ga + gb);
}

}  // namespace stent::rng
