#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace probecert {

// Counter-based deterministic generator (splitmix64 core). Every stochastic
// operation in the library takes an Rng explicitly, so any experiment replays
// bit-identically from its (seed, stream) pair. Substreams are independent of
// how much the parent has been consumed.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0)
      : origin_(mix(seed + kGamma * (stream + 1))), state_(origin_) {}

  uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1].
  double next_unit_open_zero() { return 1.0 - next_unit(); }

  // Uniform integer in [0, bound), exactly uniform via rejection.
  uint64_t next_below(uint64_t bound) {
    if (bound <= 1) return 0;
    const uint64_t limit =
        std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % bound;
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  bool bernoulli(double p) { return next_unit() < p; }

  double exponential() { return -std::log(next_unit_open_zero()); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    shuffle(p);
    return p;
  }

  // Detached substream keyed on (construction identity, idx), not on the
  // current position. Workers get rng.substream(worker) and never share state.
  Rng substream(uint64_t idx) const { return Rng(mix(origin_ ^ mix(idx + 0x632be59bd9b4e019ull))); }

 private:
  static constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ull;

  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  uint64_t origin_;
  uint64_t state_;
};

}  // namespace probecert
