#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace vlcsim {

/// Seeded source built on std::mt19937_64, whose output sequence is fixed by
/// the standard. Distributions are implemented here rather than taken from
/// <random> because the library distributions differ between vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Standard normal via the Marsaglia polar method.
  double gaussian();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Derives a child seed from a parent seed and a sequence of stream tags.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

}  // namespace vlcsim
