#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>

namespace bosecycles {

uint64_t splitmix64(uint64_t x);

// Mersenne twister plus a cached Gaussian spare. The full state, spare
// included, round-trips through save/load so resumed runs are bit-identical.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0);

  // Independent stream `index` derived from a master seed.
  static Rng stream(uint64_t master_seed, uint64_t index);

  double uniform();  // [0, 1)
  double normal();   // N(0, 1), Marsaglia polar method
  uint64_t below(uint64_t n);

  void save(std::ostream& out) const;
  void load(std::istream& in);

  bool operator==(const Rng& other) const;

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bosecycles
