#pragma once

#include <cstdint>
#include <vector>

#include "bosecycles/path_state.hpp"

namespace bosecycles {

struct BruteForceResult {
  double partition = 0.0;        // Y(N) = (1/N!) sum over permutations
  double log_partition = 0.0;
  double partition_error = 0.0;  // MC standard error; 0 when U = 0
  std::vector<double> densities;       // rho(n), index n - 1
  std::vector<double> density_errors;
  int64_t permutations = 0;            // N!
  int cycle_types = 0;                 // distinct cycle types met during enumeration
  bool exact = false;
};

// Direct evaluation of the canonical path integral for N <= 8. All N!
// permutations are enumerated and grouped by cycle type; the interaction
// expectation over independent closed periodic bridges is estimated with
// mc_samples draws per cycle type (it depends on the type only). For U = 0
// the expectation is 1 and the result is exact.
BruteForceResult brute_force_small(const PimcParams& params, const PairPotential& potential,
                                   int64_t mc_samples, uint64_t seed);

}  // namespace bosecycles
