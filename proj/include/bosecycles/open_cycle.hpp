#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bosecycles/pimc_run.hpp"

namespace bosecycles {

struct OpenCycleSchedule {
  PimcSchedule base;         // sweeps, blocks, chains, seed, move mix
  int sector_moves = 2;      // open/close attempts per sweep
  double initial_weight = 0.0;  // eta at the start of equilibration; 0 picks 1 / rho
};

struct OpenCycleResult {
  double sigma = 0.0;
  double standard_error = 0.0;
  double open_fraction = 0.0;
  std::vector<double> weights;  // final eta per chain
  int64_t blocks = 0;
  bool poor_overlap = false;    // open-sector residence below 1e-3
  // Visits of the open sector by the length of the cycle through the open leg, index n - 1.
  std::vector<int64_t> winding_counts;
  MoveStats stats;
};

// sigma(x) from the closed/open two-sector ensemble: the open sector carries
// one leg whose closing link is displaced by x and is weighted by eta / V.
OpenCycleResult open_cycle_estimator(const PimcParams& params, const PairPotential& potential,
                                     std::span<const double> x, const OpenCycleSchedule& schedule);

}  // namespace bosecycles
