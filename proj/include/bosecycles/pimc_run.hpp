#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bosecycles/sampler.hpp"
#include "bosecycles/statistics.hpp"

namespace bosecycles {

struct PimcSchedule {
  int64_t equilibration = 1000;  // sweeps per chain
  int64_t sweeps = 10000;        // measurement sweeps per chain, a multiple of block_size
  int block_size = 100;
  int chains = 1;
  uint64_t seed = 1;
  MoveMix mix;
  bool check_action = false;  // recompute the action after every sweep

  void validate() const;
};

struct PimcDiagnostics {
  MoveStats equilibration;
  MoveStats measurement;
  double max_action_drift = 0.0;
  bool non_ergodic = false;  // swaps never attempted, or accepted below 1e-4 during equilibration
};

// Independent chains, one RNG stream each, run on separate threads. Progress
// is kept per chain so that a run can be checkpointed and resumed at any
// sweep boundary with a bit-identical continuation.
class PimcRun {
 public:
  PimcRun(const PimcParams& params, const PairPotential& potential, const PimcSchedule& schedule);

  // Run up to `sweeps` more sweeps on every chain; returns true once complete.
  bool advance(int64_t sweeps);
  bool complete() const;
  void run() { advance(schedule_.equilibration + schedule_.sweeps); }

  CycleHistogram histogram() const;
  PimcDiagnostics diagnostics() const;
  int64_t sweeps_done() const;  // per chain, equilibration included

  const PimcParams& params() const { return params_; }
  const PairPotential& potential() const { return potential_; }
  const PimcSchedule& schedule() const { return schedule_; }
  const std::vector<PimcChain>& chains() const { return chains_; }

  // Hash of everything that defines the run except the measurement length.
  uint64_t config_hash() const;

  void save_checkpoint(const std::string& path) const;
  // Restore a run saved with the same configuration; the measurement length may differ.
  static PimcRun resume(const std::string& path, const PimcParams& params, const PairPotential& potential,
                        const PimcSchedule& schedule);

 private:
  void run_chain(size_t c, int64_t sweeps);

  PimcParams params_;
  PairPotential potential_;
  PimcSchedule schedule_;
  std::vector<PimcChain> chains_;
  std::vector<CycleHistogram> histograms_;
  std::vector<int64_t> done_;
  std::vector<MoveStats> equil_stats_;
  std::vector<double> drift_;
};

struct PimcResult {
  CycleHistogram histogram;
  PimcDiagnostics diagnostics;
};

PimcResult run_canonical_pimc(const PimcParams& params, const PairPotential& potential,
                              const PimcSchedule& schedule);

// FNV-1a, used for configuration fingerprints.
uint64_t fnv1a(const std::string& text, uint64_t hash = 1469598103934665603ULL);

// Text form of a path state with exact (hexfloat) coordinates.
void save_state(std::ostream& out, const PathEnsembleState& state);
PathEnsembleState load_state(std::istream& in, const PimcParams& params);

}  // namespace bosecycles
