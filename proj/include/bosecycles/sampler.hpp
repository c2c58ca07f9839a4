#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>

#include "bosecycles/path_state.hpp"
#include "bosecycles/rng.hpp"

namespace bosecycles {

// Attempts per particle per sweep of each move type.
struct MoveMix {
  double bridge = 1.0;  // resample the interior of one leg
  double start = 1.0;   // resample a leg start together with both adjacent legs
  double swap = 1.0;    // transposition of two closing links
};

struct MoveStats {
  std::array<int64_t, kMoveKinds> attempted{};
  std::array<int64_t, kMoveKinds> accepted{};

  double rate(MoveKind kind) const;
  MoveStats& operator+=(const MoveStats& other);
  void save(std::ostream& out) const;
  void load(std::istream& in);
};

class PimcChain {
 public:
  PimcChain(const PimcParams& params, const PairPotential& potential, const MoveMix& mix, Rng rng);
  PimcChain(PathEnsembleState state, const PairPotential& potential, const MoveMix& mix, Rng rng);

  void sweep();

  bool bridge_move(int leg);
  bool start_move(int leg);
  bool swap_move(int i, int j);
  bool open_move(int head);
  bool close_move();
  // Toggle the sector once (open when closed, close when open).
  bool sector_move();

  // Extended-ensemble setup; eta weights the open sector.
  void set_displacement(std::span<const double> x);
  void set_sector_weight(double eta) { eta_ = eta; }
  double sector_weight() const { return eta_; }

  // Verify the cached action and the stitching after every accepted move.
  void set_paranoid(bool on) { paranoid_ = on; }
  // Largest |cached - recomputed| / max(1, |recomputed|) seen by check_action.
  double check_action();

  const PathEnsembleState& state() const { return state_; }
  PathEnsembleState& mutable_state() { return state_; }
  const PairPotential& potential() const { return potential_; }
  const MoveMix& mix() const { return mix_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }
  MoveStats& stats() { return stats_; }
  const MoveStats& stats() const { return stats_; }

 private:
  bool attempt(Proposal& proposal);
  int attempts(double per_particle);
  void sample_leg(int leg, std::span<const double> to, LegUpdate& out);

  PathEnsembleState state_;
  PairPotential potential_;
  MoveMix mix_;
  Rng rng_;
  GaussianPathKernel kernel_;
  MoveStats stats_;
  double eta_ = 1.0;
  bool paranoid_ = false;
  std::vector<double> scratch_;
};

}  // namespace bosecycles
