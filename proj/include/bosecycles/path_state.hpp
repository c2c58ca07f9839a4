#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bosecycles/geometry.hpp"
#include "bosecycles/potential.hpp"

namespace bosecycles {

struct PimcParams {
  SimulationBox box{3, 1.0};
  double beta = 1.0;
  int particles = 1;
  int slices = 16;  // beads per leg of length beta

  void validate() const;
  double time_step() const { return beta / slices; }
};

// Log weights of links and whole legs entering the sampler's acceptance
// ratios. The continuum sampler uses GaussianPathKernel; other kernels exist
// so that the acceptance logic can be checked on enumerable toy spaces.
class PathKernel {
 public:
  virtual ~PathKernel() = default;
  // One time step with unwrapped displacement dx.
  virtual double log_link(std::span<const double> dx) const = 0;
  // A full leg from `from` to any image of `to`, interior beads integrated out.
  virtual double log_leg(std::span<const double> from, std::span<const double> to) const = 0;
};

class GaussianPathKernel final : public PathKernel {
 public:
  explicit GaussianPathKernel(const PimcParams& params);
  double log_link(std::span<const double> dx) const override;
  double log_leg(std::span<const double> from, std::span<const double> to) const override;

 private:
  SimulationBox box_;
  double beta_;
  double step_;
};

// N legs of M beads. Leg j starts at bead (j, 0), which lies in [0, L)^d, and
// its closing link runs from bead (j, M-1) to bead (pi(j), 0) + shift(j) +
// L * wraps(j). shift is zero except on the open leg of the extended ensemble.
class PathEnsembleState {
 public:
  explicit PathEnsembleState(const PimcParams& params);  // particles on a cubic lattice, pi = id
  PathEnsembleState(const PimcParams& params, std::vector<double> beads, std::vector<int> permutation,
                    std::vector<long> wraps);

  const PimcParams& params() const { return params_; }
  const SimulationBox& box() const { return params_.box; }
  int particles() const { return params_.particles; }
  int slices() const { return params_.slices; }
  int dim() const { return params_.box.dim(); }

  std::span<const double> bead(int j, int s) const {
    return {beads_.data() + (static_cast<size_t>(j) * slices() + s) * dim(), size_t(dim())};
  }
  std::span<const double> leg(int j) const {
    return {beads_.data() + static_cast<size_t>(j) * slices() * dim(), size_t(slices()) * dim()};
  }
  std::span<double> leg_mut(int j) {
    return {beads_.data() + static_cast<size_t>(j) * slices() * dim(), size_t(slices()) * dim()};
  }
  std::span<const long> wraps(int j) const { return {wraps_.data() + size_t(j) * dim(), size_t(dim())}; }
  std::span<long> wraps_mut(int j) { return {wraps_.data() + size_t(j) * dim(), size_t(dim())}; }

  int next(int j) const { return perm_[j]; }
  int prev(int j) const { return inverse_[j]; }
  const std::vector<int>& permutation() const { return perm_; }
  void transpose(int i, int j);

  // Extended ensemble: one leg whose closing link is displaced by `shift`.
  bool open() const { return head_ >= 0; }
  int head() const { return head_; }
  std::span<const double> displacement() const { return displacement_; }
  void set_displacement(std::span<const double> x);
  void set_head(int head);  // -1 closes

  // Bead (pi(j), 0) + shift(j), i.e. the closing link's target before images.
  void target(int j, std::span<double> out) const;
  // Same with the image shift: where the leg actually ends.
  void end_point(int j, std::span<double> out) const;

  double action() const { return action_; }
  void set_action(double s) { action_ = s; }

  // Structural checks: bijective permutation, inverse, finite beads, starts in the box.
  void check_consistency() const;

  const std::vector<double>& raw_beads() const { return beads_; }
  const std::vector<long>& raw_wraps() const { return wraps_; }

 private:
  PimcParams params_;
  std::vector<double> beads_;
  std::vector<int> perm_;
  std::vector<int> inverse_;
  std::vector<long> wraps_;
  std::vector<double> displacement_;
  int head_ = -1;
  double action_ = 0.0;
};

bool operator==(const PathEnsembleState& a, const PathEnsembleState& b);

// sum over slices s and pairs i < j of (beta/M) U(minimum image of x_i(s) - x_j(s)).
double interaction_action(const PathEnsembleState& state, const PairPotential& potential);
// Same total assembled cycle by cycle: beta [sum_cycles U(w) + sum_pairs U(w, w')].
double interaction_action_by_cycles(const PathEnsembleState& state, const PairPotential& potential);

double log_kinetic_weight(const PathEnsembleState& state, const PathKernel& kernel);
// log of the unnormalised target: kinetic - action, plus log(eta / V) in the open sector.
double log_target_weight(const PathEnsembleState& state, const PairPotential& potential,
                         const PathKernel& kernel, double eta);

std::vector<int> measure_cycles(std::span<const int> permutation);  // sorted lengths
std::vector<int> cycle_of(std::span<const int> permutation, int start);

enum class MoveKind { bridge = 0, start = 1, swap = 2, open = 3, close = 4 };
constexpr int kMoveKinds = 5;
const char* move_name(MoveKind kind);

struct LegUpdate {
  int leg = -1;
  std::vector<double> beads;  // M * dim, replaces the whole leg
  std::vector<long> wraps;    // dim
};

struct Proposal {
  MoveKind kind = MoveKind::bridge;
  std::vector<LegUpdate> legs;  // at most two
  int swap_a = -1;              // transposition (swap_a swap_b) applied to pi
  int swap_b = -1;
  int head = -1;                // open: leg that becomes displaced
};

// Change of the interaction action if the listed legs are replaced.
double delta_action(const PathEnsembleState& state, std::span<const LegUpdate> legs,
                    const PairPotential& potential);

// Metropolis log acceptance ratio of a heat-bath proposal; the action change
// is returned through delta_out.
double log_acceptance(const PathEnsembleState& state, const Proposal& proposal,
                      const PairPotential& potential, const PathKernel& kernel, double eta,
                      double* delta_out = nullptr);

// Replaces legs, updates pi and the sector, advances the cached action.
void apply_proposal(PathEnsembleState& state, const Proposal& proposal, double delta_action,
                    const PairPotential& potential);

}  // namespace bosecycles
