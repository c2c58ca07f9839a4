#include "bosecycles/path_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bosecycles/errors.hpp"
#include "bosecycles/heat_kernel.hpp"

namespace bosecycles {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pair_u(const SimulationBox& box, const PairPotential& u, std::span<const double> a,
              std::span<const double> b) {
  return u.of_squared(box.distance_sq(a, b));
}

}  // namespace

void PimcParams::validate() const {
  if (!box.periodic()) throw ArgumentError("PIMC needs a finite periodic box");
  if (!std::isfinite(beta) || !(beta > 0.0)) throw ArgumentError("beta must be positive and finite");
  if (particles < 1) throw ArgumentError("PIMC needs at least one particle");
  if (slices < 1) throw ArgumentError("PIMC needs at least one slice per leg");
}

GaussianPathKernel::GaussianPathKernel(const PimcParams& params)
    : box_(params.box), beta_(params.beta), step_(params.time_step()) {}

double GaussianPathKernel::log_link(std::span<const double> dx) const {
  double r2 = 0.0;
  for (double v : dx) r2 += v * v;
  return -r2 / (4.0 * step_) - 0.5 * box_.dim() * std::log(4.0 * std::numbers::pi * step_);
}

double GaussianPathKernel::log_leg(std::span<const double> from, std::span<const double> to) const {
  std::vector<double> dx(from.size());
  for (size_t i = 0; i < dx.size(); ++i) dx[i] = to[i] - from[i];
  return log_heat_kernel(beta_, dx, box_);
}

PathEnsembleState::PathEnsembleState(const PimcParams& params) : params_(params) {
  params_.validate();
  const int N = params_.particles, M = params_.slices, d = dim();
  const double L = box().side();
  int per_side = 1;
  while (std::pow(per_side, d) < N) ++per_side;
  const double spacing = L / per_side;
  beads_.assign(static_cast<size_t>(N) * M * d, 0.0);
  for (int j = 0; j < N; ++j) {
    int rest = j;
    for (int i = 0; i < d; ++i) {
      const double x = (rest % per_side + 0.5) * spacing;
      rest /= per_side;
      for (int s = 0; s < M; ++s) beads_[(static_cast<size_t>(j) * M + s) * d + i] = x;
    }
  }
  perm_.resize(N);
  inverse_.resize(N);
  for (int j = 0; j < N; ++j) perm_[j] = inverse_[j] = j;
  wraps_.assign(static_cast<size_t>(N) * d, 0);
  displacement_.assign(d, 0.0);
}

PathEnsembleState::PathEnsembleState(const PimcParams& params, std::vector<double> beads,
                                     std::vector<int> permutation, std::vector<long> wraps)
    : params_(params), beads_(std::move(beads)), perm_(std::move(permutation)), wraps_(std::move(wraps)) {
  params_.validate();
  const size_t N = params_.particles, M = params_.slices, d = dim();
  if (beads_.size() != N * M * d) throw ArgumentError("bead array has the wrong size");
  if (perm_.size() != N) throw ArgumentError("permutation has the wrong size");
  if (wraps_.size() != N * d) throw ArgumentError("wrap array has the wrong size");
  inverse_.assign(N, -1);
  for (size_t j = 0; j < N; ++j) {
    if (perm_[j] < 0 || perm_[j] >= static_cast<int>(N) || inverse_[perm_[j]] != -1)
      throw ArgumentError("permutation is not a bijection");
    inverse_[perm_[j]] = static_cast<int>(j);
  }
  displacement_.assign(d, 0.0);
  check_consistency();
}

void PathEnsembleState::transpose(int i, int j) {
  std::swap(perm_[i], perm_[j]);
  inverse_[perm_[i]] = i;
  inverse_[perm_[j]] = j;
}

void PathEnsembleState::set_displacement(std::span<const double> x) {
  box().check_point(x);
  displacement_.assign(x.begin(), x.end());
}

void PathEnsembleState::set_head(int head) {
  if (head < -1 || head >= particles()) throw ArgumentError("open leg index out of range");
  head_ = head;
}

void PathEnsembleState::target(int j, std::span<double> out) const {
  const auto start = bead(perm_[j], 0);
  for (int i = 0; i < dim(); ++i) out[i] = start[i] + (j == head_ ? displacement_[i] : 0.0);
}

void PathEnsembleState::end_point(int j, std::span<double> out) const {
  target(j, out);
  const auto w = wraps(j);
  for (int i = 0; i < dim(); ++i) out[i] += box().side() * static_cast<double>(w[i]);
}

void PathEnsembleState::check_consistency() const {
  const int N = particles();
  std::vector<int> seen(N, 0);
  for (int j = 0; j < N; ++j) {
    if (perm_[j] < 0 || perm_[j] >= N || seen[perm_[j]]++)
      throw ContractError("permutation is not a bijection");
    if (inverse_[perm_[j]] != j) throw ContractError("inverse permutation out of sync");
  }
  for (double v : beads_)
    if (!std::isfinite(v)) throw ContractError("non-finite bead coordinate");
  const double L = box().side();
  for (int j = 0; j < N; ++j)
    for (double v : bead(j, 0))
      if (v < 0.0 || v >= L) throw ContractError("leg " + std::to_string(j) + " starts outside the box");
  if (head_ >= N) throw ContractError("open leg index out of range");
}

bool operator==(const PathEnsembleState& a, const PathEnsembleState& b) {
  return a.params().box == b.params().box && a.params().beta == b.params().beta &&
         a.particles() == b.particles() && a.slices() == b.slices() &&
         a.raw_beads() == b.raw_beads() && a.permutation() == b.permutation() &&
         a.raw_wraps() == b.raw_wraps() && a.head() == b.head() &&
         std::equal(a.displacement().begin(), a.displacement().end(), b.displacement().begin()) &&
         (a.action() == b.action() || (std::isnan(a.action()) && std::isnan(b.action())));
}

double interaction_action(const PathEnsembleState& state, const PairPotential& potential) {
  if (potential.is_zero()) return 0.0;
  const int N = state.particles(), M = state.slices();
  const SimulationBox& box = state.box();
  double total = 0.0;
  for (int s = 0; s < M; ++s) {
    double slice = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) slice += pair_u(box, potential, state.bead(i, s), state.bead(j, s));
    total += slice;
  }
  return state.params().time_step() * total;
}

double interaction_action_by_cycles(const PathEnsembleState& state, const PairPotential& potential) {
  if (potential.is_zero()) return 0.0;
  const int M = state.slices();
  const SimulationBox& box = state.box();
  std::vector<std::vector<int>> cycles;
  std::vector<char> seen(state.particles(), 0);
  for (int j = 0; j < state.particles(); ++j) {
    if (seen[j]) continue;
    cycles.push_back(cycle_of(state.permutation(), j));
    for (int k : cycles.back()) seen[k] = 1;
  }
  // U(w) of one cycle: legs a < b of the same trajectory at equal time mod beta
  auto self = [&](const std::vector<int>& c) {
    double u = 0.0;
    for (size_t a = 0; a < c.size(); ++a)
      for (size_t b = a + 1; b < c.size(); ++b)
        for (int s = 0; s < M; ++s) u += pair_u(box, potential, state.bead(c[a], s), state.bead(c[b], s));
    return u / M;
  };
  auto mutual = [&](const std::vector<int>& c, const std::vector<int>& e) {
    double u = 0.0;
    for (int a : c)
      for (int b : e)
        for (int s = 0; s < M; ++s) u += pair_u(box, potential, state.bead(a, s), state.bead(b, s));
    return u / M;
  };
  double total = 0.0;
  for (size_t c = 0; c < cycles.size(); ++c) {
    total += self(cycles[c]);
    for (size_t e = c + 1; e < cycles.size(); ++e) total += mutual(cycles[c], cycles[e]);
  }
  return state.params().beta * total;
}

double log_kinetic_weight(const PathEnsembleState& state, const PathKernel& kernel) {
  const int N = state.particles(), M = state.slices(), d = state.dim();
  std::vector<double> dx(d), end(d);
  double w = 0.0;
  for (int j = 0; j < N; ++j) {
    for (int s = 0; s + 1 < M; ++s) {
      for (int i = 0; i < d; ++i) dx[i] = state.bead(j, s + 1)[i] - state.bead(j, s)[i];
      w += kernel.log_link(dx);
    }
    state.end_point(j, end);
    for (int i = 0; i < d; ++i) dx[i] = end[i] - state.bead(j, M - 1)[i];
    w += kernel.log_link(dx);
  }
  return w;
}

double log_target_weight(const PathEnsembleState& state, const PairPotential& potential,
                         const PathKernel& kernel, double eta) {
  const double s = interaction_action(state, potential);
  if (s == kInf) return -kInf;
  double w = log_kinetic_weight(state, kernel) - s;
  if (state.open()) w += std::log(eta / state.box().volume());
  return w;
}

std::vector<int> cycle_of(std::span<const int> permutation, int start) {
  std::vector<int> c{start};
  for (int k = permutation[start]; k != start; k = permutation[k]) {
    c.push_back(k);
    if (c.size() > permutation.size()) throw ContractError("permutation does not close into a cycle");
  }
  return c;
}

std::vector<int> measure_cycles(std::span<const int> permutation) {
  std::vector<int> lengths;
  std::vector<char> seen(permutation.size(), 0);
  for (size_t j = 0; j < permutation.size(); ++j) {
    if (seen[j]) continue;
    int len = 0;
    for (size_t k = j; !seen[k]; k = static_cast<size_t>(permutation[k])) {
      seen[k] = 1;
      ++len;
    }
    lengths.push_back(len);
  }
  std::sort(lengths.begin(), lengths.end());
  return lengths;
}

const char* move_name(MoveKind kind) {
  switch (kind) {
    case MoveKind::bridge: return "bridge";
    case MoveKind::start: return "start";
    case MoveKind::swap: return "swap";
    case MoveKind::open: return "open";
    case MoveKind::close: return "close";
  }
  return "unknown";
}

double delta_action(const PathEnsembleState& state, std::span<const LegUpdate> legs,
                    const PairPotential& potential) {
  if (potential.is_zero() || legs.empty()) return 0.0;
  const int N = state.particles(), M = state.slices(), d = state.dim();
  const SimulationBox& box = state.box();
  const int a = legs[0].leg;
  const int b = legs.size() > 1 ? legs[1].leg : -1;
  double diff = 0.0;
  bool old_infinite = false;
  for (int s = 0; s < M; ++s) {
    bool changed = false;
    for (const auto& u : legs)
      changed = changed || !std::equal(u.beads.begin() + s * d, u.beads.begin() + (s + 1) * d,
                                       state.bead(u.leg, s).begin());
    if (!changed) continue;
    for (const auto& u : legs) {
      const std::span<const double> nb(u.beads.data() + static_cast<size_t>(s) * d, size_t(d));
      const auto ob = state.bead(u.leg, s);
      for (int k = 0; k < N; ++k) {
        if (k == a || k == b) continue;
        const double un = pair_u(box, potential, nb, state.bead(k, s));
        if (un == kInf) return kInf;
        const double uo = pair_u(box, potential, ob, state.bead(k, s));
        if (uo == kInf) {
          old_infinite = true;
          continue;
        }
        diff += un - uo;
      }
    }
    if (b >= 0) {
      const std::span<const double> na(legs[0].beads.data() + static_cast<size_t>(s) * d, size_t(d));
      const std::span<const double> nb(legs[1].beads.data() + static_cast<size_t>(s) * d, size_t(d));
      const double un = pair_u(box, potential, na, nb);
      if (un == kInf) return kInf;
      const double uo = pair_u(box, potential, state.bead(a, s), state.bead(b, s));
      if (uo == kInf)
        old_infinite = true;
      else
        diff += un - uo;
    }
  }
  if (old_infinite) return -kInf;
  return state.params().time_step() * diff;
}

double log_acceptance(const PathEnsembleState& state, const Proposal& proposal,
                      const PairPotential& potential, const PathKernel& kernel, double eta,
                      double* delta_out) {
  if (proposal.legs.size() > 2) throw ArgumentError("a proposal updates at most two legs");
  const int d = state.dim();
  const size_t leg_size = static_cast<size_t>(state.slices()) * d;
  for (const auto& u : proposal.legs) {
    if (u.leg < 0 || u.leg >= state.particles()) throw ArgumentError("proposal leg out of range");
    if (u.beads.size() != leg_size || u.wraps.size() != static_cast<size_t>(d))
      throw ArgumentError("proposal leg has the wrong size");
  }
  if (proposal.legs.size() == 2 && proposal.legs[0].leg == proposal.legs[1].leg)
    throw ArgumentError("proposal updates the same leg twice");

  const double ds = delta_action(state, proposal.legs, potential);
  if (delta_out) *delta_out = ds;
  if (ds == kInf) return -kInf;

  double kin = 0.0;
  std::vector<double> t_old(d), t_new(d);
  switch (proposal.kind) {
    case MoveKind::bridge:
    case MoveKind::start:
      break;
    case MoveKind::swap: {
      const int i = proposal.swap_a, j = proposal.swap_b;
      if (i < 0 || j < 0 || i == j || i >= state.particles() || j >= state.particles())
        throw ArgumentError("swap needs two distinct legs");
      auto shifted = [&](int leg, int dest, std::span<double> out) {
        const auto s0 = state.bead(dest, 0);
        for (int k = 0; k < d; ++k) out[k] = s0[k] + (leg == state.head() ? state.displacement()[k] : 0.0);
      };
      std::vector<double> ti_new(d), tj_new(d), ti_old(d), tj_old(d);
      shifted(i, state.next(j), ti_new);
      shifted(j, state.next(i), tj_new);
      state.target(i, ti_old);
      state.target(j, tj_old);
      kin = kernel.log_leg(state.bead(i, 0), ti_new) + kernel.log_leg(state.bead(j, 0), tj_new) -
            kernel.log_leg(state.bead(i, 0), ti_old) - kernel.log_leg(state.bead(j, 0), tj_old);
      break;
    }
    case MoveKind::open: {
      if (state.open()) throw ArgumentError("open move from the open sector");
      const int h = proposal.head;
      if (h < 0 || h >= state.particles()) throw ArgumentError("open move needs a head leg");
      state.target(h, t_old);
      for (int k = 0; k < d; ++k) t_new[k] = t_old[k] + state.displacement()[k];
      kin = std::log(eta * state.particles() / state.box().volume()) +
            kernel.log_leg(state.bead(h, 0), t_new) - kernel.log_leg(state.bead(h, 0), t_old);
      break;
    }
    case MoveKind::close: {
      if (!state.open()) throw ArgumentError("close move from the closed sector");
      const int h = state.head();
      state.target(h, t_old);
      for (int k = 0; k < d; ++k) t_new[k] = t_old[k] - state.displacement()[k];
      kin = -std::log(eta * state.particles() / state.box().volume()) +
            kernel.log_leg(state.bead(h, 0), t_new) - kernel.log_leg(state.bead(h, 0), t_old);
      break;
    }
  }
  return kin - ds;
}

void apply_proposal(PathEnsembleState& state, const Proposal& proposal, double delta,
                    const PairPotential& potential) {
  for (const auto& u : proposal.legs) {
    std::copy(u.beads.begin(), u.beads.end(), state.leg_mut(u.leg).begin());
    std::copy(u.wraps.begin(), u.wraps.end(), state.wraps_mut(u.leg).begin());
  }
  if (proposal.kind == MoveKind::swap) state.transpose(proposal.swap_a, proposal.swap_b);
  if (proposal.kind == MoveKind::open) state.set_head(proposal.head);
  if (proposal.kind == MoveKind::close) state.set_head(-1);
  if (std::isfinite(delta) && std::isfinite(state.action()))
    state.set_action(state.action() + delta);
  else
    state.set_action(interaction_action(state, potential));
}

}  // namespace bosecycles
