#include "bosecycles/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "bosecycles/errors.hpp"
#include "bosecycles/heat_kernel.hpp"

namespace bosecycles {

double MoveStats::rate(MoveKind kind) const {
  const auto k = static_cast<size_t>(kind);
  return attempted[k] ? static_cast<double>(accepted[k]) / static_cast<double>(attempted[k]) : 0.0;
}

MoveStats& MoveStats::operator+=(const MoveStats& other) {
  for (int k = 0; k < kMoveKinds; ++k) {
    attempted[k] += other.attempted[k];
    accepted[k] += other.accepted[k];
  }
  return *this;
}

void MoveStats::save(std::ostream& out) const {
  for (int k = 0; k < kMoveKinds; ++k) out << attempted[k] << ' ' << accepted[k] << ' ';
  out << '\n';
}

void MoveStats::load(std::istream& in) {
  for (int k = 0; k < kMoveKinds; ++k) in >> attempted[k] >> accepted[k];
  if (!in) throw IoError("malformed move statistics");
}

namespace {

void check_mix(const MoveMix& mix) {
  for (double v : {mix.bridge, mix.start, mix.swap})
    if (!std::isfinite(v) || v < 0.0) throw ArgumentError("move mix entries must be finite and >= 0");
}

PathEnsembleState with_action(PathEnsembleState state, const PairPotential& potential) {
  state.set_action(interaction_action(state, potential));
  if (!std::isfinite(state.action()))
    throw ArgumentError("initial configuration has infinite interaction action");
  return state;
}

}  // namespace

PimcChain::PimcChain(const PimcParams& params, const PairPotential& potential, const MoveMix& mix,
                     Rng rng)
    : PimcChain(PathEnsembleState(params), potential, mix, std::move(rng)) {}

PimcChain::PimcChain(PathEnsembleState state, const PairPotential& potential, const MoveMix& mix,
                     Rng rng)
    : state_(with_action(std::move(state), potential)),
      potential_(potential),
      mix_(mix),
      rng_(std::move(rng)),
      kernel_(state_.params()) {
  check_mix(mix_);
  scratch_.resize(static_cast<size_t>(2 * state_.slices() + 1) * state_.dim());
}

int PimcChain::attempts(double per_particle) {
  const double x = per_particle * state_.particles();
  const double whole = std::floor(x);
  int n = static_cast<int>(whole);
  if (x > whole && rng_.uniform() < x - whole) ++n;
  return n;
}

void PimcChain::sweep() {
  const int N = state_.particles();
  const int nb = attempts(mix_.bridge);
  for (int k = 0; k < nb; ++k) bridge_move(static_cast<int>(rng_.below(N)));
  const int ns = attempts(mix_.start);
  for (int k = 0; k < ns; ++k) start_move(static_cast<int>(rng_.below(N)));
  if (N < 2) return;
  const int nw = attempts(mix_.swap);
  for (int k = 0; k < nw; ++k) {
    const int i = static_cast<int>(rng_.below(N));
    int j = static_cast<int>(rng_.below(N - 1));
    if (j >= i) ++j;
    swap_move(i, j);
  }
}

void PimcChain::sample_leg(int leg, std::span<const double> to, LegUpdate& out) {
  const int M = state_.slices(), d = state_.dim();
  out.leg = leg;
  out.wraps.assign(d, 0);
  std::span<double> buf(scratch_.data(), static_cast<size_t>(M + 1) * d);
  sample_bridge_into(state_.params().beta, state_.bead(leg, 0), to, M, state_.box(), rng_, buf, out.wraps);
  out.beads.assign(buf.begin(), buf.begin() + static_cast<long>(M) * d);
}

bool PimcChain::attempt(Proposal& proposal) {
  double ds = 0.0;
  const double la = log_acceptance(state_, proposal, potential_, kernel_, eta_, &ds);
  const auto k = static_cast<size_t>(proposal.kind);
  ++stats_.attempted[k];
  const bool accept = la >= 0.0 || (la > -std::numeric_limits<double>::infinity() && rng_.uniform() < std::exp(la));
  if (!accept) return false;
  apply_proposal(state_, proposal, ds, potential_);
  ++stats_.accepted[k];
  if (paranoid_) {
    state_.check_consistency();
    if (check_action() > 1e-9) throw ContractError("cached action drifted from the recomputed action");
  }
  return true;
}

bool PimcChain::bridge_move(int leg) {
  const int d = state_.dim();
  std::vector<double> to(d);
  state_.target(leg, to);
  Proposal p;
  p.kind = MoveKind::bridge;
  p.legs.resize(1);
  sample_leg(leg, to, p.legs[0]);
  return attempt(p);
}

bool PimcChain::start_move(int j) {
  const int M = state_.slices(), d = state_.dim();
  const SimulationBox& box = state_.box();
  const double L = box.side();
  Proposal p;
  p.kind = MoveKind::start;
  const int prev = state_.prev(j);
  if (prev == j) {
    // a one-cycle's weight does not depend on where it sits: uniform start
    std::vector<double> x0(d), to(d);
    for (int i = 0; i < d; ++i) {
      x0[i] = L * rng_.uniform();
      to[i] = x0[i] + (state_.head() == j ? state_.displacement()[i] : 0.0);
    }
    LegUpdate u;
    u.leg = j;
    u.wraps.assign(d, 0);
    std::span<double> buf(scratch_.data(), static_cast<size_t>(M + 1) * d);
    sample_bridge_into(state_.params().beta, x0, to, M, box, rng_, buf, u.wraps);
    u.beads.assign(buf.begin(), buf.begin() + static_cast<long>(M) * d);
    p.legs.push_back(std::move(u));
    return attempt(p);
  }
  // two-leg bridge from the start of prev to the target of j, in prev's frame
  std::vector<double> shift_prev(d, 0.0), to(d);
  if (state_.head() == prev) shift_prev.assign(state_.displacement().begin(), state_.displacement().end());
  state_.target(j, to);
  for (int i = 0; i < d; ++i) to[i] += shift_prev[i];
  std::vector<long> total_wrap(d);
  std::span<double> buf(scratch_.data(), static_cast<size_t>(2 * M + 1) * d);
  sample_bridge_into(2.0 * state_.params().beta, state_.bead(prev, 0), to, 2 * M, box, rng_, buf,
                     total_wrap);
  LegUpdate up, uj;
  up.leg = prev;
  uj.leg = j;
  up.wraps.assign(d, 0);
  uj.wraps.assign(d, 0);
  up.beads.assign(buf.begin(), buf.begin() + static_cast<long>(M) * d);
  uj.beads.resize(static_cast<size_t>(M) * d);
  for (int i = 0; i < d; ++i) {
    // the midpoint becomes the new start of j, folded into [0, L)
    double v = buf[static_cast<size_t>(M) * d + i] - shift_prev[i];
    const long w = box.wrap(v);
    up.wraps[i] = w;
    uj.wraps[i] = total_wrap[i] - w;
    const double offset = shift_prev[i] + L * static_cast<double>(w);
    uj.beads[i] = v;
    for (int s = 1; s < M; ++s)
      uj.beads[static_cast<size_t>(s) * d + i] = buf[static_cast<size_t>(M + s) * d + i] - offset;
  }
  p.legs.push_back(std::move(up));
  p.legs.push_back(std::move(uj));
  return attempt(p);
}

bool PimcChain::swap_move(int i, int j) {
  if (i == j) throw ArgumentError("swap needs two distinct legs");
  const int d = state_.dim();
  std::vector<double> ti(d), tj(d);
  const auto si = state_.bead(state_.next(j), 0);
  const auto sj = state_.bead(state_.next(i), 0);
  for (int k = 0; k < d; ++k) {
    ti[k] = si[k] + (state_.head() == i ? state_.displacement()[k] : 0.0);
    tj[k] = sj[k] + (state_.head() == j ? state_.displacement()[k] : 0.0);
  }
  Proposal p;
  p.kind = MoveKind::swap;
  p.swap_a = i;
  p.swap_b = j;
  p.legs.resize(2);
  sample_leg(i, ti, p.legs[0]);
  sample_leg(j, tj, p.legs[1]);
  return attempt(p);
}

bool PimcChain::open_move(int head) {
  if (state_.open()) throw ArgumentError("chain is already in the open sector");
  const int d = state_.dim();
  std::vector<double> to(d);
  state_.target(head, to);
  for (int k = 0; k < d; ++k) to[k] += state_.displacement()[k];
  Proposal p;
  p.kind = MoveKind::open;
  p.head = head;
  p.legs.resize(1);
  sample_leg(head, to, p.legs[0]);
  return attempt(p);
}

bool PimcChain::close_move() {
  if (!state_.open()) throw ArgumentError("chain is already in the closed sector");
  const int d = state_.dim();
  const int h = state_.head();
  std::vector<double> to(d);
  state_.target(h, to);
  for (int k = 0; k < d; ++k) to[k] -= state_.displacement()[k];
  Proposal p;
  p.kind = MoveKind::close;
  p.legs.resize(1);
  sample_leg(h, to, p.legs[0]);
  return attempt(p);
}

bool PimcChain::sector_move() {
  if (state_.open()) return close_move();
  return open_move(static_cast<int>(rng_.below(state_.particles())));
}

void PimcChain::set_displacement(std::span<const double> x) {
  if (state_.open()) throw ArgumentError("displacement can only change in the closed sector");
  state_.set_displacement(x);
}

double PimcChain::check_action() {
  const double fresh = interaction_action(state_, potential_);
  const double cached = state_.action();
  if (fresh == cached) return 0.0;
  if (!std::isfinite(fresh) || !std::isfinite(cached)) return std::numeric_limits<double>::infinity();
  return std::abs(fresh - cached) / std::max(1.0, std::abs(fresh));
}

}  // namespace bosecycles
