#include "bosecycles/open_cycle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "bosecycles/errors.hpp"

namespace bosecycles {

namespace {

struct SectorBlock {
  int64_t open = 0;
  int64_t closed = 0;
  double eta = 1.0;
};

struct ChainOutput {
  std::vector<SectorBlock> blocks;
  std::vector<int64_t> winding;
  MoveStats stats;
  double eta = 1.0;
};

void run_open_chain(const PimcParams& params, const PairPotential& potential, std::span<const double> x,
                    const OpenCycleSchedule& schedule, int index, ChainOutput& out) {
  const PimcSchedule& base = schedule.base;
  PimcChain chain(params, potential, base.mix, Rng::stream(base.seed, static_cast<uint64_t>(index)));
  chain.set_displacement(x);
  const double rho = params.particles / params.box.volume();
  double eta = schedule.initial_weight > 0.0 ? schedule.initial_weight : 1.0 / rho;
  chain.set_sector_weight(eta);

  // tune eta towards equal residence in both sectors, then freeze it
  const int64_t window = std::max<int64_t>(1, base.equilibration / 20);
  int64_t wo = 0, wc = 0;
  for (int64_t s = 1; s <= base.equilibration; ++s) {
    chain.sweep();
    for (int k = 0; k < schedule.sector_moves; ++k) {
      chain.sector_move();
      (chain.state().open() ? wo : wc) += 1;
    }
    if (s % window == 0 && s < base.equilibration) {
      const double factor = wo == 0 ? 10.0 : wc == 0 ? 0.1 : static_cast<double>(wc) / static_cast<double>(wo);
      eta *= std::clamp(factor, 0.1, 10.0);
      chain.set_sector_weight(eta);
      wo = wc = 0;
    }
  }
  out.eta = eta;
  chain.stats() = MoveStats{};
  out.winding.assign(params.particles, 0);

  SectorBlock block;
  block.eta = eta;
  for (int64_t s = 1; s <= base.sweeps; ++s) {
    chain.sweep();
    for (int k = 0; k < schedule.sector_moves; ++k) {
      chain.sector_move();
      if (chain.state().open()) {
        ++block.open;
        const auto cycle = cycle_of(chain.state().permutation(), chain.state().head());
        ++out.winding[cycle.size() - 1];
      } else {
        ++block.closed;
      }
    }
    if (base.check_action && chain.check_action() > 1e-9)
      throw ContractError("cached action drifted from the recomputed action");
    if (s % base.block_size == 0) {
      out.blocks.push_back(block);
      block = SectorBlock{};
      block.eta = eta;
    }
  }
  out.stats = chain.stats();
}

double ratio(const std::vector<SectorBlock>& blocks, size_t skip) {
  double num = 0.0, den = 0.0;
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (b == skip) continue;
    num += static_cast<double>(blocks[b].open) / blocks[b].eta;
    den += static_cast<double>(blocks[b].closed);
  }
  return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
}

}  // namespace

OpenCycleResult open_cycle_estimator(const PimcParams& params, const PairPotential& potential,
                                     std::span<const double> x, const OpenCycleSchedule& schedule) {
  params.validate();
  schedule.base.validate();
  if (static_cast<int>(x.size()) != params.box.dim()) throw ArgumentError("point has the wrong dimension");
  params.box.check_point(x);
  if (schedule.sector_moves < 1) throw ArgumentError("need at least one sector move per sweep");
  if (!(schedule.initial_weight >= 0.0) || !std::isfinite(schedule.initial_weight))
    throw ArgumentError("initial sector weight must be finite and >= 0");

  const int C = schedule.base.chains;
  std::vector<ChainOutput> outputs(C);
  std::vector<std::exception_ptr> errors(C);
  auto work = [&](int c) {
    try {
      run_open_chain(params, potential, x, schedule, c, outputs[c]);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  if (C == 1) {
    work(0);
  } else {
    std::vector<std::thread> workers;
    for (int c = 0; c < C; ++c) workers.emplace_back(work, c);
    for (auto& t : workers) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  OpenCycleResult result;
  std::vector<SectorBlock> blocks;
  result.winding_counts.assign(params.particles, 0);
  int64_t open = 0, total = 0;
  for (const auto& o : outputs) {
    blocks.insert(blocks.end(), o.blocks.begin(), o.blocks.end());
    for (size_t n = 0; n < o.winding.size(); ++n) result.winding_counts[n] += o.winding[n];
    result.weights.push_back(o.eta);
    result.stats += o.stats;
    for (const auto& b : o.blocks) {
      open += b.open;
      total += b.open + b.closed;
    }
  }
  result.blocks = static_cast<int64_t>(blocks.size());
  result.open_fraction = total ? static_cast<double>(open) / static_cast<double>(total) : 0.0;
  result.poor_overlap = result.open_fraction < 1e-3;
  result.sigma = ratio(blocks, blocks.size());

  // delete-one jackknife over blocks
  const size_t B = blocks.size();
  if (B >= 2) {
    std::vector<double> loo(B);
    double mean = 0.0;
    for (size_t b = 0; b < B; ++b) {
      loo[b] = ratio(blocks, b);
      mean += loo[b];
    }
    mean /= static_cast<double>(B);
    double ss = 0.0;
    for (double v : loo) ss += (v - mean) * (v - mean);
    result.standard_error = std::sqrt(ss * static_cast<double>(B - 1) / static_cast<double>(B));
  } else {
    result.standard_error = std::numeric_limits<double>::infinity();
  }
  return result;
}

}  // namespace bosecycles
