#include "bosecycles/pimc_run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "bosecycles/errors.hpp"

namespace bosecycles {

namespace {

constexpr const char* kCheckpointTag = "bosecycles-checkpoint";
constexpr int kCheckpointVersion = 1;

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double read_hex(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw IoError("unexpected end of checkpoint");
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') throw IoError("bad number in checkpoint: " + tok);
  return v;
}

void expect(std::istream& in, const std::string& word) {
  std::string tok;
  if (!(in >> tok) || tok != word) throw IoError("checkpoint: expected '" + word + "'");
}

}  // namespace

uint64_t fnv1a(const std::string& text, uint64_t hash) {
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  return hash;
}

void PimcSchedule::validate() const {
  if (equilibration < 1) throw ArgumentError("equilibration sweeps must be > 0");
  if (sweeps < 1) throw ArgumentError("measurement sweeps must be > 0");
  if (block_size < 1) throw ArgumentError("block size must be >= 1");
  if (sweeps % block_size != 0) throw ArgumentError("measurement sweeps must be a multiple of the block size");
  if (chains < 1) throw ArgumentError("need at least one chain");
  for (double v : {mix.bridge, mix.start, mix.swap})
    if (!std::isfinite(v) || v < 0.0) throw ArgumentError("move mix entries must be finite and >= 0");
}

PimcRun::PimcRun(const PimcParams& params, const PairPotential& potential, const PimcSchedule& schedule)
    : params_(params), potential_(potential), schedule_(schedule) {
  params_.validate();
  schedule_.validate();
  for (int c = 0; c < schedule_.chains; ++c) {
    chains_.emplace_back(params_, potential_, schedule_.mix, Rng::stream(schedule_.seed, c));
    histograms_.emplace_back(params_.particles, params_.box.volume(), schedule_.block_size);
  }
  done_.assign(schedule_.chains, 0);
  equil_stats_.assign(schedule_.chains, MoveStats{});
  drift_.assign(schedule_.chains, 0.0);
}

void PimcRun::run_chain(size_t c, int64_t sweeps) {
  PimcChain& chain = chains_[c];
  const int64_t total = schedule_.equilibration + schedule_.sweeps;
  for (int64_t k = 0; k < sweeps && done_[c] < total; ++k) {
    chain.sweep();
    if (schedule_.check_action) {
      const double drift = chain.check_action();
      drift_[c] = std::max(drift_[c], drift);
      if (drift > 1e-9) throw ContractError("cached action drifted from the recomputed action");
    }
    ++done_[c];
    if (done_[c] == schedule_.equilibration) {
      equil_stats_[c] = chain.stats();
      chain.stats() = MoveStats{};
    } else if (done_[c] > schedule_.equilibration) {
      const auto lengths = measure_cycles(chain.state().permutation());
      histograms_[c].record(lengths);
    }
  }
}

bool PimcRun::advance(int64_t sweeps) {
  if (sweeps < 0) throw ArgumentError("sweep count must be >= 0");
  if (chains_.size() == 1) {
    run_chain(0, sweeps);
    return complete();
  }
  std::vector<std::exception_ptr> errors(chains_.size());
  std::vector<std::thread> workers;
  for (size_t c = 0; c < chains_.size(); ++c)
    workers.emplace_back([this, c, sweeps, &errors] {
      try {
        run_chain(c, sweeps);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return complete();
}

bool PimcRun::complete() const {
  const int64_t total = schedule_.equilibration + schedule_.sweeps;
  return std::all_of(done_.begin(), done_.end(), [&](int64_t d) { return d >= total; });
}

int64_t PimcRun::sweeps_done() const { return *std::min_element(done_.begin(), done_.end()); }

CycleHistogram PimcRun::histogram() const {
  CycleHistogram merged(params_.particles, params_.box.volume(), schedule_.block_size);
  for (const auto& h : histograms_) merged.merge(h);
  return merged;
}

PimcDiagnostics PimcRun::diagnostics() const {
  PimcDiagnostics d;
  for (size_t c = 0; c < chains_.size(); ++c) {
    if (done_[c] >= schedule_.equilibration) {
      d.equilibration += equil_stats_[c];
      d.measurement += chains_[c].stats();
    } else {
      d.equilibration += chains_[c].stats();
    }
    d.max_action_drift = std::max(d.max_action_drift, drift_[c]);
  }
  const auto swap = static_cast<size_t>(MoveKind::swap);
  // no swaps attempted means the permutation is frozen, which is worse than slow
  d.non_ergodic = params_.particles > 1 &&
                  (d.equilibration.attempted[swap] == 0 || d.equilibration.rate(MoveKind::swap) < 1e-4);
  return d;
}

uint64_t PimcRun::config_hash() const {
  std::ostringstream os;
  os << "d=" << params_.box.dim() << " L=" << hex(params_.box.side()) << " beta=" << hex(params_.beta)
     << " N=" << params_.particles << " M=" << params_.slices << " U=" << kind_name(potential_.kind())
     << ' ' << hex(potential_.strength()) << ' ' << hex(potential_.range());
  for (double r : potential_.grid_r()) os << ' ' << hex(r);
  for (double u : potential_.grid_u()) os << ' ' << hex(u);
  os << " equil=" << schedule_.equilibration << " block=" << schedule_.block_size
     << " chains=" << schedule_.chains << " seed=" << schedule_.seed << " mix=" << hex(schedule_.mix.bridge)
     << ',' << hex(schedule_.mix.start) << ',' << hex(schedule_.mix.swap)
     << " check=" << schedule_.check_action;
  return fnv1a(os.str());
}

void save_state(std::ostream& out, const PathEnsembleState& state) {
  const int N = state.particles(), d = state.dim();
  out << "state " << N << ' ' << state.slices() << ' ' << d << ' ' << state.head() << ' '
      << hex(state.action()) << '\n';
  for (double v : state.displacement()) out << hex(v) << ' ';
  out << '\n';
  for (int p : state.permutation()) out << p << ' ';
  out << '\n';
  for (long w : state.raw_wraps()) out << w << ' ';
  out << '\n';
  for (double v : state.raw_beads()) out << hex(v) << '\n';
}

PathEnsembleState load_state(std::istream& in, const PimcParams& params) {
  expect(in, "state");
  int N = 0, M = 0, d = 0, head = -1;
  in >> N >> M >> d >> head;
  if (!in || N != params.particles || M != params.slices || d != params.box.dim())
    throw IoError("checkpoint state does not match the configuration");
  const double action = read_hex(in);
  std::vector<double> disp(d);
  for (auto& v : disp) v = read_hex(in);
  std::vector<int> perm(N);
  for (auto& p : perm) in >> p;
  std::vector<long> wraps(static_cast<size_t>(N) * d);
  for (auto& w : wraps) in >> w;
  if (!in) throw IoError("truncated checkpoint state");
  std::vector<double> beads(static_cast<size_t>(N) * M * d);
  for (auto& v : beads) v = read_hex(in);
  PathEnsembleState state(params, std::move(beads), std::move(perm), std::move(wraps));
  state.set_displacement(disp);
  state.set_head(head);
  state.set_action(action);
  return state;
}

void PimcRun::save_checkpoint(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write checkpoint " + tmp);
    out << kCheckpointTag << ' ' << kCheckpointVersion << '\n';
    out << "hash " << std::hex << config_hash() << std::dec << '\n';
    out << "chains " << chains_.size() << '\n';
    for (size_t c = 0; c < chains_.size(); ++c) {
      out << "chain " << c << ' ' << done_[c] << ' ' << hex(drift_[c]) << '\n';
      chains_[c].rng().save(out);
      out << '\n';
      equil_stats_[c].save(out);
      chains_[c].stats().save(out);
      save_state(out, chains_[c].state());
      histograms_[c].save(out);
    }
    out << "end\n";
    if (!out) throw IoError("failed writing checkpoint " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot move checkpoint into place: " + path);
}

PimcRun PimcRun::resume(const std::string& path, const PimcParams& params, const PairPotential& potential,
                        const PimcSchedule& schedule) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read checkpoint " + path);
  PimcRun run(params, potential, schedule);
  std::string tag;
  int version = 0;
  in >> tag >> version;
  if (tag != kCheckpointTag || version != kCheckpointVersion) throw IoError("not a checkpoint file: " + path);
  expect(in, "hash");
  uint64_t hash = 0;
  in >> std::hex >> hash >> std::dec;
  if (hash != run.config_hash()) throw ArgumentError("checkpoint was written for a different configuration");
  expect(in, "chains");
  size_t chains = 0;
  in >> chains;
  if (chains != run.chains_.size()) throw IoError("checkpoint chain count mismatch");
  for (size_t c = 0; c < chains; ++c) {
    expect(in, "chain");
    size_t index = 0;
    in >> index >> run.done_[c];
    if (index != c) throw IoError("checkpoint chains out of order");
    run.drift_[c] = read_hex(in);
    run.chains_[c].rng().load(in);
    run.equil_stats_[c].load(in);
    run.chains_[c].stats().load(in);
    run.chains_[c].mutable_state() = load_state(in, run.params_);
    run.histograms_[c] = CycleHistogram::load(in);
  }
  expect(in, "end");
  return run;
}

PimcResult run_canonical_pimc(const PimcParams& params, const PairPotential& potential,
                              const PimcSchedule& schedule) {
  PimcRun run(params, potential, schedule);
  run.run();
  return {run.histogram(), run.diagnostics()};
}

}  // namespace bosecycles
