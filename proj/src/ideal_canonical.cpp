#include "bosecycles/ideal_canonical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bosecycles/errors.hpp"
#include "bosecycles/heat_kernel.hpp"
#include "bosecycles/ideal_grand.hpp"

namespace bosecycles {

namespace {

// Y values inside one block stay within e^{+-kBlockSpan} of the block base,
// so the recursion is a sum of plain dot products.
constexpr double kBlockSpan = 350.0;
constexpr double kNegligible = -600.0;

struct Block {
  int64_t start;
  double base;
};

double dot_reversed(const double* c_end, const double* y, int64_t len) {
  // sum_k c_end[-k] * y[k]; four partial sums keep the order fixed
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  int64_t k = 0;
  for (; k + 4 <= len; k += 4) {
    s0 += c_end[-k] * y[k];
    s1 += c_end[-k - 1] * y[k + 1];
    s2 += c_end[-k - 2] * y[k + 2];
    s3 += c_end[-k - 3] * y[k + 3];
  }
  for (; k < len; ++k) s0 += c_end[-k] * y[k];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

CanonicalEnsembleTable::CanonicalEnsembleTable(const SimulationBox& box, double beta, int64_t n)
    : box_(box), beta_(beta), particles_(n) {}

CanonicalEnsembleTable CanonicalEnsembleTable::build(const SimulationBox& box, double beta,
                                                     int64_t particles) {
  if (!box.periodic()) throw ArgumentError("the canonical table needs a finite periodic box");
  if (!std::isfinite(beta) || !(beta > 0.0)) throw ArgumentError("beta must be positive and finite");
  if (particles < 0) throw ArgumentError("particle number must be >= 0");
  if (particles > 50000000) throw UnsupportedError("particle number too large for the O(N^2) table");

  CanonicalEnsembleTable t(box, beta, particles);
  const int64_t N = particles;
  const int d = box.dim();
  const double L = box.side();
  t.log_y_.assign(N + 1, 0.0);
  t.log_c_.resize(N);
  std::vector<double> c(N + 1, 0.0);
  for (int64_t n = 1; n <= N; ++n) {
    const double nb = static_cast<double>(n) * beta;
    const double a = L * L / (4.0 * nb);
    t.log_c_[n - 1] =
        d * (std::log(L) - 0.5 * std::log(4.0 * std::numbers::pi * nb) + log_gaussian_lattice_sum(a, 0.0));
    c[n] = std::exp(t.log_c_[n - 1]);
  }

  std::vector<double> yhat(N + 1, 0.0);
  std::vector<Block> blocks{{0, 0.0}};
  yhat[0] = 1.0;
  for (int64_t m = 1; m <= N; ++m) {
    const double ref = t.log_y_[m - 1];
    double s = 0.0;
    for (size_t b = 0; b < blocks.size(); ++b) {
      const int64_t lo = blocks[b].start;
      const int64_t hi = (b + 1 < blocks.size() ? blocks[b + 1].start : m);  // exclusive
      const double diff = blocks[b].base - ref;
      if (diff < kNegligible) continue;
      // j runs over [lo, hi), cycle length m - j
      s += std::exp(diff) * dot_reversed(c.data() + (m - lo), yhat.data() + lo, hi - lo);
    }
    const double ly = ref + std::log(s / static_cast<double>(m));
    t.log_y_[m] = ly;
    if (std::abs(ly - blocks.back().base) <= kBlockSpan) {
      yhat[m] = std::exp(ly - blocks.back().base);
    } else {
      blocks.push_back({m, ly});
      yhat[m] = 1.0;
    }
  }

  t.cycle_density_.assign(N, 0.0);
  if (N > 0) {
    const double ref = t.log_y_[N - 1];
    double total = 0.0;
    for (int64_t n = 1; n <= N; ++n) {
      const double w = std::exp(t.log_c_[n - 1] + t.log_y_[N - n] - ref);
      t.cycle_density_[n - 1] = w;
      total += w;
    }
    const double scale = t.density() / total;
    for (double& v : t.cycle_density_) v *= scale;
  }
  return t;
}

double CanonicalEnsembleTable::density() const {
  return static_cast<double>(particles_) / box_.volume();
}

double CanonicalEnsembleTable::log_partition(int64_t j) const {
  if (j < 0 || j > particles_) throw DomainError("partition index out of range");
  return log_y_[j];
}

double CanonicalEnsembleTable::log_cycle_weight(int64_t n) const {
  if (n < 1) throw ArgumentError("cycle length must be >= 1");
  if (n > particles_) throw DomainError("cycle length exceeds the particle number");
  return log_c_[n - 1];
}

double CanonicalEnsembleTable::tail_ratio(int64_t i) const {
  if (i < 0 || i > particles_) throw DomainError("tail index out of range");
  return std::exp(log_y_[particles_ - i] - log_y_[particles_]);
}

double CanonicalEnsembleTable::recursion_residual() const {
  double worst = 0.0;
  for (int64_t j = 1; j <= particles_; ++j) {
    double s = 0.0;
    for (int64_t n = 1; n <= j; ++n) s += std::exp(log_c_[n - 1] + log_y_[j - n] - log_y_[j]);
    worst = std::max(worst, std::abs(s / static_cast<double>(j) - 1.0));
  }
  return worst;
}

double cycle_density(const CanonicalEnsembleTable& table, int64_t n) {
  if (n < 1) throw ArgumentError("cycle length must be >= 1");
  if (n > table.particles()) throw DomainError("cycle length exceeds the particle number");
  return table.cycle_densities()[n - 1];
}

double cycle_probability(const CanonicalEnsembleTable& table, int64_t n) {
  return cycle_density(table, n) / table.density();
}

int64_t cycle_cutoff(const CanonicalEnsembleTable& table, double c, bool* clamped) {
  if (!std::isfinite(c) || !(c > 1.0 / (4.0 * std::numbers::pi)))
    throw ArgumentError("cutoff constant c must exceed 1/(4 pi)");
  const double L = table.box().side();
  const double raw = std::ceil(c * L * L / table.beta());
  const bool over = raw > static_cast<double>(table.particles());
  if (clamped) *clamped = over;
  return over ? table.particles() : static_cast<int64_t>(raw);
}

namespace {

// rho - sum_{n <= cut} rho(n), evaluated as the tail sum to avoid cancellation.
double large_cycle_density(const CanonicalEnsembleTable& table, int64_t cut) {
  const auto dens = table.cycle_densities();
  double s = 0.0;
  for (int64_t n = cut + 1; n <= table.particles(); ++n) s += dens[n - 1];
  return std::clamp(s, 0.0, table.density());
}

}  // namespace

CycleSpectrumExact cycle_spectrum(const CanonicalEnsembleTable& table, double c) {
  CycleSpectrumExact out;
  out.densities.assign(table.cycle_densities().begin(), table.cycle_densities().end());
  out.rho = table.density();
  out.cutoff = cycle_cutoff(table, c, &out.cutoff_clamped);
  out.rho_inf_estimate = large_cycle_density(table, out.cutoff);
  return out;
}

double odlro_correlation(const CanonicalEnsembleTable& table, std::span<const double> x) {
  table.box().check_point(x);
  const auto dens = table.cycle_densities();
  double s = 0.0;
  for (int64_t n = 1; n <= table.particles(); ++n)
    s += theta_coefficient(n, x, table.box(), table.beta()) * dens[n - 1];
  return s;
}

DecompositionResult verify_decomposition(const CanonicalEnsembleTable& table,
                                         std::span<const double> x, double c) {
  const SimulationBox& box = table.box();
  box.check_point(x);
  DecompositionResult r;
  r.cutoff = cycle_cutoff(table, c, &r.cutoff_clamped);
  r.sigma = odlro_correlation(table, x);
  double x2 = 0.0;
  for (double v : x) {
    const double m = box.min_image(v);
    x2 += m * m;
  }
  const auto dens = table.cycle_densities();
  for (int64_t n = 1; n <= r.cutoff; ++n)
    r.small_cycle_term += std::exp(-x2 / (4.0 * static_cast<double>(n) * table.beta())) * dens[n - 1];
  r.rho_inf_estimate = large_cycle_density(table, r.cutoff);
  r.residual = r.sigma - r.small_cycle_term - r.rho_inf_estimate;
  return r;
}

double mode_occupation(const CanonicalEnsembleTable& table, std::span<const int64_t> m) {
  if (static_cast<int>(m.size()) != table.box().dim())
    throw ArgumentError("mode index dimension mismatch");
  const double L = table.box().side();
  double m2 = 0.0;
  for (int64_t v : m) m2 += static_cast<double>(v) * static_cast<double>(v);
  const double k2 = 4.0 * std::numbers::pi * std::numbers::pi * m2 / (L * L);
  const int64_t N = table.particles();
  const auto ly = table.log_partitions();
  double s = 0.0;
  for (int64_t i = 1; i <= N; ++i) {
    const double e = -table.beta() * static_cast<double>(i) * k2 + ly[N - i] - ly[N];
    s += std::exp(e);
    if (e < -745.0 && k2 > 0.0) break;  // later terms only get smaller
  }
  return s;
}

double mode_occupation_wavevector(const CanonicalEnsembleTable& table, std::span<const double> k) {
  if (static_cast<int>(k.size()) != table.box().dim())
    throw ArgumentError("wavevector dimension mismatch");
  const double L = table.box().side();
  std::vector<int64_t> m(k.size());
  for (size_t i = 0; i < k.size(); ++i) {
    const double q = k[i] * L / (2.0 * std::numbers::pi);
    const double r = std::nearbyint(q);
    if (!std::isfinite(q) || std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q)))
      throw ArgumentError("wavevector is not on the dual lattice (2 pi / L) Z^d");
    m[i] = static_cast<int64_t>(r);
  }
  return mode_occupation(table, m);
}

double condensate_density(const CanonicalEnsembleTable& table) {
  std::vector<int64_t> zero(table.box().dim(), 0);
  return mode_occupation(table, zero) / table.volume();
}

double zero_mode_tail(const CanonicalEnsembleTable& table, int64_t i) {
  if (i < 0) throw ArgumentError("tail index must be >= 0");
  if (i > table.particles()) return 0.0;
  return table.tail_ratio(i);
}

namespace {

int64_t threshold_index(const CanonicalEnsembleTable& table, double a) {
  if (!std::isfinite(a) || !(a > 0.0)) throw ArgumentError("a must be positive and finite");
  const double va = table.volume() * a;
  // guard against V a landing a rounding error above an integer
  const double i = std::ceil(va * (1.0 - 1e-12));
  if (i > static_cast<double>(table.particles()))
    throw DomainError("V a exceeds the particle number");
  return static_cast<int64_t>(i);
}

}  // namespace

double large_deviation_rate(const CanonicalEnsembleTable& table, double a) {
  const int64_t i = threshold_index(table, a);
  const int64_t N = table.particles();
  return (table.log_partition(N - i) - table.log_partition(N)) / (table.beta() * table.volume());
}

LargeDeviation large_deviation(const CanonicalEnsembleTable& table, double a) {
  LargeDeviation out;
  out.threshold = threshold_index(table, a);
  out.rate = large_deviation_rate(table, a);
  const int64_t N = table.particles();
  const double V = table.volume();
  const int d = table.box().dim();
  const double f_full = free_energy(table.beta(), static_cast<double>(N) / V, d);
  const int64_t rest = N - out.threshold;
  const double f_rest = rest > 0 ? free_energy(table.beta(), static_cast<double>(rest) / V, d) : 0.0;
  out.reference = f_full - f_rest;
  return out;
}

}  // namespace bosecycles
