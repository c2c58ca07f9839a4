#include "bosecycles/brute_force.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "bosecycles/errors.hpp"
#include "bosecycles/heat_kernel.hpp"
#include "bosecycles/rng.hpp"

namespace bosecycles {

namespace {

// One draw of exp(-S) for independent closed bridges with the given lengths.
double sample_boltzmann_factor(const PimcParams& params, const PairPotential& potential,
                               const std::vector<int>& lengths, Rng& rng, std::vector<double>& pos) {
  const int N = params.particles, M = params.slices, d = params.box.dim();
  const double L = params.box.side();
  pos.assign(static_cast<size_t>(N) * M * d, 0.0);
  int particle = 0;
  std::vector<double> x0(d);
  for (int n : lengths) {
    for (auto& v : x0) v = L * rng.uniform();
    const DiscretizedPath path = sample_bridge(n * params.beta, x0, x0, n * M, params.box, rng);
    for (int k = 0; k < n; ++k, ++particle)
      for (int s = 0; s < M; ++s) {
        const auto b = path.bead(static_cast<size_t>(k) * M + s);
        std::copy(b.begin(), b.end(), pos.begin() + (static_cast<long>(particle) * M + s) * d);
      }
  }
  double action = 0.0;
  for (int s = 0; s < M; ++s)
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) {
        const std::span<const double> a(pos.data() + (static_cast<size_t>(i) * M + s) * d, size_t(d));
        const std::span<const double> b(pos.data() + (static_cast<size_t>(j) * M + s) * d, size_t(d));
        action += potential.of_squared(params.box.distance_sq(a, b));
      }
  return std::exp(-params.time_step() * action);
}

}  // namespace

BruteForceResult brute_force_small(const PimcParams& params, const PairPotential& potential,
                                   int64_t mc_samples, uint64_t seed) {
  params.validate();
  const int N = params.particles;
  if (N > 8) throw UnsupportedError("brute-force enumeration is limited to N <= 8");
  const bool exact = potential.is_zero();
  if (!exact && mc_samples < 2) throw ArgumentError("need at least two MC samples per cycle type");

  std::map<std::vector<int>, int64_t> types;
  std::vector<int> perm(N);
  std::iota(perm.begin(), perm.end(), 0);
  int64_t total = 0;
  do {
    ++types[measure_cycles(perm)];
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));

  const std::vector<double> origin(params.box.dim(), 0.0);
  std::vector<double> log_c(N + 1, 0.0);
  for (int n = 1; n <= N; ++n)
    log_c[n] = std::log(params.box.volume()) + log_heat_kernel(n * params.beta, origin, params.box);

  struct TypeTerm {
    std::vector<int> lengths;
    int64_t multiplicity;
    double log_weight;
    double mean;
    double variance_of_mean;
  };
  std::vector<TypeTerm> terms;
  std::vector<double> pos;
  uint64_t index = 0;
  for (const auto& [lengths, m] : types) {
    TypeTerm t{lengths, m, 0.0, 1.0, 0.0};
    for (int n : lengths) t.log_weight += log_c[n];
    if (!exact) {
      Rng rng = Rng::stream(seed, index);
      double sum = 0.0, sum2 = 0.0;
      for (int64_t k = 0; k < mc_samples; ++k) {
        const double f = sample_boltzmann_factor(params, potential, lengths, rng, pos);
        sum += f;
        sum2 += f * f;
      }
      const double S = static_cast<double>(mc_samples);
      t.mean = sum / S;
      t.variance_of_mean = std::max(0.0, (sum2 / S - t.mean * t.mean)) / (S - 1.0);
    }
    terms.push_back(std::move(t));
    ++index;
  }

  double wmax = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms) wmax = std::max(wmax, t.log_weight);
  std::vector<double> a(terms.size());
  double T = 0.0, varT = 0.0;
  for (size_t k = 0; k < terms.size(); ++k) {
    a[k] = static_cast<double>(terms[k].multiplicity) * std::exp(terms[k].log_weight - wmax);
    T += a[k] * terms[k].mean;
    varT += a[k] * a[k] * terms[k].variance_of_mean;
  }

  BruteForceResult r;
  r.permutations = total;
  r.cycle_types = static_cast<int>(terms.size());
  r.exact = exact;
  r.log_partition = wmax + std::log(T) - std::lgamma(N + 1.0);
  r.partition = std::exp(r.log_partition);
  r.partition_error = r.partition * std::sqrt(varT) / T;

  const double V = params.box.volume();
  r.densities.assign(N, 0.0);
  r.density_errors.assign(N, 0.0);
  for (int n = 1; n <= N; ++n) {
    auto particles_in = [&](const TypeTerm& t) {
      return n * static_cast<double>(std::count(t.lengths.begin(), t.lengths.end(), n));
    };
    double s = 0.0;
    for (size_t k = 0; k < terms.size(); ++k) s += a[k] * terms[k].mean * particles_in(terms[k]);
    const double rho_n = s / (V * T);
    double var = 0.0;
    for (size_t k = 0; k < terms.size(); ++k) {
      const double g = a[k] * (particles_in(terms[k]) / V - rho_n) / T;
      var += g * g * terms[k].variance_of_mean;
    }
    r.densities[n - 1] = rho_n;
    r.density_errors[n - 1] = std::sqrt(var);
  }
  return r;
}

}  // namespace bosecycles
