#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bosecycles/geometry.hpp"

namespace bosecycles {

// Exact canonical ensemble of N free bosons on the torus. Y(j) is the
// j-particle partition function normalised as (1/j!) sum over permutations,
// C_n = V (4 pi n beta)^{-d/2} sum_z exp(-L^2 z^2 / 4 n beta) the weight of a
// single n-cycle.
class CanonicalEnsembleTable {
 public:
  static CanonicalEnsembleTable build(const SimulationBox& box, double beta, int64_t particles);

  const SimulationBox& box() const { return box_; }
  double beta() const { return beta_; }
  int64_t particles() const { return particles_; }
  double volume() const { return box_.volume(); }
  double density() const;

  double log_partition(int64_t j) const;  // log Y(j), 0 <= j <= N
  double log_cycle_weight(int64_t n) const;  // log C_n, 1 <= n <= N
  std::span<const double> log_partitions() const { return log_y_; }

  // Y(N - i) / Y(N).
  double tail_ratio(int64_t i) const;

  // rho(n) for n = 1..N (index n - 1), normalised so that they sum to N / V.
  std::span<const double> cycle_densities() const { return cycle_density_; }

  // Largest relative deviation of N Y(N) = sum C_n Y(N - n) over all prefixes.
  double recursion_residual() const;

 private:
  CanonicalEnsembleTable(const SimulationBox& box, double beta, int64_t n);

  SimulationBox box_;
  double beta_;
  int64_t particles_;
  std::vector<double> log_y_;
  std::vector<double> log_c_;
  std::vector<double> cycle_density_;
};

double cycle_density(const CanonicalEnsembleTable& table, int64_t n);
// P(n) = rho(n) / rho, the probability that a given particle sits in an n-cycle.
double cycle_probability(const CanonicalEnsembleTable& table, int64_t n);

struct CycleSpectrumExact {
  std::vector<double> densities;  // index n - 1
  double rho = 0.0;
  int64_t cutoff = 0;
  bool cutoff_clamped = false;
  double rho_inf_estimate = 0.0;
};

int64_t cycle_cutoff(const CanonicalEnsembleTable& table, double c, bool* clamped = nullptr);
CycleSpectrumExact cycle_spectrum(const CanonicalEnsembleTable& table, double c = 1.0);

double odlro_correlation(const CanonicalEnsembleTable& table, std::span<const double> x);

struct DecompositionResult {
  double sigma = 0.0;
  double small_cycle_term = 0.0;  // sum_{n <= n_cut} exp(-x^2/4 n beta) rho(n)
  double rho_inf_estimate = 0.0;
  double residual = 0.0;
  int64_t cutoff = 0;
  bool cutoff_clamped = false;
};

DecompositionResult verify_decomposition(const CanonicalEnsembleTable& table,
                                         std::span<const double> x, double c = 1.0);

// <n_k> for k = (2 pi / L) m.
double mode_occupation(const CanonicalEnsembleTable& table, std::span<const int64_t> m);
// Same with an explicit wavevector, which must lie on the dual lattice.
double mode_occupation_wavevector(const CanonicalEnsembleTable& table, std::span<const double> k);

double condensate_density(const CanonicalEnsembleTable& table);  // <n_0> / V

// Prob(n_0 >= i); 0 for i > N.
double zero_mode_tail(const CanonicalEnsembleTable& table, int64_t i);

struct LargeDeviation {
  double rate = 0.0;       // (1 / beta V) log Prob(n_0 >= ceil(V a))
  int64_t threshold = 0;   // ceil(V a)
  double reference = 0.0;  // f(N/V) - f((N - threshold)/V), infinite-volume free energies
};

double large_deviation_rate(const CanonicalEnsembleTable& table, double a);
LargeDeviation large_deviation(const CanonicalEnsembleTable& table, double a);

}  // namespace bosecycles
