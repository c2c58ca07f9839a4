#pragma once

#include <cstdint>
#include <span>

namespace bosecycles {

// sum_{n>=1} e^{w n} n^{-s} for w <= 0 (w = 0 needs s > 1). Direct summation
// with a certified geometric tail for -w >= 1, expansion around w = 0 below.
double bose_series(double s, double w);

namespace detail {
double bose_series_direct(double s, double w);
double bose_series_expansion(double s, double w);
}  // namespace detail

// p(beta, mu) = (4 pi beta)^{-d/2} sum e^{beta mu n} n^{-d/2-1}; equals log Z / V.
double pressure(double beta, double mu, int dim);
// rho(beta, mu) = (4 pi beta)^{-d/2} sum e^{beta mu n} n^{-d/2}.
double density(double beta, double mu, int dim);

struct CriticalDensity {
  double value;  // +inf when not finite
  bool finite;
};
CriticalDensity critical_density(double beta, int dim);

// mu* <= 0 with density(beta, mu*) = rho; 0 at and above the critical density.
double chemical_potential(double beta, double rho, int dim);

// sup_{mu <= 0} [rho mu - p(beta, mu) / beta].
double free_energy(double beta, double rho, int dim);

// Infinite-volume ideal-gas density of particles in n-cycles.
double grand_cycle_density(int64_t n, double beta, double mu, int dim);

// sum_n e^{beta mu n} (4 pi n beta)^{-d/2} e^{-x^2 / 4 n beta}.
double sigma_upper_bound(std::span<const double> x, double beta, double mu, int dim);
double sigma_upper_bound_radial(double r, double beta, double mu, int dim);

struct GrandThermo {
  double beta;
  double mu;
  int dim;
  double pressure;
  double density;
  CriticalDensity critical;
};
GrandThermo grand_thermo(double beta, double mu, int dim);

}  // namespace bosecycles
