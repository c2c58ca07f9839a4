#include "bosecycles/ideal_grand.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bosecycles/errors.hpp"

namespace bosecycles {

namespace {

constexpr double kSeriesTol = 1e-17;
constexpr long kMaxTerms = 1000000000L;

void check_beta(double beta) {
  if (!std::isfinite(beta) || !(beta > 0.0)) throw ArgumentError("beta must be positive and finite");
}

void check_dim(int dim) {
  if (dim < 1) throw ArgumentError("dimension must be >= 1");
}

void check_mu(double mu, int dim) {
  if (std::isnan(mu)) throw ArgumentError("mu is NaN");
  if (mu > 0.0) throw DomainError("the chemical potential must be strictly negative");
  if (mu == 0.0 && dim < 3)
    throw DomainError("mu = 0 is admitted only in dimension >= 3 (series diverges otherwise)");
}

void check_mu_strict(double mu) {
  if (std::isnan(mu)) throw ArgumentError("mu is NaN");
  if (!(mu < 0.0)) throw DomainError("the chemical potential must be strictly negative");
}

double prefactor(double beta, int dim) {
  return std::pow(4.0 * std::numbers::pi * beta, -0.5 * dim);
}

bool is_integer(double s) { return s == std::floor(s); }

double zeta(double s) {
  // the library returns ~1e-13 instead of 0 at large negative even integers
  if (s < 0.0 && is_integer(s) && std::fmod(-s, 2.0) == 0.0) return 0.0;
  return std::riemann_zeta(s);
}

}  // namespace

namespace detail {

double bose_series_direct(double s, double w) {
  if (!(w < 0.0)) throw DomainError("direct Bose series needs w < 0");
  if (s < 0.0) throw ArgumentError("Bose series needs s >= 0");
  const double q = std::exp(w);
  double sum = 0.0;
  for (long n = 1; n < kMaxTerms; ++n) {
    sum += std::exp(w * n - s * std::log(static_cast<double>(n)));
    // remaining terms are bounded by a geometric series with ratio e^w
    const double next = std::exp(w * (n + 1) - s * std::log(static_cast<double>(n + 1)));
    if (next / (1.0 - q) < kSeriesTol * sum || next == 0.0) break;
  }
  return sum;
}

double bose_series_expansion(double s, double w) {
  if (!(w < 0.0)) throw DomainError("Bose series expansion needs w < 0");
  // converges for |w| < 2 pi, but zeta(s - k) overflows before the terms die out near the radius
  if (-w > std::numbers::pi) throw DomainError("expansion used only for |w| <= pi");
  double sum = 0.0;
  long skip = -1;
  if (is_integer(s) && s >= 1.0) {
    const long m = static_cast<long>(s) - 1;
    skip = m;
    double harmonic = 0.0;
    for (long j = 1; j <= m; ++j) harmonic += 1.0 / j;
    sum += std::pow(w, static_cast<double>(m)) / std::tgamma(static_cast<double>(m + 1)) *
           (harmonic - std::log(-w));
  } else {
    sum += std::tgamma(1.0 - s) * std::pow(-w, s - 1.0);
  }
  double wk = 1.0;  // w^k / k!
  double prev = std::numeric_limits<double>::infinity();
  for (long k = 0; k < 400; ++k) {
    if (k > 0) wk *= w / static_cast<double>(k);
    double term = 0.0;
    if (k != skip) term = zeta(s - static_cast<double>(k)) * wk;
    sum += term;
    if (k > s + 2.0 && std::abs(term) + std::abs(prev) < kSeriesTol * std::abs(sum)) break;
    prev = term;
  }
  return sum;
}

}  // namespace detail

double bose_series(double s, double w) {
  if (std::isnan(s) || std::isnan(w)) throw ArgumentError("Bose series argument is NaN");
  if (w > 0.0) throw DomainError("Bose series needs w <= 0");
  if (w == 0.0) {
    if (!(s > 1.0)) throw DomainError("Bose series diverges at w = 0 for s <= 1");
    return zeta(s);
  }
  if (w == -std::numeric_limits<double>::infinity()) return 0.0;
  if (-w >= 1.0) return detail::bose_series_direct(s, w);
  return detail::bose_series_expansion(s, w);
}

double pressure(double beta, double mu, int dim) {
  check_beta(beta);
  check_dim(dim);
  check_mu(mu, dim);
  return prefactor(beta, dim) * bose_series(0.5 * dim + 1.0, beta * mu);
}

double density(double beta, double mu, int dim) {
  check_beta(beta);
  check_dim(dim);
  check_mu(mu, dim);
  return prefactor(beta, dim) * bose_series(0.5 * dim, beta * mu);
}

CriticalDensity critical_density(double beta, int dim) {
  check_beta(beta);
  check_dim(dim);
  if (dim < 3) return {std::numeric_limits<double>::infinity(), false};
  return {density(beta, 0.0, dim), true};
}

double chemical_potential(double beta, double rho, int dim) {
  check_beta(beta);
  check_dim(dim);
  if (!std::isfinite(rho) || !(rho > 0.0)) throw ArgumentError("rho must be positive and finite");
  const CriticalDensity rc = critical_density(beta, dim);
  if (rc.finite && rho >= rc.value) return 0.0;
  // beta mu = -exp(v); density is decreasing in v
  auto rho_of = [&](double v) { return density(beta, -std::exp(v) / beta, dim); };
  double lo = -740.0;
  double hi = 0.0;
  while (rho_of(hi) >= rho) {
    hi += 1.0;
    if (hi > 7.0) throw DomainError("density too small to invert: " + std::to_string(rho));
  }
  if (rho_of(lo) < rho) throw DomainError("density too large to invert: " + std::to_string(rho));
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (rho_of(mid) >= rho)
      lo = mid;
    else
      hi = mid;
  }
  const double v = std::abs(rho_of(lo) - rho) <= std::abs(rho_of(hi) - rho) ? lo : hi;
  return -std::exp(v) / beta;
}

double free_energy(double beta, double rho, int dim) {
  check_beta(beta);
  check_dim(dim);
  if (!std::isfinite(rho) || !(rho > 0.0)) throw ArgumentError("rho must be positive and finite");
  const CriticalDensity rc = critical_density(beta, dim);
  if (rc.finite && rho >= rc.value) return -pressure(beta, 0.0, dim) / beta;
  const double mu = chemical_potential(beta, rho, dim);
  return rho * mu - pressure(beta, mu, dim) / beta;
}

double grand_cycle_density(int64_t n, double beta, double mu, int dim) {
  check_beta(beta);
  check_dim(dim);
  check_mu_strict(mu);
  if (n < 1) throw ArgumentError("cycle length must be >= 1");
  const double nd = static_cast<double>(n);
  return std::exp(beta * mu * nd - 0.5 * dim * std::log(4.0 * std::numbers::pi * nd * beta));
}

double sigma_upper_bound_radial(double r, double beta, double mu, int dim) {
  check_beta(beta);
  check_dim(dim);
  check_mu_strict(mu);
  if (!std::isfinite(r) || r < 0.0) throw ArgumentError("distance must be finite and >= 0");
  const double q = std::exp(beta * mu);
  const double r2 = r * r;
  double sum = 0.0;
  for (long n = 1; n < kMaxTerms; ++n) {
    const double nb = static_cast<double>(n) * beta;
    sum += std::exp(beta * mu * n - 0.5 * dim * std::log(4.0 * std::numbers::pi * nb) - r2 / (4.0 * nb));
    // drop e^{-x^2/4n beta} <= 1 in the remainder
    const double nb1 = nb + beta;
    const double tail =
        std::exp(beta * mu * (n + 1) - 0.5 * dim * std::log(4.0 * std::numbers::pi * nb1)) / (1.0 - q);
    if (tail < kSeriesTol * sum || tail < 1e-300) break;
  }
  return sum;
}

double sigma_upper_bound(std::span<const double> x, double beta, double mu, int dim) {
  if (static_cast<int>(x.size()) != dim) throw ArgumentError("point dimension mismatch");
  double r2 = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) throw ArgumentError("point coordinate is not finite");
    r2 += v * v;
  }
  return sigma_upper_bound_radial(std::sqrt(r2), beta, mu, dim);
}

GrandThermo grand_thermo(double beta, double mu, int dim) {
  return {beta, mu, dim, pressure(beta, mu, dim), density(beta, mu, dim), critical_density(beta, dim)};
}

}  // namespace bosecycles
