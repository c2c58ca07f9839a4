#include <cmath>
#include <vector>

#include <boost/math/special_functions/zeta.hpp>

#include "bosecycles/errors.hpp"
#include "bosecycles/ideal_grand.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bosecycles;

TEST_CASE("pressure and density vanish for an empty gas") {
  for (int d : {1, 2, 3}) {
    CHECK(pressure(1.0, -60.0, d) < 1e-26);
    CHECK(density(1.0, -60.0, d) < 1e-26);
  }
}

TEST_CASE("density is the mu-derivative of the pressure") {
  for (int d : {1, 2, 3, 4})
    for (double beta : {0.5, 1.0, 2.0})
      for (double mu : {-3.0, -1.0, -0.3, -0.05}) {
        const double h = 1e-5;
        const double dp = (pressure(beta, mu + h, d) - pressure(beta, mu - h, d)) / (2 * h);
        INFO("d=" << d << " beta=" << beta << " mu=" << mu);
        CHECK(std::abs(dp / beta - density(beta, mu, d)) < 1e-8 * std::max(1.0, density(beta, mu, d)));
      }
}

TEST_CASE("series against momentum-space quadrature") {
  CHECK(pressure(1.0, -1.0, 3) == doctest::Approx(oracle::pressure_kspace(1.0, -1.0, 3)).epsilon(1e-8));
  for (int d : {1, 2, 3})
    for (double mu : {-2.0, -0.4, -0.01}) {
      INFO("d=" << d << " mu=" << mu);
      CHECK(pressure(0.7, mu, d) == doctest::Approx(oracle::pressure_kspace(0.7, mu, d)).epsilon(1e-8));
      CHECK(density(0.7, mu, d) == doctest::Approx(oracle::density_kspace(0.7, mu, d)).epsilon(1e-8));
    }
}

TEST_CASE("reference densities") {
  const double zeta32 = boost::math::zeta(1.5);
  CHECK(density(1.0, 0.0, 3) == doctest::Approx(zeta32 * std::pow(4 * oracle::pi, -1.5)).epsilon(1e-12));
  CHECK(density(1.0, 0.0, 3) == doctest::Approx(0.0587).epsilon(1e-3));
  double direct = 0.0;
  for (int n = 1; n < 200; ++n) direct += std::exp(-double(n)) * std::pow(n, -1.5);
  CHECK(density(1.0, -1.0, 3) == doctest::Approx(direct * std::pow(4 * oracle::pi, -1.5)).epsilon(1e-12));
  CHECK(density(1.0, -1.0, 3) == doctest::Approx(9.62e-3).epsilon(1e-3));
}

TEST_CASE("critical density") {
  CHECK_FALSE(critical_density(1.0, 1).finite);
  CHECK_FALSE(critical_density(1.0, 2).finite);
  CHECK(std::isinf(critical_density(1.0, 2).value));
  const double r1 = critical_density(1.0, 3).value, r2 = critical_density(2.0, 3).value;
  CHECK(r2 / r1 == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-13));
  const double d4 = oracle::pi * oracle::pi / 6.0 / (16.0 * oracle::pi * oracle::pi);
  CHECK(critical_density(1.0, 4).value == doctest::Approx(d4).epsilon(1e-12));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(pressure(1.0, 0.1, 3), DomainError);
  CHECK_THROWS_AS(density(1.0, 0.1, 3), DomainError);
  CHECK_THROWS_AS(density(1.0, 0.0, 2), DomainError);
  CHECK_THROWS_AS(grand_cycle_density(1, 1.0, 0.0, 3), DomainError);
  const double x[3] = {1, 0, 0};
  CHECK_THROWS_AS(sigma_upper_bound(x, 1.0, 0.0, 3), DomainError);
  CHECK_THROWS_AS(pressure(-1.0, -1.0, 3), ArgumentError);
}

TEST_CASE("density increases strictly and inverts") {
  for (int d : {1, 3}) {
    double last = 0.0;
    for (double mu = -4.0; mu < 0.0; mu += 0.21) {
      const double r = density(1.0, mu, d);
      CHECK(r > last);
      last = r;
      const double back = chemical_potential(1.0, r, d);
      CHECK(density(1.0, back, d) == doctest::Approx(r).epsilon(1e-10));
    }
  }
  CHECK(chemical_potential(1.0, 2.0 * critical_density(1.0, 3).value, 3) == 0.0);
}

TEST_CASE("series branches agree where both apply") {
  for (double s : {0.5, 1.5, 2.5})
    for (double w : {-1.2, -2.0, -3.0})
      CHECK(detail::bose_series_expansion(s, w) == doctest::Approx(detail::bose_series_direct(s, w)).epsilon(1e-12));
  CHECK_THROWS_AS(detail::bose_series_expansion(1.5, -5.0), DomainError);
}

TEST_CASE("free energy") {
  const double rc = critical_density(1.0, 3).value;
  const double f_c = -pressure(1.0, 0.0, 3);
  for (double f : {1.0, 1.5, 2.0, 5.0}) CHECK(std::abs(free_energy(1.0, f * rc, 3) - f_c) <= 1e-10 * std::abs(f_c));

  // envelope theorem and Legendre duality below rho_c
  for (double f : {0.1, 0.4, 0.8}) {
    const double rho = f * rc, h = 1e-6 * rc;
    const double slope = (free_energy(1.0, rho + h, 3) - free_energy(1.0, rho - h, 3)) / (2 * h);
    const double mu = chemical_potential(1.0, rho, 3);
    CHECK(slope == doctest::Approx(mu).epsilon(1e-6));
    CHECK(free_energy(1.0, rho, 3) == doctest::Approx(rho * mu - pressure(1.0, mu, 3)).epsilon(1e-12));
  }
  // dilute limit: small and negative
  double last = -1.0;
  for (double rho : {1e-3, 1e-5, 1e-7, 1e-9}) {
    const double v = free_energy(1.0, rho, 3);
    CHECK(v < 0.0);
    CHECK(v > last);
    last = v;
  }
  CHECK(last > -1e-7);
}

TEST_CASE("grand cycle densities") {
  CHECK(grand_cycle_density(1, 1.0, -1.0, 3) == doctest::Approx(std::exp(-1.0) * std::pow(4 * oracle::pi, -1.5)).epsilon(1e-14));
  CHECK(grand_cycle_density(1, 1.0, -1.0, 3) == doctest::Approx(8.258e-3).epsilon(1e-3));
  for (int d : {1, 3})
    for (double mu = -3.0; mu <= -0.01; mu += 0.37) {
      double s = 0.0;
      for (int64_t n = 1; n < 20000000; ++n) {
        const double t = grand_cycle_density(n, 1.0, mu, d);
        s += t;
        if (t < 1e-18 * s) break;
      }
      CHECK(std::abs(s - density(1.0, mu, d)) <= 1e-10 * density(1.0, mu, d));
    }
  // no density left beyond finite cycles: the tail past n falls to zero
  double tail = density(1.0, -0.5, 3);
  for (int64_t n = 1; n <= 200; ++n) tail -= grand_cycle_density(n, 1.0, -0.5, 3);
  CHECK(std::abs(tail) < 1e-14);
}

TEST_CASE("correlation bound") {
  const double zero[3] = {0, 0, 0};
  CHECK(sigma_upper_bound(zero, 1.0, -0.7, 3) == doctest::Approx(density(1.0, -0.7, 3)).epsilon(1e-12));
  double last = density(1.0, -0.5, 3);
  for (double r = 0.5; r <= 20.0; r += 0.5) {
    const double v = sigma_upper_bound_radial(r, 1.0, -0.5, 3);
    CHECK(v < last);
    last = v;
  }
  const double x[3] = {6.0, 8.0, 0.0};
  const double at10 = sigma_upper_bound(x, 1.0, -0.5, 3);
  CHECK(at10 == doctest::Approx(sigma_upper_bound_radial(10.0, 1.0, -0.5, 3)).epsilon(1e-14));
  // fixture from the first build
  CHECK(at10 == doctest::Approx(6.75868158784958e-06).epsilon(1e-10));
  // split at n*: cycles up to n* are damped by at least e^{-x^2 / 4 n* beta}
  for (int64_t nstar : {5, 10, 25}) {
    double tail = density(1.0, -0.5, 3);
    for (int64_t n = 1; n <= nstar; ++n) tail -= grand_cycle_density(n, 1.0, -0.5, 3);
    CHECK(at10 < density(1.0, -0.5, 3) * std::exp(-100.0 / (4.0 * nstar)) + tail);
  }
}
