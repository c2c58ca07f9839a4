#include <cmath>
#include <vector>

#include "bosecycles/errors.hpp"
#include "bosecycles/ideal_canonical.hpp"
#include "bosecycles/ideal_grand.hpp"
#include "bosecycles/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bosecycles;

namespace {

CanonicalEnsembleTable table(int d, double L, double beta, int64_t N) {
  return CanonicalEnsembleTable::build(SimulationBox(d, L), beta, N);
}

int64_t particles_at(double rho, double L, int d) { return std::llround(rho * std::pow(L, d)); }

}  // namespace

TEST_CASE("small tables against closed forms") {
  const double c1 = oracle::cycle_weight_kspace(1, 3, 4.0, 1.0);
  const double c2 = oracle::cycle_weight_kspace(2, 3, 4.0, 1.0);
  const auto t1 = table(3, 4.0, 1.0, 1);
  CHECK(t1.log_partition(0) == 0.0);
  CHECK(std::exp(t1.log_partition(1)) == doctest::Approx(c1).epsilon(1e-13));
  const auto t2 = table(3, 4.0, 1.0, 2);
  CHECK(std::exp(t2.log_partition(2)) == doctest::Approx((c1 * c1 + c2) / 2.0).epsilon(1e-13));
  CHECK(std::exp(t2.log_cycle_weight(2)) == doctest::Approx(c2).epsilon(1e-13));
}

TEST_CASE("recursion against permutation enumeration") {
  const auto e = oracle::enumerate_permutations(6, 3, 5.0, 1.0);
  const auto t = table(3, 5.0, 1.0, 6);
  CHECK(std::abs(std::exp(t.log_partition(6)) / e.partition - 1.0) < 1e-12);

  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const int N = 1 + int(rng.below(8));
    const int d = 1 + int(rng.below(3));
    const double L = 1.0 + 5.0 * rng.uniform(), beta = 0.2 + 2.0 * rng.uniform();
    const auto ref = oracle::enumerate_permutations(N, d, L, beta);
    const auto tb = table(d, L, beta, N);
    INFO("N=" << N << " d=" << d << " L=" << L << " beta=" << beta);
    CHECK(std::abs(tb.log_partition(N) - std::log(ref.partition)) < 1e-10 * std::max(1.0, std::log(ref.partition)));
    for (int n = 1; n <= N; ++n) CHECK(cycle_density(tb, n) == doctest::Approx(ref.densities[n - 1]).epsilon(1e-10));
    CHECK(tb.recursion_residual() < 1e-12);
  }
}

TEST_CASE("cycle densities") {
  const auto t1 = table(2, 3.0, 0.7, 1);
  CHECK(cycle_density(t1, 1) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));

  const auto t2 = table(3, 4.0, 1.0, 2);
  const auto e2 = oracle::enumerate_permutations(2, 3, 4.0, 1.0);
  CHECK(cycle_density(t2, 1) == doctest::Approx(e2.densities[0]).epsilon(1e-13));
  const double c1 = std::exp(t2.log_cycle_weight(1));
  CHECK(cycle_density(t2, 1) ==
        doctest::Approx(c1 / 64.0 * std::exp(t2.log_partition(1) - t2.log_partition(2))).epsilon(1e-13));

  for (int64_t N : {1, 10, 137, 2000}) {
    const auto t = table(3, 6.0, 1.0, N);
    double s = 0.0;
    for (int64_t n = 1; n <= N; ++n) {
      s += cycle_density(t, n);
      CHECK(cycle_density(t, n) >= 0.0);
    }
    CHECK(std::abs(s - t.density()) <= 1e-12 * t.density());
    CHECK(cycle_probability(t, 1) == doctest::Approx(cycle_density(t, 1) / t.density()).epsilon(1e-15));
    CHECK_THROWS_AS(cycle_density(t, N + 1), DomainError);
  }
}

TEST_CASE("trivial table") {
  const auto t = table(3, 2.0, 1.0, 0);
  CHECK(t.particles() == 0);
  CHECK(t.log_partition(0) == 0.0);
}

TEST_CASE("spectrum summary") {
  const auto t = table(3, 8.0, 1.0, 60);
  const auto sp = cycle_spectrum(t, 1.0);
  CHECK(sp.cutoff == 60);  // ceil(64) clamped to N
  CHECK(sp.cutoff_clamped);
  CHECK(sp.rho_inf_estimate >= 0.0);
  CHECK(sp.rho_inf_estimate <= sp.rho);
  const auto sp2 = cycle_spectrum(t, 0.5);
  CHECK(sp2.cutoff == 32);
  CHECK_FALSE(sp2.cutoff_clamped);
  CHECK_THROWS_AS(cycle_spectrum(t, 1.0 / (4.0 * oracle::pi)), ArgumentError);
}

TEST_CASE("odlro correlation") {
  const double L = 6.0;
  const auto t = table(3, L, 1.0, 40);
  const double zero[3] = {0, 0, 0};
  CHECK(std::abs(odlro_correlation(t, zero) - t.density()) <= 1e-12 * t.density());
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    double x[3], y[3];
    for (int i = 0; i < 3; ++i) {
      x[i] = L * rng.uniform();
      y[i] = x[i] + L * (double(rng.below(3)) - 1.0);
    }
    CHECK(odlro_correlation(t, x) == doctest::Approx(odlro_correlation(t, y)).epsilon(1e-12));
  }
}

TEST_CASE("odlro below condensation sits under the grand-canonical bound and decays") {
  const double rc = critical_density(1.0, 3).value;
  const double rho = 0.5 * rc;
  for (double L : {16.0, 24.0}) {
    const auto t = table(3, L, 1.0, particles_at(rho, L, 3));
    double last = t.density();
    for (double r : {1.0, 2.0, 4.0, L / 2}) {
      const double x[3] = {r, 0.0, 0.0};
      const double s = odlro_correlation(t, x);
      CHECK(s < last);
      last = s;
      // grand-canonical bound at the realised density, summed over the nearest
      // torus images (at |x| = L/2 the image at x - L is as close as x)
      const double mu_real = chemical_potential(1.0, t.density(), 3);
      double bound = 0.0;
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
          for (int c = -1; c <= 1; ++c) {
            const double xi[3] = {r + a * L, b * L, c * L};
            bound += sigma_upper_bound(xi, 1.0, mu_real, 3);
          }
      CHECK(s <= bound);
      if (r < L / 4) CHECK(s <= sigma_upper_bound(x, 1.0, mu_real, 3));
    }
  }
}

TEST_CASE("decomposition at x = 0 and below condensation") {
  const double rc = critical_density(1.0, 3).value;
  std::vector<double> res0, resx, rinf;
  for (double L : {6.0, 9.0, 12.0}) {
    const auto t = table(3, L, 1.0, particles_at(0.5 * rc, L, 3));
    const double zero[3] = {0, 0, 0};
    const auto d0 = verify_decomposition(t, zero, 1.0);
    CHECK(d0.sigma == doctest::Approx(t.density()).epsilon(1e-12));
    res0.push_back(std::abs(d0.residual));
    const double x[3] = {1.5, 0, 0};
    const auto dx = verify_decomposition(t, x, 1.0);
    resx.push_back(std::abs(dx.residual));
    rinf.push_back(dx.rho_inf_estimate);
  }
  for (size_t k = 0; k < res0.size(); ++k) CHECK(res0[k] < 1e-12);
  CHECK(resx[2] < resx[0]);
  CHECK(rinf[2] < 1e-6);
}

TEST_CASE("decomposition flags a clamped cutoff") {
  const auto t = table(3, 8.0, 1.0, 20);
  const double x[3] = {1, 0, 0};
  const auto d = verify_decomposition(t, x, 1.0);
  CHECK(d.cutoff_clamped);
  CHECK(d.cutoff == 20);
}

TEST_CASE("mode occupations") {
  const double L = 5.0, beta = 1.0;
  const int64_t N = 30;
  for (int d : {1, 3}) {
    const auto t = table(d, L, beta, N);
    const double q = 2.0 * oracle::pi / L;
    const int K = d == 1 ? 3 : 2;  // small enough that the tail matters
    double sum = 0.0, tail_bound = 0.0;
    std::vector<int64_t> m(d, -K);
    while (true) {
      double k2 = 0.0;
      for (auto v : m) k2 += q * q * double(v * v);
      const double occ = mode_occupation(t, m);
      sum += occ;
      if (k2 > 0.0) CHECK(occ <= 1.0 / std::expm1(beta * k2) * (1.0 + 1e-12));
      int i = 0;
      while (i < d && ++m[i] > K) m[i++] = -K;
      if (i == d) break;
    }
    // modes outside |m_i| <= K hold at most 1/(e^{beta k^2} - 1) each
    const int far = 3 * K;
    std::vector<int64_t> w(d, -far);
    while (true) {
      bool outside = false;
      double k2 = 0.0;
      for (auto v : w) {
        outside = outside || std::abs(v) > K;
        k2 += q * q * double(v * v);
      }
      if (outside) tail_bound += 1.0 / std::expm1(beta * k2);
      int i = 0;
      while (i < d && ++w[i] > far) w[i++] = -far;
      if (i == d) break;
    }
    INFO("d=" << d << " sum=" << sum << " tail<=" << tail_bound);
    CHECK(sum <= N * (1.0 + 1e-12));
    CHECK(N - sum <= tail_bound + 1e-12);
  }
  const auto cold = table(3, 2.0, 50.0, 10);
  const int64_t z[3] = {0, 0, 0};
  CHECK(mode_occupation(cold, z) == doctest::Approx(10.0).epsilon(1e-9));
  const double k_bad[3] = {0.1, 0, 0};
  CHECK_THROWS_AS(mode_occupation_wavevector(cold, k_bad), ArgumentError);
}

TEST_CASE("zero-mode tail probabilities") {
  const double rc = critical_density(1.0, 3).value;
  const double L = 16.0;
  const auto t = table(3, L, 1.0, particles_at(2.0 * rc, L, 3));
  CHECK(zero_mode_tail(t, 0) == 1.0);
  double last = 1.0;
  for (int64_t i = 1; i <= t.particles(); ++i) {
    const double p = zero_mode_tail(t, i);
    CHECK(p <= last);
    last = p;
  }
  CHECK(zero_mode_tail(t, t.particles() + 1) == 0.0);
  const int64_t half = int64_t(std::floor(t.volume() * (t.density() - rc) / 2.0));
  CHECK(zero_mode_tail(t, half) > 0.99);
}

TEST_CASE("condensate density lies in [0, rho]") {
  for (double f : {0.5, 2.0})
    for (double L : {4.0, 8.0}) {
      const auto t = table(3, L, 1.0, particles_at(f * critical_density(1.0, 3).value, L, 3));
      const double c = condensate_density(t);
      CHECK(c >= 0.0);
      CHECK(c <= t.density());
    }
}

TEST_CASE("large deviation rates") {
  const double rc = critical_density(1.0, 3).value;
  // a above the excess density: strictly negative
  for (double L : {8.0, 12.0}) {
    const auto t = table(3, L, 1.0, particles_at(2.0 * rc, L, 3));
    CHECK(large_deviation_rate(t, 1.5 * rc) < 0.0);
    const auto ld = large_deviation(t, 1.5 * rc);
    CHECK(ld.reference < 0.0);
    CHECK(ld.threshold == int64_t(std::ceil(t.volume() * 1.5 * rc)));
    CHECK_THROWS_AS(large_deviation_rate(t, 1.01 * t.density()), DomainError);
  }
  // a inside the condensed excess: the rate vanishes
  std::vector<double> small;
  for (double L : {8.0, 12.0, 16.0}) {
    const auto t = table(3, L, 1.0, particles_at(2.0 * rc, L, 3));
    small.push_back(std::abs(large_deviation_rate(t, 0.5 * rc)));
  }
  CHECK(small[2] < small[0]);
  CHECK(small[2] < 1e-3);
}

TEST_CASE("tables are deterministic") {
  const auto a = table(3, 7.0, 0.8, 300), b = table(3, 7.0, 0.8, 300);
  for (int64_t j = 0; j <= 300; ++j) CHECK(a.log_partition(j) == b.log_partition(j));
  for (int64_t n = 1; n <= 300; ++n) CHECK(cycle_density(a, n) == cycle_density(b, n));
}
