#include "bosecycles/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

#include "bosecycles/errors.hpp"
#include "bosecycles/heat_kernel.hpp"
#include "bosecycles/ideal_grand.hpp"
#include "bosecycles/rng.hpp"

namespace bosecycles {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(double beta, double mu, int dim) {
  if (!std::isfinite(beta) || !(beta > 0.0)) throw ArgumentError("beta must be positive and finite");
  if (dim < 1) throw ArgumentError("dimension must be >= 1");
  if (!std::isfinite(mu)) throw ArgumentError("mu must be finite");
  if (!(mu < 0.0)) throw DomainError("the cluster criterion needs mu < 0");
}

void check_sampling(const ClusterSampling& s) {
  if (s.samples < 2) throw ArgumentError("need at least two samples");
  if (s.slices < 1) throw ArgumentError("need at least one slice per beta");
  if (s.max_winding < 1) throw ArgumentError("max winding must be >= 1");
}

// Closed free trajectory of winding n through the origin, n * M + 1 beads.
DiscretizedPath closed_loop(int n, double beta, int dim, int slices, Rng& rng) {
  const std::vector<double> origin(dim, 0.0);
  return sample_bridge(n * beta, origin, origin, n * slices, SimulationBox::free_space(dim), rng);
}

// beta U(w, w') on the bead grid, w' shifted by x; stops early at +inf.
double pair_action(const DiscretizedPath& w, const DiscretizedPath& wp, std::span<const double> x,
                   const PairPotential& potential, double beta, int slices) {
  const int d = w.dim;
  const int n = static_cast<int>((w.bead_count() - 1) / slices);
  const int np = static_cast<int>((wp.bead_count() - 1) / slices);
  const double rc2 = potential.cutoff() * potential.cutoff();
  double s = 0.0;
  for (int t = 0; t < slices; ++t)
    for (int i = 0; i < n; ++i) {
      const auto a = w.bead(static_cast<size_t>(i) * slices + t);
      for (int j = 0; j < np; ++j) {
        const auto b = wp.bead(static_cast<size_t>(j) * slices + t);
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
          const double dx = a[k] - b[k] - x[k];
          r2 += dx * dx;
        }
        if (r2 >= rc2) continue;
        const double u = potential.of_squared(r2);
        if (u == kInf) return kInf;
        s += u;
      }
    }
  return beta / slices * s;
}

// Uniform shift x over the box outside which w and w' + x cannot interact;
// returns the box volume and writes x.
double sample_shift(const DiscretizedPath& w, const DiscretizedPath& wp, double reach, Rng& rng,
                    std::span<double> x) {
  const int d = w.dim;
  double vol = 1.0;
  for (int k = 0; k < d; ++k) {
    double wmin = kInf, wmax = -kInf, pmin = kInf, pmax = -kInf;
    for (size_t b = 0; b < w.bead_count(); ++b) {
      wmin = std::min(wmin, w.bead(b)[k]);
      wmax = std::max(wmax, w.bead(b)[k]);
    }
    for (size_t b = 0; b < wp.bead_count(); ++b) {
      pmin = std::min(pmin, wp.bead(b)[k]);
      pmax = std::max(pmax, wp.bead(b)[k]);
    }
    const double lo = wmin - pmax - reach, hi = wmax - pmin + reach;
    x[k] = lo + (hi - lo) * rng.uniform();
    vol *= hi - lo;
  }
  return vol;
}

double zeta_half_dim(int dim) { return bose_series(0.5 * dim, 0.0); }

}  // namespace

KpCondition kp_condition(double beta, double mu, const PairPotential& potential, int dim) {
  check_inputs(beta, mu, dim);
  KpCondition c;
  c.divergent = dim <= 2;
  if (potential.is_zero()) {
    c.holds = true;
    return c;
  }
  if (!potential.integrable()) {
    c.integrable = false;
    c.lhs = c.lhs_quadrature = kInf;
    c.threshold_mu = -kInf;
    c.reason = "potential is not integrable (hard core); criterion inapplicable";
    return c;
  }
  if (c.divergent) {
    c.lhs = c.lhs_quadrature = kInf;
    c.threshold_mu = -kInf;
    c.reason = "sum over windings of n^{-d/2} diverges for d <= 2";
    return c;
  }
  const double pref = std::pow(4.0 * std::numbers::pi * beta, -0.5 * dim) * zeta_half_dim(dim);
  c.lhs = pref * potential.integral(dim);
  c.lhs_quadrature = pref * potential.quadrature_integral(dim);
  c.threshold_mu = -c.lhs;
  c.holds = c.lhs <= -mu;
  return c;
}

double winding_class_weight(int64_t n, double beta, double mu, int dim) {
  if (n < 1) throw ArgumentError("winding must be >= 1");
  if (!std::isfinite(beta) || !(beta > 0.0)) throw ArgumentError("beta must be positive and finite");
  if (!std::isfinite(mu) || mu > 0.0) throw DomainError("winding weights need mu <= 0");
  if (dim < 1) throw ArgumentError("dimension must be >= 1");
  const double nn = static_cast<double>(n);
  return std::exp(beta * mu * nn - std::log(nn) - 0.5 * dim * std::log(4.0 * std::numbers::pi * nn * beta));
}

double winding_class_weight(int64_t n, double beta, double mu, const SimulationBox& box) {
  if (!box.periodic()) return winding_class_weight(n, beta, mu, box.dim());
  if (n < 1) throw ArgumentError("winding must be >= 1");
  if (!std::isfinite(beta) || !(beta > 0.0)) throw ArgumentError("beta must be positive and finite");
  if (!std::isfinite(mu) || mu > 0.0) throw DomainError("winding weights need mu <= 0");
  const double nn = static_cast<double>(n);
  const std::vector<double> origin(box.dim(), 0.0);
  return std::exp(beta * mu * nn - std::log(nn) + std::log(box.volume()) +
                  log_heat_kernel(nn * beta, origin, box));
}

KpIntegral kp_integral_check(double beta, double mu, const PairPotential& potential, int dim, int winding,
                             const ClusterSampling& sampling) {
  check_inputs(beta, mu, dim);
  check_sampling(sampling);
  if (winding < 1) throw ArgumentError("winding must be >= 1");
  const KpCondition cond = kp_condition(beta, mu, potential, dim);
  KpIntegral r;
  r.target = -beta * mu * winding;
  if (potential.is_zero()) {
    r.bound_holds = true;
    return r;
  }
  if (!std::isfinite(cond.lhs)) {
    r.certified_bound = r.sharp_estimate = r.tail = kInf;
    r.sharp_error = kInf;
    return r;
  }
  r.certified_bound = beta * winding * cond.lhs;
  r.bound_holds = r.certified_bound <= r.target;

  Rng base = Rng::stream(sampling.seed, 0);
  const DiscretizedPath w = closed_loop(winding, beta, dim, sampling.slices, base);
  const double reach = potential.cutoff();
  const int K = sampling.max_winding;
  std::vector<double> mean(K), var(K);
  std::vector<std::exception_ptr> errors(K);
  auto stratum = [&](int k) {
    try {
      const int np = k + 1;
      Rng rng = Rng::stream(sampling.seed, static_cast<uint64_t>(np));
      std::vector<double> x(dim);
      double s = 0.0, s2 = 0.0;
      for (int64_t i = 0; i < sampling.samples; ++i) {
        const DiscretizedPath wp = closed_loop(np, beta, dim, sampling.slices, rng);
        const double vol = sample_shift(w, wp, reach, rng, x);
        const double f = vol * -std::expm1(-pair_action(w, wp, x, potential, beta, sampling.slices));
        s += f;
        s2 += f * f;
      }
      const double S = static_cast<double>(sampling.samples);
      const double weight = std::pow(4.0 * std::numbers::pi * np * beta, -0.5 * dim) / np;
      mean[k] = weight * s / S;
      var[k] = weight * weight * std::max(0.0, s2 / S - (s / S) * (s / S)) / (S - 1.0);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  std::vector<std::thread> workers;
  for (int k = 0; k < K; ++k) workers.emplace_back(stratum, k);
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  double partial = 0.0;
  for (int np = 1; np <= K; ++np) partial += std::pow(static_cast<double>(np), -0.5 * dim);
  r.tail = beta * winding * potential.integral(dim) * std::pow(4.0 * std::numbers::pi * beta, -0.5 * dim) *
           std::max(0.0, zeta_half_dim(dim) - partial);
  double v = 0.0;
  r.sharp_estimate = r.tail;
  for (int k = 0; k < K; ++k) {
    r.sharp_estimate += mean[k];
    v += var[k];
  }
  r.sharp_error = std::sqrt(v);
  r.variance_blowup = r.sharp_estimate > 0.0 && r.sharp_error > 0.1 * r.sharp_estimate;
  return r;
}

TruncatedLogZ truncated_log_z(double beta, double mu, const PairPotential& potential, int dim, int k_max,
                              const ClusterSampling& sampling) {
  check_inputs(beta, mu, dim);
  check_sampling(sampling);
  if (k_max < 1) throw ArgumentError("k_max must be >= 1");
  if (k_max > 2) throw UnsupportedError("cluster series is implemented through pair order (k_max <= 2)");
  TruncatedLogZ r;
  r.condition_holds = kp_condition(beta, mu, potential, dim).holds;
  r.first_order = pressure(beta, mu, dim);
  r.beta_pressure = beta * r.first_order;

  // winding cut: the remaining weight is below 1e-12 of the total
  const double pref = std::pow(4.0 * std::numbers::pi * beta, -0.5 * dim);
  const double q = std::exp(beta * mu);
  int64_t cut = 1;
  while (pref * std::pow(q, static_cast<double>(cut + 1)) / ((1.0 - q) * static_cast<double>(cut + 1)) >=
         1e-12 * r.first_order)
    ++cut;
  r.max_winding = static_cast<int>(cut);

  if (k_max >= 2 && !potential.is_zero()) {
    std::vector<double> cdf(cut);
    double acc = 0.0;
    for (int64_t n = 1; n <= cut; ++n) {
      acc += winding_class_weight(n, beta, mu, dim);
      cdf[n - 1] = acc;
    }
    auto draw = [&](Rng& rng) {
      const double u = rng.uniform() * acc;
      return static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()) + 1;
    };
    Rng rng = Rng::stream(sampling.seed, 0);
    const double reach = potential.cutoff();
    std::vector<double> x(dim);
    double s = 0.0, s2 = 0.0;
    for (int64_t i = 0; i < sampling.samples; ++i) {
      const int n = draw(rng);
      const int np = draw(rng);
      const DiscretizedPath w = closed_loop(n, beta, dim, sampling.slices, rng);
      const DiscretizedPath wp = closed_loop(np, beta, dim, sampling.slices, rng);
      const double vol = sample_shift(w, wp, reach, rng, x);
      const double f = vol * std::expm1(-pair_action(w, wp, x, potential, beta, sampling.slices));
      s += f;
      s2 += f * f;
    }
    const double S = static_cast<double>(sampling.samples);
    const double scale = 0.5 * acc * acc;
    r.second_order = scale * s / S;
    r.second_order_error = scale * std::sqrt(std::max(0.0, s2 / S - (s / S) * (s / S)) / (S - 1.0));
  }
  r.total = r.first_order + r.second_order;
  return r;
}

std::optional<RatioBracket> ratio_bound(double beta, double mu, const PairPotential& potential, int dim,
                                        int winding) {
  if (winding < 1) throw ArgumentError("winding must be >= 1");
  const KpCondition cond = kp_condition(beta, mu, potential, dim);
  RatioBracket b;
  b.exponent_bound = -beta * mu * winding;
  if (potential.is_zero()) {
    b.lower = b.upper = 1.0;
    b.exact = true;
    return b;
  }
  if (!cond.holds) return std::nullopt;
  b.lower = std::exp(beta * mu * winding);
  b.upper = 1.0;
  return b;
}

}  // namespace bosecycles
