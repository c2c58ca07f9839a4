#include "bosecycles/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bosecycles/errors.hpp"

namespace bosecycles {

namespace {

constexpr double kRelTol = 1e-15;
constexpr int kMaxDirectImages = 50;
constexpr double kLogInvTol = 34.538776394910684;  // -log(1e-15)

void check_a(double a) {
  if (!std::isfinite(a) || !(a > 0.0))
    throw ArgumentError("theta sum needs finite a > 0, got " + std::to_string(a));
}

double log_direct(double a, double b) {
  const double k0 = std::nearbyint(b);
  const double d0 = k0 - b;
  double sum = 1.0;
  for (int m = 1;; ++m) {
    const double shell = std::exp(-a * (m * m + 2.0 * m * d0)) + std::exp(-a * (m * m - 2.0 * m * d0));
    sum += shell;
    if (shell < kRelTol * sum) break;
  }
  return -a * d0 * d0 + std::log(sum);
}

double log_dual(double a, double b) {
  const double q = std::numbers::pi * std::numbers::pi / a;
  double sum = 1.0;
  for (int m = 1;; ++m) {
    const double w = std::exp(-q * m * m);
    sum += 2.0 * w * std::cos(2.0 * std::numbers::pi * m * b);
    if (w < 1e-17) break;
  }
  return 0.5 * std::log(std::numbers::pi / a) + std::log(sum);
}

}  // namespace

int direct_image_count(double a) {
  check_a(a);
  const double k = std::ceil(std::sqrt(kLogInvTol / a)) + 1.0;
  if (k > 1e6) return 2000001;
  return 2 * static_cast<int>(k) + 1;
}

double log_gaussian_lattice_sum(double a, double b) {
  check_a(a);
  if (!std::isfinite(b)) throw ArgumentError("theta sum needs finite b");
  if (direct_image_count(a) <= kMaxDirectImages) return log_direct(a, b);
  return log_dual(a, b);
}

double gaussian_lattice_sum(double a, double b) { return std::exp(log_gaussian_lattice_sum(a, b)); }

double log_heat_kernel(double t, std::span<const double> x, const SimulationBox& box) {
  if (!std::isfinite(t) || !(t > 0.0)) throw ArgumentError("heat kernel needs finite t > 0");
  box.check_point(x);
  const int d = box.dim();
  const double norm = -0.5 * std::log(4.0 * std::numbers::pi * t);
  double s = d * norm;
  if (!box.periodic()) {
    for (int i = 0; i < d; ++i) s -= x[i] * x[i] / (4.0 * t);
    return s;
  }
  const double L = box.side();
  const double a = L * L / (4.0 * t);
  for (int i = 0; i < d; ++i) s += log_gaussian_lattice_sum(a, -x[i] / L);
  return s;
}

double heat_kernel(double t, std::span<const double> x, const SimulationBox& box) {
  return std::exp(log_heat_kernel(t, x, box));
}

double theta_coefficient(int64_t n, std::span<const double> x, const SimulationBox& box,
                         double beta) {
  if (n < 1) throw ArgumentError("theta_coefficient needs n >= 1");
  if (!std::isfinite(beta) || !(beta > 0.0)) throw ArgumentError("beta must be positive");
  box.check_point(x);
  const double nb = static_cast<double>(n) * beta;
  if (!box.periodic()) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return std::exp(-r2 / (4.0 * nb));
  }
  const double L = box.side();
  const double a = L * L / (4.0 * nb);
  const double ref = log_gaussian_lattice_sum(a, 0.0);
  double s = 0.0;
  for (int i = 0; i < box.dim(); ++i) s += log_gaussian_lattice_sum(a, x[i] / L) - ref;
  return std::exp(s);
}

std::pair<double, double> integral_sandwich(double a, double b) {
  if (!std::isfinite(a) || !(a > 0.0)) throw ArgumentError("integral_sandwich needs a > 0");
  if (!std::isfinite(b)) throw ArgumentError("integral_sandwich needs finite b");
  const double g = std::sqrt(std::numbers::pi / a);
  return {g - 1.0, g + 1.0};
}

void sample_bridge_into(double t, std::span<const double> x, std::span<const double> y, int M,
                        const SimulationBox& box, Rng& rng, std::span<double> beads,
                        std::span<long> wraps) {
  const int d = box.dim();
  const double L = box.side();
  // the image-shifted end point goes straight into the last bead slot
  double* tgt = beads.data() + static_cast<size_t>(M) * d;
  for (int i = 0; i < d; ++i) {
    long z = 0;
    if (box.periodic()) {
      const double delta = y[i] - x[i];
      const long z0 = std::lround(-delta / L);
      const double a = L * L / (4.0 * t);
      const long K = static_cast<long>(std::ceil(std::sqrt((kLogInvTol + 2.5) / a))) + 1;
      if (K > 100000) throw UnsupportedError("bridge time too long compared to the box side");
      const double e0 = (delta + L * z0) / L;
      auto weight = [&](long k) {
        const double e = (delta + L * k) / L;
        return std::exp(-a * (e * e - e0 * e0));
      };
      double total = 0.0;
      for (long k = z0 - K; k <= z0 + K; ++k) total += weight(k);
      double u = rng.uniform() * total;
      z = z0 + K;
      for (long k = z0 - K; k <= z0 + K; ++k) {
        u -= weight(k);
        if (u < 0.0) {
          z = k;
          break;
        }
      }
    }
    wraps[i] = z;
    tgt[i] = y[i] + (box.periodic() ? L * static_cast<double>(z) : 0.0);
  }
  const double dt = t / M;
  for (int i = 0; i < d; ++i) beads[i] = x[i];
  for (int k = 1; k < M; ++k) {
    const int left = M - k + 1;  // steps from bead k-1 to the end
    const double var = 2.0 * dt * (left - 1) / left;
    const double sd = std::sqrt(var);
    for (int i = 0; i < d; ++i) {
      const double prev = beads[(k - 1) * d + i];
      beads[k * d + i] = prev + (tgt[i] - prev) / left + sd * rng.normal();
    }
  }
}

DiscretizedPath sample_bridge(double t, std::span<const double> x, std::span<const double> y,
                              int M, const SimulationBox& box, Rng& rng) {
  if (!std::isfinite(t) || !(t > 0.0)) throw ArgumentError("bridge time must be positive");
  if (M < 1) throw ArgumentError("bridge needs M >= 1");
  box.check_point(x);
  box.check_point(y);
  DiscretizedPath p;
  p.dim = box.dim();
  p.winding = 1;
  p.slices_per_leg = M;
  p.leg_time = t;
  p.beads.assign(static_cast<size_t>(M + 1) * p.dim, 0.0);
  p.wraps.assign(p.dim, 0);
  sample_bridge_into(t, x, y, M, box, rng, p.beads, p.wraps);
  return p;
}

DiscretizedPath concatenate(std::span<const DiscretizedPath> paths, const SimulationBox& box) {
  if (paths.empty()) throw ArgumentError("concatenate needs at least one path");
  const DiscretizedPath& first = paths.front();
  for (const auto& p : paths) {
    if (p.dim != first.dim || p.slices_per_leg != first.slices_per_leg ||
        p.leg_time != first.leg_time)
      throw ArgumentError("concatenated paths must share dimension and time grid");
    if (p.dim != box.dim()) throw ArgumentError("path dimension differs from the box");
    if (p.bead_count() != static_cast<size_t>(p.winding * p.slices_per_leg + 1))
      throw ArgumentError("path bead count does not match its winding");
  }
  DiscretizedPath out = first;
  const int d = first.dim;
  const double L = box.side();
  std::vector<long> offset(d, 0);
  for (size_t j = 1; j < paths.size(); ++j) {
    const DiscretizedPath& p = paths[j];
    const auto last = out.bead(out.bead_count() - 1);
    const auto start = p.bead(0);
    for (int i = 0; i < d; ++i) {
      const double diff = last[i] - start[i];
      long k = 0;
      double resid = diff;
      if (box.periodic()) {
        k = std::lround(diff / L);
        resid = diff - L * static_cast<double>(k);
      }
      if (std::abs(resid) > 1e-9 * std::max(1.0, std::abs(last[i])))
        throw ContractError("concatenate: end point of path " + std::to_string(j - 1) +
                            " does not match the start of path " + std::to_string(j));
      offset[i] = k;
    }
    for (size_t b = 1; b < p.bead_count(); ++b) {
      const auto src = p.bead(b);
      for (int i = 0; i < d; ++i)
        out.beads.push_back(src[i] + (box.periodic() ? L * static_cast<double>(offset[i]) : 0.0));
    }
    out.winding += p.winding;
  }
  const DiscretizedPath& tail = paths.back();
  for (int i = 0; i < d; ++i) out.wraps[i] = tail.wraps[i] + (paths.size() > 1 ? offset[i] : 0);
  return out;
}

}  // namespace bosecycles
