#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bosecycles/geometry.hpp"
#include "bosecycles/rng.hpp"

namespace bosecycles {

// sum_{k in Z} exp(-a (k - b)^2), a > 0. Direct image sum, or the
// Poisson-dual form when the direct sum would need more than 50 images.
double gaussian_lattice_sum(double a, double b);
double log_gaussian_lattice_sum(double a, double b);

// Number of images the direct form needs for relative accuracy 1e-15.
int direct_image_count(double a);

// Periodic heat kernel (4 pi t)^{-d/2} sum_z exp(-(x + L z)^2 / 4t).
double heat_kernel(double t, std::span<const double> x, const SimulationBox& box);
double log_heat_kernel(double t, std::span<const double> x, const SimulationBox& box);

// Ideal-gas coefficient of the n-cycle in the two-point function:
// prod_i theta(L^2/4n beta, x_i/L) / theta(L^2/4n beta, 0).
double theta_coefficient(int64_t n, std::span<const double> x, const SimulationBox& box,
                         double beta);

// Bracket of sum_k exp(-a (k - b)^2), valid for every real b.
std::pair<double, double> integral_sandwich(double a, double b);

// Trajectory on a uniform time grid. Beads are stored unwrapped; the last
// bead sits at (declared end point) + side * wraps.
struct DiscretizedPath {
  int dim = 1;
  int64_t winding = 1;
  int slices_per_leg = 1;
  double leg_time = 1.0;
  std::vector<double> beads;  // (winding * slices_per_leg + 1) * dim
  std::vector<long> wraps;    // dim

  size_t bead_count() const { return beads.size() / dim; }
  std::span<const double> bead(size_t k) const { return {beads.data() + k * dim, size_t(dim)}; }
  std::span<double> bead(size_t k) { return {beads.data() + k * dim, size_t(dim)}; }
  double time_step() const { return leg_time / slices_per_leg; }
  double total_time() const { return leg_time * winding; }
};

// Brownian bridge x -> y in time t with M steps. The image of y is drawn with
// probability proportional to exp(-(y + L z - x)^2 / 4t).
DiscretizedPath sample_bridge(double t, std::span<const double> x, std::span<const double> y,
                              int M, const SimulationBox& box, Rng& rng);

// Same, writing the M + 1 beads into `beads` and the image into `wraps`.
void sample_bridge_into(double t, std::span<const double> x, std::span<const double> y, int M,
                        const SimulationBox& box, Rng& rng, std::span<double> beads,
                        std::span<long> wraps);

// Join paths whose end and start points agree modulo the torus.
DiscretizedPath concatenate(std::span<const DiscretizedPath> paths, const SimulationBox& box);

}  // namespace bosecycles
