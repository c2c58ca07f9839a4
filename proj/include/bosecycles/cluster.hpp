#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bosecycles/geometry.hpp"
#include "bosecycles/potential.hpp"

namespace bosecycles {

// Convergence condition (4 pi beta)^{-d/2} (int U) sum_n n^{-d/2} <= -mu.
struct KpCondition {
  double lhs = 0.0;             // +inf when inapplicable
  double lhs_quadrature = 0.0;  // same with the radial quadrature of int U
  double threshold_mu = 0.0;    // -lhs
  bool holds = false;
  bool divergent = false;   // d <= 2: the winding series diverges
  bool integrable = true;   // false for a hard core
  std::string reason;       // why the criterion does not apply, empty otherwise
};

KpCondition kp_condition(double beta, double mu, const PairPotential& potential, int dim);

// Mass of the winding-n class of closed trajectories under the ideal
// reference measure: e^{beta mu n} / n (4 pi n beta)^{-d/2} per unit volume,
// and the finite-box variant e^{beta mu n} / n V g_{n beta}(0) with images.
double winding_class_weight(int64_t n, double beta, double mu, int dim);
double winding_class_weight(int64_t n, double beta, double mu, const SimulationBox& box);

struct KpIntegral {
  double target = 0.0;           // -beta mu n
  double certified_bound = 0.0;  // linearised integral, exact: beta n lhs
  double sharp_estimate = 0.0;   // sampled integral, linearised tail beyond n_max
  double sharp_error = 0.0;
  double tail = 0.0;             // linearised contribution of windings > n_max
  bool bound_holds = false;      // certified_bound <= target
  bool variance_blowup = false;  // relative error of the sharp estimate > 10%
};

struct ClusterSampling {
  int64_t samples = 4000;  // per winding stratum
  int slices = 16;         // beads per beta on every trajectory
  int max_winding = 16;    // largest sampled partner winding
  uint64_t seed = 1;
};

// int [1 - e^{-beta U(w, w')}] e^{a(w')} dnu(w') for one sampled winding-n
// trajectory w, a(w') = -beta mu n'. Infinite volume.
KpIntegral kp_integral_check(double beta, double mu, const PairPotential& potential, int dim, int winding,
                             const ClusterSampling& sampling);

struct TruncatedLogZ {
  double first_order = 0.0;   // sum_n winding-class weights = p(beta, mu)
  double second_order = 0.0;  // (1/2) int int [e^{-beta U} - 1] dnu dnu per volume
  double second_order_error = 0.0;
  double total = 0.0;         // log Z / V through order k_max
  double beta_pressure = 0.0; // beta p(beta, mu) of the ideal gas, for reference
  bool condition_holds = false;
  int max_winding = 0;        // winding cut with tail mass below 1e-12
};

TruncatedLogZ truncated_log_z(double beta, double mu, const PairPotential& potential, int dim, int k_max,
                              const ClusterSampling& sampling);

// Certified bracket for Z(mu; w) / Z(mu) of a winding-n trajectory; empty
// when the convergence condition fails.
struct RatioBracket {
  double lower = 0.0;
  double upper = 1.0;
  double exponent_bound = 0.0;  // -beta mu n
  bool exact = false;           // U = 0: the ratio is 1
};

std::optional<RatioBracket> ratio_bound(double beta, double mu, const PairPotential& potential, int dim,
                                        int winding);

}  // namespace bosecycles
