#pragma once

#include <optional>
#include <string>
#include <vector>

namespace bosecycles {

// Nonnegative, spherically symmetric pair potential U(|x|) with values in [0, +inf].
class PairPotential {
 public:
  enum class Kind { zero, gaussian, hard_core, tabulated };

  PairPotential();  // zero
  static PairPotential zero();
  static PairPotential gaussian(double strength, double range);  // u0 exp(-r^2 / range^2)
  static PairPotential hard_core(double radius);
  // Piecewise linear through (r_k, u_k); r_0 = 0, strictly increasing; U = 0 beyond r_K.
  static PairPotential tabulated(std::vector<double> r, std::vector<double> u);

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::zero; }
  bool integrable() const;

  double operator()(double r) const;
  double of_squared(double r2) const;

  // Beyond this distance U is zero (or below 1e-17 of its peak, gaussian).
  double cutoff() const { return cutoff_; }

  // Closed-form integral over R^d where one exists.
  std::optional<double> analytic_integral(int dim) const;
  // Radial quadrature of the integral over R^d; +inf for the hard core.
  double quadrature_integral(int dim) const;
  double integral(int dim) const;

  double strength() const { return strength_; }
  double range() const { return range_; }
  const std::vector<double>& grid_r() const { return r_; }
  const std::vector<double>& grid_u() const { return u_; }

  std::string describe() const;

 private:
  Kind kind_ = Kind::zero;
  double strength_ = 0.0;
  double range_ = 0.0;
  double cutoff_ = 0.0;
  std::vector<double> r_;
  std::vector<double> u_;
};

const char* kind_name(PairPotential::Kind kind);

}  // namespace bosecycles
