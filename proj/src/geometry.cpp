#include "bosecycles/geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bosecycles/errors.hpp"

namespace bosecycles {

SimulationBox::SimulationBox(int dim, double side) : dim_(dim), side_(side) {
  if (dim < 1) throw ArgumentError("box dimension must be >= 1");
  if (std::isnan(side) || !(side > 0.0))
    throw ArgumentError("box side must be positive, got " + std::to_string(side));
}

SimulationBox SimulationBox::free_space(int dim) {
  return SimulationBox(dim, std::numeric_limits<double>::infinity());
}

bool SimulationBox::periodic() const { return std::isfinite(side_); }

double SimulationBox::volume() const { return std::pow(side_, dim_); }

double SimulationBox::min_image(double dx) const {
  if (!periodic()) return dx;
  double r = dx - side_ * std::floor(dx / side_);  // [0, L)
  if (r > 0.5 * side_) r -= side_;
  return r;
}

void SimulationBox::min_image(std::span<const double> dx, std::span<double> out) const {
  for (int i = 0; i < dim_; ++i) out[i] = min_image(dx[i]);
}

double SimulationBox::distance_sq(std::span<const double> a, std::span<const double> b) const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double d = min_image(a[i] - b[i]);
    s += d * d;
  }
  return s;
}

long SimulationBox::wrap(double& x) const {
  if (!periodic()) return 0;
  const double m = std::floor(x / side_);
  x -= m * side_;
  // x can round up to exactly L
  if (x >= side_) {
    x -= side_;
    return static_cast<long>(m) + 1;
  }
  return static_cast<long>(m);
}

void SimulationBox::check_point(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw ArgumentError("point has " + std::to_string(x.size()) + " coordinates, box dimension is " +
                        std::to_string(dim_));
  for (double v : x)
    if (!std::isfinite(v)) throw ArgumentError("point coordinate is not finite");
}

bool operator==(const SimulationBox& a, const SimulationBox& b) {
  return a.dim() == b.dim() && a.side() == b.side();
}

ThermoParams ThermoParams::canonical(double beta, double rho) {
  ThermoParams p;
  p.beta = beta;
  p.rho = rho;
  p.validate(Ensemble::canonical);
  return p;
}

ThermoParams ThermoParams::grand(double beta, double mu) {
  ThermoParams p;
  p.beta = beta;
  p.mu = mu;
  p.validate(Ensemble::grand);
  return p;
}

void ThermoParams::validate(Ensemble ensemble) const {
  if (!std::isfinite(beta) || beta <= 0.0) throw ArgumentError("beta must be positive and finite");
  if (mu.has_value() == rho.has_value())
    throw ArgumentError("exactly one of mu and rho must be set");
  if (ensemble == Ensemble::canonical) {
    if (!rho) throw ArgumentError("canonical ensemble needs rho");
    if (!std::isfinite(*rho) || *rho <= 0.0) throw ArgumentError("rho must be positive");
  } else {
    if (!mu) throw ArgumentError("grand-canonical ensemble needs mu");
    if (!std::isfinite(*mu)) throw ArgumentError("mu must be finite");
  }
}

}  // namespace bosecycles
