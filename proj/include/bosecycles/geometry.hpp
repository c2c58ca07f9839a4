#pragma once

#include <optional>
#include <span>
#include <vector>

namespace bosecycles {

using Point = std::vector<double>;

// Cubic box [0, L)^d with periodic boundaries. side = +inf describes R^d.
class SimulationBox {
 public:
  SimulationBox(int dim, double side);
  static SimulationBox free_space(int dim);

  int dim() const { return dim_; }
  double side() const { return side_; }
  bool periodic() const;
  double volume() const;

  // Coordinate difference reduced into (-L/2, L/2].
  double min_image(double dx) const;
  void min_image(std::span<const double> dx, std::span<double> out) const;
  double distance_sq(std::span<const double> a, std::span<const double> b) const;

  // Coordinate folded into [0, L); returns the image index that was removed.
  long wrap(double& x) const;

  void check_point(std::span<const double> x) const;

 private:
  int dim_;
  double side_;
};

bool operator==(const SimulationBox& a, const SimulationBox& b);

enum class Ensemble { canonical, grand };

struct ThermoParams {
  double beta = 1.0;
  std::optional<double> mu;
  std::optional<double> rho;

  static ThermoParams canonical(double beta, double rho);
  static ThermoParams grand(double beta, double mu);
  void validate(Ensemble ensemble) const;
};

}  // namespace bosecycles
