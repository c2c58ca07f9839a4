#include "bosecycles/potential.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bosecycles/errors.hpp"

namespace bosecycles {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sphere_area(int dim) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

}  // namespace

const char* kind_name(PairPotential::Kind kind) {
  switch (kind) {
    case PairPotential::Kind::zero: return "zero";
    case PairPotential::Kind::gaussian: return "gaussian";
    case PairPotential::Kind::hard_core: return "hard_core";
    case PairPotential::Kind::tabulated: return "tabulated";
  }
  return "unknown";
}

PairPotential::PairPotential() = default;

PairPotential PairPotential::zero() { return PairPotential(); }

PairPotential PairPotential::gaussian(double strength, double range) {
  if (!std::isfinite(strength) || strength < 0.0)
    throw ArgumentError("gaussian strength must be finite and >= 0");
  if (!std::isfinite(range) || !(range > 0.0)) throw ArgumentError("gaussian range must be positive");
  if (strength == 0.0) return zero();
  PairPotential p;
  p.kind_ = Kind::gaussian;
  p.strength_ = strength;
  p.range_ = range;
  p.cutoff_ = range * std::sqrt(std::log(1e17));
  return p;
}

PairPotential PairPotential::hard_core(double radius) {
  if (!std::isfinite(radius) || !(radius > 0.0)) throw ArgumentError("hard-core radius must be positive");
  PairPotential p;
  p.kind_ = Kind::hard_core;
  p.range_ = radius;
  p.cutoff_ = radius;
  return p;
}

PairPotential PairPotential::tabulated(std::vector<double> r, std::vector<double> u) {
  if (r.size() != u.size() || r.size() < 2)
    throw ArgumentError("tabulated potential needs at least two (r, u) pairs of equal length");
  if (r.front() != 0.0) throw ArgumentError("tabulated potential grid must start at r = 0");
  for (size_t k = 0; k < r.size(); ++k) {
    if (!std::isfinite(r[k])) throw ArgumentError("tabulated grid point is not finite");
    if (k > 0 && !(r[k] > r[k - 1])) throw ArgumentError("tabulated grid must be strictly increasing");
    if (std::isnan(u[k]) || u[k] < 0.0) throw ArgumentError("tabulated potential must be >= 0");
  }
  bool all_zero = true;
  for (double v : u) all_zero = all_zero && v == 0.0;
  if (all_zero) return zero();
  PairPotential p;
  p.kind_ = Kind::tabulated;
  p.r_ = std::move(r);
  p.u_ = std::move(u);
  p.cutoff_ = p.r_.back();
  return p;
}

bool PairPotential::integrable() const {
  if (kind_ == Kind::hard_core) return false;
  if (kind_ == Kind::tabulated)
    for (double v : u_)
      if (!std::isfinite(v)) return false;
  return true;
}

double PairPotential::operator()(double r) const {
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::gaussian: return strength_ * std::exp(-(r * r) / (range_ * range_));
    case Kind::hard_core: return r < range_ ? kInf : 0.0;
    case Kind::tabulated: {
      if (r >= r_.back()) return 0.0;
      const auto it = std::upper_bound(r_.begin(), r_.end(), r);
      const size_t k = static_cast<size_t>(it - r_.begin()) - 1;
      const double u0 = u_[k], u1 = u_[k + 1];
      if (!std::isfinite(u0) || !std::isfinite(u1)) return kInf;
      const double f = (r - r_[k]) / (r_[k + 1] - r_[k]);
      return u0 + f * (u1 - u0);
    }
  }
  return 0.0;
}

double PairPotential::of_squared(double r2) const {
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::gaussian: return strength_ * std::exp(-r2 / (range_ * range_));
    case Kind::hard_core: return r2 < range_ * range_ ? kInf : 0.0;
    case Kind::tabulated: return (*this)(std::sqrt(r2));
  }
  return 0.0;
}

std::optional<double> PairPotential::analytic_integral(int dim) const {
  if (dim < 1) throw ArgumentError("dimension must be >= 1");
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::gaussian: return strength_ * std::pow(std::numbers::pi * range_ * range_, 0.5 * dim);
    default: return std::nullopt;
  }
}

double PairPotential::quadrature_integral(int dim) const {
  if (dim < 1) throw ArgumentError("dimension must be >= 1");
  const double area = sphere_area(dim);
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::hard_core: return kInf;
    case Kind::gaussian: {
      boost::math::quadrature::exp_sinh<double> integrator;
      auto f = [&](double r) {
        const double u = (*this)(r);
        return u == 0.0 ? 0.0 : std::pow(r, dim - 1) * u;  // r^{d-1} overflows far out
      };
      return area * integrator.integrate(f, 0.0, kInf);
    }
    case Kind::tabulated: {
      if (!integrable()) return kInf;
      double s = 0.0;
      for (size_t k = 0; k + 1 < r_.size(); ++k) {
        auto f = [&](double r) { return std::pow(r, dim - 1) * (*this)(r); };
        s += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, r_[k], r_[k + 1], 0);
      }
      return area * s;
    }
  }
  return 0.0;
}

double PairPotential::integral(int dim) const {
  if (auto v = analytic_integral(dim)) return *v;
  return quadrature_integral(dim);
}

std::string PairPotential::describe() const {
  std::ostringstream os;
  os << kind_name(kind_);
  if (kind_ == Kind::gaussian) os << "(u0=" << strength_ << ", r=" << range_ << ")";
  if (kind_ == Kind::hard_core) os << "(radius=" << range_ << ")";
  if (kind_ == Kind::tabulated) os << "(" << r_.size() << " points)";
  return os.str();
}

}  // namespace bosecycles
