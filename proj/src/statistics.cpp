#include "bosecycles/statistics.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>
#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "bosecycles/errors.hpp"

namespace bosecycles {

CycleHistogram::CycleHistogram(int particles, double volume, int block_size)
    : particles_(particles), volume_(volume), block_size_(block_size) {
  if (particles < 1) throw ArgumentError("histogram needs at least one particle");
  if (!std::isfinite(volume) || !(volume > 0.0)) throw ArgumentError("histogram volume must be positive");
  if (block_size < 1) throw ArgumentError("block size must be >= 1");
  current_.assign(particles, 0);
}

void CycleHistogram::record(std::span<const int> cycle_lengths) {
  int64_t total = 0;
  for (int n : cycle_lengths) {
    if (n < 1 || n > particles_) throw ContractError("cycle length out of range");
    total += n;
  }
  if (total != particles_) {
    ++violations_;
    throw ContractError("cycle lengths do not sum to the particle number");
  }
  for (int n : cycle_lengths) ++current_[n - 1];
  if (++pending_ == block_size_) {
    blocks_.push_back(current_);
    std::fill(current_.begin(), current_.end(), 0);
    pending_ = 0;
  }
}

void CycleHistogram::merge(const CycleHistogram& other) {
  if (other.particles_ != particles_ || other.volume_ != volume_ || other.block_size_ != block_size_)
    throw ArgumentError("histograms with different N, volume or block size cannot be merged");
  blocks_.insert(blocks_.end(), other.blocks_.begin(), other.blocks_.end());
  std::sort(blocks_.begin(), blocks_.end());
  violations_ += other.violations_;
}

int64_t CycleHistogram::count(int n) const {
  if (n < 1 || n > particles_) throw ArgumentError("cycle length out of range");
  int64_t c = 0;
  for (const auto& b : blocks_) c += b[n - 1];
  return c;
}

double CycleHistogram::density(int n) const {
  if (blocks_.empty()) return 0.0;
  return static_cast<double>(n) * static_cast<double>(count(n)) /
         (static_cast<double>(samples()) * volume_);
}

double CycleHistogram::standard_error(int n) const {
  const int64_t B = blocks();
  if (B < 2) return std::numeric_limits<double>::infinity();
  const double scale = static_cast<double>(n) / (static_cast<double>(block_size_) * volume_);
  const double mean = density(n);
  double ss = 0.0;
  for (const auto& b : blocks_) {
    const double v = scale * static_cast<double>(b[n - 1]) - mean;
    ss += v * v;
  }
  return std::sqrt(ss / static_cast<double>(B - 1) / static_cast<double>(B));
}

std::vector<double> CycleHistogram::densities() const {
  std::vector<double> out(particles_);
  for (int n = 1; n <= particles_; ++n) out[n - 1] = density(n);
  return out;
}

std::vector<double> CycleHistogram::standard_errors() const {
  std::vector<double> out(particles_);
  for (int n = 1; n <= particles_; ++n) out[n - 1] = standard_error(n);
  return out;
}

namespace {

double block_mean_length(const std::vector<int64_t>& counts, int particles, int block_size) {
  int64_t s = 0;
  for (size_t k = 0; k < counts.size(); ++k) s += static_cast<int64_t>(k + 1) * static_cast<int64_t>(k + 1) * counts[k];
  return static_cast<double>(s) / (static_cast<double>(particles) * block_size);
}

}  // namespace

double CycleHistogram::mean_cycle_length() const {
  if (blocks_.empty()) return 0.0;
  double s = 0.0;
  for (const auto& b : blocks_) s += block_mean_length(b, particles_, block_size_);
  return s / static_cast<double>(blocks());
}

double CycleHistogram::mean_cycle_length_error() const {
  const int64_t B = blocks();
  if (B < 2) return std::numeric_limits<double>::infinity();
  const double mean = mean_cycle_length();
  double ss = 0.0;
  for (const auto& b : blocks_) {
    const double v = block_mean_length(b, particles_, block_size_) - mean;
    ss += v * v;
  }
  return std::sqrt(ss / static_cast<double>(B - 1) / static_cast<double>(B));
}

std::vector<double> CycleHistogram::block_fractions(int64_t b) const {
  std::vector<double> out(particles_);
  const double norm = static_cast<double>(particles_) * block_size_;
  for (int n = 1; n <= particles_; ++n) out[n - 1] = n * static_cast<double>(blocks_[b][n - 1]) / norm;
  return out;
}

void CycleHistogram::save(std::ostream& out) const {
  out << "histogram " << particles_ << ' ' << std::hexfloat << volume_ << std::defaultfloat << ' '
      << block_size_ << ' ' << blocks_.size() << ' ' << pending_ << ' ' << violations_ << '\n';
  auto row = [&](const std::vector<int64_t>& v) {
    for (size_t k = 0; k < v.size(); ++k) out << (k ? " " : "") << v[k];
    out << '\n';
  };
  for (const auto& b : blocks_) row(b);
  row(current_);
}

CycleHistogram CycleHistogram::load(std::istream& in) {
  std::string tag, volume;
  int particles = 0, block_size = 0;
  size_t nblocks = 0;
  int64_t pending = 0, violations = 0;
  in >> tag >> particles >> volume >> block_size >> nblocks >> pending >> violations;
  if (!in || tag != "histogram") throw IoError("malformed histogram record");
  CycleHistogram h(particles, std::strtod(volume.c_str(), nullptr), block_size);
  h.blocks_.assign(nblocks, std::vector<int64_t>(particles));
  for (auto& b : h.blocks_)
    for (auto& c : b) in >> c;
  for (auto& c : h.current_) in >> c;
  if (!in) throw IoError("truncated histogram record");
  h.pending_ = pending;
  h.violations_ = violations;
  return h;
}

bool CycleHistogram::operator==(const CycleHistogram& other) const {
  return particles_ == other.particles_ && volume_ == other.volume_ && block_size_ == other.block_size_ &&
         blocks_ == other.blocks_ && current_ == other.current_ && pending_ == other.pending_;
}

ExactComparison compare_to_exact(const CycleHistogram& histogram, std::span<const double> exact_densities,
                                 double min_mass) {
  const int N = histogram.particles();
  if (static_cast<int>(exact_densities.size()) != N)
    throw ArgumentError("exact spectrum length differs from the particle number");
  if (!(min_mass > 0.0 && min_mass < 1.0)) throw ArgumentError("bin mass must lie in (0, 1)");
  const double rho = N / histogram.volume();

  ExactComparison out;
  // greedy bins over n = 1..N, a short remainder joins the last bin
  std::vector<double> mass;
  int first = 1;
  double acc = 0.0;
  for (int n = 1; n <= N; ++n) {
    acc += exact_densities[n - 1] / rho;
    if (acc >= min_mass) {
      out.bins.emplace_back(first, n);
      mass.push_back(acc);
      first = n + 1;
      acc = 0.0;
    }
  }
  if (first <= N) {
    if (out.bins.empty()) {
      out.bins.emplace_back(first, N);
      mass.push_back(acc);
    } else {
      out.bins.back().second = N;
      mass.back() += acc;
    }
  }

  const int64_t B = histogram.blocks();
  std::vector<std::vector<double>> fractions(B);
  for (int64_t b = 0; b < B; ++b) fractions[b] = histogram.block_fractions(b);

  const std::vector<double> err = histogram.standard_errors();
  out.z_scores.assign(N, 0.0);
  for (int n = 1; n <= N; ++n) {
    const double e = err[n - 1];
    if (e > 0.0 && std::isfinite(e)) out.z_scores[n - 1] = (histogram.density(n) - exact_densities[n - 1]) / e;
    out.max_abs_z = std::max(out.max_abs_z, std::abs(out.z_scores[n - 1]));
  }

  const int p = static_cast<int>(out.bins.size()) - 1;
  out.dof1 = p;
  out.dof2 = static_cast<int>(B) - p;
  if (p < 1) {
    out.p_value = 1.0;  // a single bin carries no information
    return out;
  }
  if (B <= p) throw ArgumentError("need more blocks than tested bins for the Hotelling test");

  Eigen::MatrixXd X(B, p);
  for (int64_t b = 0; b < B; ++b)
    for (int k = 0; k < p; ++k) {
      double s = 0.0;
      for (int n = out.bins[k].first; n <= out.bins[k].second; ++n) s += fractions[b][n - 1];
      X(b, k) = s;
    }
  const Eigen::VectorXd mean = X.colwise().mean();
  const Eigen::MatrixXd centered = X.rowwise() - mean.transpose();
  const Eigen::MatrixXd S = centered.transpose() * centered / static_cast<double>(B - 1);
  Eigen::VectorXd diff(p);
  for (int k = 0; k < p; ++k) {
    diff(k) = mean(k) - mass[k];
    out.exact.push_back(mass[k]);
    out.sampled.push_back(mean(k));
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 0.0)
    throw ContractError("block covariance is singular; run longer or use fewer bins");
  out.hotelling_t2 = static_cast<double>(B) * diff.dot(ldlt.solve(diff));
  out.f_statistic = out.hotelling_t2 * (static_cast<double>(B) - p) / (p * static_cast<double>(B - 1));
  const boost::math::fisher_f_distribution<double> dist(out.dof1, out.dof2);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.f_statistic));
  return out;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ArgumentError("KS test needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  // Kolmogorov survival function
  double q = 0.0;
  if (lambda < 0.2) {
    q = 1.0;
  } else {
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
      q += term;
      if (std::abs(term) < 1e-16) break;
      sign = -sign;
    }
    q = std::clamp(2.0 * q, 0.0, 1.0);
  }
  return {d, q};
}

}  // namespace bosecycles
