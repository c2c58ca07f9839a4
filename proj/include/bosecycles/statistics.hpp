#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace bosecycles {

// Counts of n-cycles per recorded configuration, accumulated in blocks of
// fixed size. Only complete blocks enter the estimates.
class CycleHistogram {
 public:
  CycleHistogram(int particles, double volume, int block_size);

  // Sorted or unsorted cycle lengths of one configuration; must sum to N.
  void record(std::span<const int> cycle_lengths);

  // Append the complete blocks of `other`. Blocks are kept in a canonical
  // order, so merging is associative and independent of the merge order.
  void merge(const CycleHistogram& other);

  int particles() const { return particles_; }
  double volume() const { return volume_; }
  int block_size() const { return block_size_; }
  int64_t blocks() const { return static_cast<int64_t>(blocks_.size()); }
  int64_t samples() const { return blocks() * block_size_; }
  int64_t pending() const { return pending_; }

  // Sum over complete blocks of the number of n-cycles.
  int64_t count(int n) const;
  const std::vector<int64_t>& block_counts(int64_t b) const { return blocks_[b]; }

  // rho(n) = n <#n-cycles> / V and its blocked standard error.
  double density(int n) const;
  double standard_error(int n) const;
  std::vector<double> densities() const;
  std::vector<double> standard_errors() const;

  // Per-particle mean cycle length sum_n n rho(n) / rho.
  double mean_cycle_length() const;
  double mean_cycle_length_error() const;

  // Fraction of particles in n-cycles within block b, index n - 1.
  std::vector<double> block_fractions(int64_t b) const;

  // Configurations rejected by record because their lengths did not sum to N.
  int64_t invariant_violations() const { return violations_; }

  void save(std::ostream& out) const;
  static CycleHistogram load(std::istream& in);

  bool operator==(const CycleHistogram& other) const;

 private:
  int particles_;
  double volume_;
  int block_size_;
  std::vector<std::vector<int64_t>> blocks_;
  std::vector<int64_t> current_;
  int64_t pending_ = 0;
  int64_t violations_ = 0;
};

struct ExactComparison {
  // Bins of consecutive cycle lengths [first, last], each with exact
  // probability >= min_mass; the last bin is dropped from the test.
  std::vector<std::pair<int, int>> bins;
  std::vector<double> exact;    // bin probabilities, tested bins only
  std::vector<double> sampled;
  double hotelling_t2 = 0.0;
  double f_statistic = 0.0;
  int dof1 = 0;
  int dof2 = 0;
  double p_value = 0.0;
  std::vector<double> z_scores;  // per cycle length, (sampled - exact) / error; 0 if error is 0
  double max_abs_z = 0.0;
};

// Hotelling T^2 test of the blocked bin probabilities against the exact
// cycle densities (index n - 1, summing to N / V).
ExactComparison compare_to_exact(const CycleHistogram& histogram, std::span<const double> exact_densities,
                                 double min_mass = 0.02);

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace bosecycles
