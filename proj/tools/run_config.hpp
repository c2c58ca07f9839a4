#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace cli {

// Bad config file, unknown key, failed validation: exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PotentialSpec {
  std::string kind = "zero";  // zero | gaussian | hard_core | tabulated
  double strength = 1.0;
  double range = 1.0;
  double radius = 0.5;
  std::vector<double> r;
  std::vector<double> u;
};

struct ScheduleSpec {
  int64_t equilibration = 1000;
  int64_t sweeps = 10000;
  int block_size = 100;
  int chains = 1;
  int slices = 16;
  double mix_bridge = 1.0;
  double mix_start = 1.0;
  double mix_swap = 1.0;
  bool check_action = false;
  int64_t checkpoint_every = 0;  // sweeps between checkpoints, 0 = once at the end
};

struct ClusterSpec {
  int winding = 1;
  int k_max = 2;
  int64_t samples = 4000;
  int slices = 16;
  int max_winding = 16;
};

struct RunConfig {
  std::string ensemble = "canonical";
  int dim = 3;
  std::vector<double> sides;
  double beta = 1.0;
  std::optional<double> rho;
  std::optional<double> rho_factor;  // density in units of the critical density
  std::optional<int64_t> particles;
  std::optional<double> mu;
  double mu_min = -3.0;
  double mu_max = -0.01;
  int mu_points = 50;
  double rho_factor_min = 0.1;
  double rho_factor_max = 3.0;
  int rho_points = 30;
  int max_cycle = 50;
  std::vector<double> x;       // distances along the first axis
  std::vector<double> open_x;  // open-cycle estimator points (pimc)
  int sector_moves = 2;
  double cutoff_c = 1.0;
  PotentialSpec potential;
  ScheduleSpec schedule;
  ClusterSpec cluster;
  uint64_t seed = 1;
  std::string out = "out";

  nlohmann::json resolved;  // fully merged document, echoed into the manifest
};

nlohmann::json default_document();

// Merge `patch` into `base`, rejecting keys absent from `base`; `where` names
// the position for error messages.
void merge_checked(nlohmann::json& base, const nlohmann::json& patch, const std::string& where);

// KEY=VAL with a dotted key; VAL is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

RunConfig resolve(const std::optional<std::string>& config_path, const std::vector<std::string>& overrides,
                  const std::optional<uint64_t>& seed, const std::optional<std::string>& out);

}  // namespace cli
