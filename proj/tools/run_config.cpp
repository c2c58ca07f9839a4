#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace cli {

json default_document() {
  return json{
      {"ensemble", "canonical"},
      {"dim", 3},
      {"side", json::array({8.0})},
      {"beta", 1.0},
      {"rho", nullptr},
      {"rho_factor", 2.0},
      {"particles", nullptr},
      {"mu", nullptr},
      {"mu_grid", {{"min", -3.0}, {"max", -0.01}, {"points", 50}}},
      {"rho_grid", {{"min_factor", 0.1}, {"max_factor", 3.0}, {"points", 30}}},
      {"max_cycle", 50},
      {"x", json::array({0.0, 1.0, 2.0, 4.0})},
      {"open_x", json::array()},
      {"sector_moves", 2},
      {"cutoff_c", 1.0},
      {"potential",
       {{"kind", "zero"},
        {"strength", 1.0},
        {"range", 1.0},
        {"radius", 0.5},
        {"r", json::array()},
        {"u", json::array()}}},
      {"schedule",
       {{"equilibration", 1000},
        {"sweeps", 10000},
        {"block_size", 100},
        {"chains", 1},
        {"slices", 16},
        {"mix", {{"bridge", 1.0}, {"start", 1.0}, {"swap", 1.0}}},
        {"check_action", false},
        {"checkpoint_every", 0}}},
      {"cluster", {{"winding", 1}, {"k_max", 2}, {"samples", 4000}, {"slices", 16}, {"max_winding", 16}}},
      {"seed", 1},
      {"out", "out"},
  };
}

void merge_checked(json& base, const json& patch, const std::string& where) {
  if (!patch.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string path = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key '" + path + "'");
    json& slot = base[it.key()];
    if (slot.is_object())
      merge_checked(slot, it.value(), path);
    else
      slot = it.value();
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like KEY=VAL: " + assignment);
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  // build the nested patch from the dotted key
  json patch = value;
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
  merge_checked(doc, patch, "");
}

namespace {

template <class T>
T get(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

template <class T>
std::optional<T> get_optional(const json& doc, const char* key) {
  if (doc.at(key).is_null()) return std::nullopt;
  return get<T>(doc, key);
}

std::vector<double> number_list(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (v.is_number()) return {v.get<double>()};
  return get<std::vector<double>>(doc, key);
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

RunConfig resolve(const std::optional<std::string>& config_path, const std::vector<std::string>& overrides,
                  const std::optional<uint64_t>& seed, const std::optional<std::string>& out) {
  json doc = default_document();
  if (config_path) {
    std::ifstream in(*config_path);
    if (!in) throw ConfigError("cannot open config file " + *config_path);
    json file = json::parse(in, nullptr, false);
    if (file.is_discarded()) throw ConfigError("config file is not valid JSON: " + *config_path);
    merge_checked(doc, file, "");
  }
  for (const auto& o : overrides) apply_override(doc, o);
  if (seed) doc["seed"] = *seed;
  if (out) doc["out"] = *out;

  RunConfig c;
  c.ensemble = get<std::string>(doc, "ensemble");
  check(c.ensemble == "canonical" || c.ensemble == "grand", "ensemble must be 'canonical' or 'grand'");
  c.dim = get<int>(doc, "dim");
  check(c.dim >= 1 && c.dim <= 6, "dim must lie in 1..6");
  c.sides = number_list(doc, "side");
  check(!c.sides.empty(), "side needs at least one value");
  for (double L : c.sides) check(std::isfinite(L) && L > 0.0, "side lengths must be positive");
  c.beta = get<double>(doc, "beta");
  check(std::isfinite(c.beta) && c.beta > 0.0, "beta must be positive");
  c.rho = get_optional<double>(doc, "rho");
  c.rho_factor = get_optional<double>(doc, "rho_factor");
  c.particles = get_optional<int64_t>(doc, "particles");
  if (c.rho) check(std::isfinite(*c.rho) && *c.rho > 0.0, "rho must be positive");
  if (c.rho_factor) check(std::isfinite(*c.rho_factor) && *c.rho_factor > 0.0, "rho_factor must be positive");
  if (c.particles) check(*c.particles >= 1, "particles must be >= 1");
  c.mu = get_optional<double>(doc, "mu");
  if (c.mu) check(std::isfinite(*c.mu) && *c.mu <= 0.0, "mu must be <= 0");

  const json& mg = doc.at("mu_grid");
  c.mu_min = get<double>(mg, "min");
  c.mu_max = get<double>(mg, "max");
  c.mu_points = get<int>(mg, "points");
  check(c.mu_min < c.mu_max && c.mu_max <= 0.0 && c.mu_points >= 2, "mu_grid needs min < max <= 0, points >= 2");
  const json& rg = doc.at("rho_grid");
  c.rho_factor_min = get<double>(rg, "min_factor");
  c.rho_factor_max = get<double>(rg, "max_factor");
  c.rho_points = get<int>(rg, "points");
  check(c.rho_factor_min > 0.0 && c.rho_factor_min < c.rho_factor_max && c.rho_points >= 2,
        "rho_grid needs 0 < min_factor < max_factor, points >= 2");
  c.max_cycle = get<int>(doc, "max_cycle");
  check(c.max_cycle >= 1, "max_cycle must be >= 1");
  c.x = number_list(doc, "x");
  for (double v : c.x) check(std::isfinite(v) && v >= 0.0, "x distances must be >= 0");
  c.open_x = number_list(doc, "open_x");
  for (double v : c.open_x) check(std::isfinite(v) && v >= 0.0, "open_x distances must be >= 0");
  c.sector_moves = get<int>(doc, "sector_moves");
  check(c.sector_moves >= 1, "sector_moves must be >= 1");
  c.cutoff_c = get<double>(doc, "cutoff_c");

  const json& p = doc.at("potential");
  c.potential.kind = get<std::string>(p, "kind");
  check(c.potential.kind == "zero" || c.potential.kind == "gaussian" || c.potential.kind == "hard_core" ||
            c.potential.kind == "tabulated",
        "potential.kind must be zero, gaussian, hard_core or tabulated");
  c.potential.strength = get<double>(p, "strength");
  c.potential.range = get<double>(p, "range");
  c.potential.radius = get<double>(p, "radius");
  c.potential.r = get<std::vector<double>>(p, "r");
  c.potential.u = get<std::vector<double>>(p, "u");

  const json& s = doc.at("schedule");
  c.schedule.equilibration = get<int64_t>(s, "equilibration");
  c.schedule.sweeps = get<int64_t>(s, "sweeps");
  c.schedule.block_size = get<int>(s, "block_size");
  c.schedule.chains = get<int>(s, "chains");
  c.schedule.slices = get<int>(s, "slices");
  const json& mix = s.at("mix");
  c.schedule.mix_bridge = get<double>(mix, "bridge");
  c.schedule.mix_start = get<double>(mix, "start");
  c.schedule.mix_swap = get<double>(mix, "swap");
  c.schedule.check_action = get<bool>(s, "check_action");
  c.schedule.checkpoint_every = get<int64_t>(s, "checkpoint_every");
  check(c.schedule.checkpoint_every >= 0, "schedule.checkpoint_every must be >= 0");

  const json& cl = doc.at("cluster");
  c.cluster.winding = get<int>(cl, "winding");
  c.cluster.k_max = get<int>(cl, "k_max");
  c.cluster.samples = get<int64_t>(cl, "samples");
  c.cluster.slices = get<int>(cl, "slices");
  c.cluster.max_winding = get<int>(cl, "max_winding");

  c.seed = get<uint64_t>(doc, "seed");
  c.out = get<std::string>(doc, "out");
  check(!c.out.empty(), "out must name a directory");
  c.resolved = doc;
  return c;
}

}  // namespace cli
