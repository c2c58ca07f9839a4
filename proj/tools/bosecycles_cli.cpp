// Command-line front end. Talks to the library only through the C interface.
#include <bosecycles/bosecycles.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kContractViolation = 3, kNonErgodic = 4 };

class ApiError : public std::runtime_error {
 public:
  ApiError(bc_status status, const std::string& what) : std::runtime_error(what), status(status) {}
  bc_status status;
};

void ok(bc_status s) {
  if (s != BC_OK) throw ApiError(s, std::string(bc_status_name(s)) + ": " + bc_last_error());
}

struct TableDeleter {
  void operator()(bc_table* t) const { bc_table_free(t); }
};
struct PotentialDeleter {
  void operator()(bc_potential* p) const { bc_potential_free(p); }
};
struct PimcDeleter {
  void operator()(bc_pimc* p) const { bc_pimc_free(p); }
};
using TablePtr = std::unique_ptr<bc_table, TableDeleter>;
using PotentialPtr = std::unique_ptr<bc_potential, PotentialDeleter>;
using PimcPtr = std::unique_ptr<bc_pimc, PimcDeleter>;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

// Output directory plus the list of files written, for the manifest.
class Outputs {
 public:
  Outputs(std::string command, const cli::RunConfig& config) : command_(std::move(command)), config_(config) {
    fs::create_directories(config.out);
  }

  std::ofstream csv(const std::string& name, const std::vector<std::string>& columns) {
    std::ofstream f(path(name));
    if (!f) throw std::runtime_error("cannot write " + path(name));
    f << "# bosecycles-csv v1 " << command_ << '\n';
    for (size_t k = 0; k < columns.size(); ++k) f << (k ? "," : "") << columns[k];
    f << '\n';
    files_.push_back(name);
    return f;
  }

  void write_json(const std::string& name, const json& doc) {
    std::ofstream f(path(name));
    f << doc.dump(2) << '\n';
    files_.push_back(name);
  }

  std::string path(const std::string& name) const { return (fs::path(config_.out) / name).string(); }

  void note(const std::string& text) { notes_.push_back(text); }

  void manifest(int exit_code) {
    json m{{"command", command_},
           {"version", bc_version()},
           {"git_hash", bc_git_hash()},
           {"config", config_.resolved},
           {"outputs", files_},
           {"exit_code", exit_code},
           {"notes", notes_}};
    std::ofstream f(path("manifest.json"));
    f << m.dump(2) << '\n';
  }

 private:
  std::string command_;
  const cli::RunConfig& config_;
  std::vector<std::string> files_;
  std::vector<std::string> notes_;
};

template <class... T>
void row(std::ofstream& f, const T&... values) {
  bool first = true;
  ((f << (first ? "" : ",") << values, first = false), ...);
  f << '\n';
}

PotentialPtr make_potential(const cli::PotentialSpec& spec) {
  bc_potential* p = nullptr;
  if (spec.kind == "zero") ok(bc_potential_zero(&p));
  if (spec.kind == "gaussian") ok(bc_potential_gaussian(spec.strength, spec.range, &p));
  if (spec.kind == "hard_core") ok(bc_potential_hard_core(spec.radius, &p));
  if (spec.kind == "tabulated") {
    if (spec.r.size() != spec.u.size()) throw cli::ConfigError("potential.r and potential.u differ in length");
    ok(bc_potential_tabulated(spec.r.data(), spec.u.data(), spec.r.size(), &p));
  }
  return PotentialPtr(p);
}

double critical(const cli::RunConfig& c) {
  double rc = 0.0;
  int finite = 0;
  ok(bc_critical_density(c.beta, c.dim, &rc, &finite));
  return finite ? rc : INFINITY;
}

// Target density of the canonical commands.
double target_density(const cli::RunConfig& c) {
  if (c.rho) return *c.rho;
  if (!c.rho_factor) throw cli::ConfigError("set rho, rho_factor or particles");
  const double rc = critical(c);
  if (!std::isfinite(rc)) throw cli::ConfigError("rho_factor needs a finite critical density (dim >= 3)");
  return *c.rho_factor * rc;
}

int64_t particles_for(const cli::RunConfig& c, double side) {
  if (c.particles) return *c.particles;
  const int64_t n = std::llround(target_density(c) * std::pow(side, c.dim));
  if (n < 1) throw cli::ConfigError("density and side give fewer than one particle");
  return n;
}

TablePtr make_table(const cli::RunConfig& c, double side) {
  bc_table* t = nullptr;
  ok(bc_table_build(c.dim, side, c.beta, particles_for(c, side), &t));
  return TablePtr(t);
}

std::vector<double> axis_point(int dim, double r) {
  std::vector<double> x(dim, 0.0);
  x[0] = r;
  return x;
}

int cmd_ideal_cycles(const cli::RunConfig& c, Outputs& out) {
  int code = kOk;
  auto cycles = out.csv("ideal_cycles.csv", {"side", "n", "density"});
  auto summary = out.csv("ideal_cycles_summary.csv", {"side", "particles", "rho", "rho_inf_estimate", "cutoff",
                                                      "cutoff_clamped", "sum_rule_error"});
  for (double L : c.sides) {
    TablePtr t = make_table(c, L);
    const int64_t N = particles_for(c, L);
    std::vector<double> d(N);
    ok(bc_table_cycle_densities(t.get(), d.data(), d.size()));
    double sum = 0.0;
    for (int64_t n = 1; n <= N; ++n) {
      row(cycles, num(L), n, num(d[n - 1]));
      sum += d[n - 1];
    }
    bc_spectrum_summary s{};
    ok(bc_table_spectrum(t.get(), c.cutoff_c, &s));
    const double err = std::abs(sum - s.rho) / s.rho;
    row(summary, num(L), N, num(s.rho), num(s.rho_inf_estimate), s.cutoff, s.cutoff_clamped, num(err));
    if (err > 1e-12) {
      out.note("sum rule violated at side " + num(L) + ": relative error " + num(err));
      code = kContractViolation;
    }
  }
  return code;
}

int cmd_odlro(const cli::RunConfig& c, Outputs& out) {
  int code = kOk;
  auto f = out.csv("odlro.csv", {"side", "r", "sigma", "small_cycle_term", "rho_inf_estimate", "residual",
                                 "cutoff", "cutoff_clamped"});
  for (double L : c.sides) {
    TablePtr t = make_table(c, L);
    double rho = 0.0;
    ok(bc_table_density(t.get(), &rho));
    for (double r : c.x) {
      const auto x = axis_point(c.dim, r);
      bc_decomposition d{};
      ok(bc_decompose(t.get(), x.data(), x.size(), c.cutoff_c, &d));
      row(f, num(L), num(r), num(d.sigma), num(d.small_cycle_term), num(d.rho_inf_estimate), num(d.residual),
          d.cutoff, d.cutoff_clamped);
      if (r == 0.0 && std::abs(d.sigma - rho) > 1e-12 * rho) {
        out.note("sigma(0) differs from rho at side " + num(L));
        code = kContractViolation;
      }
    }
  }
  return code;
}

int cmd_condensate(const cli::RunConfig& c, Outputs& out) {
  int code = kOk;
  auto f = out.csv("condensate.csv", {"side", "particles", "rho", "condensate_density", "reference"});
  const double rc = critical(c);
  for (double L : c.sides) {
    TablePtr t = make_table(c, L);
    double rho = 0.0, n0 = 0.0;
    ok(bc_table_density(t.get(), &rho));
    ok(bc_condensate_density(t.get(), &n0));
    const double reference = std::isfinite(rc) ? std::max(0.0, rho - rc) : 0.0;
    row(f, num(L), particles_for(c, L), num(rho), num(n0), num(reference));
    if (!(n0 >= 0.0 && n0 <= rho * (1.0 + 1e-12))) {
      out.note("condensate density outside [0, rho] at side " + num(L));
      code = kContractViolation;
    }
  }
  return code;
}

double grand_cycle_sum(const cli::RunConfig& c, double mu) {
  const double q = std::exp(c.beta * mu);
  double sum = 0.0;
  for (int64_t n = 1;; ++n) {
    double term = 0.0;
    ok(bc_grand_cycle_density(n, c.beta, mu, c.dim, &term));
    sum += term;
    // terms decrease at least geometrically with ratio q
    if (term * q / (1.0 - q) < 1e-17 * sum) break;
  }
  return sum;
}

int cmd_grand(const cli::RunConfig& c, Outputs& out) {
  int code = kOk;
  auto g = out.csv("grand.csv", {"mu", "pressure", "density", "free_energy", "cycle_sum", "tail_beyond_max_cycle"});
  auto cyc = out.csv("grand_cycles.csv", {"mu", "n", "density"});
  for (int k = 0; k < c.mu_points; ++k) {
    const double mu = c.mu_min + (c.mu_max - c.mu_min) * k / (c.mu_points - 1);
    double p = 0.0, rho = 0.0, f = 0.0;
    ok(bc_pressure(c.beta, mu, c.dim, &p));
    ok(bc_density(c.beta, mu, c.dim, &rho));
    ok(bc_free_energy(c.beta, rho, c.dim, &f));
    const double total = grand_cycle_sum(c, mu);
    double head = 0.0;
    for (int n = 1; n <= c.max_cycle; ++n) {
      double d = 0.0;
      ok(bc_grand_cycle_density(n, c.beta, mu, c.dim, &d));
      head += d;
      row(cyc, num(mu), n, num(d));
    }
    row(g, num(mu), num(p), num(rho), num(f), num(total), num(total - head));
    if (std::abs(total - rho) > 1e-10 * rho) {
      out.note("cycle densities do not sum to rho at mu = " + num(mu));
      code = kContractViolation;
    }
  }
  // free energy on a density grid, in units of the critical density when finite
  double unit = critical(c);
  if (!std::isfinite(unit)) {
    ok(bc_density(c.beta, c.mu_max, c.dim, &unit));
    out.note("critical density infinite: rho_grid is in units of rho(beta, mu_grid.max)");
  }
  auto fe = out.csv("free_energy.csv", {"rho", "mu_star", "free_energy"});
  for (int k = 0; k < c.rho_points; ++k) {
    const double factor = c.rho_factor_min + (c.rho_factor_max - c.rho_factor_min) * k / (c.rho_points - 1);
    const double rho = factor * unit;
    double mu = 0.0, f = 0.0;
    ok(bc_chemical_potential(c.beta, rho, c.dim, &mu));
    ok(bc_free_energy(c.beta, rho, c.dim, &f));
    row(fe, num(rho), num(mu), num(f));
  }
  return code;
}

int cmd_pimc(const cli::RunConfig& c, Outputs& out, bool resume, bool strict) {
  if (c.sides.size() != 1) throw cli::ConfigError("pimc takes a single side length");
  const double L = c.sides.front();
  const int64_t N = particles_for(c, L);
  if (N > 100000) throw cli::ConfigError("pimc particle number is unreasonably large");
  const bc_pimc_params params{c.dim, L, c.beta, static_cast<int>(N), c.schedule.slices};
  const bc_pimc_schedule sched{c.schedule.equilibration, c.schedule.sweeps, c.schedule.block_size,
                               c.schedule.chains, c.seed, c.schedule.mix_bridge, c.schedule.mix_start,
                               c.schedule.mix_swap, c.schedule.check_action ? 1 : 0};
  PotentialPtr pot = make_potential(c.potential);
  const std::string checkpoint = out.path("checkpoint.txt");

  bc_pimc* raw = nullptr;
  if (resume) {
    if (!fs::exists(checkpoint)) throw cli::ConfigError("--resume given but no checkpoint at " + checkpoint);
    ok(bc_pimc_resume(checkpoint.c_str(), &params, pot.get(), &sched, &raw));
  } else {
    ok(bc_pimc_create(&params, pot.get(), &sched, &raw));
  }
  PimcPtr run(raw);
  const int64_t total = c.schedule.equilibration + c.schedule.sweeps;
  const int64_t chunk = c.schedule.checkpoint_every > 0 ? c.schedule.checkpoint_every : total;
  for (int complete = 0; !complete;) {
    ok(bc_pimc_advance(run.get(), chunk, &complete));
    ok(bc_pimc_save(run.get(), checkpoint.c_str()));
  }

  std::vector<double> dens(N), err(N), exact(N, NAN);
  std::vector<int64_t> counts(N);
  int64_t samples = 0, blocks = 0;
  ok(bc_pimc_histogram(run.get(), dens.data(), err.data(), N, &samples));
  ok(bc_pimc_counts(run.get(), counts.data(), N));
  ok(bc_pimc_blocks(run.get(), &blocks));
  const bool ideal = c.potential.kind == "zero";
  TablePtr table;
  if (ideal) {
    bc_table* t = nullptr;
    ok(bc_table_build(c.dim, L, c.beta, N, &t));
    table.reset(t);
    ok(bc_table_cycle_densities(table.get(), exact.data(), N));
  }
  auto h = out.csv("pimc_histogram.csv", {"n", "count", "density", "stderr", "exact", "z"});
  for (int64_t n = 1; n <= N; ++n) {
    const double z = ideal && err[n - 1] > 0.0 ? (dens[n - 1] - exact[n - 1]) / err[n - 1] : NAN;
    row(h, n, counts[n - 1], num(dens[n - 1]), num(err[n - 1]), num(exact[n - 1]), num(z));
  }

  bc_pimc_diagnostics diag{};
  ok(bc_pimc_get_diagnostics(run.get(), &diag));
  auto acc = out.csv("pimc_acceptance.csv", {"phase", "move", "attempted", "accepted", "rate"});
  for (int k = 0; k < BC_MOVE_KINDS; ++k) {
    auto rate = [](int64_t a, int64_t b) { return a ? static_cast<double>(b) / static_cast<double>(a) : 0.0; };
    row(acc, "equilibration", bc_move_name(k), diag.equil_attempted[k], diag.equil_accepted[k],
        num(rate(diag.equil_attempted[k], diag.equil_accepted[k])));
    row(acc, "measurement", bc_move_name(k), diag.attempted[k], diag.accepted[k],
        num(rate(diag.attempted[k], diag.accepted[k])));
  }

  double mean_len = 0.0, mean_err = 0.0;
  ok(bc_pimc_mean_cycle_length(run.get(), &mean_len, &mean_err));
  uint64_t hash = 0;
  ok(bc_pimc_config_hash(run.get(), &hash));
  char hash_text[24];
  std::snprintf(hash_text, sizeof hash_text, "%016llx", static_cast<unsigned long long>(hash));
  json report{{"particles", N},
              {"side", L},
              {"samples", samples},
              {"blocks", blocks},
              {"mean_cycle_length", jnum(mean_len)},
              {"mean_cycle_length_error", jnum(mean_err)},
              {"non_ergodic", diag.non_ergodic != 0},
              {"max_action_drift", jnum(diag.max_action_drift)},
              {"config_hash", hash_text},
              {"comparison", nullptr}};
  if (ideal) {
    bc_comparison cmp{};
    const bc_status s = bc_pimc_compare_exact(run.get(), exact.data(), N, 0.02, &cmp);
    if (s == BC_OK)
      report["comparison"] = {{"hotelling_t2", jnum(cmp.hotelling_t2)}, {"f_statistic", jnum(cmp.f_statistic)},
                              {"dof1", cmp.dof1}, {"dof2", cmp.dof2}, {"p_value", jnum(cmp.p_value)},
                              {"max_abs_z", jnum(cmp.max_abs_z)}};
    else
      out.note(std::string("exact comparison skipped: ") + bc_last_error());
  }

  if (!c.open_x.empty()) {
    auto o = out.csv("pimc_open.csv", {"r", "sigma", "stderr", "exact", "open_fraction", "weight", "poor_overlap"});
    for (double r : c.open_x) {
      if (r >= L) throw cli::ConfigError("open_x distances must be smaller than the side");
      const auto x = axis_point(c.dim, r);
      bc_open_cycle_result res{};
      ok(bc_open_cycle(&params, pot.get(), &sched, c.sector_moves, 0.0, x.data(), x.size(), &res, nullptr, 0));
      double ex = NAN;
      if (ideal) ok(bc_odlro(table.get(), x.data(), x.size(), &ex));
      row(o, num(r), num(res.sigma), num(res.standard_error), num(ex), num(res.open_fraction), num(res.weight),
          res.poor_overlap);
      if (res.poor_overlap) out.note("open-sector overlap below 1e-3 at r = " + num(r));
    }
  }
  out.write_json("pimc_report.json", report);

  if (diag.non_ergodic) {
    std::cerr << "warning: permutation moves frozen during equilibration (no swaps, or acceptance < 1e-4)\n";
    out.note("non-ergodic: swaps never attempted or accepted below 1e-4 during equilibration");
    if (strict) return kNonErgodic;
  }
  return kOk;
}

int cmd_cluster_check(const cli::RunConfig& c, Outputs& out) {
  if (!c.mu) throw cli::ConfigError("cluster-check needs mu");
  const double mu = *c.mu;
  PotentialPtr pot = make_potential(c.potential);
  bc_kp_condition kp{};
  ok(bc_kp_condition_eval(c.beta, mu, pot.get(), c.dim, &kp));
  bc_ratio_bracket bracket{NAN, NAN, NAN, 0};
  int certified = 0;
  ok(bc_ratio_bound(c.beta, mu, pot.get(), c.dim, c.cluster.winding, &bracket, &certified));
  const bc_cluster_sampling sampling{c.cluster.samples, c.cluster.slices, c.cluster.max_winding, c.seed};
  bc_kp_integral integral{};
  ok(bc_kp_integral_check(c.beta, mu, pot.get(), c.dim, c.cluster.winding, &sampling, &integral));
  bc_truncated_log_z lz{};
  ok(bc_truncated_log_z_eval(c.beta, mu, pot.get(), c.dim, c.cluster.k_max, &sampling, &lz));

  std::string verdict = kp.holds ? "holds" : "fails";
  std::string reason;
  if (!kp.integrable) {
    verdict = "inapplicable";
    reason = "potential not integrable";
  } else if (kp.divergent && !kp.holds) {
    verdict = "inapplicable";
    reason = "winding series diverges for dim <= 2";
  }
  auto f = out.csv("cluster_check.csv",
                   {"beta", "mu", "dim", "lhs", "lhs_quadrature", "threshold_mu", "minus_mu", "holds", "verdict",
                    "certified", "ratio_lower", "ratio_upper", "kp_target", "kp_certified_bound",
                    "kp_sharp_estimate", "kp_sharp_error", "log_z_first_order", "log_z_second_order",
                    "log_z_second_order_error", "log_z_total", "beta_pressure"});
  row(f, num(c.beta), num(mu), c.dim, num(kp.lhs), num(kp.lhs_quadrature), num(kp.threshold_mu), num(-mu),
      kp.holds, verdict, certified, num(certified ? bracket.lower : NAN), num(certified ? bracket.upper : NAN),
      num(integral.target), num(integral.certified_bound), num(integral.sharp_estimate), num(integral.sharp_error),
      num(lz.first_order), num(lz.second_order), num(lz.second_order_error), num(lz.total), num(lz.beta_pressure));
  json report{{"lhs", jnum(kp.lhs)},
              {"lhs_quadrature", jnum(kp.lhs_quadrature)},
              {"threshold_mu", jnum(kp.threshold_mu)},
              {"minus_mu", -mu},
              {"holds", kp.holds != 0},
              {"verdict", verdict},
              {"reason", reason},
              {"ratio_bracket", certified ? json{jnum(bracket.lower), jnum(bracket.upper)} : json(nullptr)},
              {"kp_integral",
               {{"target", jnum(integral.target)},
                {"certified_bound", jnum(integral.certified_bound)},
                {"sharp_estimate", jnum(integral.sharp_estimate)},
                {"sharp_error", jnum(integral.sharp_error)},
                {"variance_blowup", integral.variance_blowup != 0}}},
              {"log_z_per_volume",
               {{"first_order", jnum(lz.first_order)},
                {"second_order", jnum(lz.second_order)},
                {"second_order_error", jnum(lz.second_order_error)},
                {"total", jnum(lz.total)},
                {"beta_pressure", jnum(lz.beta_pressure)}}}};
  out.write_json("cluster_report.json", report);
  if (!lz.condition_holds) out.note("convergence condition fails: truncated log Z is not certified");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feynman-cycle statistics and off-diagonal long-range order of the Bose gas"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bc_version()) + " (" + bc_git_hash() + ")");

  std::optional<std::string> config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> out_dir;
  std::vector<std::string> overrides;
  bool strict = false, resume = false;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"ideal-cycles", "exact cycle densities of the canonical ideal gas"},
      {"odlro", "two-point correlation and its cycle decomposition"},
      {"condensate", "zero-mode occupation density over a series of boxes"},
      {"grand", "grand-canonical pressure, density, free energy and cycle densities"},
      {"pimc", "path-integral Monte Carlo cycle histogram"},
      {"cluster-check", "cluster-expansion convergence criterion and bounds"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "64-bit master seed (overrides the config)");
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--override", overrides, "KEY=VAL with a dotted key, may repeat");
    sub->add_flag("--strict", strict, "treat warnings (non-ergodic sampling) as errors");
    if (name == "pimc") sub->add_flag("--resume", resume, "continue from <out>/checkpoint.txt");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  cli::RunConfig config;
  try {
    config = cli::resolve(config_path, overrides, seed, out_dir);
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  std::unique_ptr<Outputs> out;
  int code = kOk;
  try {
    out = std::make_unique<Outputs>(command, config);
    if (command == "ideal-cycles") code = cmd_ideal_cycles(config, *out);
    if (command == "odlro") code = cmd_odlro(config, *out);
    if (command == "condensate") code = cmd_condensate(config, *out);
    if (command == "grand") code = cmd_grand(config, *out);
    if (command == "pimc") code = cmd_pimc(config, *out, resume, strict);
    if (command == "cluster-check") code = cmd_cluster_check(config, *out);
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    code = kConfigError;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = e.status == BC_ERR_ARGUMENT || e.status == BC_ERR_DOMAIN ? kConfigError
           : e.status == BC_ERR_CONTRACT                             ? kContractViolation
                                                                     : kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kFailure;
  }
  if (out) {
    out->manifest(code);
    if (code == kContractViolation) std::cerr << "numeric contract violated; see manifest notes\n";
  }
  return code;
}
