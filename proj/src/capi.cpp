#include "bosecycles/bosecycles.h"

#include <cmath>
#include <limits>
#include <new>
#include <string>

#include "bosecycles/brute_force.hpp"
#include "bosecycles/cluster.hpp"
#include "bosecycles/errors.hpp"
#include "bosecycles/heat_kernel.hpp"
#include "bosecycles/ideal_canonical.hpp"
#include "bosecycles/ideal_grand.hpp"
#include "bosecycles/open_cycle.hpp"
#include "bosecycles/pimc_run.hpp"
#include "bosecycles/version.hpp"

using namespace bosecycles;

struct bc_table {
  CanonicalEnsembleTable table;
};

struct bc_potential {
  PairPotential potential;
};

struct bc_pimc {
  PimcRun run;
};

namespace {

thread_local std::string g_last_error;

bc_status fail(bc_status status, const char* what) {
  g_last_error = what;
  return status;
}

template <class F>
bc_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return BC_OK;
  } catch (const ArgumentError& e) {
    return fail(BC_ERR_ARGUMENT, e.what());
  } catch (const DomainError& e) {
    return fail(BC_ERR_DOMAIN, e.what());
  } catch (const ContractError& e) {
    return fail(BC_ERR_CONTRACT, e.what());
  } catch (const UnsupportedError& e) {
    return fail(BC_ERR_UNSUPPORTED, e.what());
  } catch (const IoError& e) {
    return fail(BC_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(BC_ERR_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(BC_ERR_DOMAIN, e.what());
  } catch (const std::bad_alloc&) {
    return fail(BC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BC_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* name) {
  if (!p) throw ArgumentError(std::string(name) + " must not be NULL");
}

void require_len(size_t got, size_t want, const char* name) {
  if (got != want)
    throw ArgumentError(std::string(name) + " has length " + std::to_string(got) + ", expected " +
                        std::to_string(want));
}

SimulationBox make_box(int dim, double side) {
  if (std::isnan(side)) throw ArgumentError("side length is NaN");
  if (side <= 0.0 || std::isinf(side)) return SimulationBox::free_space(dim);
  return SimulationBox(dim, side);
}

PimcParams to_params(const bc_pimc_params* p) {
  require(p, "params");
  PimcParams out;
  out.box = SimulationBox(p->dim, p->side);
  out.beta = p->beta;
  out.particles = p->particles;
  out.slices = p->slices;
  out.validate();
  return out;
}

PimcSchedule to_schedule(const bc_pimc_schedule* s) {
  require(s, "schedule");
  PimcSchedule out;
  out.equilibration = s->equilibration;
  out.sweeps = s->sweeps;
  out.block_size = s->block_size;
  out.chains = s->chains;
  out.seed = s->seed;
  out.mix.bridge = s->mix_bridge;
  out.mix.start = s->mix_start;
  out.mix.swap = s->mix_swap;
  out.check_action = s->check_action != 0;
  out.validate();
  return out;
}

ClusterSampling to_sampling(const bc_cluster_sampling* s) {
  ClusterSampling out;
  if (!s) return out;
  out.samples = s->samples;
  out.slices = s->slices;
  out.max_winding = s->max_winding;
  out.seed = s->seed;
  return out;
}

const PairPotential& potential_of(const bc_potential* p) {
  require(p, "potential");
  return p->potential;
}

}  // namespace

extern "C" {

const char* bc_last_error(void) { return g_last_error.c_str(); }

const char* bc_status_name(bc_status status) {
  switch (status) {
    case BC_OK: return "ok";
    case BC_ERR_ARGUMENT: return "argument error";
    case BC_ERR_DOMAIN: return "domain error";
    case BC_ERR_CONTRACT: return "contract violation";
    case BC_ERR_UNSUPPORTED: return "unsupported";
    case BC_ERR_IO: return "i/o error";
    case BC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* bc_version(void) { return BOSECYCLES_VERSION_STRING; }
const char* bc_git_hash(void) { return BOSECYCLES_GIT_HASH; }

bc_status bc_heat_kernel(double t, const double* x, size_t dim, double side, double* out) {
  return guard([&] {
    require(x, "x");
    require(out, "out");
    *out = heat_kernel(t, {x, dim}, make_box(static_cast<int>(dim), side));
  });
}

bc_status bc_log_heat_kernel(double t, const double* x, size_t dim, double side, double* out) {
  return guard([&] {
    require(x, "x");
    require(out, "out");
    *out = log_heat_kernel(t, {x, dim}, make_box(static_cast<int>(dim), side));
  });
}

bc_status bc_table_build(int dim, double side, double beta, int64_t particles, bc_table** out) {
  return guard([&] {
    require(out, "out");
    *out = nullptr;
    *out = new bc_table{CanonicalEnsembleTable::build(make_box(dim, side), beta, particles)};
  });
}

void bc_table_free(bc_table* table) { delete table; }

bc_status bc_table_density(const bc_table* table, double* out) {
  return guard([&] {
    require(table, "table");
    require(out, "out");
    *out = table->table.density();
  });
}

bc_status bc_table_log_partition(const bc_table* table, int64_t j, double* out) {
  return guard([&] {
    require(table, "table");
    require(out, "out");
    *out = table->table.log_partition(j);
  });
}

bc_status bc_table_cycle_densities(const bc_table* table, double* out, size_t len) {
  return guard([&] {
    require(table, "table");
    require(out, "out");
    const auto d = table->table.cycle_densities();
    require_len(len, d.size(), "output");
    std::copy(d.begin(), d.end(), out);
  });
}

bc_status bc_table_spectrum(const bc_table* table, double cutoff_constant, bc_spectrum_summary* out) {
  return guard([&] {
    require(table, "table");
    require(out, "out");
    const auto s = cycle_spectrum(table->table, cutoff_constant);
    *out = {s.rho, s.rho_inf_estimate, s.cutoff, s.cutoff_clamped ? 1 : 0};
  });
}

bc_status bc_odlro(const bc_table* table, const double* x, size_t dim, double* out) {
  return guard([&] {
    require(table, "table");
    require(x, "x");
    require(out, "out");
    *out = odlro_correlation(table->table, {x, dim});
  });
}

bc_status bc_decompose(const bc_table* table, const double* x, size_t dim, double cutoff_constant,
                       bc_decomposition* out) {
  return guard([&] {
    require(table, "table");
    require(x, "x");
    require(out, "out");
    const auto r = verify_decomposition(table->table, {x, dim}, cutoff_constant);
    *out = {r.sigma, r.small_cycle_term, r.rho_inf_estimate, r.residual, r.cutoff, r.cutoff_clamped ? 1 : 0};
  });
}

bc_status bc_condensate_density(const bc_table* table, double* out) {
  return guard([&] {
    require(table, "table");
    require(out, "out");
    *out = condensate_density(table->table);
  });
}

bc_status bc_table_large_deviation(const bc_table* table, double a, bc_large_deviation* out) {
  return guard([&] {
    require(table, "table");
    require(out, "out");
    const auto r = large_deviation(table->table, a);
    *out = {r.rate, r.threshold, r.reference};
  });
}

bc_status bc_pressure(double beta, double mu, int dim, double* out) {
  return guard([&] {
    require(out, "out");
    *out = pressure(beta, mu, dim);
  });
}

bc_status bc_density(double beta, double mu, int dim, double* out) {
  return guard([&] {
    require(out, "out");
    *out = density(beta, mu, dim);
  });
}

bc_status bc_critical_density(double beta, int dim, double* out, int* finite) {
  return guard([&] {
    require(out, "out");
    const auto c = critical_density(beta, dim);
    *out = c.value;
    if (finite) *finite = c.finite ? 1 : 0;
  });
}

bc_status bc_chemical_potential(double beta, double rho, int dim, double* out) {
  return guard([&] {
    require(out, "out");
    *out = chemical_potential(beta, rho, dim);
  });
}

bc_status bc_free_energy(double beta, double rho, int dim, double* out) {
  return guard([&] {
    require(out, "out");
    *out = free_energy(beta, rho, dim);
  });
}

bc_status bc_grand_cycle_density(int64_t n, double beta, double mu, int dim, double* out) {
  return guard([&] {
    require(out, "out");
    *out = grand_cycle_density(n, beta, mu, dim);
  });
}

bc_status bc_sigma_upper_bound(const double* x, size_t dim, double beta, double mu, double* out) {
  return guard([&] {
    require(x, "x");
    require(out, "out");
    *out = sigma_upper_bound({x, dim}, beta, mu, static_cast<int>(dim));
  });
}

bc_status bc_potential_zero(bc_potential** out) {
  return guard([&] {
    require(out, "out");
    *out = new bc_potential{PairPotential::zero()};
  });
}

bc_status bc_potential_gaussian(double strength, double range, bc_potential** out) {
  return guard([&] {
    require(out, "out");
    *out = nullptr;
    *out = new bc_potential{PairPotential::gaussian(strength, range)};
  });
}

bc_status bc_potential_hard_core(double radius, bc_potential** out) {
  return guard([&] {
    require(out, "out");
    *out = nullptr;
    *out = new bc_potential{PairPotential::hard_core(radius)};
  });
}

bc_status bc_potential_tabulated(const double* r, const double* u, size_t len, bc_potential** out) {
  return guard([&] {
    require(out, "out");
    *out = nullptr;
    require(r, "r");
    require(u, "u");
    *out = new bc_potential{PairPotential::tabulated({r, r + len}, {u, u + len})};
  });
}

void bc_potential_free(bc_potential* potential) { delete potential; }

bc_status bc_potential_eval(const bc_potential* potential, double r, double* out) {
  return guard([&] {
    require(out, "out");
    if (!(r >= 0.0)) throw ArgumentError("distance must be >= 0");
    *out = potential_of(potential)(r);
  });
}

bc_status bc_potential_integral(const bc_potential* potential, int dim, double* out) {
  return guard([&] {
    require(out, "out");
    *out = potential_of(potential).integral(dim);
  });
}

void bc_pimc_schedule_default(bc_pimc_schedule* out) {
  if (!out) return;
  const PimcSchedule s;
  *out = {s.equilibration, s.sweeps, s.block_size, s.chains, s.seed,
          s.mix.bridge, s.mix.start, s.mix.swap, s.check_action ? 1 : 0};
}

bc_status bc_pimc_create(const bc_pimc_params* params, const bc_potential* potential,
                         const bc_pimc_schedule* schedule, bc_pimc** out) {
  return guard([&] {
    require(out, "out");
    *out = nullptr;
    *out = new bc_pimc{PimcRun(to_params(params), potential_of(potential), to_schedule(schedule))};
  });
}

bc_status bc_pimc_resume(const char* checkpoint, const bc_pimc_params* params, const bc_potential* potential,
                         const bc_pimc_schedule* schedule, bc_pimc** out) {
  return guard([&] {
    require(out, "out");
    *out = nullptr;
    require(checkpoint, "checkpoint");
    *out = new bc_pimc{
        PimcRun::resume(checkpoint, to_params(params), potential_of(potential), to_schedule(schedule))};
  });
}

void bc_pimc_free(bc_pimc* run) { delete run; }

bc_status bc_pimc_advance(bc_pimc* run, int64_t sweeps, int* complete) {
  return guard([&] {
    require(run, "run");
    const bool done = run->run.advance(sweeps);
    if (complete) *complete = done ? 1 : 0;
  });
}

bc_status bc_pimc_save(const bc_pimc* run, const char* path) {
  return guard([&] {
    require(run, "run");
    require(path, "path");
    run->run.save_checkpoint(path);
  });
}

bc_status bc_pimc_config_hash(const bc_pimc* run, uint64_t* out) {
  return guard([&] {
    require(run, "run");
    require(out, "out");
    *out = run->run.config_hash();
  });
}

bc_status bc_pimc_sweeps_done(const bc_pimc* run, int64_t* out) {
  return guard([&] {
    require(run, "run");
    require(out, "out");
    *out = run->run.sweeps_done();
  });
}

bc_status bc_pimc_histogram(const bc_pimc* run, double* densities, double* errors, size_t len,
                            int64_t* samples) {
  return guard([&] {
    require(run, "run");
    const CycleHistogram h = run->run.histogram();
    if (densities || errors) require_len(len, static_cast<size_t>(h.particles()), "output");
    for (int n = 1; n <= h.particles(); ++n) {
      if (densities) densities[n - 1] = h.density(n);
      if (errors) errors[n - 1] = h.standard_error(n);
    }
    if (samples) *samples = h.samples();
  });
}

bc_status bc_pimc_counts(const bc_pimc* run, int64_t* counts, size_t len) {
  return guard([&] {
    require(run, "run");
    require(counts, "counts");
    const CycleHistogram h = run->run.histogram();
    require_len(len, static_cast<size_t>(h.particles()), "counts");
    for (int n = 1; n <= h.particles(); ++n) counts[n - 1] = h.count(n);
  });
}

bc_status bc_pimc_blocks(const bc_pimc* run, int64_t* out) {
  return guard([&] {
    require(run, "run");
    require(out, "out");
    *out = run->run.histogram().blocks();
  });
}

bc_status bc_pimc_block_mean_lengths(const bc_pimc* run, double* out, size_t len) {
  return guard([&] {
    require(run, "run");
    require(out, "out");
    const CycleHistogram h = run->run.histogram();
    require_len(len, static_cast<size_t>(h.blocks()), "output");
    for (int64_t b = 0; b < h.blocks(); ++b) {
      const auto f = h.block_fractions(b);
      double m = 0.0;
      for (size_t k = 0; k < f.size(); ++k) m += static_cast<double>(k + 1) * f[k];
      out[b] = m;
    }
  });
}

bc_status bc_pimc_mean_cycle_length(const bc_pimc* run, double* mean, double* error) {
  return guard([&] {
    require(run, "run");
    const CycleHistogram h = run->run.histogram();
    if (mean) *mean = h.mean_cycle_length();
    if (error) *error = h.mean_cycle_length_error();
  });
}

bc_status bc_pimc_get_diagnostics(const bc_pimc* run, bc_pimc_diagnostics* out) {
  return guard([&] {
    require(run, "run");
    require(out, "out");
    const PimcDiagnostics d = run->run.diagnostics();
    for (int k = 0; k < BC_MOVE_KINDS; ++k) {
      out->equil_attempted[k] = d.equilibration.attempted[k];
      out->equil_accepted[k] = d.equilibration.accepted[k];
      out->attempted[k] = d.measurement.attempted[k];
      out->accepted[k] = d.measurement.accepted[k];
    }
    out->max_action_drift = d.max_action_drift;
    out->non_ergodic = d.non_ergodic ? 1 : 0;
  });
}

const char* bc_move_name(int kind) {
  if (kind < 0 || kind >= BC_MOVE_KINDS) return "unknown";
  return move_name(static_cast<MoveKind>(kind));
}

bc_status bc_pimc_compare_exact(const bc_pimc* run, const double* exact, size_t len, double min_mass,
                                bc_comparison* out) {
  return guard([&] {
    require(run, "run");
    require(exact, "exact");
    require(out, "out");
    const auto c = compare_to_exact(run->run.histogram(), {exact, len}, min_mass);
    *out = {c.hotelling_t2, c.f_statistic, c.dof1, c.dof2, c.p_value, c.max_abs_z, c.dof1};
  });
}

bc_status bc_open_cycle(const bc_pimc_params* params, const bc_potential* potential,
                        const bc_pimc_schedule* schedule, int sector_moves, double initial_weight,
                        const double* x, size_t dim, bc_open_cycle_result* out, int64_t* winding_counts,
                        size_t len) {
  return guard([&] {
    require(x, "x");
    require(out, "out");
    OpenCycleSchedule s;
    s.base = to_schedule(schedule);
    s.sector_moves = sector_moves;
    s.initial_weight = initial_weight;
    const PimcParams p = to_params(params);
    if (winding_counts) require_len(len, static_cast<size_t>(p.particles), "winding_counts");
    const auto r = open_cycle_estimator(p, potential_of(potential), {x, dim}, s);
    *out = {r.sigma, r.standard_error, r.open_fraction, r.weights.front(), r.blocks, r.poor_overlap ? 1 : 0};
    if (winding_counts) std::copy(r.winding_counts.begin(), r.winding_counts.end(), winding_counts);
  });
}

bc_status bc_brute_force(const bc_pimc_params* params, const bc_potential* potential, int64_t mc_samples,
                         uint64_t seed, bc_brute_force_summary* out, double* densities, double* errors,
                         size_t len) {
  return guard([&] {
    require(out, "out");
    const PimcParams p = to_params(params);
    if (densities || errors) require_len(len, static_cast<size_t>(p.particles), "output");
    const auto r = brute_force_small(p, potential_of(potential), mc_samples, seed);
    *out = {r.partition, r.log_partition, r.partition_error, r.permutations, r.cycle_types, r.exact ? 1 : 0};
    if (densities) std::copy(r.densities.begin(), r.densities.end(), densities);
    if (errors) std::copy(r.density_errors.begin(), r.density_errors.end(), errors);
  });
}

bc_status bc_kp_condition_eval(double beta, double mu, const bc_potential* potential, int dim,
                               bc_kp_condition* out) {
  return guard([&] {
    require(out, "out");
    const auto c = kp_condition(beta, mu, potential_of(potential), dim);
    *out = {c.lhs, c.lhs_quadrature, c.threshold_mu, c.holds ? 1 : 0, c.divergent ? 1 : 0,
            c.integrable ? 1 : 0};
  });
}

void bc_cluster_sampling_default(bc_cluster_sampling* out) {
  if (!out) return;
  const ClusterSampling s;
  *out = {s.samples, s.slices, s.max_winding, s.seed};
}

bc_status bc_kp_integral_check(double beta, double mu, const bc_potential* potential, int dim, int winding,
                               const bc_cluster_sampling* sampling, bc_kp_integral* out) {
  return guard([&] {
    require(out, "out");
    const auto r = kp_integral_check(beta, mu, potential_of(potential), dim, winding, to_sampling(sampling));
    *out = {r.target, r.certified_bound, r.sharp_estimate, r.sharp_error, r.tail, r.bound_holds ? 1 : 0,
            r.variance_blowup ? 1 : 0};
  });
}

bc_status bc_truncated_log_z_eval(double beta, double mu, const bc_potential* potential, int dim, int k_max,
                                  const bc_cluster_sampling* sampling, bc_truncated_log_z* out) {
  return guard([&] {
    require(out, "out");
    const auto r = truncated_log_z(beta, mu, potential_of(potential), dim, k_max, to_sampling(sampling));
    *out = {r.first_order, r.second_order, r.second_order_error, r.total, r.beta_pressure,
            r.condition_holds ? 1 : 0, r.max_winding};
  });
}

bc_status bc_ratio_bound(double beta, double mu, const bc_potential* potential, int dim, int winding,
                         bc_ratio_bracket* out, int* certified) {
  return guard([&] {
    require(out, "out");
    require(certified, "certified");
    const auto r = ratio_bound(beta, mu, potential_of(potential), dim, winding);
    *certified = r ? 1 : 0;
    if (r) *out = {r->lower, r->upper, r->exponent_bound, r->exact ? 1 : 0};
  });
}

bc_status bc_winding_class_weight(int64_t n, double beta, double mu, int dim, double side, double* out) {
  return guard([&] {
    require(out, "out");
    *out = winding_class_weight(n, beta, mu, make_box(dim, side));
  });
}

}  // extern "C"
