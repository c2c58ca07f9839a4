/* C interface to the bosecycles library.
 *
 * Every function returns a bc_status. On failure the message of the last
 * error on the calling thread is available from bc_last_error(). Handles are
 * opaque; each *_create / *_build has a matching *_free that accepts NULL.
 * Array arguments come with an explicit length which must match exactly. */
#ifndef BOSECYCLES_H
#define BOSECYCLES_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef BOSECYCLES_BUILDING
#    define BC_API __declspec(dllexport)
#  else
#    define BC_API __declspec(dllimport)
#  endif
#else
#  define BC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bc_status {
  BC_OK = 0,
  BC_ERR_ARGUMENT = 1,    /* invalid input */
  BC_ERR_DOMAIN = 2,      /* outside the domain of the quantity */
  BC_ERR_CONTRACT = 3,    /* numerical contract or invariant violated */
  BC_ERR_UNSUPPORTED = 4, /* cost guard or unimplemented order */
  BC_ERR_IO = 5,
  BC_ERR_INTERNAL = 6
} bc_status;

BC_API const char* bc_last_error(void);
BC_API const char* bc_status_name(bc_status status);
BC_API const char* bc_version(void);
BC_API const char* bc_git_hash(void);

/* ---- heat kernel ------------------------------------------------------ */

/* side <= 0 or infinite selects free space. */
BC_API bc_status bc_heat_kernel(double t, const double* x, size_t dim, double side, double* out);
BC_API bc_status bc_log_heat_kernel(double t, const double* x, size_t dim, double side, double* out);

/* ---- exact canonical ideal gas ---------------------------------------- */

typedef struct bc_table bc_table;

BC_API bc_status bc_table_build(int dim, double side, double beta, int64_t particles, bc_table** out);
BC_API void bc_table_free(bc_table* table);

BC_API bc_status bc_table_density(const bc_table* table, double* out);
BC_API bc_status bc_table_log_partition(const bc_table* table, int64_t j, double* out);
/* rho(n) for n = 1..N into out[n - 1]; len must equal N. */
BC_API bc_status bc_table_cycle_densities(const bc_table* table, double* out, size_t len);

typedef struct bc_spectrum_summary {
  double rho;
  double rho_inf_estimate;
  int64_t cutoff;
  int cutoff_clamped;
} bc_spectrum_summary;

BC_API bc_status bc_table_spectrum(const bc_table* table, double cutoff_constant, bc_spectrum_summary* out);

BC_API bc_status bc_odlro(const bc_table* table, const double* x, size_t dim, double* out);

typedef struct bc_decomposition {
  double sigma;
  double small_cycle_term;
  double rho_inf_estimate;
  double residual;
  int64_t cutoff;
  int cutoff_clamped;
} bc_decomposition;

BC_API bc_status bc_decompose(const bc_table* table, const double* x, size_t dim, double cutoff_constant,
                              bc_decomposition* out);

BC_API bc_status bc_condensate_density(const bc_table* table, double* out);

typedef struct bc_large_deviation {
  double rate;
  int64_t threshold;
  double reference;
} bc_large_deviation;

BC_API bc_status bc_table_large_deviation(const bc_table* table, double a, bc_large_deviation* out);

/* ---- grand-canonical ideal gas ---------------------------------------- */

BC_API bc_status bc_pressure(double beta, double mu, int dim, double* out);
BC_API bc_status bc_density(double beta, double mu, int dim, double* out);
/* *finite is 0 and *out is +inf when the critical density is infinite. */
BC_API bc_status bc_critical_density(double beta, int dim, double* out, int* finite);
BC_API bc_status bc_chemical_potential(double beta, double rho, int dim, double* out);
BC_API bc_status bc_free_energy(double beta, double rho, int dim, double* out);
BC_API bc_status bc_grand_cycle_density(int64_t n, double beta, double mu, int dim, double* out);
BC_API bc_status bc_sigma_upper_bound(const double* x, size_t dim, double beta, double mu, double* out);

/* ---- pair potentials -------------------------------------------------- */

typedef struct bc_potential bc_potential;

BC_API bc_status bc_potential_zero(bc_potential** out);
BC_API bc_status bc_potential_gaussian(double strength, double range, bc_potential** out);
BC_API bc_status bc_potential_hard_core(double radius, bc_potential** out);
BC_API bc_status bc_potential_tabulated(const double* r, const double* u, size_t len, bc_potential** out);
BC_API void bc_potential_free(bc_potential* potential);
BC_API bc_status bc_potential_eval(const bc_potential* potential, double r, double* out);
BC_API bc_status bc_potential_integral(const bc_potential* potential, int dim, double* out);

/* ---- path-integral Monte Carlo ---------------------------------------- */

typedef struct bc_pimc_params {
  int dim;
  double side;
  double beta;
  int particles;
  int slices;
} bc_pimc_params;

typedef struct bc_pimc_schedule {
  int64_t equilibration;
  int64_t sweeps;
  int block_size;
  int chains;
  uint64_t seed;
  double mix_bridge;
  double mix_start;
  double mix_swap;
  int check_action;
} bc_pimc_schedule;

BC_API void bc_pimc_schedule_default(bc_pimc_schedule* out);

typedef struct bc_pimc bc_pimc;

BC_API bc_status bc_pimc_create(const bc_pimc_params* params, const bc_potential* potential,
                                const bc_pimc_schedule* schedule, bc_pimc** out);
BC_API bc_status bc_pimc_resume(const char* checkpoint, const bc_pimc_params* params,
                                const bc_potential* potential, const bc_pimc_schedule* schedule,
                                bc_pimc** out);
BC_API void bc_pimc_free(bc_pimc* run);

/* Run up to `sweeps` more sweeps per chain; *complete may be NULL. */
BC_API bc_status bc_pimc_advance(bc_pimc* run, int64_t sweeps, int* complete);
BC_API bc_status bc_pimc_save(const bc_pimc* run, const char* path);
BC_API bc_status bc_pimc_config_hash(const bc_pimc* run, uint64_t* out);
BC_API bc_status bc_pimc_sweeps_done(const bc_pimc* run, int64_t* out);

/* Merged histogram: densities and standard errors (len = N, either may be NULL). */
BC_API bc_status bc_pimc_histogram(const bc_pimc* run, double* densities, double* errors, size_t len,
                                   int64_t* samples);
/* Raw integer counts of n-cycles summed over complete blocks (len = N). */
BC_API bc_status bc_pimc_counts(const bc_pimc* run, int64_t* counts, size_t len);
BC_API bc_status bc_pimc_blocks(const bc_pimc* run, int64_t* out);
/* Per-particle mean cycle length of each block, out[b] for b < len = blocks. */
BC_API bc_status bc_pimc_block_mean_lengths(const bc_pimc* run, double* out, size_t len);
BC_API bc_status bc_pimc_mean_cycle_length(const bc_pimc* run, double* mean, double* error);

#define BC_MOVE_KINDS 5 /* bridge, start, swap, open, close */

typedef struct bc_pimc_diagnostics {
  int64_t equil_attempted[BC_MOVE_KINDS];
  int64_t equil_accepted[BC_MOVE_KINDS];
  int64_t attempted[BC_MOVE_KINDS];
  int64_t accepted[BC_MOVE_KINDS];
  double max_action_drift;
  int non_ergodic;
} bc_pimc_diagnostics;

BC_API bc_status bc_pimc_get_diagnostics(const bc_pimc* run, bc_pimc_diagnostics* out);
BC_API const char* bc_move_name(int kind);

typedef struct bc_comparison {
  double hotelling_t2;
  double f_statistic;
  int dof1;
  int dof2;
  double p_value;
  double max_abs_z;
  int bins; /* tested bins */
} bc_comparison;

/* Compare the merged histogram with exact densities (len = N). */
BC_API bc_status bc_pimc_compare_exact(const bc_pimc* run, const double* exact, size_t len, double min_mass,
                                       bc_comparison* out);

typedef struct bc_open_cycle_result {
  double sigma;
  double standard_error;
  double open_fraction;
  double weight; /* sector weight of chain 0 after tuning */
  int64_t blocks;
  int poor_overlap;
} bc_open_cycle_result;

/* winding_counts (len = N) may be NULL. */
BC_API bc_status bc_open_cycle(const bc_pimc_params* params, const bc_potential* potential,
                               const bc_pimc_schedule* schedule, int sector_moves, double initial_weight,
                               const double* x, size_t dim, bc_open_cycle_result* out,
                               int64_t* winding_counts, size_t len);

typedef struct bc_brute_force_summary {
  double partition;
  double log_partition;
  double partition_error;
  int64_t permutations;
  int cycle_types;
  int exact;
} bc_brute_force_summary;

/* densities and errors have len = N; either may be NULL. */
BC_API bc_status bc_brute_force(const bc_pimc_params* params, const bc_potential* potential, int64_t mc_samples,
                                uint64_t seed, bc_brute_force_summary* out, double* densities, double* errors,
                                size_t len);

/* ---- cluster criterion ------------------------------------------------ */

typedef struct bc_kp_condition {
  double lhs;
  double lhs_quadrature;
  double threshold_mu;
  int holds;
  int divergent;
  int integrable;
} bc_kp_condition;

BC_API bc_status bc_kp_condition_eval(double beta, double mu, const bc_potential* potential, int dim,
                                      bc_kp_condition* out);

typedef struct bc_cluster_sampling {
  int64_t samples;
  int slices;
  int max_winding;
  uint64_t seed;
} bc_cluster_sampling;

BC_API void bc_cluster_sampling_default(bc_cluster_sampling* out);

typedef struct bc_kp_integral {
  double target;
  double certified_bound;
  double sharp_estimate;
  double sharp_error;
  double tail;
  int bound_holds;
  int variance_blowup;
} bc_kp_integral;

BC_API bc_status bc_kp_integral_check(double beta, double mu, const bc_potential* potential, int dim,
                                      int winding, const bc_cluster_sampling* sampling, bc_kp_integral* out);

typedef struct bc_truncated_log_z {
  double first_order;
  double second_order;
  double second_order_error;
  double total;
  double beta_pressure;
  int condition_holds;
  int max_winding;
} bc_truncated_log_z;

BC_API bc_status bc_truncated_log_z_eval(double beta, double mu, const bc_potential* potential, int dim,
                                         int k_max, const bc_cluster_sampling* sampling,
                                         bc_truncated_log_z* out);

typedef struct bc_ratio_bracket {
  double lower;
  double upper;
  double exponent_bound;
  int exact;
} bc_ratio_bracket;

/* *certified is 0 (and out untouched) when the criterion fails. */
BC_API bc_status bc_ratio_bound(double beta, double mu, const bc_potential* potential, int dim, int winding,
                                bc_ratio_bracket* out, int* certified);

/* side <= 0 or infinite selects the per-unit-volume weight. */
BC_API bc_status bc_winding_class_weight(int64_t n, double beta, double mu, int dim, double side, double* out);

#ifdef __cplusplus
}
#endif

#endif
