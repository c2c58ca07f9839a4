/* Exercises the C interface from C only. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "bosecycles/bosecycles.h"

static int failures = 0;
static int checks = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    ++checks;                                                        \
    if (!(cond)) {                                                   \
      ++failures;                                                    \
      fprintf(stderr, "%s:%d: CHECK(%s) failed\n", __FILE__, __LINE__, #cond); \
    }                                                                \
  } while (0)

#define CHECK_OK(expr)                                                                        \
  do {                                                                                        \
    bc_status st_ = (expr);                                                                   \
    ++checks;                                                                                 \
    if (st_ != BC_OK) {                                                                       \
      ++failures;                                                                             \
      fprintf(stderr, "%s:%d: %s -> %s (%s)\n", __FILE__, __LINE__, #expr, bc_status_name(st_), \
              bc_last_error());                                                               \
    }                                                                                         \
  } while (0)

#define CHECK_STATUS(expr, want)                                                               \
  do {                                                                                         \
    bc_status st_ = (expr);                                                                    \
    ++checks;                                                                                  \
    if (st_ != (want)) {                                                                       \
      ++failures;                                                                              \
      fprintf(stderr, "%s:%d: %s -> %s, wanted %s\n", __FILE__, __LINE__, #expr, bc_status_name(st_), \
              bc_status_name(want));                                                           \
    } else if (st_ != BC_OK && strlen(bc_last_error()) == 0) {                                 \
      ++failures;                                                                              \
      fprintf(stderr, "%s:%d: %s failed without a message\n", __FILE__, __LINE__, #expr);       \
    }                                                                                          \
  } while (0)

static int close_rel(double a, double b, double tol) { return fabs(a - b) <= tol * fabs(b); }

static const double pi = 3.14159265358979323846;

static void test_meta(void) {
  CHECK(strcmp(bc_status_name(BC_OK), "") != 0);
  CHECK(strcmp(bc_status_name(BC_ERR_DOMAIN), bc_status_name(BC_ERR_ARGUMENT)) != 0);
  CHECK(bc_version() != NULL && strlen(bc_version()) > 0);
  CHECK(bc_git_hash() != NULL);
  CHECK(strcmp(bc_move_name(2), "swap") == 0);
  /* NULL is fine for every free */
  bc_table_free(NULL);
  bc_potential_free(NULL);
  bc_pimc_free(NULL);
}

static void test_heat_kernel(void) {
  const double origin[3] = {0.0, 0.0, 0.0};
  const double x[3] = {0.7, -0.2, 1.1};
  double v = 0.0, lv = 0.0;
  CHECK_OK(bc_heat_kernel(0.25, origin, 1, 0.0, &v));
  CHECK(close_rel(v, 1.0 / sqrt(pi), 1e-14));
  CHECK_OK(bc_heat_kernel(0.6, x, 3, 4.0, &v));
  CHECK_OK(bc_log_heat_kernel(0.6, x, 3, 4.0, &lv));
  CHECK(close_rel(log(v), lv, 1e-12));
  /* a tiny box flattens the kernel to 1/V */
  CHECK_OK(bc_heat_kernel(5.0, x, 3, 1.0, &v));
  CHECK(close_rel(v, 1.0, 1e-12));
  CHECK_STATUS(bc_heat_kernel(-1.0, x, 3, 4.0, &v), BC_ERR_ARGUMENT);
  CHECK_STATUS(bc_heat_kernel(NAN, x, 3, 4.0, &v), BC_ERR_ARGUMENT);
}

static void test_table(void) {
  bc_table* t = NULL;
  double rho = 0.0, lz = 0.0, dens[6], sum = 0.0;
  size_t n;
  CHECK_OK(bc_table_build(3, 3.0, 1.0, 6, &t));
  CHECK(t != NULL);
  CHECK_OK(bc_table_density(t, &rho));
  CHECK(close_rel(rho, 6.0 / 27.0, 1e-15));
  CHECK_OK(bc_table_log_partition(t, 0, &lz));
  CHECK(lz == 0.0);
  CHECK_OK(bc_table_cycle_densities(t, dens, 6));
  for (n = 0; n < 6; ++n) {
    CHECK(dens[n] > 0.0);
    sum += dens[n];
  }
  CHECK(close_rel(sum, rho, 1e-12));
  CHECK_STATUS(bc_table_cycle_densities(t, dens, 5), BC_ERR_ARGUMENT);
  {
    const double zero[3] = {0.0, 0.0, 0.0};
    double s = 0.0, n0 = 0.0;
    CHECK_OK(bc_odlro(t, zero, 3, &s));
    CHECK(close_rel(s, rho, 1e-12));
    CHECK_OK(bc_condensate_density(t, &n0));
    CHECK(n0 >= 0.0 && n0 <= rho);
  }
  {
    bc_spectrum_summary sp;
    CHECK_OK(bc_table_spectrum(t, 1.0, &sp));
    CHECK(sp.cutoff >= 1);
    CHECK_STATUS(bc_table_spectrum(t, 0.01, &sp), BC_ERR_ARGUMENT); /* below 1/(4 pi) */
  }
  bc_table_free(t);

  t = NULL;
  CHECK_STATUS(bc_table_build(3, -1.0, 1.0, 6, &t), BC_ERR_ARGUMENT);
  CHECK(t == NULL);
  CHECK_OK(bc_table_build(2, 2.0, 1.0, 1, &t));
  CHECK_OK(bc_table_cycle_densities(t, dens, 1));
  CHECK(close_rel(dens[0], 0.25, 1e-15));
  bc_table_free(t);
}

static void test_grand(void) {
  double p = 0.0, r = 0.0, rc = 0.0, mu = 0.0, c1 = 0.0;
  int finite = -1;
  CHECK_OK(bc_pressure(1.0, -1.0, 3, &p));
  CHECK_OK(bc_density(1.0, -1.0, 3, &r));
  CHECK(p > 0.0 && r > p);
  CHECK(close_rel(r, 9.62e-3, 1e-3));
  CHECK_OK(bc_chemical_potential(1.0, r, 3, &mu));
  CHECK(fabs(mu + 1.0) < 1e-9);
  CHECK_OK(bc_grand_cycle_density(1, 1.0, -1.0, 3, &c1));
  CHECK(close_rel(c1, exp(-1.0) * pow(4.0 * pi, -1.5), 1e-14));
  CHECK_OK(bc_critical_density(1.0, 3, &rc, &finite));
  CHECK(finite == 1);
  CHECK(close_rel(rc, 0.0587, 1e-3));
  CHECK_OK(bc_critical_density(1.0, 2, &rc, &finite));
  CHECK(finite == 0);
  CHECK(isinf(rc));
  CHECK_STATUS(bc_pressure(1.0, 0.5, 3, &p), BC_ERR_DOMAIN);
  {
    const double x[3] = {6.0, 8.0, 0.0};
    double s = 0.0;
    CHECK_OK(bc_sigma_upper_bound(x, 3, 1.0, -0.5, &s));
    CHECK(close_rel(s, 6.75868158784958e-06, 1e-10));
  }
}

static void test_potential(void) {
  bc_potential* u = NULL;
  bc_potential* hc = NULL;
  bc_potential* tab = NULL;
  double v = 0.0;
  const double r[3] = {0.0, 0.5, 1.0};
  const double w[3] = {2.0, 1.0, 0.0};
  CHECK_OK(bc_potential_gaussian(2.0, 0.5, &u));
  CHECK_OK(bc_potential_eval(u, 0.0, &v));
  CHECK(v == 2.0);
  CHECK_OK(bc_potential_eval(u, 0.5, &v));
  CHECK(close_rel(v, 2.0 * exp(-1.0), 1e-15));
  CHECK_OK(bc_potential_integral(u, 3, &v));
  CHECK(close_rel(v, 2.0 * pow(pi, 1.5) * 0.125, 1e-12));
  CHECK_OK(bc_potential_hard_core(0.5, &hc));
  CHECK_OK(bc_potential_eval(hc, 0.2, &v));
  CHECK(isinf(v));
  CHECK_OK(bc_potential_tabulated(r, w, 3, &tab));
  CHECK_OK(bc_potential_eval(tab, 0.25, &v));
  CHECK(close_rel(v, 1.5, 1e-14));
  bc_potential_free(tab);
  tab = NULL;
  CHECK_STATUS(bc_potential_tabulated(r, w, 1, &tab), BC_ERR_ARGUMENT);
  CHECK_STATUS(bc_potential_gaussian(1.0, -1.0, &tab), BC_ERR_ARGUMENT);
  bc_potential_free(u);
  bc_potential_free(hc);
}

static bc_pimc_schedule small_schedule(uint64_t seed) {
  bc_pimc_schedule s;
  bc_pimc_schedule_default(&s);
  s.equilibration = 100;
  s.sweeps = 600;
  s.block_size = 100;
  s.chains = 2;
  s.seed = seed;
  return s;
}

static void test_pimc(void) {
  const bc_pimc_params p = {3, 3.0, 1.0, 3, 4};
  bc_pimc_schedule s = small_schedule(11);
  bc_potential* u = NULL;
  bc_pimc* straight = NULL;
  bc_pimc* first = NULL;
  bc_pimc* resumed = NULL;
  int complete = 0;
  int64_t done = 0, blocks = 0, samples = 0, counts[3], counts2[3];
  double dens[3], errs[3], mean = 0.0, mean_err = 0.0, block_means[12];
  uint64_t h1 = 0, h2 = 0;
  const char* ckpt = "capi_test.ckpt";
  bc_pimc_diagnostics d;

  CHECK_OK(bc_potential_gaussian(1.0, 0.5, &u));
  CHECK_OK(bc_pimc_create(&p, u, &s, &straight));
  CHECK_OK(bc_pimc_advance(straight, 100000, &complete));
  CHECK(complete == 1);
  CHECK_OK(bc_pimc_sweeps_done(straight, &done));
  CHECK(done == 700);
  CHECK_OK(bc_pimc_blocks(straight, &blocks));
  CHECK(blocks == 12);
  CHECK_OK(bc_pimc_histogram(straight, dens, errs, 3, &samples));
  CHECK(samples == 1200);
  CHECK(close_rel(dens[0] + dens[1] + dens[2], 3.0 / 27.0, 1e-12));
  CHECK_OK(bc_pimc_histogram(straight, dens, NULL, 3, NULL));
  CHECK_OK(bc_pimc_counts(straight, counts, 3));
  CHECK(counts[0] + 2 * counts[1] + 3 * counts[2] == 3 * samples);
  CHECK_OK(bc_pimc_block_mean_lengths(straight, block_means, 12));
  CHECK(block_means[0] >= 1.0 && block_means[0] <= 3.0);
  CHECK_OK(bc_pimc_mean_cycle_length(straight, &mean, &mean_err));
  CHECK(mean >= 1.0 && mean <= 3.0 && mean_err > 0.0);
  CHECK_OK(bc_pimc_get_diagnostics(straight, &d));
  CHECK(d.attempted[2] > 0);
  CHECK(d.max_action_drift < 1e-9);
  CHECK_STATUS(bc_pimc_counts(straight, counts, 2), BC_ERR_ARGUMENT);

  /* checkpoint mid-run, resume, finish: identical to the straight run */
  CHECK_OK(bc_pimc_create(&p, u, &s, &first));
  CHECK_OK(bc_pimc_advance(first, 250, &complete));
  CHECK(complete == 0);
  CHECK_OK(bc_pimc_save(first, ckpt));
  CHECK_OK(bc_pimc_resume(ckpt, &p, u, &s, &resumed));
  CHECK_OK(bc_pimc_config_hash(first, &h1));
  CHECK_OK(bc_pimc_config_hash(resumed, &h2));
  CHECK(h1 == h2);
  CHECK_OK(bc_pimc_advance(resumed, 100000, NULL));
  CHECK_OK(bc_pimc_counts(resumed, counts2, 3));
  CHECK(memcmp(counts, counts2, sizeof counts) == 0);
  bc_pimc_free(resumed);
  resumed = NULL;

  s.seed = 12;
  CHECK_STATUS(bc_pimc_resume(ckpt, &p, u, &s, &resumed), BC_ERR_ARGUMENT);
  CHECK(resumed == NULL);
  s.seed = 11;
  CHECK_STATUS(bc_pimc_resume("no_such_checkpoint", &p, u, &s, &resumed), BC_ERR_IO);
  remove(ckpt);

  {
    double exact[3];
    bc_table* t = NULL;
    bc_comparison cmp;
    CHECK_OK(bc_table_build(3, 3.0, 1.0, 3, &t));
    CHECK_OK(bc_table_cycle_densities(t, exact, 3));
    CHECK_OK(bc_pimc_compare_exact(straight, exact, 3, 0.02, &cmp));
    CHECK(cmp.bins >= 1);
    CHECK(cmp.p_value >= 0.0 && cmp.p_value <= 1.0);
    bc_table_free(t);
  }

  {
    bc_pimc_schedule bad = s;
    bc_pimc* r = NULL;
    bad.block_size = 0;
    CHECK_STATUS(bc_pimc_create(&p, u, &bad, &r), BC_ERR_ARGUMENT);
    CHECK(r == NULL);
  }

  bc_pimc_free(first);
  bc_pimc_free(straight);
  bc_potential_free(u);
}

static void test_open_cycle(void) {
  /* box wider than the thermal length, otherwise open/close always accept */
  const bc_pimc_params p = {3, 6.0, 1.0, 3, 4};
  bc_pimc_schedule s = small_schedule(5);
  bc_potential* zero = NULL;
  bc_open_cycle_result r;
  int64_t windings[3] = {0, 0, 0};
  const double x[3] = {0.0, 0.0, 0.0};
  s.chains = 1;
  s.sweeps = 2000;
  CHECK_OK(bc_potential_zero(&zero));
  CHECK_OK(bc_open_cycle(&p, zero, &s, 2, 1.0, x, 3, &r, windings, 3));
  CHECK(r.sigma > 0.0);
  CHECK(r.standard_error > 0.0);
  CHECK(r.open_fraction > 0.0 && r.open_fraction < 1.0);
  CHECK(r.blocks == 20);
  CHECK(windings[0] + windings[1] + windings[2] > 0);
  /* sigma(0) is the density */
  CHECK(fabs(r.sigma - 3.0 / 216.0) < 4.0 * r.standard_error);
  CHECK_OK(bc_open_cycle(&p, zero, &s, 2, 1.0, x, 3, &r, NULL, 0));
  CHECK_STATUS(bc_open_cycle(&p, zero, &s, 2, 1.0, x, 2, &r, NULL, 0), BC_ERR_ARGUMENT);
  bc_potential_free(zero);
}

static void test_brute_force(void) {
  const bc_pimc_params p = {3, 3.0, 1.0, 4, 4};
  bc_potential* zero = NULL;
  bc_table* t = NULL;
  bc_brute_force_summary bf;
  double dens[4], exact[4];
  int n;
  CHECK_OK(bc_potential_zero(&zero));
  CHECK_OK(bc_brute_force(&p, zero, 10, 1, &bf, dens, NULL, 4));
  CHECK(bf.exact == 1);
  CHECK(bf.permutations == 24);
  CHECK(bf.cycle_types == 5);
  CHECK_OK(bc_table_build(3, 3.0, 1.0, 4, &t));
  CHECK_OK(bc_table_cycle_densities(t, exact, 4));
  for (n = 0; n < 4; ++n) CHECK(close_rel(dens[n], exact[n], 1e-12));
  {
    const bc_pimc_params big = {3, 3.0, 1.0, 9, 4};
    CHECK_STATUS(bc_brute_force(&big, zero, 10, 1, &bf, NULL, NULL, 0), BC_ERR_UNSUPPORTED);
  }
  bc_table_free(t);
  bc_potential_free(zero);
}

static void test_cluster(void) {
  bc_potential* u = NULL;
  bc_potential* zero = NULL;
  bc_potential* hc = NULL;
  bc_kp_condition c;
  bc_cluster_sampling s;
  bc_kp_integral k;
  bc_truncated_log_z z;
  bc_ratio_bracket b;
  int certified = -1;
  double w = 0.0, p = 0.0;

  CHECK_OK(bc_potential_gaussian(1.0, 1.0, &u));
  CHECK_OK(bc_potential_zero(&zero));
  CHECK_OK(bc_potential_hard_core(0.5, &hc));

  CHECK_OK(bc_kp_condition_eval(1.0, -1.0, u, 3, &c));
  CHECK(fabs(c.lhs - 0.326546918586) < 1e-10);
  CHECK(fabs(c.lhs_quadrature - c.lhs) < 1e-6);
  CHECK(c.holds == 1 && c.divergent == 0 && c.integrable == 1);
  CHECK_OK(bc_kp_condition_eval(1.0, -1.0, u, 2, &c));
  CHECK(c.divergent == 1 && c.holds == 0);
  CHECK_OK(bc_kp_condition_eval(1.0, -1.0, hc, 3, &c));
  CHECK(c.integrable == 0);
  CHECK_STATUS(bc_kp_condition_eval(1.0, 0.0, u, 3, &c), BC_ERR_DOMAIN);

  bc_cluster_sampling_default(&s);
  s.samples = 200;
  s.max_winding = 3;
  CHECK_OK(bc_kp_integral_check(1.0, -1.0, u, 3, 1, &s, &k));
  CHECK(k.target == 1.0);
  CHECK(k.bound_holds == 1);
  CHECK(k.certified_bound <= k.target);

  CHECK_OK(bc_truncated_log_z_eval(1.0, -0.5, zero, 3, 2, &s, &z));
  CHECK_OK(bc_pressure(1.0, -0.5, 3, &p));
  CHECK(close_rel(z.total, p, 1e-10));
  CHECK(z.second_order == 0.0);
  CHECK_STATUS(bc_truncated_log_z_eval(1.0, -0.5, u, 3, 3, &s, &z), BC_ERR_UNSUPPORTED);

  CHECK_OK(bc_ratio_bound(1.0, -1.0, u, 3, 1, &b, &certified));
  CHECK(certified == 1);
  CHECK(close_rel(b.lower, exp(-1.0), 1e-15));
  CHECK(b.upper == 1.0);
  CHECK_OK(bc_ratio_bound(1.0, -0.1, u, 3, 1, &b, &certified));
  CHECK(certified == 0);

  CHECK_OK(bc_winding_class_weight(1, 1.0, -1.0, 3, 0.0, &w));
  CHECK(close_rel(w, exp(-1.0) * pow(4.0 * pi, -1.5), 1e-14));
  CHECK_OK(bc_winding_class_weight(1, 1.0, -1.0, 3, 50.0, &w));
  CHECK(close_rel(w / 125000.0, exp(-1.0) * pow(4.0 * pi, -1.5), 1e-10));

  bc_potential_free(u);
  bc_potential_free(zero);
  bc_potential_free(hc);
}

int main(void) {
  test_meta();
  test_heat_kernel();
  test_table();
  test_grand();
  test_potential();
  test_pimc();
  test_open_cycle();
  test_brute_force();
  test_cluster();
  printf("%d checks, %d failed\n", checks, failures);
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
