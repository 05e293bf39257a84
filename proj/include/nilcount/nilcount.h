#ifndef NILCOUNT_H
#define NILCOUNT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define NC_API __declspec(dllexport)
#else
#define NC_API __attribute__((visibility("default")))
#endif

typedef enum {
  NC_OK = 0,
  NC_INVALID_ARGUMENT = 1,
  NC_DIMENSION_MISMATCH = 2,
  NC_SINGULAR = 3,
  NC_DOMAIN = 4,
  NC_BUDGET = 5,
  NC_OVERFLOW = 6,
  NC_CONVERGENCE = 7,
  NC_SCHEMA = 8,
  NC_IO = 9,
  NC_ASSERTION = 10,
  NC_INTERNAL = 100
} nc_status;

NC_API const char* nc_version(void);
NC_API const char* nc_status_name(nc_status s);
/* Message of the last failure on the calling thread; empty after success. */
NC_API const char* nc_last_error(void);
/* Frees strings returned through char** out-parameters. */
NC_API void nc_string_free(char* s);

typedef struct nc_config nc_config;

/* JSON text (starting with '{') or a path to a JSON file. */
NC_API nc_status nc_config_load(const char* text_or_path, nc_config** out);
NC_API void nc_config_free(nc_config* c);
NC_API nc_status nc_config_serialize(const nc_config* c, char** out_json);
NC_API nc_status nc_config_dims(const nc_config* c, int* q, int* m, double* alpha);
NC_API nc_status nc_config_set_workers(nc_config* c, int workers);
NC_API nc_status nc_config_workers(const nc_config* c, int* workers);
NC_API nc_status nc_config_set_seed(nc_config* c, uint64_t seed);
NC_API nc_status nc_config_seed(const nc_config* c, uint64_t* seed);

typedef struct {
  double R;
  int64_t count;
  double leading; /* vol(B_R) / covolume */
  double abs_error;
  double rel_discrepancy;
  int64_t boundary_hits;
  int exact;
} nc_count_record;

/* radius: "2", "3/2", "2.5" or "sqrt(9/2)". center_json: NULL or {"x":[...],"t":[...]}
   with integer, "p/q" or decimal-string entries. */
NC_API nc_status nc_count(const nc_config* c, const char* radius, const char* center_json, nc_count_record* out);
NC_API nc_status nc_shell(const nc_config* c, const char* radius, const char* delta, const char* center_json,
                          int64_t* count, int* exact);
NC_API nc_status nc_average_shell(const nc_config* c, const char* height, double R, double delta, double* out);
NC_API nc_status nc_volume(const nc_config* c, double R, double* out);
NC_API nc_status nc_volume_monte_carlo(const nc_config* c, uint64_t samples, uint64_t seed, double* estimate,
                                       double* std_error);

typedef struct nc_sweep nc_sweep;

NC_API nc_status nc_sweep_run(const nc_config* c, const double* radii, size_t n, nc_sweep** out);
NC_API size_t nc_sweep_size(const nc_sweep* s);
NC_API nc_status nc_sweep_record(const nc_sweep* s, size_t i, nc_count_record* out);
/* Fit, verdict and exponent table as JSON. */
NC_API nc_status nc_sweep_summary(const nc_sweep* s, char** out_json);
NC_API void nc_sweep_free(nc_sweep* s);

NC_API nc_status nc_predict(int q, int m, double alpha, char** out_json);

typedef struct {
  double re, im;
  double error;
  int route; /* 1 first-layer, 2 centre */
} nc_transform;

/* route: "auto", "first-layer" or "center". */
NC_API nc_status nc_spectral(double alpha, int q, int m, double lambda1, double lambda2, const char* route, double tol,
                             nc_transform* out);
/* Direct quadrature reference at |w| = lambda1 / (2 pi), |s| = lambda2 / (2 pi). */
NC_API nc_status nc_spectral_oracle(double alpha, int q, int m, double lambda1, double lambda2, nc_transform* out);
/* ray: "w-axis", "s-axis", "diagonal" or "fixed-ratio(r)"; geometric grid of n points. */
NC_API nc_status nc_spectral_decay(double alpha, int q, int m, const char* ray, double lmin, double lmax, int n,
                                   int workers, char** out_json);

/* regime: "case-i" or "case-ii". */
NC_API nc_status nc_phase_verify(double alpha, const char* regime, int samples, uint64_t seed, int grid, int workers,
                                 char** out_json, int* passed);

NC_API nc_status nc_lattice_check(const nc_config* c, char** out_json, int* is_subgroup);
/* alpha = 2, m = 1; the reduced matrix is rescaled to an integral one when possible. */
NC_API nc_status nc_sharpness(const nc_config* c, int n_max, char** out_json, int* ok);
NC_API nc_status nc_poisson(const nc_config* c, double R, double eps, double cap1, double cap2, char** out_json);
NC_API nc_status nc_selftest(int workers, char** out_json, int* passed);

#ifdef __cplusplus
}
#endif

#endif
