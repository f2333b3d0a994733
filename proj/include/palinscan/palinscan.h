/* C interface to the palinscan library.
 *
 * Every fallible call returns a ps_status; on failure a description is
 * available from ps_last_error() on the same thread until the next call.
 * Objects are opaque handles released with their matching *_free function.
 * Strings returned through char** are heap-allocated and released with
 * ps_string_free.
 */
#ifndef PALINSCAN_H
#define PALINSCAN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PALINSCAN_BUILDING_LIBRARY)
#    define PS_API __declspec(dllexport)
#  else
#    define PS_API __declspec(dllimport)
#  endif
#else
#  define PS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ps_status {
  PS_OK = 0,
  PS_ERR_INVALID_ARGUMENT = 1,
  PS_ERR_PARSE = 2,
  PS_ERR_IO = 3,
  PS_ERR_NETWORK = 4,
  PS_ERR_NOT_FOUND = 5,
  PS_ERR_DOMAIN = 6,
  PS_ERR_SINGULAR = 7,
  PS_ERR_NO_CONVERGENCE = 8,
  PS_ERR_EMPTY = 9,
  PS_ERR_INFINITE_SCORE = 10,
  PS_ERR_UNATTAINABLE = 11,
  PS_ERR_INTERNAL = 99
} ps_status;

typedef enum ps_score_kind { PS_SCORE_PCS = 0, PS_SCORE_PLS = 1, PS_SCORE_BWS = 2 } ps_score_kind;

typedef struct ps_sequence ps_sequence;
typedef struct ps_fasta ps_fasta;
typedef struct ps_events ps_events;
typedef struct ps_score_model ps_score_model;
typedef struct ps_scan_result ps_scan_result;

PS_API const char* ps_version(void);
PS_API const char* ps_status_name(ps_status status);
/* Message of the last failed call on this thread ("" if none). */
PS_API const char* ps_last_error(void);
PS_API void ps_string_free(char* s);

/* ---- sequences ---------------------------------------------------------- */

PS_API ps_status ps_fasta_read_file(const char* path, ps_fasta** out);
PS_API ps_status ps_fasta_parse(const char* text, size_t length, ps_fasta** out);
/* Looks in cache_dir (NULL: $PALINSCAN_CACHE or ./.palinscan-cache) before
 * requesting endpoint + accession. endpoint NULL uses the NCBI efetch URL. */
PS_API ps_status ps_fetch(const char* accession, const char* endpoint, const char* cache_dir,
                          ps_fasta** out);
PS_API size_t ps_fasta_count(const ps_fasta* fasta);
/* Copies record `index` into a new sequence handle. */
PS_API ps_status ps_fasta_get(const ps_fasta* fasta, size_t index, ps_sequence** out);
PS_API void ps_fasta_free(ps_fasta* fasta);

/* Upper-cases and drops non-ACGT characters. */
PS_API ps_status ps_sequence_from_string(const char* bases, const char* id, ps_sequence** out);
PS_API size_t ps_sequence_length(const ps_sequence* seq);
PS_API size_t ps_sequence_dropped(const ps_sequence* seq);
PS_API ps_status ps_sequence_id(const ps_sequence* seq, char** out);
PS_API ps_status ps_sequence_bases(const ps_sequence* seq, char** out);
PS_API void ps_sequence_free(ps_sequence* seq);

/* ---- Markov model and rates -------------------------------------------- */

/* Base order A, C, G, T; trans is row-major. */
typedef struct ps_model {
  double pi[4];
  double trans[16];
} ps_model;

PS_API ps_status ps_model_bohv1(ps_model* out);
PS_API ps_status ps_model_estimate(const ps_sequence* seq, double pseudo_count, ps_model* out);
PS_API ps_status ps_model_to_json(const ps_model* model, char** out);
PS_API ps_status ps_model_from_json(const char* json, ps_model* out);
PS_API ps_status ps_lambda_markov(const ps_model* model, int L, double* out);
PS_API ps_status ps_lambda_iid(const double pi[4], int L, double* out);
PS_API ps_status ps_simulate_sequence(const ps_model* model, size_t n, uint64_t seed,
                                      ps_sequence** out);

/* ---- palindromes -------------------------------------------------------- */

PS_API ps_status ps_find_palindromes(const ps_sequence* seq, int L, ps_events** out);
PS_API size_t ps_events_count(const ps_events* events);
PS_API ps_status ps_events_get(const ps_events* events, size_t index, size_t* center,
                               int* half_length);
/* Scores of event `index` under `model` (BWS fails with PS_ERR_INFINITE_SCORE
 * when the pattern has probability zero). */
PS_API ps_status ps_events_score(const ps_events* events, size_t index, ps_score_kind kind,
                                 const ps_model* model, double* out);
PS_API ps_status ps_events_tsv(const ps_events* events, const ps_model* model, char** out);
PS_API void ps_events_free(ps_events* events);

/* ---- score distributions ------------------------------------------------ */

typedef struct ps_score_options {
  int iid_mode;       /* nonzero: iid special case built from pi */
  int column_v;       /* nonzero: column form of the BWS first factor */
} ps_score_options;

PS_API ps_status ps_score_kind_parse(const char* name, ps_score_kind* out);
PS_API ps_status ps_score_model_create(ps_score_kind kind, const ps_model* model, int L,
                                       const ps_score_options* options, ps_score_model** out);
PS_API void ps_score_model_free(ps_score_model* sm);
/* Upper end of the MGF domain (HUGE_VAL for PCS). */
PS_API double ps_score_model_t_max(const ps_score_model* sm);
PS_API double ps_score_model_event_rate(const ps_score_model* sm);
PS_API ps_status ps_mgf(const ps_score_model* sm, double t, double* out);
PS_API ps_status ps_mgf_exact_length(const ps_score_model* sm, double t, int k, double* out);
/* out[0] = phi(theta), out[1] = phi'(theta), out[2] = phi''(theta). */
PS_API ps_status ps_phi(const ps_score_model* sm, double theta, double out[3]);

/* ---- scan statistics ---------------------------------------------------- */

typedef struct ps_scan_options {
  int literal_tilt;          /* solve lambda1 phi'(theta1) = b without the window factor */
  int literal_mean_factor;   /* use (b - lambda0 mu0) in place of E y1 */
  int literal_variance;      /* local variance w lambda1 phi'' (undefined for PCS) */
  double delta;              /* observation grid, bp */
  size_t nu_walks;
  uint64_t nu_seed;
  int use_nu_fixed;
  double nu_fixed;
} ps_scan_options;

PS_API void ps_scan_options_default(ps_scan_options* out);

typedef struct ps_pvalue {
  double b;
  size_t w;
  size_t W;
  double p;
  double nu;
  double nu_se;
  double i_b;
  double lambda0;
  double lambda1;
  double theta1;
} ps_pvalue;

PS_API ps_status ps_p_value(double b, size_t w, size_t W, double lambda0,
                            const ps_score_model* sm, const ps_scan_options* options,
                            ps_pvalue* out);
PS_API ps_status ps_threshold_for_alpha(double alpha, size_t w, size_t W, double lambda0,
                                        const ps_score_model* sm,
                                        const ps_scan_options* options, double* out);

/* Scores `events` under `scoring` with sm's kind and L, then scans windows
 * of width w over [0, W). */
PS_API ps_status ps_scan(const ps_events* events, const ps_model* scoring, size_t W,
                         double lambda0, const ps_score_model* sm, size_t w,
                         const ps_scan_options* options, ps_scan_result** out);
PS_API ps_status ps_scan_result_pvalue(const ps_scan_result* result, ps_pvalue* out);
PS_API ps_status ps_scan_result_max(const ps_scan_result* result, double* max, size_t* argmax);
PS_API ps_status ps_scan_result_json(const ps_scan_result* result, char** out);
PS_API ps_status ps_scan_result_series_tsv(const ps_scan_result* result, char** out);
PS_API void ps_scan_result_free(ps_scan_result* result);

/* ---- experiments -------------------------------------------------------- */

typedef struct ps_experiment_config {
  ps_model model;
  size_t n;
  int L;
  size_t w;
  size_t replicates;
  double multipliers[3];
  size_t hotspot_length;
  double lambda0_target;
  uint64_t seed;
  unsigned threads;          /* 0: hardware concurrency */
} ps_experiment_config;

PS_API ps_status ps_experiment_config_default(ps_experiment_config* out);

typedef struct ps_rate_row {
  double multipliers[3];
  size_t replicates;
  double mean_average;
  double mean_markov;
  double se_average;
  double se_markov;
  double true_lambda;
} ps_rate_row;

/* bank_source may be NULL, in which case the palindrome bank is harvested
 * from a sequence simulated under config->model. */
PS_API ps_status ps_rate_experiment(const ps_experiment_config* config,
                                    const ps_sequence* bank_source, ps_rate_row* out);
/* As ps_rate_experiment, also copying per-replicate estimates into
 * lambda_average and lambda_markov (each config->replicates long; either may
 * be NULL). */
PS_API ps_status ps_rate_experiment_detail(const ps_experiment_config* config,
                                           const ps_sequence* bank_source, ps_rate_row* out,
                                           double* lambda_average, double* lambda_markov);
PS_API ps_status ps_rate_table_tsv(const ps_rate_row* rows, size_t count, char** out);

typedef struct ps_power_options {
  ps_score_kind kind;
  double alpha;
  int per_replicate;
  int use_fixed_thresholds;
  double fixed_thresholds[2]; /* {average-rate, Markov-rate} */
  ps_scan_options scan;
} ps_power_options;

PS_API void ps_power_options_default(ps_power_options* out);

typedef struct ps_power_row {
  double multipliers[3];
  ps_score_kind kind;
  int estimator;             /* 0 average rate, 1 Markov rate */
  double lambda0;
  double threshold;
  double power[3];
  size_t replicates;
} ps_power_row;

/* Writes two rows: average-rate estimator first, then Markov. */
PS_API ps_status ps_power_experiment(const ps_experiment_config* config,
                                     const ps_power_options* options,
                                     const ps_sequence* bank_source, ps_power_row out[2]);
/* As ps_power_experiment, also copying per-replicate thresholds
 * (2 * replicates: average rows first, then Markov) and detections
 * (2 * replicates * 3, estimator-major, then replicate, then segment).
 * Either array may be NULL. */
PS_API ps_status ps_power_experiment_detail(const ps_experiment_config* config,
                                            const ps_power_options* options,
                                            const ps_sequence* bank_source, ps_power_row out[2],
                                            double* thresholds, unsigned char* detected);
PS_API ps_status ps_power_table_tsv(const ps_power_row* rows, size_t count, char** out);

#ifdef __cplusplus
}
#endif

#endif /* PALINSCAN_H */
