/*
 * heasep - hourly early-sepsis prediction from ICU records.
 *
 * C API of the shared library. All entry points return a status code;
 * heasep_last_error() carries the detail message of the most recent
 * failure on the calling thread. Objects returned through out-parameters
 * are owned by the caller and released with the matching _close function.
 */

#ifndef HEASEP_H
#define HEASEP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HEASEP_API __declspec(dllexport)
#else
#define HEASEP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum heasep_status {
  HEASEP_OK = 0,
  HEASEP_E_IO = 1,         /* file or directory access failed */
  HEASEP_E_PARSE = 2,      /* malformed input data */
  HEASEP_E_SCHEMA = 3,     /* input structure does not match the schema */
  HEASEP_E_CONTRACT = 4,   /* invalid arguments or state */
  HEASEP_E_CONFIG = 5,     /* bad configuration value */
  HEASEP_E_CHECKPOINT = 6, /* unreadable checkpoint or version mismatch */
  HEASEP_E_NUMERIC = 7,    /* non-finite values during training */
  HEASEP_E_INTERNAL = 8
} heasep_status;

HEASEP_API const char* heasep_status_name(heasep_status status);

/* Detail message of the last failure on this thread; empty string if none. */
HEASEP_API const char* heasep_last_error(void);

typedef struct heasep_dataset heasep_dataset; /* parsed patient records */
typedef struct heasep_model heasep_model;     /* trained model + normalization stats */

enum {
  HEASEP_MODEL_HEA_LSTM = 0,  /* event aggregation + bidirectional LSTM */
  HEASEP_MODEL_MLP = 1,       /* flattened-window MLP baseline */
  HEASEP_MODEL_DENSE_LSTM = 2 /* dense-embedding LSTM baseline */
};

typedef struct heasep_config {
  int32_t model_kind;   /* HEASEP_MODEL_* */
  int32_t window_hours; /* L */
  int32_t embed_dim;    /* d */
  int32_t heads;        /* M */
  int32_t hidden;       /* H */
  double learning_rate;
  int32_t batch_size;
  int32_t epochs;
  uint64_t seed;
  double positive_fraction; /* sampler draw rate for positive windows */
  double threshold;         /* decision threshold; refitted on validation */
  double adam_beta1;
  double adam_beta2;
  double adam_epsilon;
} heasep_config;

HEASEP_API void heasep_config_defaults(heasep_config* config);

/* Applies a key=value config file on top of *config. */
HEASEP_API heasep_status heasep_config_load_file(const char* path, heasep_config* config);

/* ---- datasets ---- */

/* Loads every *.psv in dir (challenge format, pipe-separated, "NaN" for
 * missing). Patients are ordered by id = filename stem. */
HEASEP_API heasep_status heasep_dataset_open_dir(const char* dir, heasep_dataset** out);
HEASEP_API void heasep_dataset_close(heasep_dataset* dataset);

HEASEP_API int64_t heasep_dataset_patient_count(const heasep_dataset* dataset);
HEASEP_API heasep_status heasep_dataset_patient_id(const heasep_dataset* dataset,
                                                   int64_t index, char* buffer,
                                                   size_t buffer_size);
HEASEP_API int64_t heasep_dataset_patient_hours(const heasep_dataset* dataset, int64_t index);

typedef struct heasep_summary {
  int64_t n_patients;
  int64_t n_septic;
  int64_t n_rows;
  double positive_row_fraction;
} heasep_summary;

HEASEP_API heasep_status heasep_dataset_summary(const heasep_dataset* dataset,
                                                heasep_summary* out);

/* ---- training and checkpoints ---- */

/* Fits normalization on train, trains the configured model, and selects
 * the decision threshold on validation by normalized utility. validation
 * may be NULL. */
HEASEP_API heasep_status heasep_train(const heasep_config* config,
                                      const heasep_dataset* train,
                                      const heasep_dataset* validation, heasep_model** out);

HEASEP_API heasep_status heasep_model_save(const heasep_model* model, const char* path);
HEASEP_API heasep_status heasep_model_load(const char* path, heasep_model** out);
HEASEP_API void heasep_model_close(heasep_model* model);
HEASEP_API void heasep_model_config(const heasep_model* model, heasep_config* out);

/* ---- prediction ---- */

/* Per-hour probabilities and thresholded labels for one patient. capacity
 * is the element count of both output arrays; *n_hours receives the
 * patient's hour count. Fails with HEASEP_E_CONTRACT when capacity is too
 * small (after storing the required count). */
HEASEP_API heasep_status heasep_predict_patient(const heasep_model* model,
                                                const heasep_dataset* dataset,
                                                int64_t patient_index, double* probs,
                                                int32_t* labels, int64_t capacity,
                                                int64_t* n_hours);

/* One challenge prediction file per patient into out_dir. */
HEASEP_API heasep_status heasep_predict_to_dir(const heasep_model* model,
                                               const heasep_dataset* dataset,
                                               const char* out_dir);

/* ---- evaluation ---- */

typedef struct heasep_scores {
  double auroc;
  double auprc;
  double utility_normalized;
  double threshold;
} heasep_scores;

HEASEP_API heasep_status heasep_evaluate_model(const heasep_model* model,
                                               const heasep_dataset* dataset,
                                               heasep_scores* out);

/* Scores prediction files against challenge label files. */
HEASEP_API heasep_status heasep_evaluate_dirs(const char* label_dir,
                                              const char* prediction_dir,
                                              heasep_scores* out);

/* Writes the plain-text and key=value report files for a score set. */
HEASEP_API heasep_status heasep_report_write(const char* out_dir,
                                             const heasep_scores* scores,
                                             const heasep_config* config);

/* ---- cross-validation ---- */

#define HEASEP_MAX_FOLDS 16

typedef struct heasep_cv_report {
  int32_t folds;
  heasep_scores fold[HEASEP_MAX_FOLDS]; /* per-fold validation scores */
  double threshold_mean;
  double auroc;             /* average-ensemble scores on the held set */
  double auprc;
  double utility_average_vote;
  double utility_major_vote;
  double utility_any_vote;
} heasep_cv_report;

/* Stratified k-fold cross-validation. held_fraction of the patients
 * (stratified) is set aside first and scored by the three fold-model vote
 * ensembles; pass 0 to disable. out_dir, when non-NULL, receives fold
 * checkpoints and reports. */
HEASEP_API heasep_status heasep_cross_validate(const heasep_config* config,
                                               const heasep_dataset* dataset, int32_t folds,
                                               double held_fraction, const char* out_dir,
                                               heasep_cv_report* out);

/* ---- tooling ---- */

/* Synthetic planted-signal cohort written as .psv files. */
HEASEP_API heasep_status heasep_synth_write(const char* dir, int32_t n_patients,
                                            uint64_t seed);

/* Central-difference verification of every differentiable primitive and of
 * the full model loss. Returns HEASEP_OK when all checks are finite. */
HEASEP_API heasep_status heasep_gradcheck(int32_t primitive_trials, uint64_t seed,
                                          double* max_primitive_error,
                                          double* max_model_error);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HEASEP_H */
