/* chainsift — batch fraud-detection pipeline for decoded multichain DeFi
 * event logs. C interface to the shared library: opaque handles, status
 * codes, and a thread-local error message. All functions taking an `out`
 * pointer leave it untouched on failure.
 */
#ifndef CHAINSIFT_H
#define CHAINSIFT_H

#include <stdint.h>

#if defined(_WIN32)
#define SIFT_API __declspec(dllexport)
#else
#define SIFT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status values double as process exit codes. */
typedef enum sift_status {
    SIFT_OK = 0,
    SIFT_ERROR_INPUT = 2,     /* malformed/missing input data */
    SIFT_ERROR_VALIDATION = 3 /* config or invariant violation */
} sift_status;

typedef struct sift_corpus sift_corpus;     /* events (+ labels when synthesized) */
typedef struct sift_schema sift_schema;     /* feature schema incl. top tokens */
typedef struct sift_features sift_features; /* address-by-feature matrix */
typedef struct sift_report sift_report;     /* cross-validation report */

SIFT_API const char* sift_version(void);

/* Message from the most recent failing call on this thread; never NULL. */
SIFT_API const char* sift_last_error(void);

/* ---- corpus ---- */

SIFT_API sift_status sift_synth_corpus(uint64_t seed, int64_t n_good, int64_t n_malicious,
                                       int fraud_profile_on, sift_corpus** out);
/* skip_unknown drops records referencing chains/protocols/event types outside
 * the supported universes instead of failing the load. */
SIFT_API sift_status sift_corpus_load(const char* events_path, int skip_unknown,
                                      sift_corpus** out);
SIFT_API sift_status sift_corpus_save_events(const sift_corpus* corpus, const char* path);
/* Fails unless the corpus carries labels (synthesized corpora do). */
SIFT_API sift_status sift_corpus_save_labels(const sift_corpus* corpus, const char* path);
SIFT_API int64_t sift_corpus_event_count(const sift_corpus* corpus);
SIFT_API int64_t sift_corpus_skipped_count(const sift_corpus* corpus);
SIFT_API void sift_corpus_free(sift_corpus* corpus);

/* ---- schema ---- */

SIFT_API sift_status sift_schema_derive(const sift_corpus* corpus, sift_schema** out);
SIFT_API sift_status sift_schema_save(const sift_schema* schema, const char* path);
SIFT_API sift_status sift_schema_load(const char* path, sift_schema** out);
SIFT_API int sift_schema_feature_count(const sift_schema* schema);
SIFT_API void sift_schema_free(sift_schema* schema);

/* ---- features ---- */

SIFT_API sift_status sift_features_extract(const sift_corpus* corpus, const sift_schema* schema,
                                           sift_features** out);
SIFT_API sift_status sift_features_save(const sift_features* features, const char* path);
SIFT_API sift_status sift_features_load(const char* path, sift_features** out);
/* Pearson correlation matrix of all feature columns, as CSV. */
SIFT_API sift_status sift_features_save_correlation(const sift_features* features,
                                                    const char* path);
/* Per-column min/q1/median/q3/max/mean/std, as tidy CSV. */
SIFT_API sift_status sift_features_save_distribution(const sift_features* features,
                                                     const char* path);
SIFT_API int64_t sift_features_row_count(const sift_features* features);
SIFT_API void sift_features_free(sift_features* features);

/* ---- evaluation ---- */

typedef struct sift_eval_options {
    const char* model;      /* logreg | rf | gbt | svm | mlp */
    int folds;              /* >= 2 */
    uint64_t seed;
    int smote_k;            /* nearest neighbors, >= 1 */
    double smote_ratio;     /* minority/majority target in (0, 1] */
    const char* normalize;  /* "auto" | "on" | "off" */
    uint64_t good_sample;   /* cap on sampled good rows */
    int transactional_only; /* restrict to the transactional feature block */
    int record_runtime;     /* embed wall clock in the report (breaks byte-
                               for-byte reproducibility of the file) */
    const char* model_out;  /* optional: path for a full-data model artifact */
} sift_eval_options;

/* Fills the documented defaults: model=gbt, folds=5, seed=42, smote_k=5,
 * smote_ratio=1.0, normalize=auto, good_sample=10000, flags off. */
SIFT_API void sift_eval_options_init(sift_eval_options* options);

SIFT_API sift_status sift_eval(const char* features_csv, const char* labels_csv,
                               const sift_eval_options* options, sift_report** out);

/* ---- reports ---- */

SIFT_API sift_status sift_report_save(const sift_report* report, const char* path);
SIFT_API sift_status sift_report_load(const char* path, sift_report** out);
SIFT_API sift_status sift_report_write_plots(const sift_report* report, const char* dir);
/* cls: "good" | "malicious"; metric: precision | recall | accuracy | f1 | f2.
 * Returns the cross-fold average. */
SIFT_API sift_status sift_report_average(const sift_report* report, const char* cls,
                                         const char* metric, double* out);
SIFT_API void sift_report_free(sift_report* report);

/* ---- importance ---- */

/* Reads a model artifact and writes feature,value rows sorted by weight.
 * Fails for model families without a defined importance (svm, mlp). */
SIFT_API sift_status sift_importance_export(const char* artifact_path, const char* csv_path);

#ifdef __cplusplus
}
#endif

#endif /* CHAINSIFT_H */
