/*
 * C API for the CEIDS library: cluster-then-specialize intrusion detection
 * over NSL-KDD-format flow records.
 *
 * All functions return a ceids_status; CEIDS_OK means success. On failure a
 * human-readable message is available from ceids_last_error() until the next
 * call on the same thread. Objects are opaque handles released with their
 * matching *_free function; strings returned through char** out-parameters
 * are released with ceids_string_free.
 */

#ifndef CEIDS_H
#define CEIDS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ceids_status {
  CEIDS_OK = 0,
  CEIDS_ERROR_IO = 1,
  CEIDS_ERROR_PARSE = 2,  /* malformed dataset lines, unknown attack names */
  CEIDS_ERROR_DATA = 3,   /* structurally valid but unusable data */
  CEIDS_ERROR_CONFIG = 4, /* bad config keys, values or hyperparameters */
  CEIDS_ERROR_FORMAT = 5, /* model container version/checksum problems */
  CEIDS_ERROR_INVALID_ARGUMENT = 6,
  CEIDS_ERROR_INTERNAL = 7
} ceids_status;

typedef struct ceids_dataset ceids_dataset;
typedef struct ceids_config ceids_config;
typedef struct ceids_model ceids_model;

#define CEIDS_NUM_CLASSES 5

const char* ceids_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* ceids_last_error(void);

void ceids_string_free(char* s);

/* --- datasets ---------------------------------------------------------- */

/* Loads an NSL-KDD-format file (comma-separated, 41 features + label
 * [+ difficulty]) and maps attack names to the five classes. */
ceids_status ceids_dataset_load(const char* path, ceids_dataset** out);
void ceids_dataset_free(ceids_dataset* ds);

size_t ceids_dataset_size(const ceids_dataset* ds);

/* counts[0..4] = Normal, DoS, Probe, R2L, U2R. */
ceids_status ceids_dataset_class_counts(const ceids_dataset* ds,
                                        uint64_t counts[CEIDS_NUM_CLASSES]);

/* JSON object: {"records": n, "classes": {"Normal": n, ...}}. */
ceids_status ceids_dataset_summary_json(const ceids_dataset* ds, char** out);

const char* ceids_class_name(int label);

/* --- configuration ------------------------------------------------------ */

ceids_status ceids_config_create(ceids_config** out);
ceids_status ceids_config_load(const char* path, ceids_config** out);
ceids_status ceids_config_set(ceids_config* cfg, const char* key, const char* value);
/* Full resolved key=value text (also embedded in saved models). */
ceids_status ceids_config_dump(const ceids_config* cfg, char** out);
void ceids_config_free(ceids_config* cfg);

/* --- training and models ------------------------------------------------ */

/* Runs the full pipeline: encode, scale, oversample, autoencoder,
 * mean-shift, per-cluster DNN/SVM selection, aggregation, final network.
 * Deterministic under seed. log_json receives one JSON array of progress
 * lines when non-NULL. */
ceids_status ceids_train(const ceids_dataset* train, const ceids_config* cfg, uint64_t seed,
                         ceids_model** out, char** log_json);

ceids_status ceids_model_save(const ceids_model* model, const char* path);
ceids_status ceids_model_load(const char* path, ceids_model** out);
void ceids_model_free(ceids_model* model);

size_t ceids_model_cluster_count(const ceids_model* model);

/* JSON object with cluster count, per-cluster selection records and the
 * resolved configuration snapshot. */
ceids_status ceids_model_info_json(const ceids_model* model, char** out);

/* --- inference and evaluation ------------------------------------------- */

/* Predicts one record of a loaded dataset. label receives 0..4; scores the
 * five final-network outputs. Either out-pointer may be NULL. */
ceids_status ceids_predict(const ceids_model* model, const ceids_dataset* ds, size_t index,
                           int* label, double scores[CEIDS_NUM_CLASSES]);

/* Reads NSL-KDD-format records (attack names are not validated) and writes
 * one "index,predicted_class,s0,s1,s2,s3,s4" line per record. */
ceids_status ceids_predict_file(const ceids_model* model, const char* in_path,
                                const char* out_path);

/* JSON report: confusion matrix, metrics under both averaging modes
 * (weighted per-class and binary attack/normal), per-class metrics, K. */
ceids_status ceids_evaluate(const ceids_model* model, const ceids_dataset* ds, char** out);

/* --- standalone preprocessing ------------------------------------------- */

/* Fits the nominal encoder and min-max scaler on in_path, writes the
 * encoded+scaled 41-column matrix as CSV (with class labels) to matrix_path
 * and persists encoder+scaler to scaler_path in the container format. */
ceids_status ceids_preprocess_file(const char* in_path, const char* matrix_path,
                                   const char* scaler_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CEIDS_H */
