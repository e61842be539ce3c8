/*
 * scp: few-shot sentiment classification with chain-of-thought prompt tuning
 * and correlation-weighted (soft) contrastive learning.
 *
 * C API over the shared library: opaque handles, status codes, explicit
 * ownership. Every function that can fail returns scp_status; on failure
 * scp_last_error() holds a thread-local description.
 *
 * Ownership: *_load / *_build / scp_train / scp_evaluate hand out handles the
 * caller frees with the matching *_free. const char* accessors borrow from the
 * handle and stay valid until it is freed; char** out-parameters transfer
 * ownership and are released with scp_string_free.
 */
#ifndef SCP_H
#define SCP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef SCP_API
#if defined(_WIN32)
#define SCP_API __declspec(dllexport)
#else
#define SCP_API __attribute__((visibility("default")))
#endif
#endif

typedef enum scp_status {
    SCP_OK = 0,
    SCP_ERR_INVALID_ARGUMENT,
    SCP_ERR_PARSE,
    SCP_ERR_INVARIANT,
    SCP_ERR_LENGTH_MISMATCH,
    SCP_ERR_DEGENERATE_INPUT,
    SCP_ERR_BAD_EPSILON,
    SCP_ERR_BAD_TAU,
    SCP_ERR_UNKNOWN_LABEL,
    SCP_ERR_MISSING_GOLD,
    SCP_ERR_EMPTY_INPUT,
    SCP_ERR_ALREADY_FILLED,
    SCP_ERR_MISSING_HIERARCHY,
    SCP_ERR_SEQUENCE_TOO_LONG,
    SCP_ERR_MASK_NOT_FOUND,
    SCP_ERR_MULTIPLE_MASKS,
    SCP_ERR_UNKNOWN_VERBALIZER_TOKEN,
    SCP_ERR_DIMENSION_TOO_SMALL,
    SCP_ERR_INSUFFICIENT_EXAMPLES,
    SCP_ERR_COLUMN_MISMATCH,
    SCP_ERR_TOO_FEW_POINTS,
    SCP_ERR_BAD_PERPLEXITY,
    SCP_ERR_VERSION_MISMATCH,
    SCP_ERR_CORRUPT_FILE,
    SCP_ERR_IO,
    SCP_ERR_INTERNAL
} scp_status;

typedef enum scp_fill_policy {
    SCP_FILL_GOLD = 0,
    SCP_FILL_PREDICTED = 1,
    SCP_FILL_UNFILLED_FORBIDDEN = 2
} scp_fill_policy;

typedef enum scp_target_mode {
    SCP_TARGET_LITERAL = 0,
    SCP_TARGET_HIERARCHY = 1
} scp_target_mode;

typedef enum scp_h_mode { SCP_H_SLICE = 0, SCP_H_PROJECTION = 1 } scp_h_mode;

typedef enum scp_softcl_scope {
    SCP_SCOPE_BATCH = 0,
    SCP_SCOPE_EPOCH_MEMORY = 1
} scp_softcl_scope;

typedef enum scp_optimizer { SCP_OPT_SGD = 0, SCP_OPT_ADAM = 1 } scp_optimizer;

typedef enum scp_multilabel_policy {
    SCP_MULTILABEL_SINGLE_ONLY = 0,
    SCP_MULTILABEL_EXPAND = 1
} scp_multilabel_policy;

typedef enum scp_split_member {
    SCP_SPLIT_TRAIN = 0,
    SCP_SPLIT_VALIDATION = 1,
    SCP_SPLIT_TEST = 2
} scp_split_member;

typedef struct scp_schema scp_schema;
typedef struct scp_matrix scp_matrix; /* correlation or weight table */
typedef struct scp_corpus scp_corpus;
typedef struct scp_split scp_split;
typedef struct scp_chain scp_chain;
typedef struct scp_model scp_model;
typedef struct scp_report scp_report;

SCP_API const char* scp_version(void);
SCP_API const char* scp_status_name(scp_status status);
SCP_API const char* scp_last_error(void);
SCP_API void scp_string_free(char* s);

/* ---- label schema ------------------------------------------------------ */

SCP_API scp_status scp_schema_load(const char* path, scp_schema** out);
SCP_API void scp_schema_free(scp_schema* schema);
SCP_API size_t scp_schema_size(const scp_schema* schema);
SCP_API const char* scp_schema_label(const scp_schema* schema, size_t index);
SCP_API const char* scp_schema_verbalizer(const scp_schema* schema, size_t index);
SCP_API int scp_schema_index_of(const scp_schema* schema, const char* label); /* -1 unknown */
SCP_API int scp_schema_has_hierarchy(const scp_schema* schema);
/* New schema with a 3-level emotion hierarchy attached from a standalone
 * mapping file (rows: label, basic, secondary, tertiary). */
SCP_API scp_status scp_schema_with_hierarchy(const scp_schema* schema, const char* path,
                                             scp_schema** out);

/* ---- correlations and contrastive weights ------------------------------ */

SCP_API scp_status scp_pearson(const double* a, const double* b, size_t n, double* out);

/* Estimates the label correlation matrix from a rater-judgment table. */
SCP_API scp_status scp_correlation_estimate(const scp_schema* schema, const char* judgments_path,
                                            scp_matrix** out);
/* Loads a precomputed correlation table. With a schema, rows/columns are
 * reordered into schema order. */
SCP_API scp_status scp_correlation_load(const char* path, const scp_schema* schema,
                                        scp_matrix** out);
SCP_API scp_status scp_correlation_to_weights(const scp_matrix* correlation, double epsilon,
                                              scp_matrix** out);
SCP_API scp_status scp_weights_ones(const scp_schema* schema, scp_matrix** out);
SCP_API scp_status scp_weights_load(const char* path, scp_matrix** out);
SCP_API scp_status scp_matrix_save(const scp_matrix* m, const char* path);
SCP_API size_t scp_matrix_size(const scp_matrix* m);
SCP_API scp_status scp_matrix_get(const scp_matrix* m, size_t i, size_t j, double* out);
SCP_API void scp_matrix_free(scp_matrix* m);

SCP_API scp_status scp_heatmap_write(const scp_matrix* correlation, const char* image_path,
                                     const char* sidecar_path);

/* ---- prompt chains ------------------------------------------------------ */

/* Builds the 4-step chain. gold_label may be NULL for non-gold policies;
 * staged (predicted) decoding is provided by scp_predict. */
SCP_API scp_status scp_chain_build(const scp_schema* schema, const char* text,
                                   const char* gold_label, scp_fill_policy policy,
                                   scp_target_mode mode, scp_chain** out);
SCP_API scp_status scp_chain_step_text(const scp_chain* chain, size_t step, char** out);
SCP_API scp_status scp_chain_step_target(const scp_chain* chain, size_t step, char** out);
SCP_API scp_status scp_chain_mask_offset(const scp_chain* chain, size_t step, size_t* out);
SCP_API void scp_chain_free(scp_chain* chain);

/* ---- losses (in-memory) ------------------------------------------------- */

/* h: n x dim row-major; labels: n schema indices; per_anchor may be NULL. */
SCP_API scp_status scp_softcl(const double* h, size_t n, size_t dim, const int* labels,
                              const scp_matrix* weights, double tau, double* total,
                              double* per_anchor);

/* dists: the four step distributions concatenated; lens: the four lengths;
 * targets: per-step target slot. */
SCP_API scp_status scp_prompt_ce(const double* dists, const size_t lens[4], const int targets[4],
                                 double* out);

/* ---- data protocol ------------------------------------------------------ */

SCP_API scp_status scp_corpus_load(const char* path, const scp_schema* schema,
                                   scp_multilabel_policy policy, scp_corpus** out);
SCP_API size_t scp_corpus_size(const scp_corpus* corpus);
SCP_API const char* scp_corpus_text(const scp_corpus* corpus, size_t index);
SCP_API const char* scp_corpus_label(const scp_corpus* corpus, size_t index);
SCP_API const char* scp_corpus_id(const scp_corpus* corpus, size_t index);
SCP_API void scp_corpus_free(scp_corpus* corpus);

SCP_API scp_status scp_split_sample(const scp_corpus* train_pool, const scp_corpus* test_pool,
                                    int k, uint64_t seed, size_t val_size, double test_fraction,
                                    const scp_schema* schema, scp_split** out);
SCP_API scp_status scp_split_save(const scp_split* split, const char* path);
SCP_API scp_status scp_split_load(const char* path, const scp_corpus* train_pool,
                                  const scp_corpus* test_pool, scp_split** out);
SCP_API scp_status scp_split_part(const scp_split* split, scp_split_member member,
                                  scp_corpus** out);
SCP_API int scp_split_k(const scp_split* split);
SCP_API uint64_t scp_split_seed(const scp_split* split);
SCP_API void scp_split_free(scp_split* split);

/* ---- training ------------------------------------------------------------ */

typedef struct scp_train_options {
    double learning_rate;
    int batch_size;
    double tau;
    int epochs;
    uint64_t seed;
    int softcl_scope;  /* scp_softcl_scope */
    int fill_policy;   /* scp_fill_policy */
    int target_mode;   /* scp_target_mode */
    int h_mode;        /* scp_h_mode */
    int h_step;        /* chain step supplying [CLS], 0..3 */
    int normalize_h;
    int optimizer;     /* scp_optimizer */
    int early_stop_patience; /* <= 0 disables */
    int hidden_dim;
    int ffn_dim;
    int n_layers;
    int max_sequence_length;
    uint64_t memory_capacity; /* 0 = unlimited */
    /* optional 4-line template override file; NULL keeps the built-ins */
    const char* templates_path;
} scp_train_options;

SCP_API void scp_train_options_init(scp_train_options* opts);

/* validation may be NULL (no per-epoch metrics, no early stopping); resume
 * continues a checkpointed run; the history paths are optional TSV exports. */
SCP_API scp_status scp_train(const scp_schema* schema, const scp_matrix* weights,
                             const scp_corpus* train, const scp_corpus* validation,
                             const scp_train_options* opts, const scp_model* resume,
                             const char* history_steps_path, const char* history_epochs_path,
                             scp_model** out);

SCP_API scp_status scp_model_save(const scp_model* model, const char* path);
SCP_API scp_status scp_model_load(const char* path, scp_model** out);
SCP_API void scp_model_free(scp_model* model);
SCP_API int64_t scp_model_global_step(const scp_model* model);
SCP_API size_t scp_model_num_classes(const scp_model* model);
SCP_API const char* scp_model_label(const scp_model* model, size_t index);

/* ---- inference, metrics, figures ---------------------------------------- */

SCP_API scp_status scp_predict(const scp_model* model, const char* text, int* label_index);
SCP_API scp_status scp_evaluate(const scp_model* model, const scp_corpus* examples,
                                scp_report** out);
/* Writes scp_corpus_size(examples) x scp_model_num_classes(model) doubles,
 * row-major, one representation per example in corpus order. */
SCP_API scp_status scp_representations(const scp_model* model, const scp_corpus* examples,
                                       double* out);

SCP_API double scp_report_accuracy(const scp_report* report);
SCP_API double scp_report_macro_f1(const scp_report* report);
SCP_API int scp_report_n(const scp_report* report);
SCP_API scp_status scp_report_class_f1(const scp_report* report, size_t class_index, double* f1,
                                       int* present);
SCP_API scp_status scp_report_confusion(const scp_report* report, size_t gold_index,
                                        size_t predicted_index, int* count);
SCP_API scp_status scp_report_save(const scp_report* report, const char* path);
SCP_API void scp_report_free(scp_report* report);

/* t-SNE to 2-D; out_xy receives n pairs (x, y). */
SCP_API scp_status scp_project_2d(const double* points, size_t n, size_t dim, uint64_t seed,
                                  double perplexity, double* out_xy);
SCP_API scp_status scp_scatter_write(const double* xy, size_t n, const char* const* labels,
                                     const char* image_path, const char* sidecar_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SCP_H */
