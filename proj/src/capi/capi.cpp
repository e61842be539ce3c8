#include "scp/scp.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <variant>
#include <vector>

#include "core/dataio.hpp"
#include "core/error.hpp"
#include "core/eval.hpp"
#include "core/image.hpp"
#include "core/labels.hpp"
#include "core/losses.hpp"
#include "core/model.hpp"
#include "core/prompt.hpp"
#include "core/trainer.hpp"
#include "core/tsne.hpp"

struct scp_schema {
    scp::LabelSchema impl;
};
struct scp_matrix {
    std::variant<scp::CorrelationMatrix, scp::WeightMatrix> impl;
};
struct scp_corpus {
    std::vector<scp::Example> examples;
};
struct scp_split {
    scp::FewShotSplit impl;
};
struct scp_chain {
    scp::PromptChain impl;
};
struct scp_model {
    scp::Model impl;
};
struct scp_report {
    scp::EvalReport impl;
    scp::LabelSchema schema;
};

namespace {

thread_local std::string g_last_error;

scp_status map_code(scp::ErrorCode code) {
    switch (code) {
        case scp::ErrorCode::Ok: return SCP_OK;
        case scp::ErrorCode::InvalidArgument: return SCP_ERR_INVALID_ARGUMENT;
        case scp::ErrorCode::ParseError: return SCP_ERR_PARSE;
        case scp::ErrorCode::InvariantViolation: return SCP_ERR_INVARIANT;
        case scp::ErrorCode::LengthMismatch: return SCP_ERR_LENGTH_MISMATCH;
        case scp::ErrorCode::DegenerateInput: return SCP_ERR_DEGENERATE_INPUT;
        case scp::ErrorCode::BadEpsilon: return SCP_ERR_BAD_EPSILON;
        case scp::ErrorCode::BadTau: return SCP_ERR_BAD_TAU;
        case scp::ErrorCode::UnknownLabel: return SCP_ERR_UNKNOWN_LABEL;
        case scp::ErrorCode::MissingGold: return SCP_ERR_MISSING_GOLD;
        case scp::ErrorCode::EmptyInput: return SCP_ERR_EMPTY_INPUT;
        case scp::ErrorCode::AlreadyFilled: return SCP_ERR_ALREADY_FILLED;
        case scp::ErrorCode::MissingHierarchy: return SCP_ERR_MISSING_HIERARCHY;
        case scp::ErrorCode::SequenceTooLong: return SCP_ERR_SEQUENCE_TOO_LONG;
        case scp::ErrorCode::MaskNotFound: return SCP_ERR_MASK_NOT_FOUND;
        case scp::ErrorCode::MultipleMasks: return SCP_ERR_MULTIPLE_MASKS;
        case scp::ErrorCode::UnknownVerbalizerToken: return SCP_ERR_UNKNOWN_VERBALIZER_TOKEN;
        case scp::ErrorCode::DimensionTooSmall: return SCP_ERR_DIMENSION_TOO_SMALL;
        case scp::ErrorCode::InsufficientExamples: return SCP_ERR_INSUFFICIENT_EXAMPLES;
        case scp::ErrorCode::ColumnMismatch: return SCP_ERR_COLUMN_MISMATCH;
        case scp::ErrorCode::TooFewPoints: return SCP_ERR_TOO_FEW_POINTS;
        case scp::ErrorCode::BadPerplexity: return SCP_ERR_BAD_PERPLEXITY;
        case scp::ErrorCode::VersionMismatch: return SCP_ERR_VERSION_MISMATCH;
        case scp::ErrorCode::CorruptFile: return SCP_ERR_CORRUPT_FILE;
        case scp::ErrorCode::IoError: return SCP_ERR_IO;
        case scp::ErrorCode::Internal: return SCP_ERR_INTERNAL;
    }
    return SCP_ERR_INTERNAL;
}

template <typename F>
scp_status guarded(F&& f) noexcept {
    try {
        f();
        return SCP_OK;
    } catch (const scp::Error& e) {
        g_last_error = e.what();
        return map_code(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SCP_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return SCP_ERR_INTERNAL;
    }
}

scp_status invalid(const char* message) {
    g_last_error = message;
    return SCP_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

const scp::CorrelationMatrix& as_correlation(const scp_matrix* m) {
    scp::require(std::holds_alternative<scp::CorrelationMatrix>(m->impl),
                 scp::ErrorCode::InvalidArgument, "expected a correlation matrix handle");
    return std::get<scp::CorrelationMatrix>(m->impl);
}

const scp::WeightMatrix& as_weights(const scp_matrix* m) {
    scp::require(std::holds_alternative<scp::WeightMatrix>(m->impl),
                 scp::ErrorCode::InvalidArgument, "expected a weight matrix handle");
    return std::get<scp::WeightMatrix>(m->impl);
}

scp::FillPolicy to_fill_policy(int v) {
    switch (v) {
        case SCP_FILL_GOLD: return scp::FillPolicy::Gold;
        case SCP_FILL_PREDICTED: return scp::FillPolicy::Predicted;
        case SCP_FILL_UNFILLED_FORBIDDEN: return scp::FillPolicy::UnfilledForbidden;
    }
    scp::fail(scp::ErrorCode::InvalidArgument, "bad fill policy value");
}

scp::TargetMode to_target_mode(int v) {
    switch (v) {
        case SCP_TARGET_LITERAL: return scp::TargetMode::Literal;
        case SCP_TARGET_HIERARCHY: return scp::TargetMode::Hierarchy;
    }
    scp::fail(scp::ErrorCode::InvalidArgument, "bad target mode value");
}

}  // namespace

extern "C" {

const char* scp_version(void) { return "1.0.0"; }

const char* scp_status_name(scp_status status) {
    switch (status) {
        case SCP_OK: return "ok";
        case SCP_ERR_INVALID_ARGUMENT: return "invalid argument";
        case SCP_ERR_PARSE: return "parse error";
        case SCP_ERR_INVARIANT: return "invariant violation";
        case SCP_ERR_LENGTH_MISMATCH: return "length mismatch";
        case SCP_ERR_DEGENERATE_INPUT: return "degenerate input";
        case SCP_ERR_BAD_EPSILON: return "bad epsilon";
        case SCP_ERR_BAD_TAU: return "bad tau";
        case SCP_ERR_UNKNOWN_LABEL: return "unknown label";
        case SCP_ERR_MISSING_GOLD: return "missing gold label";
        case SCP_ERR_EMPTY_INPUT: return "empty input";
        case SCP_ERR_ALREADY_FILLED: return "mask already filled";
        case SCP_ERR_MISSING_HIERARCHY: return "missing hierarchy";
        case SCP_ERR_SEQUENCE_TOO_LONG: return "sequence too long";
        case SCP_ERR_MASK_NOT_FOUND: return "mask not found";
        case SCP_ERR_MULTIPLE_MASKS: return "multiple masks";
        case SCP_ERR_UNKNOWN_VERBALIZER_TOKEN: return "unknown verbalizer token";
        case SCP_ERR_DIMENSION_TOO_SMALL: return "dimension too small";
        case SCP_ERR_INSUFFICIENT_EXAMPLES: return "insufficient examples";
        case SCP_ERR_COLUMN_MISMATCH: return "column mismatch";
        case SCP_ERR_TOO_FEW_POINTS: return "too few points";
        case SCP_ERR_BAD_PERPLEXITY: return "bad perplexity";
        case SCP_ERR_VERSION_MISMATCH: return "version mismatch";
        case SCP_ERR_CORRUPT_FILE: return "corrupt file";
        case SCP_ERR_IO: return "i/o error";
        case SCP_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char* scp_last_error(void) { return g_last_error.c_str(); }

void scp_string_free(char* s) { std::free(s); }

/* ---- schema ------------------------------------------------------------- */

scp_status scp_schema_load(const char* path, scp_schema** out) {
    if (!path || !out) return invalid("scp_schema_load: null argument");
    return guarded([&] { *out = new scp_schema{scp::LabelSchema::load(path)}; });
}

void scp_schema_free(scp_schema* schema) { delete schema; }

size_t scp_schema_size(const scp_schema* schema) { return schema ? schema->impl.size() : 0; }

const char* scp_schema_label(const scp_schema* schema, size_t index) {
    if (!schema || index >= schema->impl.size()) return nullptr;
    return schema->impl.label(index).c_str();
}

const char* scp_schema_verbalizer(const scp_schema* schema, size_t index) {
    if (!schema || index >= schema->impl.size()) return nullptr;
    return schema->impl.verbalizer(index).c_str();
}

int scp_schema_index_of(const scp_schema* schema, const char* label) {
    if (!schema || !label) return -1;
    return schema->impl.index_of(label);
}

int scp_schema_has_hierarchy(const scp_schema* schema) {
    return schema && schema->impl.has_hierarchy() ? 1 : 0;
}

scp_status scp_schema_with_hierarchy(const scp_schema* schema, const char* path,
                                     scp_schema** out) {
    if (!schema || !path || !out) return invalid("scp_schema_with_hierarchy: null argument");
    return guarded([&] { *out = new scp_schema{schema->impl.with_hierarchy_file(path)}; });
}

/* ---- correlations -------------------------------------------------------- */

scp_status scp_pearson(const double* a, const double* b, size_t n, double* out) {
    if (!a || !b || !out) return invalid("scp_pearson: null argument");
    return guarded([&] { *out = scp::pearson({a, n}, {b, n}); });
}

scp_status scp_correlation_estimate(const scp_schema* schema, const char* judgments_path,
                                    scp_matrix** out) {
    if (!schema || !judgments_path || !out)
        return invalid("scp_correlation_estimate: null argument");
    return guarded([&] {
        Eigen::MatrixXd judgments = scp::load_rater_judgments(judgments_path, schema->impl);
        *out = new scp_matrix{scp::estimate_correlation(judgments, schema->impl)};
    });
}

scp_status scp_correlation_load(const char* path, const scp_schema* schema, scp_matrix** out) {
    if (!path || !out) return invalid("scp_correlation_load: null argument");
    return guarded([&] {
        scp::CorrelationMatrix m = scp::CorrelationMatrix::load(path);
        if (schema) m = m.canonicalized(schema->impl);
        *out = new scp_matrix{std::move(m)};
    });
}

scp_status scp_correlation_to_weights(const scp_matrix* correlation, double epsilon,
                                      scp_matrix** out) {
    if (!correlation || !out) return invalid("scp_correlation_to_weights: null argument");
    return guarded([&] {
        *out = new scp_matrix{scp::correlation_to_weights(as_correlation(correlation), epsilon)};
    });
}

scp_status scp_weights_ones(const scp_schema* schema, scp_matrix** out) {
    if (!schema || !out) return invalid("scp_weights_ones: null argument");
    return guarded(
        [&] { *out = new scp_matrix{scp::WeightMatrix::ones(schema->impl.labels())}; });
}

scp_status scp_weights_load(const char* path, scp_matrix** out) {
    if (!path || !out) return invalid("scp_weights_load: null argument");
    return guarded([&] { *out = new scp_matrix{scp::WeightMatrix::load(path)}; });
}

scp_status scp_matrix_save(const scp_matrix* m, const char* path) {
    if (!m || !path) return invalid("scp_matrix_save: null argument");
    return guarded([&] {
        if (std::holds_alternative<scp::CorrelationMatrix>(m->impl))
            std::get<scp::CorrelationMatrix>(m->impl).save(path);
        else
            std::get<scp::WeightMatrix>(m->impl).save(path);
    });
}

size_t scp_matrix_size(const scp_matrix* m) {
    if (!m) return 0;
    return std::holds_alternative<scp::CorrelationMatrix>(m->impl)
               ? std::get<scp::CorrelationMatrix>(m->impl).size()
               : std::get<scp::WeightMatrix>(m->impl).size();
}

scp_status scp_matrix_get(const scp_matrix* m, size_t i, size_t j, double* out) {
    if (!m || !out) return invalid("scp_matrix_get: null argument");
    return guarded([&] {
        const size_t n = scp_matrix_size(m);
        scp::require(i < n && j < n, scp::ErrorCode::InvalidArgument, "matrix index out of range");
        *out = std::holds_alternative<scp::CorrelationMatrix>(m->impl)
                   ? std::get<scp::CorrelationMatrix>(m->impl).rho(i, j)
                   : std::get<scp::WeightMatrix>(m->impl).alpha(i, j);
    });
}

void scp_matrix_free(scp_matrix* m) { delete m; }

scp_status scp_heatmap_write(const scp_matrix* correlation, const char* image_path,
                             const char* sidecar_path) {
    if (!correlation || !image_path || !sidecar_path)
        return invalid("scp_heatmap_write: null argument");
    return guarded(
        [&] { scp::emit_heatmap(as_correlation(correlation), image_path, sidecar_path); });
}

/* ---- prompt chains ------------------------------------------------------- */

scp_status scp_chain_build(const scp_schema* schema, const char* text, const char* gold_label,
                           scp_fill_policy policy, scp_target_mode mode, scp_chain** out) {
    if (!schema || !text || !out) return invalid("scp_chain_build: null argument");
    return guarded([&] {
        std::optional<std::string> gold;
        if (gold_label) gold = gold_label;
        *out = new scp_chain{scp::build_chain(text, schema->impl, gold, to_fill_policy(policy),
                                              to_target_mode(mode))};
    });
}

scp_status scp_chain_step_text(const scp_chain* chain, size_t step, char** out) {
    if (!chain || !out) return invalid("scp_chain_step_text: null argument");
    return guarded([&] {
        scp::require(step < chain->impl.steps.size(), scp::ErrorCode::InvalidArgument,
                     "chain step out of range");
        *out = copy_string(chain->impl.steps[step].text);
    });
}

scp_status scp_chain_step_target(const scp_chain* chain, size_t step, char** out) {
    if (!chain || !out) return invalid("scp_chain_step_target: null argument");
    return guarded([&] {
        scp::require(step < chain->impl.steps.size(), scp::ErrorCode::InvalidArgument,
                     "chain step out of range");
        *out = copy_string(chain->impl.steps[step].target_label);
    });
}

scp_status scp_chain_mask_offset(const scp_chain* chain, size_t step, size_t* out) {
    if (!chain || !out) return invalid("scp_chain_mask_offset: null argument");
    return guarded([&] {
        scp::require(step < chain->impl.steps.size(), scp::ErrorCode::InvalidArgument,
                     "chain step out of range");
        *out = chain->impl.steps[step].mask_char_offset;
    });
}

void scp_chain_free(scp_chain* chain) { delete chain; }

/* ---- losses --------------------------------------------------------------- */

scp_status scp_softcl(const double* h, size_t n, size_t dim, const int* labels,
                      const scp_matrix* weights, double tau, double* total, double* per_anchor) {
    if (!h || !labels || !weights || !total) return invalid("scp_softcl: null argument");
    return guarded([&] {
        scp::AnchorContext ctx;
        ctx.h.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < dim; ++j)
                ctx.h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    h[i * dim + j];
        ctx.labels.assign(labels, labels + n);
        scp::SoftclResult result = scp::softcl(ctx, as_weights(weights), tau);
        *total = result.total;
        if (per_anchor)
            for (size_t i = 0; i < n; ++i) per_anchor[i] = result.per_anchor[i];
    });
}

scp_status scp_prompt_ce(const double* dists, const size_t lens[4], const int targets[4],
                         double* out) {
    if (!dists || !lens || !targets || !out) return invalid("scp_prompt_ce: null argument");
    return guarded([&] {
        std::array<Eigen::VectorXd, 4> step_dists;
        size_t offset = 0;
        for (size_t t = 0; t < 4; ++t) {
            step_dists[t].resize(static_cast<Eigen::Index>(lens[t]));
            for (size_t j = 0; j < lens[t]; ++j)
                step_dists[t](static_cast<Eigen::Index>(j)) = dists[offset + j];
            offset += lens[t];
        }
        *out = scp::prompt_ce(step_dists, {targets[0], targets[1], targets[2], targets[3]});
    });
}

/* ---- data ------------------------------------------------------------------ */

scp_status scp_corpus_load(const char* path, const scp_schema* schema,
                           scp_multilabel_policy policy, scp_corpus** out) {
    if (!path || !schema || !out) return invalid("scp_corpus_load: null argument");
    return guarded([&] {
        *out = new scp_corpus{scp::load_corpus(path, schema->impl,
                                               policy == SCP_MULTILABEL_EXPAND
                                                   ? scp::MultiLabelPolicy::Expand
                                                   : scp::MultiLabelPolicy::SingleOnly)};
    });
}

size_t scp_corpus_size(const scp_corpus* corpus) { return corpus ? corpus->examples.size() : 0; }

const char* scp_corpus_text(const scp_corpus* corpus, size_t index) {
    if (!corpus || index >= corpus->examples.size()) return nullptr;
    return corpus->examples[index].text.c_str();
}

const char* scp_corpus_label(const scp_corpus* corpus, size_t index) {
    if (!corpus || index >= corpus->examples.size()) return nullptr;
    return corpus->examples[index].label.c_str();
}

const char* scp_corpus_id(const scp_corpus* corpus, size_t index) {
    if (!corpus || index >= corpus->examples.size()) return nullptr;
    return corpus->examples[index].source_id.c_str();
}

void scp_corpus_free(scp_corpus* corpus) { delete corpus; }

scp_status scp_split_sample(const scp_corpus* train_pool, const scp_corpus* test_pool, int k,
                            uint64_t seed, size_t val_size, double test_fraction,
                            const scp_schema* schema, scp_split** out) {
    if (!train_pool || !test_pool || !schema || !out)
        return invalid("scp_split_sample: null argument");
    return guarded([&] {
        *out = new scp_split{scp::sample_few_shot(train_pool->examples, test_pool->examples, k,
                                                  seed, schema->impl, val_size, test_fraction)};
    });
}

scp_status scp_split_save(const scp_split* split, const char* path) {
    if (!split || !path) return invalid("scp_split_save: null argument");
    return guarded([&] { scp::save_split(split->impl, path); });
}

scp_status scp_split_load(const char* path, const scp_corpus* train_pool,
                          const scp_corpus* test_pool, scp_split** out) {
    if (!path || !train_pool || !test_pool || !out) return invalid("scp_split_load: null argument");
    return guarded([&] {
        *out = new scp_split{scp::load_split(path, train_pool->examples, test_pool->examples)};
    });
}

scp_status scp_split_part(const scp_split* split, scp_split_member member, scp_corpus** out) {
    if (!split || !out) return invalid("scp_split_part: null argument");
    return guarded([&] {
        switch (member) {
            case SCP_SPLIT_TRAIN: *out = new scp_corpus{split->impl.train}; return;
            case SCP_SPLIT_VALIDATION: *out = new scp_corpus{split->impl.validation}; return;
            case SCP_SPLIT_TEST: *out = new scp_corpus{split->impl.test}; return;
        }
        scp::fail(scp::ErrorCode::InvalidArgument, "bad split member");
    });
}

int scp_split_k(const scp_split* split) { return split ? split->impl.k : 0; }

uint64_t scp_split_seed(const scp_split* split) { return split ? split->impl.seed : 0; }

void scp_split_free(scp_split* split) { delete split; }

/* ---- training ---------------------------------------------------------------- */

void scp_train_options_init(scp_train_options* opts) {
    if (!opts) return;
    scp::TrainConfig cfg;
    scp::EncoderConfig enc;
    opts->learning_rate = cfg.learning_rate;
    opts->batch_size = cfg.batch_size;
    opts->tau = cfg.tau;
    opts->epochs = cfg.epochs;
    opts->seed = cfg.seed;
    opts->softcl_scope =
        cfg.scope == scp::SoftclScope::Batch ? SCP_SCOPE_BATCH : SCP_SCOPE_EPOCH_MEMORY;
    opts->fill_policy = SCP_FILL_GOLD;
    opts->target_mode = SCP_TARGET_LITERAL;
    opts->h_mode = enc.h_mode == scp::HMode::Slice ? SCP_H_SLICE : SCP_H_PROJECTION;
    opts->h_step = enc.h_step;
    opts->normalize_h = cfg.normalize_h ? 1 : 0;
    opts->optimizer = cfg.optimizer == scp::Optimizer::Sgd ? SCP_OPT_SGD : SCP_OPT_ADAM;
    opts->early_stop_patience = cfg.early_stop_patience;
    opts->hidden_dim = enc.hidden_dim;
    opts->ffn_dim = enc.ffn_dim;
    opts->n_layers = enc.n_layers;
    opts->max_sequence_length = enc.max_sequence_length;
    opts->memory_capacity = cfg.memory_capacity;
    opts->templates_path = nullptr;
}

scp_status scp_train(const scp_schema* schema, const scp_matrix* weights, const scp_corpus* train,
                     const scp_corpus* validation, const scp_train_options* opts,
                     const scp_model* resume, const char* history_steps_path,
                     const char* history_epochs_path, scp_model** out) {
    if (!schema || !weights || !train || !opts || !out) return invalid("scp_train: null argument");
    if ((history_steps_path == nullptr) != (history_epochs_path == nullptr))
        return invalid("scp_train: history paths must be given together");
    return guarded([&] {
        scp::TrainConfig cfg;
        cfg.learning_rate = opts->learning_rate;
        cfg.batch_size = opts->batch_size;
        cfg.tau = opts->tau;
        cfg.epochs = opts->epochs;
        cfg.seed = opts->seed;
        cfg.scope = opts->softcl_scope == SCP_SCOPE_BATCH ? scp::SoftclScope::Batch
                                                          : scp::SoftclScope::EpochMemory;
        cfg.fill_policy = to_fill_policy(opts->fill_policy);
        cfg.target_mode = to_target_mode(opts->target_mode);
        cfg.normalize_h = opts->normalize_h != 0;
        cfg.optimizer = opts->optimizer == SCP_OPT_ADAM ? scp::Optimizer::Adam
                                                        : scp::Optimizer::Sgd;
        cfg.early_stop_patience = opts->early_stop_patience;
        cfg.memory_capacity = opts->memory_capacity;
        if (opts->templates_path) {
            scp::ChainTemplates tpl =
                scp::ChainTemplates::load(opts->templates_path, schema->impl.mask_token());
            for (size_t t = 0; t < 4; ++t) cfg.template_fragments.push_back(tpl.fragment(t));
        }

        scp::EncoderConfig enc;
        enc.hidden_dim = opts->hidden_dim;
        enc.ffn_dim = opts->ffn_dim;
        enc.n_layers = opts->n_layers;
        enc.max_sequence_length = opts->max_sequence_length;
        enc.h_mode = opts->h_mode == SCP_H_PROJECTION ? scp::HMode::Projection : scp::HMode::Slice;
        enc.h_step = opts->h_step;

        scp::FewShotSplit split;
        split.train = train->examples;
        if (validation) split.validation = validation->examples;
        split.seed = cfg.seed;

        scp::TrainResult result = scp::train(cfg, enc, split, schema->impl, as_weights(weights),
                                             resume ? &resume->impl : nullptr);
        if (history_steps_path)
            scp::save_history(result.history, history_steps_path, history_epochs_path,
                              resume != nullptr);
        *out = new scp_model{std::move(result.model)};
    });
}

scp_status scp_model_save(const scp_model* model, const char* path) {
    if (!model || !path) return invalid("scp_model_save: null argument");
    return guarded([&] { scp::save_checkpoint(model->impl, path); });
}

scp_status scp_model_load(const char* path, scp_model** out) {
    if (!path || !out) return invalid("scp_model_load: null argument");
    return guarded([&] { *out = new scp_model{scp::load_checkpoint(path)}; });
}

void scp_model_free(scp_model* model) { delete model; }

int64_t scp_model_global_step(const scp_model* model) {
    return model ? model->impl.global_step : 0;
}

size_t scp_model_num_classes(const scp_model* model) {
    return model ? model->impl.schema.size() : 0;
}

const char* scp_model_label(const scp_model* model, size_t index) {
    if (!model || index >= model->impl.schema.size()) return nullptr;
    return model->impl.schema.label(index).c_str();
}

/* ---- inference ------------------------------------------------------------------ */

scp_status scp_predict(const scp_model* model, const char* text, int* label_index) {
    if (!model || !text || !label_index) return invalid("scp_predict: null argument");
    return guarded([&] { *label_index = scp::predict_label(text, model->impl); });
}

scp_status scp_evaluate(const scp_model* model, const scp_corpus* examples, scp_report** out) {
    if (!model || !examples || !out) return invalid("scp_evaluate: null argument");
    return guarded([&] {
        *out = new scp_report{scp::evaluate(examples->examples, model->impl),
                              model->impl.schema};
    });
}

scp_status scp_representations(const scp_model* model, const scp_corpus* examples, double* out) {
    if (!model || !examples || !out) return invalid("scp_representations: null argument");
    return guarded([&] {
        const size_t dim = model->impl.schema.size();
        for (size_t i = 0; i < examples->examples.size(); ++i) {
            Eigen::VectorXd h = scp::represent(examples->examples[i].text, model->impl);
            for (size_t j = 0; j < dim; ++j) out[i * dim + j] = h(static_cast<Eigen::Index>(j));
        }
    });
}

double scp_report_accuracy(const scp_report* report) {
    return report ? report->impl.accuracy : 0.0;
}

double scp_report_macro_f1(const scp_report* report) {
    return report ? report->impl.macro_f1 : 0.0;
}

int scp_report_n(const scp_report* report) { return report ? report->impl.n : 0; }

scp_status scp_report_class_f1(const scp_report* report, size_t class_index, double* f1,
                               int* present) {
    if (!report || !f1 || !present) return invalid("scp_report_class_f1: null argument");
    return guarded([&] {
        scp::require(class_index < report->impl.per_class_f1.size(),
                     scp::ErrorCode::InvalidArgument, "class index out of range");
        *f1 = report->impl.per_class_f1[class_index];
        *present = report->impl.class_present[class_index] ? 1 : 0;
    });
}

scp_status scp_report_confusion(const scp_report* report, size_t gold_index,
                                size_t predicted_index, int* count) {
    if (!report || !count) return invalid("scp_report_confusion: null argument");
    return guarded([&] {
        const auto n = static_cast<size_t>(report->impl.confusion.rows());
        scp::require(gold_index < n && predicted_index < n, scp::ErrorCode::InvalidArgument,
                     "confusion index out of range");
        *count = report->impl.confusion(static_cast<Eigen::Index>(gold_index),
                                        static_cast<Eigen::Index>(predicted_index));
    });
}

scp_status scp_report_save(const scp_report* report, const char* path) {
    if (!report || !path) return invalid("scp_report_save: null argument");
    return guarded([&] { scp::save_report(report->impl, report->schema, path); });
}

void scp_report_free(scp_report* report) { delete report; }

/* ---- visualization ------------------------------------------------------------- */

scp_status scp_project_2d(const double* points, size_t n, size_t dim, uint64_t seed,
                          double perplexity, double* out_xy) {
    if (!points || !out_xy) return invalid("scp_project_2d: null argument");
    return guarded([&] {
        Eigen::MatrixXd input(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < dim; ++j)
                input(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    points[i * dim + j];
        Eigen::MatrixXd projected = scp::project_2d(input, seed, perplexity);
        for (size_t i = 0; i < n; ++i) {
            out_xy[2 * i] = projected(static_cast<Eigen::Index>(i), 0);
            out_xy[2 * i + 1] = projected(static_cast<Eigen::Index>(i), 1);
        }
    });
}

scp_status scp_scatter_write(const double* xy, size_t n, const char* const* labels,
                             const char* image_path, const char* sidecar_path) {
    if (!xy || !labels || !image_path || !sidecar_path)
        return invalid("scp_scatter_write: null argument");
    return guarded([&] {
        Eigen::MatrixXd points(static_cast<Eigen::Index>(n), 2);
        std::vector<std::string> names;
        for (size_t i = 0; i < n; ++i) {
            points(static_cast<Eigen::Index>(i), 0) = xy[2 * i];
            points(static_cast<Eigen::Index>(i), 1) = xy[2 * i + 1];
            scp::require(labels[i] != nullptr, scp::ErrorCode::InvalidArgument,
                         "null label string");
            names.emplace_back(labels[i]);
        }
        scp::emit_scatter(points, names, image_path, sidecar_path);
    });
}

} /* extern "C" */
