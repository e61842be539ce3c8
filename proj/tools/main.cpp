// scp command-line interface. Links against the C API only; all heavy lifting
// lives behind libscp.
#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "scp/scp.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

int exit_code_for(scp_status status) {
    switch (status) {
        case SCP_OK:
            return kExitOk;
        case SCP_ERR_SEQUENCE_TOO_LONG:
        case SCP_ERR_MASK_NOT_FOUND:
        case SCP_ERR_MULTIPLE_MASKS:
        case SCP_ERR_VERSION_MISMATCH:
        case SCP_ERR_CORRUPT_FILE:
        case SCP_ERR_INTERNAL:
            return kExitRuntime;
        default:
            return kExitInput;  // input / configuration problems
    }
}

// Raised for CLI-level configuration problems (missing paths, bad values).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a C API call failed; carries the mapped exit code.
struct ApiError : std::runtime_error {
    ApiError(const std::string& what, int exit_code)
        : std::runtime_error(what), exit_code(exit_code) {}
    int exit_code;
};

void check(scp_status status, const std::string& context) {
    if (status == SCP_OK) return;
    throw ApiError(context + ": " + scp_status_name(status) + " (" + scp_last_error() + ")",
                   exit_code_for(status));
}

template <typename T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    Handle() = default;
    explicit Handle(T* p) : ptr(p) {}
    ~Handle() { reset(); }
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
    Handle& operator=(Handle&& other) noexcept {
        if (this != &other) {
            reset(other.ptr);
            other.ptr = nullptr;
        }
        return *this;
    }
    void reset(T* p = nullptr) {
        if (ptr) Free(ptr);
        ptr = p;
    }
    T** out() {
        reset();
        return &ptr;
    }
    operator T*() const { return ptr; }
};

using SchemaHandle = Handle<scp_schema, scp_schema_free>;
using MatrixHandle = Handle<scp_matrix, scp_matrix_free>;
using CorpusHandle = Handle<scp_corpus, scp_corpus_free>;
using SplitHandle = Handle<scp_split, scp_split_free>;
using ModelHandle = Handle<scp_model, scp_model_free>;
using ReportHandle = Handle<scp_report, scp_report_free>;

// Every option of every subcommand; the config file carries the same keys.
struct Options {
    std::string config_path;
    std::string schema_path;
    std::string corpus_path;
    std::string test_corpus_path;
    std::string judgments_path;
    std::string correlation_path;
    std::string weights_path;
    std::string split_path;
    std::string checkpoint_path;
    std::string resume_path;
    std::string eval_corpus_path;
    std::string templates_path;
    std::string hierarchy_path;
    std::string out_dir = "out";

    int k = 5;
    uint64_t seed = 0;
    int val_size = 500;
    double test_fraction = 0.05;
    std::string multilabel = "single-only";

    double epsilon = 0.05;
    double tau = 2.0;
    double learning_rate = 5e-5;
    int batch_size = 4;
    int epochs = 20;
    std::string scope = "epoch-memory";
    std::string fill_policy = "gold";
    std::string target_mode = "literal";
    std::string h_mode = "slice";
    int h_step = 3;
    bool no_normalize_h = false;
    std::string optimizer = "sgd";
    int early_stop_patience = 5;
    int hidden_dim = 32;
    int ffn_dim = 64;
    int n_layers = 2;
    int max_sequence_length = 256;

    double perplexity = 10.0;
};

const std::map<std::string, std::string Options::*>& string_keys() {
    static const std::map<std::string, std::string Options::*> keys = {
        {"schema", &Options::schema_path},
        {"corpus", &Options::corpus_path},
        {"test_corpus", &Options::test_corpus_path},
        {"judgments", &Options::judgments_path},
        {"correlation", &Options::correlation_path},
        {"weights", &Options::weights_path},
        {"split", &Options::split_path},
        {"checkpoint", &Options::checkpoint_path},
        {"resume", &Options::resume_path},
        {"eval_corpus", &Options::eval_corpus_path},
        {"templates", &Options::templates_path},
        {"hierarchy", &Options::hierarchy_path},
        {"out", &Options::out_dir},
        {"multilabel", &Options::multilabel},
        {"scope", &Options::scope},
        {"fill_policy", &Options::fill_policy},
        {"target_mode", &Options::target_mode},
        {"h_mode", &Options::h_mode},
        {"optimizer", &Options::optimizer},
    };
    return keys;
}

const std::map<std::string, int Options::*>& int_keys() {
    static const std::map<std::string, int Options::*> keys = {
        {"k", &Options::k},
        {"val_size", &Options::val_size},
        {"batch_size", &Options::batch_size},
        {"epochs", &Options::epochs},
        {"h_step", &Options::h_step},
        {"early_stop_patience", &Options::early_stop_patience},
        {"hidden_dim", &Options::hidden_dim},
        {"ffn_dim", &Options::ffn_dim},
        {"n_layers", &Options::n_layers},
        {"max_sequence_length", &Options::max_sequence_length},
    };
    return keys;
}

const std::map<std::string, double Options::*>& double_keys() {
    static const std::map<std::string, double Options::*> keys = {
        {"test_fraction", &Options::test_fraction},
        {"epsilon", &Options::epsilon},
        {"tau", &Options::tau},
        {"learning_rate", &Options::learning_rate},
        {"perplexity", &Options::perplexity},
    };
    return keys;
}

// Full validation before any work: unknown keys and type mismatches fail.
void apply_config_file(Options& opts) {
    if (opts.config_path.empty()) return;
    std::ifstream in(opts.config_path);
    if (!in) throw InputError("cannot open config file " + opts.config_path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError("config file " + opts.config_path + ": " + e.what());
    }
    if (!doc.is_object()) throw InputError("config file must hold a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (auto it = string_keys().find(key); it != string_keys().end()) {
            if (!value.is_string()) throw InputError("config key '" + key + "' must be a string");
            opts.*(it->second) = value.get<std::string>();
        } else if (auto ii = int_keys().find(key); ii != int_keys().end()) {
            if (!value.is_number_integer())
                throw InputError("config key '" + key + "' must be an integer");
            opts.*(ii->second) = value.get<int>();
        } else if (auto dd = double_keys().find(key); dd != double_keys().end()) {
            if (!value.is_number()) throw InputError("config key '" + key + "' must be a number");
            opts.*(dd->second) = value.get<double>();
        } else if (key == "seed") {
            if (!value.is_number_unsigned() && !value.is_number_integer())
                throw InputError("config key 'seed' must be an integer");
            opts.seed = value.get<uint64_t>();
        } else if (key == "normalize_h") {
            if (!value.is_boolean()) throw InputError("config key 'normalize_h' must be a bool");
            opts.no_normalize_h = !value.get<bool>();
        } else {
            throw InputError("unknown config key '" + key + "'");
        }
    }
}

void require_path(const std::string& path, const std::string& what) {
    if (path.empty()) throw InputError("missing required option: " + what);
    if (!fs::exists(path)) throw InputError(what + " path does not exist: " + path);
}

std::string out_file(const Options& opts, const std::string& name) {
    fs::create_directories(opts.out_dir);
    return (fs::path(opts.out_dir) / name).string();
}

scp_multilabel_policy multilabel_of(const Options& opts) {
    if (opts.multilabel == "single-only") return SCP_MULTILABEL_SINGLE_ONLY;
    if (opts.multilabel == "expand") return SCP_MULTILABEL_EXPAND;
    throw InputError("multilabel must be 'single-only' or 'expand'");
}

int enum_value(const std::string& value, const std::map<std::string, int>& table,
               const std::string& what) {
    auto it = table.find(value);
    if (it == table.end()) throw InputError("bad value '" + value + "' for " + what);
    return it->second;
}

scp_train_options train_options_of(const Options& opts) {
    scp_train_options t;
    scp_train_options_init(&t);
    t.learning_rate = opts.learning_rate;
    t.batch_size = opts.batch_size;
    t.tau = opts.tau;
    t.epochs = opts.epochs;
    t.seed = opts.seed;
    t.softcl_scope = enum_value(
        opts.scope, {{"batch", SCP_SCOPE_BATCH}, {"epoch-memory", SCP_SCOPE_EPOCH_MEMORY}},
        "--scope");
    t.fill_policy =
        enum_value(opts.fill_policy,
                   {{"gold", SCP_FILL_GOLD}, {"predicted", SCP_FILL_PREDICTED}}, "--fill-policy");
    t.target_mode = enum_value(
        opts.target_mode, {{"literal", SCP_TARGET_LITERAL}, {"hierarchy", SCP_TARGET_HIERARCHY}},
        "--target-mode");
    t.h_mode = enum_value(opts.h_mode, {{"slice", SCP_H_SLICE}, {"projection", SCP_H_PROJECTION}},
                          "--h-mode");
    t.h_step = opts.h_step;
    t.normalize_h = opts.no_normalize_h ? 0 : 1;
    t.optimizer =
        enum_value(opts.optimizer, {{"sgd", SCP_OPT_SGD}, {"adam", SCP_OPT_ADAM}}, "--optimizer");
    t.early_stop_patience = opts.early_stop_patience;
    t.hidden_dim = opts.hidden_dim;
    t.ffn_dim = opts.ffn_dim;
    t.n_layers = opts.n_layers;
    t.max_sequence_length = opts.max_sequence_length;
    t.templates_path = nullptr;
    return t;
}

void load_pools(const Options& opts, const SchemaHandle& schema, CorpusHandle& train_pool,
                CorpusHandle& test_pool) {
    require_path(opts.corpus_path, "--corpus");
    require_path(opts.test_corpus_path, "--test-corpus");
    check(scp_corpus_load(opts.corpus_path.c_str(), schema, multilabel_of(opts),
                          train_pool.out()),
          "loading train corpus");
    check(scp_corpus_load(opts.test_corpus_path.c_str(), schema, multilabel_of(opts),
                          test_pool.out()),
          "loading test corpus");
}

// The corpus a command evaluates or visualizes: an explicit --eval-corpus
// file, or the test part of --split.
CorpusHandle resolve_eval_corpus(const Options& opts, const SchemaHandle& schema) {
    CorpusHandle corpus;
    if (!opts.eval_corpus_path.empty()) {
        require_path(opts.eval_corpus_path, "--eval-corpus");
        check(scp_corpus_load(opts.eval_corpus_path.c_str(), schema, multilabel_of(opts),
                              corpus.out()),
              "loading eval corpus");
        return corpus;
    }
    require_path(opts.split_path, "--split");
    CorpusHandle train_pool, test_pool;
    load_pools(opts, schema, train_pool, test_pool);
    SplitHandle split;
    check(scp_split_load(opts.split_path.c_str(), train_pool, test_pool, split.out()),
          "loading split");
    check(scp_split_part(split, SCP_SPLIT_TEST, corpus.out()), "selecting test part");
    return corpus;
}

int cmd_prepare(const Options& opts) {
    require_path(opts.schema_path, "--schema");
    SchemaHandle schema;
    check(scp_schema_load(opts.schema_path.c_str(), schema.out()), "loading schema");
    CorpusHandle train_pool, test_pool;
    load_pools(opts, schema, train_pool, test_pool);

    SplitHandle split;
    check(scp_split_sample(train_pool, test_pool, opts.k, opts.seed,
                           static_cast<size_t>(opts.val_size), opts.test_fraction, schema,
                           split.out()),
          "sampling split");
    const std::string path = out_file(opts, "split.json");
    check(scp_split_save(split, path.c_str()), "saving split");

    CorpusHandle train_part;
    check(scp_split_part(split, SCP_SPLIT_TRAIN, train_part.out()), "selecting train part");
    std::map<std::string, int> counts;
    for (size_t i = 0; i < scp_corpus_size(train_part); ++i)
        ++counts[scp_corpus_label(train_part, i)];
    std::printf("split written to %s\n", path.c_str());
    std::printf("train examples per class (k=%d):\n", opts.k);
    for (size_t c = 0; c < scp_schema_size(schema); ++c) {
        const char* label = scp_schema_label(schema, c);
        std::printf("  %-16s %d\n", label, counts[label]);
    }
    CorpusHandle val_part, test_part;
    check(scp_split_part(split, SCP_SPLIT_VALIDATION, val_part.out()), "selecting validation");
    check(scp_split_part(split, SCP_SPLIT_TEST, test_part.out()), "selecting test");
    std::printf("validation=%zu test=%zu\n", scp_corpus_size(val_part),
                scp_corpus_size(test_part));
    return kExitOk;
}

int cmd_correlation(const Options& opts) {
    require_path(opts.schema_path, "--schema");
    SchemaHandle schema;
    check(scp_schema_load(opts.schema_path.c_str(), schema.out()), "loading schema");

    MatrixHandle corr;
    if (!opts.correlation_path.empty()) {
        // precomputed-matrix bypass: skip estimation
        require_path(opts.correlation_path, "--correlation");
        check(scp_correlation_load(opts.correlation_path.c_str(), schema, corr.out()),
              "loading correlation matrix");
    } else {
        require_path(opts.judgments_path, "--judgments");
        check(scp_correlation_estimate(schema, opts.judgments_path.c_str(), corr.out()),
              "estimating correlations");
        check(scp_matrix_save(corr, out_file(opts, "correlation.tsv").c_str()),
              "saving correlation matrix");
    }

    MatrixHandle weights;
    check(scp_correlation_to_weights(corr, opts.epsilon, weights.out()), "deriving weights");
    check(scp_matrix_save(weights, out_file(opts, "weights.tsv").c_str()), "saving weights");
    check(scp_heatmap_write(corr, out_file(opts, "heatmap.png").c_str(),
                            out_file(opts, "heatmap_values.tsv").c_str()),
          "writing heatmap");
    std::printf("correlation artifacts written to %s\n", opts.out_dir.c_str());
    return kExitOk;
}

int cmd_train(const Options& opts) {
    require_path(opts.schema_path, "--schema");
    SchemaHandle schema;
    check(scp_schema_load(opts.schema_path.c_str(), schema.out()), "loading schema");
    if (!opts.hierarchy_path.empty()) {
        require_path(opts.hierarchy_path, "--hierarchy");
        scp_schema* augmented = nullptr;
        check(scp_schema_with_hierarchy(schema, opts.hierarchy_path.c_str(), &augmented),
              "attaching hierarchy");
        schema.reset(augmented);
    }
    require_path(opts.weights_path, "--weights");
    MatrixHandle weights;
    check(scp_weights_load(opts.weights_path.c_str(), weights.out()), "loading weights");

    require_path(opts.split_path, "--split");
    CorpusHandle train_pool, test_pool;
    load_pools(opts, schema, train_pool, test_pool);
    SplitHandle split;
    check(scp_split_load(opts.split_path.c_str(), train_pool, test_pool, split.out()),
          "loading split");
    CorpusHandle train_part, val_part;
    check(scp_split_part(split, SCP_SPLIT_TRAIN, train_part.out()), "selecting train part");
    check(scp_split_part(split, SCP_SPLIT_VALIDATION, val_part.out()), "selecting validation");

    ModelHandle resume;
    if (!opts.resume_path.empty()) {
        require_path(opts.resume_path, "--resume");
        check(scp_model_load(opts.resume_path.c_str(), resume.out()), "loading checkpoint");
    }

    scp_train_options topts = train_options_of(opts);
    if (!opts.templates_path.empty()) {
        require_path(opts.templates_path, "--templates");
        topts.templates_path = opts.templates_path.c_str();
    }
    ModelHandle model;
    const bool has_validation = scp_corpus_size(val_part) > 0;
    check(scp_train(schema, weights, train_part, has_validation ? val_part.ptr : nullptr, &topts,
                    resume.ptr, out_file(opts, "history_steps.tsv").c_str(),
                    out_file(opts, "history_epochs.tsv").c_str(), model.out()),
          "training");

    const std::string ckpt = out_file(opts, "model.ckpt");
    check(scp_model_save(model, ckpt.c_str()), "saving checkpoint");
    std::printf("checkpoint written to %s (global step %lld)\n", ckpt.c_str(),
                static_cast<long long>(scp_model_global_step(model)));

    if (has_validation) {
        ReportHandle report;
        check(scp_evaluate(model, val_part, report.out()), "validating");
        std::printf("validation accuracy=%.4f macro_f1=%.4f n=%d\n",
                    scp_report_accuracy(report), scp_report_macro_f1(report),
                    scp_report_n(report));
    }
    return kExitOk;
}

int cmd_eval(const Options& opts) {
    require_path(opts.checkpoint_path, "--checkpoint");
    ModelHandle model;
    check(scp_model_load(opts.checkpoint_path.c_str(), model.out()), "loading checkpoint");
    require_path(opts.schema_path, "--schema");
    SchemaHandle schema;
    check(scp_schema_load(opts.schema_path.c_str(), schema.out()), "loading schema");
    if (opts.eval_corpus_path.empty() && opts.split_path.empty())
        throw InputError("eval needs --eval-corpus or --split");
    CorpusHandle corpus = resolve_eval_corpus(opts, schema);

    ReportHandle report;
    check(scp_evaluate(model, corpus, report.out()), "evaluating");
    const std::string path = out_file(opts, "report.json");
    check(scp_report_save(report, path.c_str()), "saving report");
    std::printf("report written to %s\n", path.c_str());
    std::printf("accuracy=%.4f macro_f1=%.4f n=%d\n", scp_report_accuracy(report),
                scp_report_macro_f1(report), scp_report_n(report));
    return kExitOk;
}

int cmd_visualize(const Options& opts) {
    require_path(opts.checkpoint_path, "--checkpoint");
    ModelHandle model;
    check(scp_model_load(opts.checkpoint_path.c_str(), model.out()), "loading checkpoint");
    require_path(opts.schema_path, "--schema");
    SchemaHandle schema;
    check(scp_schema_load(opts.schema_path.c_str(), schema.out()), "loading schema");
    if (opts.eval_corpus_path.empty() && opts.split_path.empty())
        throw InputError("visualize needs --eval-corpus or --split");
    CorpusHandle corpus = resolve_eval_corpus(opts, schema);

    const size_t n = scp_corpus_size(corpus);
    const size_t dim = scp_model_num_classes(model);
    if (n == 0) throw InputError("nothing to visualize: the corpus is empty");
    std::vector<double> h(n * dim);
    check(scp_representations(model, corpus, h.data()), "computing representations");
    std::vector<double> xy(n * 2);
    check(scp_project_2d(h.data(), n, dim, opts.seed, opts.perplexity, xy.data()),
          "projecting to 2-D");
    std::vector<const char*> labels;
    labels.reserve(n);
    for (size_t i = 0; i < n; ++i) labels.push_back(scp_corpus_label(corpus, i));
    check(scp_scatter_write(xy.data(), n, labels.data(), out_file(opts, "tsne.png").c_str(),
                            out_file(opts, "tsne.tsv").c_str()),
          "writing scatter");
    {
        std::ofstream meta(out_file(opts, "tsne_meta.json"));
        meta << "{\n  \"seed\": " << opts.seed << ",\n  \"perplexity\": " << opts.perplexity
             << ",\n  \"points\": " << n << "\n}\n";
    }
    std::printf("visualization written to %s\n", opts.out_dir.c_str());
    return kExitOk;
}

void add_common(CLI::App* cmd, Options& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file; flags override its values");
    cmd->add_option("--schema", opts.schema_path, "label schema TSV");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "top-level run seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"few-shot sentiment classification with chain prompts and a "
                 "correlation-weighted contrastive loss"};
    app.require_subcommand(1);
    Options opts;

    CLI::App* prepare = app.add_subcommand("prepare", "build a K-shot split artifact");
    add_common(prepare, opts);
    prepare->add_option("--corpus", opts.corpus_path, "training-pool corpus TSV");
    prepare->add_option("--test-corpus", opts.test_corpus_path, "test-pool corpus TSV");
    prepare->add_option("--k", opts.k, "shots per class");
    prepare->add_option("--val-size", opts.val_size, "validation examples");
    prepare->add_option("--test-fraction", opts.test_fraction, "test-pool sampling fraction");
    prepare->add_option("--multilabel", opts.multilabel, "single-only | expand");

    CLI::App* correlation =
        app.add_subcommand("correlation", "estimate label correlations and weights");
    add_common(correlation, opts);
    correlation->add_option("--judgments", opts.judgments_path, "rater judgment TSV");
    correlation->add_option("--correlation", opts.correlation_path,
                            "precomputed correlation TSV (skips estimation)");
    correlation->add_option("--epsilon", opts.epsilon, "weight clamp floor in (0,1)");

    CLI::App* train = app.add_subcommand("train", "train on a split");
    add_common(train, opts);
    train->add_option("--corpus", opts.corpus_path, "training-pool corpus TSV");
    train->add_option("--test-corpus", opts.test_corpus_path, "test-pool corpus TSV");
    train->add_option("--split", opts.split_path, "split artifact");
    train->add_option("--weights", opts.weights_path, "contrastive weight TSV");
    train->add_option("--resume", opts.resume_path, "checkpoint to continue from");
    train->add_option("--lr", opts.learning_rate, "learning rate");
    train->add_option("--batch-size", opts.batch_size, "batch size");
    train->add_option("--epochs", opts.epochs, "training epochs");
    train->add_option("--tau", opts.tau, "contrastive temperature");
    train->add_option("--scope", opts.scope, "batch | epoch-memory");
    train->add_option("--fill-policy", opts.fill_policy, "gold | predicted");
    train->add_option("--target-mode", opts.target_mode, "literal | hierarchy");
    train->add_option("--h-mode", opts.h_mode, "slice | projection");
    train->add_option("--h-step", opts.h_step, "chain step supplying [CLS] (0..3)");
    train->add_flag("--no-normalize-h", opts.no_normalize_h,
                    "feed raw (not L2-normalized) h to the contrastive loss");
    train->add_option("--optimizer", opts.optimizer, "sgd | adam");
    train->add_option("--patience", opts.early_stop_patience,
                      "early-stop patience in epochs; 0 disables");
    train->add_option("--hidden-dim", opts.hidden_dim, "encoder hidden size");
    train->add_option("--ffn-dim", opts.ffn_dim, "encoder feed-forward size");
    train->add_option("--layers", opts.n_layers, "encoder blocks");
    train->add_option("--max-seq-len", opts.max_sequence_length, "token limit per step");
    train->add_option("--templates", opts.templates_path,
                      "4-line chain template override file");
    train->add_option("--hierarchy", opts.hierarchy_path,
                      "standalone hierarchy mapping file (label, basic, secondary, tertiary)");

    CLI::App* evaluate = app.add_subcommand("eval", "evaluate a checkpoint");
    add_common(evaluate, opts);
    evaluate->add_option("--checkpoint", opts.checkpoint_path, "model checkpoint");
    evaluate->add_option("--corpus", opts.corpus_path, "training-pool corpus TSV");
    evaluate->add_option("--test-corpus", opts.test_corpus_path, "test-pool corpus TSV");
    evaluate->add_option("--split", opts.split_path, "split artifact (test part is used)");
    evaluate->add_option("--eval-corpus", opts.eval_corpus_path,
                         "evaluate directly on this corpus file");

    CLI::App* visualize = app.add_subcommand("visualize", "t-SNE scatter of representations");
    add_common(visualize, opts);
    visualize->add_option("--checkpoint", opts.checkpoint_path, "model checkpoint");
    visualize->add_option("--corpus", opts.corpus_path, "training-pool corpus TSV");
    visualize->add_option("--test-corpus", opts.test_corpus_path, "test-pool corpus TSV");
    visualize->add_option("--split", opts.split_path, "split artifact (test part is used)");
    visualize->add_option("--eval-corpus", opts.eval_corpus_path,
                          "visualize this corpus file");
    visualize->add_option("--perplexity", opts.perplexity, "t-SNE perplexity");

    // Two-pass parse so config-file values load first and flags win.
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    }
    try {
        if (!opts.config_path.empty()) {
            Options from_file;
            from_file.config_path = opts.config_path;
            apply_config_file(from_file);
            std::swap(opts, from_file);
            // re-parse the command line over the file-derived defaults
            try {
                app.clear();
                app.parse(argc, argv);
            } catch (const CLI::ParseError& e) {
                const int rc = app.exit(e);
                return rc == 0 ? kExitOk : kExitInput;
            }
            opts.config_path = from_file.config_path;
        }

        if (prepare->parsed()) return cmd_prepare(opts);
        if (correlation->parsed()) return cmd_correlation(opts);
        if (train->parsed()) return cmd_train(opts);
        if (evaluate->parsed()) return cmd_eval(opts);
        if (visualize->parsed()) return cmd_visualize(opts);
        std::fprintf(stderr, "no command given\n");
        return kExitInput;
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const ApiError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}
