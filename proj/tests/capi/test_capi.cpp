// Exercises the shared-library surface the way an FFI consumer would: only
// scp/scp.h, opaque handles, status codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "scp/scp.h"

using scp::testing::TempDir;

namespace {

std::string data(const std::string& rel) { return scp::testing::data_dir() + "/" + rel; }

struct SchemaHandle {
    scp_schema* ptr = nullptr;
    explicit SchemaHandle(const std::string& path) {
        REQUIRE(scp_schema_load(path.c_str(), &ptr) == SCP_OK);
    }
    ~SchemaHandle() { scp_schema_free(ptr); }
};

}  // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(scp_version()) == "1.0.0");
    CHECK(std::string(scp_status_name(SCP_OK)) == "ok");
    CHECK(std::string(scp_status_name(SCP_ERR_BAD_TAU)) == "bad tau");
}

TEST_CASE("schema handle accessors") {
    SchemaHandle schema(data("schemas/goemotions.tsv"));
    CHECK(scp_schema_size(schema.ptr) == 28);
    CHECK(std::string(scp_schema_label(schema.ptr, 0)) == "admiration");
    CHECK(std::string(scp_schema_verbalizer(schema.ptr, 17)) == "joy");
    CHECK(scp_schema_index_of(schema.ptr, "neutral") == 27);
    CHECK(scp_schema_index_of(schema.ptr, "nope") == -1);
    CHECK(scp_schema_has_hierarchy(schema.ptr) == 0);

    scp_schema* missing = nullptr;
    CHECK(scp_schema_load("/no/such/file.tsv", &missing) == SCP_ERR_IO);
    CHECK(std::strlen(scp_last_error()) > 0);
}

TEST_CASE("pearson through the C boundary") {
    const double a[] = {1, 2, 3};
    const double b[] = {2, 4, 6};
    double r = 0.0;
    REQUIRE(scp_pearson(a, b, 3, &r) == SCP_OK);
    CHECK(r == doctest::Approx(1.0));
    const double flat[] = {5, 5, 5};
    CHECK(scp_pearson(a, flat, 3, &r) == SCP_ERR_DEGENERATE_INPUT);
    CHECK(scp_pearson(nullptr, b, 3, &r) == SCP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("correlation estimation, weights, heatmap") {
    TempDir tmp("capi_corr");
    SchemaHandle schema(data("schemas/synthetic4.tsv"));
    scp_matrix* corr = nullptr;
    REQUIRE(scp_correlation_estimate(schema.ptr, data("synthetic4/judgments.tsv").c_str(),
                                     &corr) == SCP_OK);
    CHECK(scp_matrix_size(corr) == 4);
    double diag = 0.0, joy_sadness = 0.0;
    REQUIRE(scp_matrix_get(corr, 0, 0, &diag) == SCP_OK);
    REQUIRE(scp_matrix_get(corr, 0, 1, &joy_sadness) == SCP_OK);
    CHECK(diag == 1.0);
    CHECK(joy_sadness < 0.0);  // joy is anti-correlated with sadness in the fixture

    // save then reload through the schema-canonicalizing loader
    REQUIRE(scp_matrix_save(corr, tmp.file("corr.tsv").c_str()) == SCP_OK);
    scp_matrix* reloaded = nullptr;
    REQUIRE(scp_correlation_load(tmp.file("corr.tsv").c_str(), schema.ptr, &reloaded) == SCP_OK);
    double back = 0.0;
    REQUIRE(scp_matrix_get(reloaded, 0, 1, &back) == SCP_OK);
    CHECK(back == joy_sadness);

    scp_matrix* weights = nullptr;
    REQUIRE(scp_correlation_to_weights(corr, 0.05, &weights) == SCP_OK);
    double w = 0.0;
    REQUIRE(scp_matrix_get(weights, 0, 1, &w) == SCP_OK);
    CHECK(w == doctest::Approx(0.05));  // negative correlation clamps to epsilon

    scp_matrix* bad = nullptr;
    CHECK(scp_correlation_to_weights(corr, 0.0, &bad) == SCP_ERR_BAD_EPSILON);
    // weights handles are not correlation handles
    CHECK(scp_heatmap_write(weights, tmp.file("x.png").c_str(), tmp.file("x.tsv").c_str()) ==
          SCP_ERR_INVALID_ARGUMENT);
    CHECK(scp_heatmap_write(corr, tmp.file("h.png").c_str(), tmp.file("h.tsv").c_str()) == SCP_OK);

    scp_matrix_free(corr);
    scp_matrix_free(reloaded);
    scp_matrix_free(weights);
}

TEST_CASE("chain build over the C boundary is byte exact") {
    SchemaHandle schema(data("schemas/synthetic4.tsv"));
    scp_chain* chain = nullptr;
    REQUIRE(scp_chain_build(schema.ptr, "The food is so delicious!", "joy", SCP_FILL_GOLD,
                            SCP_TARGET_LITERAL, &chain) == SCP_OK);
    char* text = nullptr;
    REQUIRE(scp_chain_step_text(chain, 0, &text) == SCP_OK);
    CHECK(std::string(text) == "The food is so delicious! My first feeling is [MASK].");
    scp_string_free(text);
    size_t offset = 0;
    REQUIRE(scp_chain_mask_offset(chain, 0, &offset) == SCP_OK);
    CHECK(offset == std::string("The food is so delicious! My first feeling is ").size());
    char* target = nullptr;
    REQUIRE(scp_chain_step_target(chain, 3, &target) == SCP_OK);
    CHECK(std::string(target) == "joy");
    scp_string_free(target);
    scp_chain_free(chain);

    scp_chain* bad = nullptr;
    CHECK(scp_chain_build(schema.ptr, "", "joy", SCP_FILL_GOLD, SCP_TARGET_LITERAL, &bad) ==
          SCP_ERR_EMPTY_INPUT);
    CHECK(scp_chain_build(schema.ptr, "text", nullptr, SCP_FILL_GOLD, SCP_TARGET_LITERAL, &bad) ==
          SCP_ERR_MISSING_GOLD);
}

TEST_CASE("softcl and prompt_ce over the C boundary") {
    SchemaHandle schema(data("schemas/synthetic4.tsv"));
    scp_matrix* weights = nullptr;
    REQUIRE(scp_weights_ones(schema.ptr, &weights) == SCP_OK);

    // the hand-derived three-sample instance with a 0.5 cross-class weight
    // needs a non-unit alpha, so build it from a correlation file
    TempDir tmp("capi_softcl");
    {
        // alpha(a,b) = 0.5 via rho = 0.5
        FILE* f = fopen(tmp.file("rho.tsv").c_str(), "w");
        fputs("a\tb\n1\t0.5\n0.5\t1\n", f);
        fclose(f);
    }
    scp_matrix* rho = nullptr;
    REQUIRE(scp_correlation_load(tmp.file("rho.tsv").c_str(), nullptr, &rho) == SCP_OK);
    scp_matrix* alpha = nullptr;
    REQUIRE(scp_correlation_to_weights(rho, 0.05, &alpha) == SCP_OK);

    const double h[] = {1, 0, 0, 1, 1, 0};
    const int labels[] = {0, 1, 0};
    double total = 0.0;
    double per_anchor[3] = {0, 0, 0};
    REQUIRE(scp_softcl(h, 3, 2, labels, alpha, 1.0, &total, per_anchor) == SCP_OK);
    CHECK(per_anchor[0] == doctest::Approx(0.0));
    CHECK(per_anchor[1] == doctest::Approx(0.0));
    CHECK(per_anchor[2] == doctest::Approx(std::log(1.0 + 2.0 / std::exp(1.0))).epsilon(1e-9));
    CHECK(total == doctest::Approx(per_anchor[2]));

    CHECK(scp_softcl(h, 3, 2, labels, alpha, 0.0, &total, nullptr) == SCP_ERR_BAD_TAU);

    // four uniform distributions over 28 labels
    std::vector<double> dists(4 * 28, 1.0 / 28.0);
    const size_t lens[4] = {28, 28, 28, 28};
    const int targets[4] = {0, 7, 14, 27};
    double ce = 0.0;
    REQUIRE(scp_prompt_ce(dists.data(), lens, targets, &ce) == SCP_OK);
    CHECK(ce == doctest::Approx(4.0 * std::log(28.0)).epsilon(1e-9));

    scp_matrix_free(weights);
    scp_matrix_free(rho);
    scp_matrix_free(alpha);
}

TEST_CASE("corpus, split, train, predict, evaluate, visualize") {
    TempDir tmp("capi_pipeline");
    SchemaHandle schema(data("schemas/synthetic4.tsv"));

    scp_corpus* train_pool = nullptr;
    scp_corpus* test_pool = nullptr;
    REQUIRE(scp_corpus_load(data("synthetic4/train.tsv").c_str(), schema.ptr,
                            SCP_MULTILABEL_SINGLE_ONLY, &train_pool) == SCP_OK);
    REQUIRE(scp_corpus_load(data("synthetic4/test.tsv").c_str(), schema.ptr,
                            SCP_MULTILABEL_SINGLE_ONLY, &test_pool) == SCP_OK);
    CHECK(scp_corpus_size(train_pool) == 40);
    CHECK(std::string(scp_corpus_label(train_pool, 0)) == "joy");

    scp_split* split = nullptr;
    REQUIRE(scp_split_sample(train_pool, test_pool, 2, 11, 8, 0.5, schema.ptr, &split) == SCP_OK);
    CHECK(scp_split_k(split) == 2);
    REQUIRE(scp_split_save(split, tmp.file("split.json").c_str()) == SCP_OK);
    scp_split* loaded = nullptr;
    REQUIRE(scp_split_load(tmp.file("split.json").c_str(), train_pool, test_pool, &loaded) ==
            SCP_OK);
    CHECK(scp_split_seed(loaded) == 11);

    scp_corpus* split_train = nullptr;
    scp_corpus* split_test = nullptr;
    REQUIRE(scp_split_part(loaded, SCP_SPLIT_TRAIN, &split_train) == SCP_OK);
    REQUIRE(scp_split_part(loaded, SCP_SPLIT_TEST, &split_test) == SCP_OK);
    CHECK(scp_corpus_size(split_train) == 8);   // 2 per class x 4
    CHECK(scp_corpus_size(split_test) == 20);   // half of 40

    scp_matrix* corr = nullptr;
    REQUIRE(scp_correlation_estimate(schema.ptr, data("synthetic4/judgments.tsv").c_str(),
                                     &corr) == SCP_OK);
    scp_matrix* weights = nullptr;
    REQUIRE(scp_correlation_to_weights(corr, 0.05, &weights) == SCP_OK);

    scp_train_options opts;
    scp_train_options_init(&opts);
    CHECK(opts.batch_size == 4);
    CHECK(opts.tau == 2.0);
    opts.learning_rate = 5e-3;
    opts.epochs = 3;
    opts.seed = 17;
    opts.hidden_dim = 8;
    opts.ffn_dim = 12;
    opts.n_layers = 1;

    scp_model* model = nullptr;
    REQUIRE(scp_train(schema.ptr, weights, split_train, nullptr, &opts, nullptr,
                      tmp.file("steps.tsv").c_str(), tmp.file("epochs.tsv").c_str(),
                      &model) == SCP_OK);
    CHECK(scp_model_global_step(model) == 6);  // ceil(8/4) * 3
    CHECK(scp_model_num_classes(model) == 4);
    CHECK(std::string(scp_model_label(model, 0)) == "joy");

    int label = -1;
    REQUIRE(scp_predict(model, "wonderful happy sunshine.", &label) == SCP_OK);
    CHECK(label >= 0);
    CHECK(label < 4);

    scp_report* report = nullptr;
    REQUIRE(scp_evaluate(model, split_test, &report) == SCP_OK);
    CHECK(scp_report_n(report) == 20);
    CHECK(scp_report_accuracy(report) >= 0.0);
    CHECK(scp_report_accuracy(report) <= 1.0);
    double f1 = -1.0;
    int present = 0;
    REQUIRE(scp_report_class_f1(report, 0, &f1, &present) == SCP_OK);
    int count = -1;
    REQUIRE(scp_report_confusion(report, 0, 0, &count) == SCP_OK);
    CHECK(count >= 0);
    REQUIRE(scp_report_save(report, tmp.file("report.json").c_str()) == SCP_OK);

    // checkpoint round trip
    REQUIRE(scp_model_save(model, tmp.file("model.ckpt").c_str()) == SCP_OK);
    scp_model* reloaded = nullptr;
    REQUIRE(scp_model_load(tmp.file("model.ckpt").c_str(), &reloaded) == SCP_OK);
    int label2 = -1;
    REQUIRE(scp_predict(reloaded, "wonderful happy sunshine.", &label2) == SCP_OK);
    CHECK(label2 == label);

    // representations + t-SNE + scatter
    const size_t n = scp_corpus_size(split_test);
    std::vector<double> h(n * 4);
    REQUIRE(scp_representations(model, split_test, h.data()) == SCP_OK);
    std::vector<double> xy(n * 2);
    REQUIRE(scp_project_2d(h.data(), n, 4, 5, 3.0, xy.data()) == SCP_OK);
    std::vector<const char*> labels;
    for (size_t i = 0; i < n; ++i) labels.push_back(scp_corpus_label(split_test, i));
    REQUIRE(scp_scatter_write(xy.data(), n, labels.data(), tmp.file("tsne.png").c_str(),
                              tmp.file("tsne.tsv").c_str()) == SCP_OK);

    scp_report_free(report);
    scp_model_free(model);
    scp_model_free(reloaded);
    scp_matrix_free(corr);
    scp_matrix_free(weights);
    scp_corpus_free(split_train);
    scp_corpus_free(split_test);
    scp_split_free(split);
    scp_split_free(loaded);
    scp_corpus_free(train_pool);
    scp_corpus_free(test_pool);
}

TEST_CASE("resume with a conflicting architecture is a version mismatch") {
    TempDir tmp("capi_resume");
    SchemaHandle schema(data("schemas/synthetic4.tsv"));
    scp_corpus* train_pool = nullptr;
    REQUIRE(scp_corpus_load(data("synthetic4/train.tsv").c_str(), schema.ptr,
                            SCP_MULTILABEL_SINGLE_ONLY, &train_pool) == SCP_OK);
    scp_matrix* weights = nullptr;
    REQUIRE(scp_weights_ones(schema.ptr, &weights) == SCP_OK);

    scp_train_options opts;
    scp_train_options_init(&opts);
    opts.epochs = 1;
    opts.hidden_dim = 8;
    opts.ffn_dim = 12;
    opts.n_layers = 1;
    scp_model* model = nullptr;
    REQUIRE(scp_train(schema.ptr, weights, train_pool, nullptr, &opts, nullptr, nullptr, nullptr,
                      &model) == SCP_OK);

    opts.hidden_dim = 16;
    scp_model* resumed = nullptr;
    CHECK(scp_train(schema.ptr, weights, train_pool, nullptr, &opts, model, nullptr, nullptr,
                    &resumed) == SCP_ERR_VERSION_MISMATCH);

    opts.hidden_dim = 8;
    REQUIRE(scp_train(schema.ptr, weights, train_pool, nullptr, &opts, model, nullptr, nullptr,
                      &resumed) == SCP_OK);
    CHECK(scp_model_global_step(resumed) == 20);  // 10 + 10

    scp_model_free(model);
    scp_model_free(resumed);
    scp_matrix_free(weights);
    scp_corpus_free(train_pool);
}
