#include <doctest.h>

#include <map>
#include <set>

#include "core/dataio.hpp"
#include "core/error.hpp"
#include "core/tsv.hpp"
#include "helpers.hpp"

using namespace scp;
using scp::testing::TempDir;

namespace {

LabelSchema two_schema() { return LabelSchema({"pos", "neg"}, {"good", "bad"}); }

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Ok;
}

// A GoEmotions-format pool: n_per_class rows per class, ids zero-padded so
// file order equals id order.
void write_pool(const std::string& path, const LabelSchema& schema, int n_per_class,
                const std::string& prefix) {
    std::string body = "text\tlabel\tid\n";
    int row = 0;
    for (int i = 0; i < n_per_class; ++i) {
        for (size_t c = 0; c < schema.size(); ++c) {
            char id[32];
            std::snprintf(id, sizeof(id), "%s%05d", prefix.c_str(), row++);
            body += "sample text " + std::to_string(row) + "\t" + schema.label(c) + "\t" + id +
                    "\n";
        }
    }
    write_text_file(path, body);
}

}  // namespace

TEST_CASE("load_corpus keeps well-formed rows in id order") {
    TempDir tmp("corpus_basic");
    write_text_file(tmp.file("c.tsv"),
                    "text\tlabel\tid\nfirst\tpos\ta1\nsecond\tneg\ta2\nthird\tpos\ta3\n");
    auto examples = load_corpus(tmp.file("c.tsv"), two_schema());
    REQUIRE(examples.size() == 3);
    CHECK(examples[0].text == "first");
    CHECK(examples[1].label == "neg");
    CHECK(examples[2].source_id == "a3");
}

TEST_CASE("load_corpus accepts headerless files and numeric label indices") {
    TempDir tmp("corpus_headerless");
    write_text_file(tmp.file("c.tsv"), "some text\t0\tr1\nother text\t1\tr2\n");
    auto examples = load_corpus(tmp.file("c.tsv"), two_schema());
    REQUIRE(examples.size() == 2);
    CHECK(examples[0].label == "pos");
    CHECK(examples[1].label == "neg");
}

TEST_CASE("load_corpus flags unknown labels with the offending row") {
    TempDir tmp("corpus_badlabel");
    write_text_file(tmp.file("c.tsv"), "text\tlabel\tid\nfine\tpos\tr1\noops\tmystery\tr2\n");
    try {
        load_corpus(tmp.file("c.tsv"), two_schema());
        FAIL("expected UnknownLabel");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownLabel);
        CHECK(std::string(e.what()).find("mystery") != std::string::npos);
        CHECK(std::string(e.what()).find("3") != std::string::npos);  // line number
    }
}

TEST_CASE("multi-label policies") {
    TempDir tmp("corpus_multi");
    write_text_file(tmp.file("c.tsv"),
                    "text\tlabel\tid\nplain\tpos\tr1\nboth\tpos,neg\tr2\nalso plain\tneg\tr3\n");
    SUBCASE("single-only drops multi-label rows") {
        auto examples = load_corpus(tmp.file("c.tsv"), two_schema(), MultiLabelPolicy::SingleOnly);
        CHECK(examples.size() == 2);
    }
    SUBCASE("expand duplicates the row per label with suffixed ids") {
        auto examples = load_corpus(tmp.file("c.tsv"), two_schema(), MultiLabelPolicy::Expand);
        REQUIRE(examples.size() == 4);
        std::set<std::string> ids;
        for (const auto& ex : examples) ids.insert(ex.source_id);
        CHECK(ids.count("r2#0") == 1);
        CHECK(ids.count("r2#1") == 1);
    }
}

TEST_CASE("load_corpus rejects duplicate ids and malformed rows") {
    TempDir tmp("corpus_dup");
    write_text_file(tmp.file("dup.tsv"), "text\tlabel\tid\na\tpos\tr1\nb\tneg\tr1\n");
    CHECK(code_of([&] { load_corpus(tmp.file("dup.tsv"), two_schema()); }) ==
          ErrorCode::InvariantViolation);
    write_text_file(tmp.file("cols.tsv"), "text\tlabel\tid\na\tpos\n");
    CHECK(code_of([&] { load_corpus(tmp.file("cols.tsv"), two_schema()); }) ==
          ErrorCode::ParseError);
}

TEST_CASE("sample_few_shot sizes and disjointness on a 28-class pool") {
    TempDir tmp("split_sizes");
    LabelSchema schema = LabelSchema::load(scp::testing::data_dir() + "/schemas/goemotions.tsv");
    write_pool(tmp.file("train.tsv"), schema, 40, "tr");  // 1120 rows
    write_pool(tmp.file("test.tsv"), schema, 15, "te");   // 420 rows
    auto train_pool = load_corpus(tmp.file("train.tsv"), schema);
    auto test_pool = load_corpus(tmp.file("test.tsv"), schema);

    FewShotSplit split = sample_few_shot(train_pool, test_pool, 5, 42, schema);
    CHECK(split.train.size() == 28 * 5);
    CHECK(split.validation.size() == 500);
    CHECK(split.test.size() == 21);  // floor(0.05 * 420)

    // exactly k per class
    std::map<std::string, int> per_class;
    for (const auto& ex : split.train) ++per_class[ex.label];
    for (size_t c = 0; c < schema.size(); ++c) CHECK(per_class[schema.label(c)] == 5);

    // disjoint by source id
    std::set<std::string> train_ids, val_ids;
    for (const auto& ex : split.train) train_ids.insert(ex.source_id);
    for (const auto& ex : split.validation) val_ids.insert(ex.source_id);
    CHECK(train_ids.size() == split.train.size());
    CHECK(val_ids.size() == split.validation.size());
    for (const auto& id : val_ids) CHECK(train_ids.count(id) == 0);
}

TEST_CASE("sample_few_shot is deterministic and seed-sensitive") {
    TempDir tmp("split_det");
    LabelSchema schema = two_schema();
    write_pool(tmp.file("train.tsv"), schema, 40, "tr");
    write_pool(tmp.file("test.tsv"), schema, 20, "te");
    auto train_pool = load_corpus(tmp.file("train.tsv"), schema);
    auto test_pool = load_corpus(tmp.file("test.tsv"), schema);

    auto ids = [](const std::vector<Example>& v) {
        std::vector<std::string> out;
        for (const auto& ex : v) out.push_back(ex.source_id);
        return out;
    };
    FewShotSplit a = sample_few_shot(train_pool, test_pool, 3, 7, schema, 10, 0.5);
    FewShotSplit b = sample_few_shot(train_pool, test_pool, 3, 7, schema, 10, 0.5);
    CHECK(ids(a.train) == ids(b.train));
    CHECK(ids(a.validation) == ids(b.validation));
    CHECK(ids(a.test) == ids(b.test));

    FewShotSplit c = sample_few_shot(train_pool, test_pool, 3, 8, schema, 10, 0.5);
    CHECK(ids(a.train) != ids(c.train));
}

TEST_CASE("sample_few_shot names the deficient class") {
    TempDir tmp("split_insufficient");
    LabelSchema schema = two_schema();
    write_text_file(tmp.file("train.tsv"),
                    "text\tlabel\tid\na\tpos\tr1\nb\tpos\tr2\nc\tneg\tr3\n");
    write_pool(tmp.file("test.tsv"), schema, 5, "te");
    auto train_pool = load_corpus(tmp.file("train.tsv"), schema);
    auto test_pool = load_corpus(tmp.file("test.tsv"), schema);
    try {
        sample_few_shot(train_pool, test_pool, 2, 1, schema, 0, 0.5);
        FAIL("expected InsufficientExamples");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientExamples);
        CHECK(std::string(e.what()).find("neg") != std::string::npos);
    }
}

TEST_CASE("load_rater_judgments canonicalizes permuted columns") {
    TempDir tmp("judgments");
    LabelSchema schema = two_schema();
    SUBCASE("permuted header is reordered to schema order") {
        write_text_file(tmp.file("j.tsv"), "neg\tpos\n0.9\t0.1\n0.2\t0.8\n0.7\t0.3\n");
        Eigen::MatrixXd m = load_rater_judgments(tmp.file("j.tsv"), schema);
        REQUIRE(m.rows() == 3);
        CHECK(m(0, 0) == 0.1);  // pos column first
        CHECK(m(0, 1) == 0.9);
    }
    SUBCASE("missing column is a ColumnMismatch") {
        write_text_file(tmp.file("j.tsv"), "pos\n0.9\n0.2\n");
        CHECK(code_of([&] { load_rater_judgments(tmp.file("j.tsv"), schema); }) ==
              ErrorCode::ColumnMismatch);
    }
    SUBCASE("a 4x3 toy table reads back the written values") {
        LabelSchema three({"a", "b", "c"}, {"wa", "wb", "wc"});
        write_text_file(tmp.file("t.tsv"),
                        "a\tb\tc\n1\t0\t0.5\n0\t1\t0.25\n0.5\t0.5\t1\n0.125\t0.75\t0\n");
        Eigen::MatrixXd m = load_rater_judgments(tmp.file("t.tsv"), three);
        REQUIRE(m.rows() == 4);
        CHECK(m(0, 2) == 0.5);
        CHECK(m(3, 0) == 0.125);
        CHECK(m(2, 1) == 0.5);
    }
}

TEST_CASE("split artifact round trip") {
    TempDir tmp("split_artifact");
    LabelSchema schema = two_schema();
    write_pool(tmp.file("train.tsv"), schema, 30, "tr");
    write_pool(tmp.file("test.tsv"), schema, 20, "te");
    auto train_pool = load_corpus(tmp.file("train.tsv"), schema);
    auto test_pool = load_corpus(tmp.file("test.tsv"), schema);
    FewShotSplit split = sample_few_shot(train_pool, test_pool, 4, 99, schema, 12, 0.25);

    save_split(split, tmp.file("split.json"));
    FewShotSplit back = load_split(tmp.file("split.json"), train_pool, test_pool);
    CHECK(back.k == 4);
    CHECK(back.seed == 99);
    REQUIRE(back.train.size() == split.train.size());
    for (size_t i = 0; i < split.train.size(); ++i) {
        CHECK(back.train[i].source_id == split.train[i].source_id);
        CHECK(back.train[i].text == split.train[i].text);
    }

    // identical artifact bytes on a re-run with the same seed
    FewShotSplit again = sample_few_shot(train_pool, test_pool, 4, 99, schema, 12, 0.25);
    save_split(again, tmp.file("split2.json"));
    CHECK(read_text_file(tmp.file("split.json")) == read_text_file(tmp.file("split2.json")));

    // unresolvable id
    write_text_file(tmp.file("bad.json"),
                    "{\"format\":\"scp-split\",\"version\":1,\"k\":1,\"seed\":0,"
                    "\"train\":[\"ghost\"],\"validation\":[],\"test\":[]}");
    CHECK(code_of([&] { load_split(tmp.file("bad.json"), train_pool, test_pool); }) ==
          ErrorCode::ParseError);
}
