#include <doctest.h>

#include "core/error.hpp"
#include "core/prompt.hpp"
#include "core/rng.hpp"
#include "core/tsv.hpp"
#include "helpers.hpp"

using namespace scp;
using scp::testing::TempDir;

namespace {

LabelSchema emotion_schema() {
    return LabelSchema({"joy", "sadness", "anger", "fear"}, {"joy", "sadness", "anger", "fear"});
}

LabelSchema hierarchy_schema() {
    return LabelSchema({"joy", "remorse"}, {"joy", "remorse"},
                       {{"positive", "cheerfulness", "joy"}, {"negative", "sadness", "remorse"}});
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Ok;
}

}  // namespace

TEST_CASE("gold chain reproduces the four template texts byte for byte") {
    LabelSchema schema = emotion_schema();
    PromptChain chain =
        build_chain("The food is so delicious!", schema, std::string("joy"), FillPolicy::Gold);

    REQUIRE(chain.steps.size() == 4);
    CHECK(chain.steps[0].text == "The food is so delicious! My first feeling is [MASK].");
    CHECK(chain.steps[1].text ==
          "The food is so delicious! My first feeling is joy. "
          "Based on the first step, my second feeling is [MASK].");
    CHECK(chain.steps[2].text ==
          "The food is so delicious! My first feeling is joy. "
          "Based on the first step, my second feeling is joy. "
          "Based on the second step, my third feeling is [MASK].");
    CHECK(chain.steps[3].text ==
          "The food is so delicious! My first feeling is joy. "
          "Based on the first step, my second feeling is joy. "
          "Based on the second step, my third feeling is joy. "
          "My final feeling is [MASK].");
}

TEST_CASE("final step ends with its template and carries exactly one mask") {
    LabelSchema schema = emotion_schema();
    PromptChain chain =
        build_chain("The food is so delicious!", schema, std::string("joy"), FillPolicy::Gold);
    const std::string& last = chain.steps[3].text;
    const std::string suffix = " My final feeling is [MASK].";
    REQUIRE(last.size() >= suffix.size());
    CHECK(last.substr(last.size() - suffix.size()) == suffix);
    for (const auto& step : chain.steps) {
        size_t count = 0;
        for (size_t p = step.text.find("[MASK]"); p != std::string::npos;
             p = step.text.find("[MASK]", p + 6))
            ++count;
        CHECK(count == 1);
        CHECK(step.text.compare(step.mask_char_offset, 6, "[MASK]") == 0);
    }
}

TEST_CASE("chain is append-only: each filled step prefixes the next") {
    LabelSchema schema = emotion_schema();
    PromptChain chain = build_chain("I saw a dog today.", schema, std::string("fear"),
                                    FillPolicy::Gold);
    for (size_t t = 0; t + 1 < 4; ++t) {
        std::string filled = chain.steps[t].text;
        REQUIRE(chain.steps[t].fill_word.has_value());
        filled.replace(chain.steps[t].mask_char_offset, 6, *chain.steps[t].fill_word);
        CHECK(chain.steps[t + 1].text.rfind(filled, 0) == 0);
        CHECK(chain.steps[t + 1].text.size() > filled.size());
    }
}

TEST_CASE("build_chain input validation") {
    LabelSchema schema = emotion_schema();
    CHECK(code_of([&] { build_chain("", schema, std::string("joy"), FillPolicy::Gold); }) ==
          ErrorCode::EmptyInput);
    CHECK(code_of([&] { build_chain("hello", schema, std::nullopt, FillPolicy::Gold); }) ==
          ErrorCode::MissingGold);
    CHECK(code_of([&] {
              build_chain("hello", schema, std::nullopt, FillPolicy::UnfilledForbidden);
          }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { build_chain("hello", schema, std::string("nope"), FillPolicy::Gold); }) ==
          ErrorCode::UnknownLabel);
}

TEST_CASE("build_chain is deterministic") {
    LabelSchema schema = emotion_schema();
    PromptChain a = build_chain("Same input.", schema, std::string("anger"), FillPolicy::Gold);
    PromptChain b = build_chain("Same input.", schema, std::string("anger"), FillPolicy::Gold);
    for (size_t t = 0; t < 4; ++t) {
        CHECK(a.steps[t].text == b.steps[t].text);
        CHECK(a.steps[t].mask_char_offset == b.steps[t].mask_char_offset);
    }
}

TEST_CASE("fill_mask replaces exactly the recorded occurrence") {
    ChainStep step;
    step.text = "before [MASK] after";
    step.mask_char_offset = 7;
    const std::string filled = fill_mask(step, "joy", "[MASK]");
    CHECK(filled == "before joy after");
    CHECK(step.fill_word == "joy");
    CHECK(code_of([&] { fill_mask(step, "again", "[MASK]"); }) == ErrorCode::AlreadyFilled);
}

TEST_CASE("fill_mask only touches the mask even when text repeats elsewhere") {
    ChainStep step;
    step.text = "feeling is [MASK]. feeling is fine.";
    step.mask_char_offset = 11;
    CHECK(fill_mask(step, "sadness", "[MASK]") == "feeling is sadness. feeling is fine.");
}

TEST_CASE("fill_mask round trip puts the word at the recorded offset") {
    LabelSchema schema = emotion_schema();
    Rng rng(3);
    const std::string words[] = {"x", "somewhat-long-word", "joy", "7"};
    for (int trial = 0; trial < 20; ++trial) {
        PromptChain chain =
            build_chain("Sentence number " + std::to_string(trial) + ".", schema,
                        std::string("joy"), FillPolicy::Gold);
        ChainStep step = chain.steps[3];
        const std::string w = words[rng.below(4)];
        const std::string filled = fill_mask(step, w, schema.mask_token());
        CHECK(filled.compare(step.mask_char_offset, w.size(), w) == 0);
        // Text outside the replacement is untouched.
        CHECK(filled.substr(0, step.mask_char_offset) ==
              chain.steps[3].text.substr(0, step.mask_char_offset));
    }
}

TEST_CASE("step_targets literal repeats the gold label") {
    LabelSchema schema = emotion_schema();
    auto targets = step_targets("joy", schema, TargetMode::Literal);
    CHECK(targets == std::array<std::string, 4>{"joy", "joy", "joy", "joy"});
}

TEST_CASE("step_targets hierarchy walks coarse to fine") {
    LabelSchema schema = hierarchy_schema();
    auto targets = step_targets("remorse", schema, TargetMode::Hierarchy);
    CHECK(targets == std::array<std::string, 4>{"negative", "sadness", "remorse", "remorse"});
}

TEST_CASE("step_targets error paths") {
    CHECK(code_of([&] {
              step_targets("nope", emotion_schema(), TargetMode::Literal);
          }) == ErrorCode::UnknownLabel);
    CHECK(code_of([&] {
              step_targets("joy", emotion_schema(), TargetMode::Hierarchy);
          }) == ErrorCode::MissingHierarchy);
}

TEST_CASE("predicted-fill chain uses supplied words") {
    LabelSchema schema = emotion_schema();
    std::vector<std::string> supplied;
    PromptChain chain = build_chain(
        "Some text.", schema, std::nullopt, FillPolicy::Predicted, TargetMode::Literal, nullptr,
        [&](size_t step, const ChainStep&) {
            supplied.push_back("w" + std::to_string(step));
            return supplied.back();
        });
    CHECK(supplied == std::vector<std::string>{"w0", "w1", "w2"});
    CHECK(chain.steps[1].text.find("is w0.") != std::string::npos);
    CHECK(chain.steps[3].text.find("is w2.") != std::string::npos);
}

TEST_CASE("chain builder stages the same texts as gold construction") {
    LabelSchema schema = emotion_schema();
    PromptChain gold = build_chain("Check this.", schema, std::string("fear"), FillPolicy::Gold);
    ChainBuilder builder("Check this.", schema);
    for (int t = 0; t < 3; ++t) {
        CHECK(builder.current().text == gold.steps[static_cast<size_t>(t)].text);
        builder.advance("fear");
    }
    CHECK(builder.current().text == gold.steps[3].text);
    CHECK(builder.complete());
}

TEST_CASE("template override file") {
    TempDir tmp("templates");
    SUBCASE("valid override") {
        write_text_file(tmp.file("t.txt"),
                        "Step one: [MASK].\nStep two: [MASK].\nStep three: [MASK].\nFinal: [MASK].\n");
        ChainTemplates tpl = ChainTemplates::load(tmp.file("t.txt"), "[MASK]");
        LabelSchema schema = emotion_schema();
        PromptChain chain = build_chain("Hi.", schema, std::string("joy"), FillPolicy::Gold,
                                        TargetMode::Literal, &tpl);
        CHECK(chain.steps[0].text == "Hi. Step one: [MASK].");
        CHECK(chain.steps[1].text == "Hi. Step one: joy. Step two: [MASK].");
    }
    SUBCASE("wrong line count") {
        write_text_file(tmp.file("t.txt"), "a [MASK]\nb [MASK]\n");
        CHECK(code_of([&] { ChainTemplates::load(tmp.file("t.txt"), "[MASK]"); }) ==
              ErrorCode::ParseError);
    }
    SUBCASE("line without a mask") {
        write_text_file(tmp.file("t.txt"), "a [MASK]\nb [MASK]\nc nothing\nd [MASK]\n");
        CHECK(code_of([&] { ChainTemplates::load(tmp.file("t.txt"), "[MASK]"); }) ==
              ErrorCode::ParseError);
    }
}
