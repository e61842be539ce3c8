#include <doctest.h>

#include "core/tokenizer.hpp"

using namespace scp;

TEST_CASE("tokenize splits trailing punctuation off words") {
    auto toks = tokenize("The food is so delicious! My first feeling is [MASK].");
    CHECK(toks == std::vector<std::string>{"The", "food", "is", "so", "delicious", "!", "My",
                                           "first", "feeling", "is", "[MASK]", "."});
}

TEST_CASE("tokenize keeps internal punctuation and handles runs") {
    CHECK(tokenize("well-known e.g. wow!?") ==
          std::vector<std::string>{"well-known", "e.g", ".", "wow", "!", "?"});
    CHECK(tokenize("a  b") == std::vector<std::string>{"a", "b"});
    CHECK(tokenize("") == std::vector<std::string>{});
}

TEST_CASE("detokenize round-trips chain-style text") {
    const std::string texts[] = {
        "The food is so delicious! My first feeling is [MASK].",
        "sunshine, smile, happy joy.",
        "fear of the shadow, fear of the dark.",
        "One two three.",
    };
    for (const auto& text : texts) CHECK(detokenize(tokenize(text)) == text);
}

TEST_CASE("vocabulary reserves the marker ids and sorts the rest") {
    Vocabulary vocab({"b a", "c b"}, {"z"}, "[MASK]");
    CHECK(vocab.token(0) == "[CLS]");
    CHECK(vocab.token(1) == "[MASK]");
    CHECK(vocab.token(2) == "[UNK]");
    CHECK(vocab.size() == 3 + 4);  // a b c z
    CHECK(vocab.lookup("a") == 3);
    CHECK(vocab.lookup("b") == 4);
    CHECK(vocab.lookup("missing") == -1);
    CHECK(vocab.id("missing") == vocab.unk_id());
}

TEST_CASE("vocabulary is independent of corpus order") {
    Vocabulary first({"alpha beta", "gamma"}, {}, "[MASK]");
    Vocabulary second({"gamma", "beta alpha"}, {}, "[MASK]");
    CHECK(first.tokens() == second.tokens());
}

TEST_CASE("encode prepends [CLS] and maps the mask marker") {
    Vocabulary vocab({"hello world."}, {}, "[MASK]");
    auto ids = vocab.encode("hello [MASK].");
    REQUIRE(ids.size() == 4);
    CHECK(ids[0] == vocab.cls_id());
    CHECK(ids[1] == vocab.lookup("hello"));
    CHECK(ids[2] == vocab.mask_id());
    CHECK(ids[3] == vocab.lookup("."));
}

TEST_CASE("serialized vocabulary reconstructs identically") {
    Vocabulary vocab({"one two three."}, {"four"}, "[MASK]");
    Vocabulary back(vocab.tokens());
    CHECK(back.tokens() == vocab.tokens());
    CHECK(back.lookup("two") == vocab.lookup("two"));
}
