#pragma once

#include <string>
#include <vector>

namespace scp {

// Whitespace tokenizer with trailing sentence punctuation (. , ! ? ; :) split
// off as single-character tokens. Detokenization glues pure-punctuation tokens
// back without a space, so tokenize/detokenize round-trips any single-spaced
// text whose punctuation directly follows a word. The chain templates satisfy
// this by construction.
std::vector<std::string> tokenize(const std::string& text);
std::string detokenize(const std::vector<std::string>& tokens);

// Closed vocabulary for the reference encoder. Ids 0..2 are reserved for the
// [CLS], mask, and [UNK] markers; the remaining tokens are sorted so the
// mapping is independent of corpus order.
class Vocabulary {
public:
    Vocabulary(std::vector<std::string> corpus_texts, std::vector<std::string> extra_words,
               std::string mask_token);
    explicit Vocabulary(std::vector<std::string> tokens);  // from a serialized list

    int id(const std::string& token) const;  // unk id when unknown
    int lookup(const std::string& token) const;  // -1 when unknown
    const std::string& token(size_t id) const { return tokens_.at(id); }
    size_t size() const { return tokens_.size(); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    int cls_id() const { return 0; }
    int mask_id() const { return 1; }
    int unk_id() const { return 2; }
    const std::string& mask_token() const { return tokens_[1]; }

    std::vector<int> encode(const std::string& text) const;  // [CLS] + token ids

private:
    void build_index();
    std::vector<std::string> tokens_;
    std::vector<std::pair<std::string, int>> index_;  // sorted for binary search
};

}  // namespace scp
