#include "core/tokenizer.hpp"

#include <algorithm>
#include <set>

#include "core/error.hpp"

namespace scp {

namespace {

bool is_split_punct(char c) {
    return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':';
}

bool is_pure_punct(const std::string& tok) {
    return tok.size() == 1 && is_split_punct(tok[0]);
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && text[i] == ' ') ++i;
        if (i >= text.size()) break;
        size_t j = i;
        while (j < text.size() && text[j] != ' ') ++j;
        std::string word = text.substr(i, j - i);
        // Peel trailing punctuation into its own tokens.
        size_t end = word.size();
        while (end > 1 && is_split_punct(word[end - 1])) --end;
        if (end == word.size()) {
            out.push_back(word);
        } else {
            out.push_back(word.substr(0, end));
            for (size_t k = end; k < word.size(); ++k) out.push_back(std::string(1, word[k]));
        }
        i = j;
    }
    return out;
}

std::string detokenize(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& tok : tokens) {
        if (!out.empty() && !is_pure_punct(tok)) out += ' ';
        out += tok;
    }
    return out;
}

Vocabulary::Vocabulary(std::vector<std::string> corpus_texts, std::vector<std::string> extra_words,
                       std::string mask_token) {
    std::set<std::string> words;
    for (const auto& text : corpus_texts)
        for (auto& tok : tokenize(text)) words.insert(std::move(tok));
    for (const auto& w : extra_words)
        for (auto& tok : tokenize(w)) words.insert(std::move(tok));
    words.erase(mask_token);
    words.erase("[CLS]");
    words.erase("[UNK]");
    tokens_ = {"[CLS]", std::move(mask_token), "[UNK]"};
    tokens_.insert(tokens_.end(), words.begin(), words.end());
    build_index();
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    require(tokens_.size() >= 3, ErrorCode::InvariantViolation,
            "vocabulary needs the three reserved markers");
    build_index();
}

void Vocabulary::build_index() {
    index_.reserve(tokens_.size());
    for (size_t i = 0; i < tokens_.size(); ++i)
        index_.emplace_back(tokens_[i], static_cast<int>(i));
    std::sort(index_.begin(), index_.end());
}

int Vocabulary::lookup(const std::string& token) const {
    auto it = std::lower_bound(index_.begin(), index_.end(), token,
                               [](const auto& p, const std::string& t) { return p.first < t; });
    if (it == index_.end() || it->first != token) return -1;
    return it->second;
}

int Vocabulary::id(const std::string& token) const {
    int i = lookup(token);
    return i < 0 ? unk_id() : i;
}

std::vector<int> Vocabulary::encode(const std::string& text) const {
    std::vector<int> ids = {cls_id()};
    for (const auto& tok : tokenize(text)) ids.push_back(id(tok));
    return ids;
}

}  // namespace scp
