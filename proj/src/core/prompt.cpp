#include "core/prompt.hpp"

#include <fstream>

#include "core/error.hpp"

namespace scp {

namespace {

size_t count_occurrences(const std::string& text, const std::string& needle) {
    size_t count = 0;
    for (size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

}  // namespace

ChainTemplates ChainTemplates::defaults(const std::string& mask_token) {
    ChainTemplates t;
    t.fragments_ = {
        "My first feeling is " + mask_token + ".",
        "Based on the first step, my second feeling is " + mask_token + ".",
        "Based on the second step, my third feeling is " + mask_token + ".",
        "My final feeling is " + mask_token + ".",
    };
    return t;
}

ChainTemplates ChainTemplates::load(const std::string& path, const std::string& mask_token) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open template file " + path);
    ChainTemplates t;
    std::string line;
    size_t n = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        require(n < 4, ErrorCode::ParseError, path + ": template file must have exactly 4 lines");
        require(count_occurrences(line, mask_token) == 1, ErrorCode::ParseError,
                path + ": template line " + std::to_string(n + 1) +
                    " must contain the mask token exactly once");
        t.fragments_[n++] = line;
    }
    require(n == 4, ErrorCode::ParseError, path + ": template file must have exactly 4 lines");
    return t;
}

ChainTemplates ChainTemplates::from_fragments(std::array<std::string, 4> fragments,
                                              const std::string& mask_token) {
    ChainTemplates t;
    for (size_t i = 0; i < 4; ++i) {
        require(count_occurrences(fragments[i], mask_token) == 1, ErrorCode::ParseError,
                "template fragment " + std::to_string(i + 1) +
                    " must contain the mask token exactly once");
        t.fragments_[i] = std::move(fragments[i]);
    }
    return t;
}

std::string fill_mask(ChainStep& step, const std::string& word, const std::string& mask_token) {
    if (step.fill_word.has_value())
        fail(ErrorCode::AlreadyFilled, "step mask already filled with '" + *step.fill_word + "'");
    require(!word.empty(), ErrorCode::InvalidArgument, "fill word must be non-empty");
    require(step.text.compare(step.mask_char_offset, mask_token.size(), mask_token) == 0,
            ErrorCode::MaskNotFound, "no mask token at recorded offset");
    std::string filled = step.text;
    filled.replace(step.mask_char_offset, mask_token.size(), word);
    step.fill_word = word;
    return filled;
}

std::array<std::string, 4> step_targets(const std::string& gold, const LabelSchema& schema,
                                        TargetMode mode) {
    const size_t idx = static_cast<size_t>(schema.require_index(gold));
    if (mode == TargetMode::Literal) return {gold, gold, gold, gold};
    require(schema.has_hierarchy(), ErrorCode::MissingHierarchy,
            "hierarchy target mode requires a schema hierarchy mapping");
    const HierarchyEntry& h = schema.hierarchy(idx);
    return {h.basic, h.secondary, h.tertiary, gold};
}

std::string target_fill_word(const std::string& target, const LabelSchema& schema, TargetMode mode) {
    if (mode == TargetMode::Literal) return schema.verbalizer(target);
    // Hierarchy words double as fill words; the final step is a label.
    int idx = schema.index_of(target);
    return idx >= 0 ? schema.verbalizer(static_cast<size_t>(idx)) : target;
}

PromptChain build_chain(const std::string& text, const LabelSchema& schema,
                        const std::optional<std::string>& gold, FillPolicy policy, TargetMode mode,
                        const ChainTemplates* templates, const FillFn& fill_fn) {
    require(!text.empty(), ErrorCode::EmptyInput, "input sentence is empty");
    if (policy == FillPolicy::Gold)
        require(gold.has_value(), ErrorCode::MissingGold, "gold fill policy requires a gold label");

    const ChainTemplates defaults = ChainTemplates::defaults(schema.mask_token());
    const ChainTemplates& tpl = templates ? *templates : defaults;

    std::array<std::string, 4> targets;
    if (gold.has_value()) {
        targets = step_targets(*gold, schema, mode);
    } else {
        targets = {"", "", "", ""};
    }

    PromptChain chain;
    chain.source_text = text;
    std::string prefix = text;  // the fully resolved chain so far
    for (size_t t = 0; t < 4; ++t) {
        ChainStep step;
        step.text = prefix + " " + tpl.fragment(t);
        size_t frag_mask = tpl.fragment(t).find(schema.mask_token());
        step.mask_char_offset = prefix.size() + 1 + frag_mask;
        step.target_label = targets[t];
        require(count_occurrences(step.text, schema.mask_token()) == 1,
                ErrorCode::MultipleMasks,
                "step " + std::to_string(t + 1) + " does not contain exactly one mask token");
        if (t < 3) {
            std::string word;
            switch (policy) {
                case FillPolicy::Gold:
                    word = target_fill_word(targets[t], schema, mode);
                    break;
                case FillPolicy::Predicted:
                case FillPolicy::UnfilledForbidden:
                    require(static_cast<bool>(fill_fn), ErrorCode::InvalidArgument,
                            "this fill policy needs a fill function to resolve step " +
                                std::to_string(t + 1));
                    word = fill_fn(t, step);
                    break;
            }
            prefix = fill_mask(step, word, schema.mask_token());
        }
        chain.steps.push_back(std::move(step));
    }
    return chain;
}

ChainBuilder::ChainBuilder(const std::string& text, const LabelSchema& schema,
                           const ChainTemplates* templates)
    : schema_(schema),
      templates_(templates ? *templates : ChainTemplates::defaults(schema.mask_token())) {
    require(!text.empty(), ErrorCode::EmptyInput, "input sentence is empty");
    chain_.source_text = text;
    append_step();
}

const ChainStep& ChainBuilder::current() const { return chain_.steps.back(); }

void ChainBuilder::advance(const std::string& word) {
    require(!complete(), ErrorCode::InvalidArgument, "chain already has 4 steps");
    fill_mask(chain_.steps.back(), word, schema_.mask_token());
    append_step();
}

void ChainBuilder::append_step() {
    std::string prefix = chain_.source_text;
    if (!chain_.steps.empty()) {
        const ChainStep& prev = chain_.steps.back();
        std::string filled = prev.text;
        filled.replace(prev.mask_char_offset, schema_.mask_token().size(), *prev.fill_word);
        prefix = filled;
    }
    ChainStep step;
    step.text = prefix + " " + templates_.fragment(built_);
    step.mask_char_offset =
        prefix.size() + 1 + templates_.fragment(built_).find(schema_.mask_token());
    chain_.steps.push_back(std::move(step));
    ++built_;
}

PromptChain ChainBuilder::take() {
    require(complete(), ErrorCode::InvalidArgument, "chain is not complete");
    return std::move(chain_);
}

}  // namespace scp
