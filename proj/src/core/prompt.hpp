#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/labels.hpp"

namespace scp {

enum class FillPolicy {
    Gold,              // teacher forcing: earlier masks take the gold target word
    Predicted,         // staged decoding: the caller supplies each fill word
    UnfilledForbidden  // strict: any step beyond the first without a fill source is an error
};

enum class TargetMode {
    Literal,   // every step targets the gold label
    Hierarchy  // basic -> secondary -> tertiary -> label
};

struct ChainStep {
    std::string text;              // contains exactly one mask token
    size_t mask_char_offset = 0;   // character index of the mask token
    std::string target_label;      // label name (literal) or hierarchy word
    std::optional<std::string> fill_word;  // set once the mask is resolved
};

struct PromptChain {
    std::string source_text;
    std::vector<ChainStep> steps;  // exactly 4
};

// The four per-step fragments; joined onto the growing chain with one space.
class ChainTemplates {
public:
    static ChainTemplates defaults(const std::string& mask_token = "[MASK]");

    // Override file: exactly 4 lines, each containing the mask token once.
    static ChainTemplates load(const std::string& path, const std::string& mask_token);

    static ChainTemplates from_fragments(std::array<std::string, 4> fragments,
                                         const std::string& mask_token);

    const std::string& fragment(size_t step) const { return fragments_.at(step); }

private:
    std::array<std::string, 4> fragments_;
};

// Replaces the single mask occurrence at step.mask_char_offset with word and
// records it; AlreadyFilled on a second attempt.
std::string fill_mask(ChainStep& step, const std::string& word, const std::string& mask_token);

// Per-step target words. Literal mode repeats the gold label; hierarchy mode
// walks basic -> secondary -> tertiary -> label.
std::array<std::string, 4> step_targets(const std::string& gold, const LabelSchema& schema,
                                        TargetMode mode);

// The word placed into a resolved mask for a given step target: the label's
// verbalizer word in literal mode, the hierarchy word itself otherwise.
std::string target_fill_word(const std::string& target, const LabelSchema& schema, TargetMode mode);

using FillFn = std::function<std::string(size_t step, const ChainStep&)>;

// Builds the 4-step chain. Gold policy resolves earlier masks with the target
// words; Predicted uses fill_fn; UnfilledForbidden requires one of the two.
PromptChain build_chain(const std::string& text, const LabelSchema& schema,
                        const std::optional<std::string>& gold, FillPolicy policy,
                        TargetMode mode = TargetMode::Literal,
                        const ChainTemplates* templates = nullptr,
                        const FillFn& fill_fn = nullptr);

// Incremental construction for inference: encode a step, pick a word, advance.
class ChainBuilder {
public:
    ChainBuilder(const std::string& text, const LabelSchema& schema,
                 const ChainTemplates* templates = nullptr);

    const ChainStep& current() const;
    size_t step_index() const { return built_ - 1; }
    bool complete() const { return built_ == 4; }

    // Fills the current step's mask and appends the next fragment.
    void advance(const std::string& word);

    PromptChain take();

private:
    void append_step();

    LabelSchema schema_;
    ChainTemplates templates_;
    PromptChain chain_;
    size_t built_ = 0;
};

}  // namespace scp
