#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/autodiff.hpp"
#include "core/labels.hpp"
#include "core/prompt.hpp"
#include "core/tokenizer.hpp"

namespace scp {

// How the SoftCL representation h (dimension |C|) is taken from the [CLS]
// hidden vector: a literal slice of the first |C| components, or a learned
// linear projection (identity-initialized, so both modes agree at step 0).
enum class HMode { Slice, Projection };

struct EncoderConfig {
    int hidden_dim = 32;
    int ffn_dim = 64;
    int n_layers = 2;
    int max_sequence_length = 256;
    uint64_t seed = 0;
    HMode h_mode = HMode::Slice;
    int h_step = 3;  // chain step whose [CLS] supplies h; default the final step
};

// Named parameter tensors in a fixed order; the order defines checkpoint
// layout and gradient pairing.
struct Params {
    std::vector<std::pair<std::string, Eigen::MatrixXd>> tensors;

    Eigen::MatrixXd& at(const std::string& name);
    const Eigen::MatrixXd& at(const std::string& name) const;
    bool operator==(const Params& other) const;
    size_t count() const { return tensors.size(); }
};

// Per-step prediction vocabulary. In literal mode there is one slot per label
// (its verbalizer word); in hierarchy mode the first three steps predict over
// the distinct words of that hierarchy level.
struct StepTargetVocab {
    std::vector<std::string> words;
    std::vector<int> token_ids;

    int index_of(const std::string& word) const;
};

StepTargetVocab step_target_vocab(const LabelSchema& schema, TargetMode mode, size_t step,
                                  const Vocabulary& vocab);

struct EncoderOutput {
    std::array<Eigen::VectorXd, 4> step_distributions;  // over each step's target vocab
    Eigen::VectorXd h;                                  // dimension |C|
    Eigen::VectorXd cls_hidden;                         // full hidden vector at [CLS]
};

// Deterministic transformer-style masked-token encoder small enough to train
// on a laptop in seconds: token + position embeddings, pre-norm blocks with
// single-head attention and a tanh feed-forward, a final layer norm, and a
// zero-initialized vocabulary head (so the untrained head is exactly uniform).
class ReferenceEncoder {
public:
    ReferenceEncoder(EncoderConfig config, const Vocabulary& vocab, int n_classes);

    Params init_params() const;
    const EncoderConfig& config() const { return config_; }
    const Vocabulary& vocab() const { return vocab_; }
    int n_classes() const { return n_classes_; }

    // Parameters registered on a tape, as trainable inputs or frozen constants.
    struct TapedParams {
        const Params* params = nullptr;
        std::vector<ad::Tape::Var> vars;
        ad::Tape::Var at(const std::string& name) const;
    };
    TapedParams register_params(ad::Tape& tape, const Params& params, bool trainable) const;

    struct StepForward {
        ad::Tape::Var mask_hidden;  // 1 x hidden_dim
        ad::Tape::Var mask_logits;  // 1 x V
        ad::Tape::Var cls_hidden;   // 1 x hidden_dim
    };
    // One chain step. token_ids must include the leading [CLS]; exactly one
    // mask id is required and the sequence must fit max_sequence_length.
    StepForward forward_step(ad::Tape& tape, const TapedParams& p,
                             const std::vector<int>& token_ids, size_t step_index) const;

    // h on the tape, honoring h_mode.
    ad::Tape::Var h_from_cls(ad::Tape& tape, const TapedParams& p, ad::Tape::Var cls_hidden) const;

    // Validates token count and mask multiplicity; returns the mask position.
    size_t locate_mask(const std::vector<int>& token_ids, size_t step_index) const;

    // Plain (gradient-free) evaluation of a full chain.
    EncoderOutput encode_chain(const PromptChain& chain, const Params& params,
                               const LabelSchema& schema, TargetMode mode) const;

private:
    EncoderConfig config_;
    Vocabulary vocab_;
    int n_classes_;
};

// Full-vocabulary softmax restricted to the target verbalizer tokens and
// renormalized, per slot of the step vocabulary.
Eigen::VectorXd mask_label_distribution(const Eigen::VectorXd& hidden_at_mask,
                                        const Eigen::MatrixXd& head_w,
                                        const Eigen::MatrixXd& head_b,
                                        const std::vector<int>& target_token_ids);

// First-|C| slice of the [CLS] hidden vector, or the learned projection.
Eigen::VectorXd cls_representation(const Eigen::VectorXd& cls_hidden, int n_classes, HMode mode,
                                   const Eigen::MatrixXd* proj_w, const Eigen::MatrixXd* proj_b);

// Adapter boundary for pretrained masked-LM backends. A plug-in implements
// text encoding and vocabulary lookup; nothing in the core depends on any
// specific model. No implementation is bundled.
class MlmBackend {
public:
    virtual ~MlmBackend() = default;

    struct Encoding {
        Eigen::MatrixXd hidden_states;  // tokens x hidden
        int mask_index = -1;
        int cls_index = -1;
    };
    virtual Encoding encode(const std::string& text) const = 0;
    // Sub-token ids of a word; empty when the word is unknown.
    virtual std::vector<int> lookup_word(const std::string& word) const = 0;
};

// Maps each label's verbalizer word to a backend token id. Words the backend
// splits into several sub-tokens use the first sub-token; warn_once fires one
// time per affected label.
std::vector<int> resolve_verbalizer_ids(const MlmBackend& backend, const LabelSchema& schema,
                                        const std::function<void(const std::string&)>& warn_once);

}  // namespace scp
