#pragma once

#include <cstdint>
#include <string>

#include "core/encoder.hpp"
#include "core/labels.hpp"
#include "core/prompt.hpp"
#include "core/tokenizer.hpp"

namespace scp {

enum class SoftclScope {
    Batch,       // A(i) sees in-batch predecessors only
    EpochMemory  // A(i) also sees every earlier sample of the epoch
};

enum class Optimizer { Sgd, Adam };

struct TrainConfig {
    double learning_rate = 5e-5;
    int batch_size = 4;
    double tau = 2.0;
    int epochs = 20;
    uint64_t seed = 0;
    SoftclScope scope = SoftclScope::EpochMemory;
    FillPolicy fill_policy = FillPolicy::Gold;
    TargetMode target_mode = TargetMode::Literal;
    bool normalize_h = true;
    Optimizer optimizer = Optimizer::Sgd;
    int early_stop_patience = 5;   // epochs without validation macro-F1 gain; <= 0 disables
    uint64_t memory_capacity = 0;  // anchor memory entries; 0 = unlimited
    // Override chain fragments (4 entries, each with one mask token); empty
    // means the built-in templates.
    std::vector<std::string> template_fragments;
};

// The chain templates a config implies: the built-in defaults, or the
// validated override fragments.
ChainTemplates chain_templates(const TrainConfig& config, const LabelSchema& schema);

// Everything needed to run inference: parameters plus the configs, schema and
// vocabulary they were trained against.
struct Model {
    Params params;
    EncoderConfig encoder_config;
    TrainConfig train_config;
    LabelSchema schema;
    Vocabulary vocab;
    int64_t global_step = 0;
    int64_t global_epoch = 0;

    ReferenceEncoder encoder() const {
        return ReferenceEncoder(encoder_config, vocab, static_cast<int>(schema.size()));
    }

    // Hash over the architecture-defining parts (encoder config, schema,
    // vocabulary, target mode, tau, h handling). Resume requires a match.
    uint64_t architecture_hash() const;
};

// Versioned, checksummed binary checkpoint. Save -> load -> save is
// byte-identical.
void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);

// Enum <-> config-file spellings; ParseError on unknown values.
std::string to_string(SoftclScope v);
std::string to_string(Optimizer v);
std::string to_string(FillPolicy v);
std::string to_string(TargetMode v);
std::string to_string(HMode v);
SoftclScope scope_from_string(const std::string& s);
Optimizer optimizer_from_string(const std::string& s);
FillPolicy fill_policy_from_string(const std::string& s);
TargetMode target_mode_from_string(const std::string& s);
HMode h_mode_from_string(const std::string& s);

}  // namespace scp
