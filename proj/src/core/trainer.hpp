#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "core/dataio.hpp"
#include "core/losses.hpp"
#include "core/model.hpp"

namespace scp {

// Ordered store of representations seen earlier in the current epoch; realizes
// A(i) across batches in epoch-memory scope. Cleared at epoch boundaries.
class AnchorMemory {
public:
    explicit AnchorMemory(uint64_t capacity = 0) : capacity_(capacity) {}

    void push(Eigen::VectorXd h, int label);
    void clear();
    size_t size() const { return labels_.size(); }
    const std::vector<Eigen::VectorXd>& representations() const { return h_; }
    const std::vector<int>& labels() const { return labels_; }

private:
    std::vector<Eigen::VectorXd> h_;
    std::vector<int> labels_;
    uint64_t capacity_;  // 0 = unlimited; otherwise oldest entries are dropped
};

struct StepRecord {
    int64_t step = 0;
    int64_t epoch = 0;
    LossBreakdown loss;
};

struct EpochRecord {
    int64_t epoch = 0;
    bool has_validation = false;
    double val_accuracy = 0.0;
    double val_macro_f1 = 0.0;
    double wallclock_ms = 0.0;
};

struct RunHistory {
    std::vector<StepRecord> steps;
    std::vector<EpochRecord> epochs;
    int ce_clamp_warnings = 0;
};

// History export: per-step losses as TSV (fully deterministic bytes) and
// per-epoch records with the wall-clock column last so comparisons can drop it.
void save_history(const RunHistory& history, const std::string& steps_path,
                  const std::string& epochs_path, bool append = false);

struct StepContext {
    const ReferenceEncoder& encoder;
    const LabelSchema& schema;
    const WeightMatrix& weights;
    const TrainConfig& config;
};

struct BatchLoss {
    LossBreakdown breakdown;
    std::vector<Eigen::MatrixXd> grads;  // parallel to params.tensors when requested
    std::vector<Eigen::VectorXd> h;      // per-sample h as fed to the loss
    std::vector<int> h_labels;
    int ce_clamped = 0;
};

// Forward + loss for one ordered batch against the given anchor memory.
// Memory entries are gradient constants. Does not mutate anything.
BatchLoss compute_batch_loss(const std::vector<Example>& batch, const AnchorMemory& memory,
                             const Params& params, const StepContext& ctx, bool want_grads);

struct OptimizerState {
    std::vector<Eigen::MatrixXd> m, v;  // adam moments, lazily sized
    int64_t t = 0;
};

// One optimization step: loss, gradients, parameter update, and the memory
// append (epoch-memory scope only).
LossBreakdown training_step(const std::vector<Example>& batch, AnchorMemory& memory,
                            Params& params, OptimizerState& opt, const StepContext& ctx);

struct TrainResult {
    Model model;
    RunHistory history;
};

// Joint optimization over the split's train set, with per-epoch validation and
// optional early stopping on validation macro-F1. Deterministic given the
// config seed. Pass resume to continue a checkpointed run (architecture must
// match; step and epoch numbering continue).
TrainResult train(const TrainConfig& config, const EncoderConfig& encoder_config,
                  const FewShotSplit& split, const LabelSchema& schema,
                  const WeightMatrix& weights, const Model* resume = nullptr);

}  // namespace scp
