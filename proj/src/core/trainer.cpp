#include "core/trainer.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/eval.hpp"
#include "core/rng.hpp"
#include "core/taped_losses.hpp"
#include "core/tsv.hpp"

namespace scp {

namespace {

// Staged greedy chain for predicted-fill training: the fill words come from
// the current parameters; no gradient flows through the discrete choices.
PromptChain staged_chain(const std::string& text, const Params& params,
                         const ReferenceEncoder& encoder, const LabelSchema& schema,
                         TargetMode mode, const ChainTemplates& templates) {
    ChainBuilder builder(text, schema, &templates);
    for (size_t t = 0; t < 3; ++t) {
        StepTargetVocab tv = step_target_vocab(schema, mode, t, encoder.vocab());
        ad::Tape tape;
        auto tp = encoder.register_params(tape, params, false);
        auto sf = encoder.forward_step(tape, tp, encoder.vocab().encode(builder.current().text), t);
        Eigen::VectorXd dist =
            mask_label_distribution(tape.value(sf.mask_hidden).row(0), params.at("head.w"),
                                    params.at("head.b"), tv.token_ids);
        int best = 0;
        for (int i = 1; i < dist.size(); ++i)
            if (dist(i) > dist(best)) best = i;
        builder.advance(tv.words[static_cast<size_t>(best)]);
    }
    return builder.take();
}

int target_slot_for(const std::string& target, const StepTargetVocab& tv,
                    const LabelSchema& schema, TargetMode mode, size_t step) {
    if (mode == TargetMode::Literal || step == 3) return schema.require_index(target);
    int slot = tv.index_of(target);
    require(slot >= 0, ErrorCode::UnknownLabel,
            "step target '" + target + "' missing from the step vocabulary");
    return slot;
}

}  // namespace

void AnchorMemory::push(Eigen::VectorXd h, int label) {
    h_.push_back(std::move(h));
    labels_.push_back(label);
    if (capacity_ > 0 && h_.size() > capacity_) {
        h_.erase(h_.begin());
        labels_.erase(labels_.begin());
    }
}

void AnchorMemory::clear() {
    h_.clear();
    labels_.clear();
}

void save_history(const RunHistory& history, const std::string& steps_path,
                  const std::string& epochs_path, bool append) {
    const bool steps_header = !append || !std::filesystem::exists(steps_path);
    const bool epochs_header = !append || !std::filesystem::exists(epochs_path);
    const auto mode = append ? std::ios::app : std::ios::trunc;
    {
        std::ofstream out(steps_path, std::ios::binary | mode);
        if (!out) fail(ErrorCode::IoError, "cannot write " + steps_path);
        if (steps_header) out << "step\tepoch\tprompt_ce\tsoftcl\ttotal\tn_anchors\n";
        for (const auto& s : history.steps)
            out << s.step << "\t" << s.epoch << "\t" << format_double(s.loss.prompt_ce) << "\t"
                << format_double(s.loss.softcl) << "\t" << format_double(s.loss.total) << "\t"
                << s.loss.n_contributing_anchors << "\n";
    }
    {
        std::ofstream out(epochs_path, std::ios::binary | mode);
        if (!out) fail(ErrorCode::IoError, "cannot write " + epochs_path);
        if (epochs_header) out << "epoch\tval_accuracy\tval_macro_f1\twallclock_ms\n";
        for (const auto& e : history.epochs) {
            out << e.epoch << "\t";
            if (e.has_validation)
                out << format_double(e.val_accuracy) << "\t" << format_double(e.val_macro_f1);
            else
                out << "-\t-";
            out << "\t" << format_double(e.wallclock_ms) << "\n";
        }
    }
}

BatchLoss compute_batch_loss(const std::vector<Example>& batch, const AnchorMemory& memory,
                             const Params& params, const StepContext& ctx, bool want_grads) {
    require(!batch.empty(), ErrorCode::EmptyInput, "empty batch");
    const TrainConfig& cfg = ctx.config;
    require(cfg.fill_policy != FillPolicy::UnfilledForbidden, ErrorCode::InvalidArgument,
            "training requires the gold or predicted fill policy");

    const ChainTemplates templates = chain_templates(cfg, ctx.schema);
    std::array<StepTargetVocab, 4> step_vocab;
    for (size_t t = 0; t < 4; ++t)
        step_vocab[t] = step_target_vocab(ctx.schema, cfg.target_mode, t, ctx.encoder.vocab());

    ad::Tape tape;
    auto tp = ctx.encoder.register_params(tape, params, want_grads);

    std::vector<ad::Tape::Var> ce_vars, h_vars;
    std::vector<int> labels;
    BatchLoss out;
    for (const auto& ex : batch) {
        const int label = ctx.schema.require_index(ex.label);
        labels.push_back(label);
        PromptChain chain =
            cfg.fill_policy == FillPolicy::Gold
                ? build_chain(ex.text, ctx.schema, ex.label, FillPolicy::Gold, cfg.target_mode,
                              &templates)
                : staged_chain(ex.text, params, ctx.encoder, ctx.schema, cfg.target_mode,
                               templates);
        const auto targets = step_targets(ex.label, ctx.schema, cfg.target_mode);

        std::vector<ad::Tape::Var> step_ces;
        ad::Tape::Var h;
        for (size_t t = 0; t < 4; ++t) {
            auto sf = ctx.encoder.forward_step(
                tape, tp, ctx.encoder.vocab().encode(chain.steps[t].text), t);
            const int slot =
                target_slot_for(targets[t], step_vocab[t], ctx.schema, cfg.target_mode, t);
            auto ce_t = taped_step_ce(tape, sf.mask_logits, step_vocab[t].token_ids, slot);
            // Diagnostic counter; the taped value itself stays exact.
            if (tape.scalar(ce_t) > -std::log(1e-12)) ++out.ce_clamped;
            step_ces.push_back(ce_t);
            if (static_cast<int>(t) == ctx.encoder.config().h_step)
                h = ctx.encoder.h_from_cls(tape, tp, sf.cls_hidden);
        }
        ce_vars.push_back(tape.sum(tape.stack_scalars(step_ces)));
        if (cfg.normalize_h) h = tape.l2_normalize_row(h);
        h_vars.push_back(h);
    }

    const bool use_memory = cfg.scope == SoftclScope::EpochMemory;
    static const std::vector<Eigen::VectorXd> kNoMemory;
    static const std::vector<int> kNoLabels;
    auto scl_vars = taped_softcl(tape, h_vars, labels,
                                 use_memory ? memory.representations() : kNoMemory,
                                 use_memory ? memory.labels() : kNoLabels, ctx.weights, cfg.tau);

    std::vector<ad::Tape::Var> per_sample;
    std::vector<double> ce_values, scl_values;
    int n_contributing = 0;
    for (size_t i = 0; i < batch.size(); ++i) {
        per_sample.push_back(tape.add(ce_vars[i], scl_vars[i]));
        ce_values.push_back(tape.scalar(ce_vars[i]));
        scl_values.push_back(tape.scalar(scl_vars[i]));
        // S(i) is non-empty iff some predecessor (memory or batch) shares the class.
        bool has_positive = false;
        if (use_memory)
            for (int y : memory.labels()) has_positive = has_positive || y == labels[i];
        for (size_t j = 0; j < i; ++j) has_positive = has_positive || labels[j] == labels[i];
        if (has_positive) ++n_contributing;
    }
    auto total = tape.scale(tape.sum(tape.stack_scalars(per_sample)),
                            1.0 / static_cast<double>(batch.size()));

    if (want_grads) {
        tape.backward(total);
        out.grads.reserve(params.tensors.size());
        for (size_t k = 0; k < params.tensors.size(); ++k) {
            const Eigen::MatrixXd& g = tape.grad(tp.vars[k]);
            out.grads.push_back(g.size() ? g
                                         : Eigen::MatrixXd::Zero(params.tensors[k].second.rows(),
                                                                 params.tensors[k].second.cols()));
        }
    }
    for (size_t i = 0; i < batch.size(); ++i) {
        out.h.push_back(tape.value(h_vars[i]).row(0));
        out.h_labels.push_back(labels[i]);
    }
    out.breakdown = joint_loss(ce_values, scl_values, n_contributing);
    return out;
}

LossBreakdown training_step(const std::vector<Example>& batch, AnchorMemory& memory,
                            Params& params, OptimizerState& opt, const StepContext& ctx) {
    BatchLoss loss = compute_batch_loss(batch, memory, params, ctx, true);
    const TrainConfig& cfg = ctx.config;

    if (cfg.optimizer == Optimizer::Sgd) {
        for (size_t k = 0; k < params.tensors.size(); ++k)
            params.tensors[k].second -= cfg.learning_rate * loss.grads[k];
    } else {
        constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        if (opt.m.empty()) {
            for (const auto& [name, tensor] : params.tensors) {
                opt.m.push_back(Eigen::MatrixXd::Zero(tensor.rows(), tensor.cols()));
                opt.v.push_back(Eigen::MatrixXd::Zero(tensor.rows(), tensor.cols()));
            }
        }
        ++opt.t;
        const double bias1 = 1.0 - std::pow(b1, static_cast<double>(opt.t));
        const double bias2 = 1.0 - std::pow(b2, static_cast<double>(opt.t));
        for (size_t k = 0; k < params.tensors.size(); ++k) {
            opt.m[k] = b1 * opt.m[k] + (1.0 - b1) * loss.grads[k];
            opt.v[k] = b2 * opt.v[k] + (1.0 - b2) * loss.grads[k].cwiseProduct(loss.grads[k]);
            params.tensors[k].second -=
                cfg.learning_rate *
                ((opt.m[k] / bias1).array() / ((opt.v[k] / bias2).array().sqrt() + eps)).matrix();
        }
    }

    if (cfg.scope == SoftclScope::EpochMemory)
        for (size_t i = 0; i < loss.h.size(); ++i) memory.push(loss.h[i], loss.h_labels[i]);
    return loss.breakdown;
}

TrainResult train(const TrainConfig& config, const EncoderConfig& encoder_config,
                  const FewShotSplit& split, const LabelSchema& schema,
                  const WeightMatrix& weights, const Model* resume) {
    require(!split.train.empty(), ErrorCode::EmptyInput, "split has no training examples");
    require(weights.labels() == schema.labels(), ErrorCode::ColumnMismatch,
            "weight matrix label order does not match the schema");
    require(config.learning_rate >= 0.0, ErrorCode::InvalidArgument,
            "learning rate must be non-negative");
    require(config.batch_size >= 1, ErrorCode::InvalidArgument, "batch size must be at least 1");
    require(config.tau > 0.0, ErrorCode::BadTau, "temperature must be positive");
    require(config.epochs >= 0, ErrorCode::InvalidArgument, "epochs must be non-negative");

    // The top-level run seed drives everything (init, shuffle, ...).
    EncoderConfig enc_cfg = encoder_config;
    enc_cfg.seed = config.seed;

    // Closed vocabulary over the data the run can see, plus template and
    // verbalizer words. Test-time out-of-vocabulary words map to [UNK].
    std::vector<std::string> texts;
    for (const auto& ex : split.train) texts.push_back(ex.text);
    for (const auto& ex : split.validation) texts.push_back(ex.text);
    std::vector<std::string> extra;
    const ChainTemplates tpl = chain_templates(config, schema);
    for (size_t t = 0; t < 4; ++t) extra.push_back(tpl.fragment(t));
    for (size_t i = 0; i < schema.size(); ++i) extra.push_back(schema.verbalizer(i));
    if (schema.has_hierarchy()) {
        for (size_t i = 0; i < schema.size(); ++i) {
            extra.push_back(schema.hierarchy(i).basic);
            extra.push_back(schema.hierarchy(i).secondary);
            extra.push_back(schema.hierarchy(i).tertiary);
        }
    }
    Vocabulary vocab(texts, extra, schema.mask_token());

    Model model{Params{}, enc_cfg, config, schema, vocab, 0, 0};
    if (resume) {
        require(resume->architecture_hash() == model.architecture_hash(),
                ErrorCode::VersionMismatch,
                "checkpoint architecture does not match the requested configuration");
        model.params = resume->params;
        model.global_step = resume->global_step;
        model.global_epoch = resume->global_epoch;
    } else {
        model.params = model.encoder().init_params();
    }
    const ReferenceEncoder encoder = model.encoder();
    StepContext ctx{encoder, schema, weights, config};

    RunHistory history;
    OptimizerState opt;
    AnchorMemory memory(config.memory_capacity);

    const bool track_validation = !split.validation.empty();
    double best_f1 = -1.0;
    Params best_params;
    int64_t epochs_since_best = 0;

    std::vector<size_t> order(split.train.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int e = 0; e < config.epochs; ++e) {
        const auto epoch_start = std::chrono::steady_clock::now();
        const int64_t epoch_index = model.global_epoch;

        Rng shuffle_rng(derive_seed(config.seed, "shuffle#" + std::to_string(epoch_index)));
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        shuffle_rng.shuffle(order);

        memory.clear();
        for (size_t begin = 0; begin < order.size(); begin += static_cast<size_t>(config.batch_size)) {
            const size_t end =
                std::min(order.size(), begin + static_cast<size_t>(config.batch_size));
            std::vector<Example> batch;
            for (size_t i = begin; i < end; ++i) batch.push_back(split.train[order[i]]);
            LossBreakdown loss = training_step(batch, memory, model.params, opt, ctx);
            ++model.global_step;
            history.steps.push_back({model.global_step, epoch_index, loss});
        }

        EpochRecord record;
        record.epoch = epoch_index;
        if (track_validation) {
            EvalReport report = evaluate(split.validation, model);
            record.has_validation = true;
            record.val_accuracy = report.accuracy;
            record.val_macro_f1 = report.macro_f1;
        }
        record.wallclock_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                      epoch_start)
                .count();
        history.epochs.push_back(record);
        ++model.global_epoch;

        if (track_validation && config.early_stop_patience > 0) {
            if (record.val_macro_f1 > best_f1) {
                best_f1 = record.val_macro_f1;
                best_params = model.params;
                epochs_since_best = 0;
            } else if (++epochs_since_best >= config.early_stop_patience) {
                break;
            }
        }
    }

    if (track_validation && config.early_stop_patience > 0 && best_f1 >= 0.0)
        model.params = best_params;

    return TrainResult{std::move(model), std::move(history)};
}

}  // namespace scp
