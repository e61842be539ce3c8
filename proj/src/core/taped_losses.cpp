#include "core/taped_losses.hpp"

#include <cmath>

#include "core/error.hpp"

namespace scp {

ad::Tape::Var taped_step_ce(ad::Tape& tape, ad::Tape::Var mask_logits,
                            const std::vector<int>& target_token_ids, int target_slot) {
    require(!target_token_ids.empty(), ErrorCode::InvalidArgument, "no target tokens");
    require(target_slot >= 0 && target_slot < static_cast<int>(target_token_ids.size()),
            ErrorCode::UnknownLabel, "target slot out of range");
    auto restricted = tape.pick_cols(mask_logits, target_token_ids);
    auto log_probs = tape.log_softmax_row(restricted);
    return tape.scale(tape.pick(log_probs, target_slot), -1.0);
}

std::vector<ad::Tape::Var> taped_softcl(ad::Tape& tape,
                                        const std::vector<ad::Tape::Var>& anchor_h,
                                        const std::vector<int>& anchor_labels,
                                        const std::vector<Eigen::VectorXd>& memory_h,
                                        const std::vector<int>& memory_labels,
                                        const WeightMatrix& alpha, double tau) {
    require(tau > 0.0, ErrorCode::BadTau, "temperature must be positive");
    require(anchor_h.size() == anchor_labels.size(), ErrorCode::LengthMismatch,
            "anchor representation and label counts differ");
    require(memory_h.size() == memory_labels.size(), ErrorCode::LengthMismatch,
            "memory representation and label counts differ");
    auto check_label = [&](int y) {
        require(y >= 0 && static_cast<size_t>(y) < alpha.size(), ErrorCode::UnknownLabel,
                "label index " + std::to_string(y) + " outside weight matrix");
    };
    for (int y : anchor_labels) check_label(y);
    for (int y : memory_labels) check_label(y);

    // Memory entries become constants once and are shared across anchors;
    // no gradient flows into stored representations.
    std::vector<ad::Tape::Var> memory_vars;
    memory_vars.reserve(memory_h.size());
    for (const auto& h : memory_h) memory_vars.push_back(tape.constant(h.transpose()));

    std::vector<ad::Tape::Var> per_anchor(anchor_h.size());
    for (size_t i = 0; i < anchor_h.size(); ++i) {
        const int yi = anchor_labels[i];
        std::vector<ad::Tape::Var> scores;
        std::vector<double> log_w;
        std::vector<int> positive_slots;
        auto add_predecessor = [&](ad::Tape::Var h, int y) {
            if (y == yi) positive_slots.push_back(static_cast<int>(scores.size()));
            scores.push_back(tape.scale(tape.dot(anchor_h[i], h), 1.0 / tau));
            log_w.push_back(std::log(
                1.0 / alpha.alpha(static_cast<size_t>(yi), static_cast<size_t>(y))));
        };
        for (size_t m = 0; m < memory_vars.size(); ++m)
            add_predecessor(memory_vars[m], memory_labels[m]);
        for (size_t j = 0; j < i; ++j) add_predecessor(anchor_h[j], anchor_labels[j]);

        if (positive_slots.empty()) {
            per_anchor[i] = tape.constant(Eigen::MatrixXd::Zero(1, 1));
            continue;
        }
        Eigen::MatrixXd log_w_row(1, static_cast<Eigen::Index>(log_w.size()));
        for (size_t j = 0; j < log_w.size(); ++j)
            log_w_row(0, static_cast<Eigen::Index>(j)) = log_w[j];
        auto terms = tape.add(tape.stack_scalars(scores), tape.constant(std::move(log_w_row)));
        auto lse_den = tape.logsumexp_row(terms);
        auto lse_num = tape.logsumexp_row(tape.pick_cols(terms, positive_slots));
        per_anchor[i] = tape.scale(tape.sub(lse_num, lse_den),
                                   -1.0 / static_cast<double>(positive_slots.size()));
    }
    return per_anchor;
}

}  // namespace scp
