#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/autodiff.hpp"
#include "core/labels.hpp"

namespace scp {

// Differentiable counterparts of the losses, built on the tape. Values agree
// with the plain implementations in losses.hpp to floating-point identity of
// the underlying expressions (the unit tests pin the match).

// Cross-entropy of one chain step from the full-vocabulary logits: gathering
// the target-slot logits and renormalizing is exactly the full softmax
// restricted to those slots, so a restricted log-softmax suffices.
ad::Tape::Var taped_step_ce(ad::Tape& tape, ad::Tape::Var mask_logits,
                            const std::vector<int>& target_token_ids, int target_slot);

// Per-anchor soft contrastive terms. Anchors are ordered; each anchor's A(i)
// is every memory entry (gradient constants) followed by the earlier anchors.
// Anchors with empty S(i) get a constant zero var.
std::vector<ad::Tape::Var> taped_softcl(ad::Tape& tape,
                                        const std::vector<ad::Tape::Var>& anchor_h,
                                        const std::vector<int>& anchor_labels,
                                        const std::vector<Eigen::VectorXd>& memory_h,
                                        const std::vector<int>& memory_labels,
                                        const WeightMatrix& alpha, double tau);

}  // namespace scp
