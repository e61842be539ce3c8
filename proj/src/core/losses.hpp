#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "core/labels.hpp"

namespace scp {

struct LossBreakdown {
    double prompt_ce = 0.0;  // nats, batch mean
    double softcl = 0.0;     // nats, batch mean
    double total = 0.0;      // mean over batch of per-sample (ce_i + softcl_i)
    int n_contributing_anchors = 0;  // samples with non-empty S(i)
};

// Ordered samples for the contrastive loss: row i of h is the representation
// of sample i, labels[i] its class index. Order is input order; the loss
// compares each anchor against all of its predecessors A(i) = {0..i-1} and the
// same-class subset S(i).
struct AnchorContext {
    Eigen::MatrixXd h;        // n x d
    std::vector<int> labels;  // n class indices
};

struct PromptCeStats {
    int clamped = 0;  // target probabilities clamped up to the 1e-12 floor
};

// Per-step cross-entropy over the chain: -sum_t log p_t(target_t). Each
// distribution must sum to 1 within 1e-6. Target probabilities below 1e-12 are
// clamped and counted instead of propagating infinity.
double prompt_ce(const std::array<Eigen::VectorXd, 4>& step_distributions,
                 const std::array<int, 4>& targets, PromptCeStats* stats = nullptr);

struct SoftclResult {
    double total = 0.0;
    std::vector<double> per_anchor;
    int n_contributing = 0;  // anchors with non-empty S(i)
};

// Correlation-weighted contrastive loss. For each anchor i with non-empty
// S(i):
//
//   L_i = -(1/|S(i)|) log sum_{k in S(i)} w_k exp(s_ik/tau)
//                            / sum_{j in A(i)} w_j exp(s_ij/tau)
//
// with w_j = 1/alpha[y_i][y_j] and s_ij the raw dot product h_i . h_j (callers
// L2-normalize h beforehand when cosine similarity is wanted). Anchors with
// empty S(i) contribute 0. Exponents are max-shifted per anchor before
// exponentiation.
SoftclResult softcl(const AnchorContext& ctx, const WeightMatrix& alpha, double tau);

// Analytic gradient of softcl(...).total with respect to every entry of h.
Eigen::MatrixXd softcl_grad(const AnchorContext& ctx, const WeightMatrix& alpha, double tau);

// total = (1/n) sum_i (ce_i + scl_i). n_contributing_anchors is supplied by
// the caller (joint_loss cannot see S(i)).
LossBreakdown joint_loss(const std::vector<double>& prompt_ce_per_sample,
                         const std::vector<double>& softcl_per_sample,
                         int n_contributing_anchors = 0);

}  // namespace scp
