#include "core/losses.hpp"

#include <cmath>

#include "core/error.hpp"

namespace scp {

namespace {

constexpr double kProbFloor = 1e-12;

void check_context(const AnchorContext& ctx, const WeightMatrix& alpha, double tau) {
    require(tau > 0.0, ErrorCode::BadTau, "temperature must be positive");
    require(static_cast<size_t>(ctx.h.rows()) == ctx.labels.size(), ErrorCode::LengthMismatch,
            "representation count does not match label count");
    for (int y : ctx.labels)
        require(y >= 0 && static_cast<size_t>(y) < alpha.size(), ErrorCode::UnknownLabel,
                "label index " + std::to_string(y) + " outside weight matrix");
}

}  // namespace

double prompt_ce(const std::array<Eigen::VectorXd, 4>& step_distributions,
                 const std::array<int, 4>& targets, PromptCeStats* stats) {
    double ce = 0.0;
    for (size_t t = 0; t < 4; ++t) {
        const Eigen::VectorXd& p = step_distributions[t];
        require(p.size() > 0, ErrorCode::EmptyInput,
                "step " + std::to_string(t + 1) + " distribution is empty");
        require(p.minCoeff() >= 0.0, ErrorCode::InvalidArgument,
                "step " + std::to_string(t + 1) + " distribution has a negative entry");
        require(std::abs(p.sum() - 1.0) <= 1e-6, ErrorCode::InvalidArgument,
                "step " + std::to_string(t + 1) + " distribution does not sum to 1");
        require(targets[t] >= 0 && targets[t] < p.size(), ErrorCode::UnknownLabel,
                "step " + std::to_string(t + 1) + " target index out of range");
        double q = p(targets[t]);
        if (q < kProbFloor) {
            q = kProbFloor;
            if (stats) ++stats->clamped;
        }
        ce -= std::log(q);
    }
    return ce;
}

SoftclResult softcl(const AnchorContext& ctx, const WeightMatrix& alpha, double tau) {
    check_context(ctx, alpha, tau);
    const size_t n = ctx.labels.size();
    SoftclResult out;
    out.per_anchor.assign(n, 0.0);

    std::vector<double> terms;
    for (size_t i = 0; i < n; ++i) {
        if (i == 0) continue;
        const int yi = ctx.labels[i];
        terms.clear();
        size_t n_same = 0;
        for (size_t j = 0; j < i; ++j) {
            const double w = 1.0 / alpha.alpha(static_cast<size_t>(yi),
                                               static_cast<size_t>(ctx.labels[j]));
            terms.push_back(std::log(w) + ctx.h.row(static_cast<Eigen::Index>(i))
                                                  .dot(ctx.h.row(static_cast<Eigen::Index>(j))) /
                                              tau);
            if (ctx.labels[j] == yi) ++n_same;
        }
        if (n_same == 0) continue;

        double m = terms[0];
        for (double t : terms) m = std::max(m, t);
        double denom = 0.0, numer = 0.0;
        for (size_t j = 0; j < i; ++j) {
            const double e = std::exp(terms[j] - m);
            denom += e;
            if (ctx.labels[j] == yi) numer += e;
        }
        out.per_anchor[i] =
            -(1.0 / static_cast<double>(n_same)) * (std::log(numer) - std::log(denom));
        ++out.n_contributing;
    }
    for (double v : out.per_anchor) out.total += v;
    return out;
}

Eigen::MatrixXd softcl_grad(const AnchorContext& ctx, const WeightMatrix& alpha, double tau) {
    check_context(ctx, alpha, tau);
    const size_t n = ctx.labels.size();
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(ctx.h.rows(), ctx.h.cols());

    std::vector<double> terms, p;
    for (size_t i = 1; i < n; ++i) {
        const int yi = ctx.labels[i];
        terms.clear();
        size_t n_same = 0;
        for (size_t j = 0; j < i; ++j) {
            const double w = 1.0 / alpha.alpha(static_cast<size_t>(yi),
                                               static_cast<size_t>(ctx.labels[j]));
            terms.push_back(std::log(w) + ctx.h.row(static_cast<Eigen::Index>(i))
                                                  .dot(ctx.h.row(static_cast<Eigen::Index>(j))) /
                                              tau);
            if (ctx.labels[j] == yi) ++n_same;
        }
        if (n_same == 0) continue;

        double m = terms[0];
        for (double t : terms) m = std::max(m, t);
        double denom = 0.0, numer = 0.0;
        p.assign(i, 0.0);
        for (size_t j = 0; j < i; ++j) {
            p[j] = std::exp(terms[j] - m);
            denom += p[j];
            if (ctx.labels[j] == yi) numer += p[j];
        }
        for (size_t j = 0; j < i; ++j) {
            // dL_i/ds_ij = (p_j - 1{j in S} q_j) / (|S| tau)
            const double pj = p[j] / denom;
            const double qj = (ctx.labels[j] == yi) ? p[j] / numer : 0.0;
            const double ds = (pj - qj) / (static_cast<double>(n_same) * tau);
            grad.row(static_cast<Eigen::Index>(i)) += ds * ctx.h.row(static_cast<Eigen::Index>(j));
            grad.row(static_cast<Eigen::Index>(j)) += ds * ctx.h.row(static_cast<Eigen::Index>(i));
        }
    }
    return grad;
}

LossBreakdown joint_loss(const std::vector<double>& prompt_ce_per_sample,
                         const std::vector<double>& softcl_per_sample,
                         int n_contributing_anchors) {
    require(prompt_ce_per_sample.size() == softcl_per_sample.size(), ErrorCode::LengthMismatch,
            "per-sample loss lists differ in length");
    require(!prompt_ce_per_sample.empty(), ErrorCode::EmptyInput, "no samples");
    LossBreakdown out;
    const double n = static_cast<double>(prompt_ce_per_sample.size());
    for (size_t i = 0; i < prompt_ce_per_sample.size(); ++i) {
        out.prompt_ce += prompt_ce_per_sample[i];
        out.softcl += softcl_per_sample[i];
    }
    out.prompt_ce /= n;
    out.softcl /= n;
    out.total = out.prompt_ce + out.softcl;
    out.n_contributing_anchors = n_contributing_anchors;
    return out;
}

}  // namespace scp
