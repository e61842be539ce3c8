#include "core/tsne.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace scp {

namespace {

// Conditional distribution row with the precision found by binary search on
// the Shannon entropy.
void fill_conditional_row(const Eigen::MatrixXd& d2, Eigen::MatrixXd& p, Eigen::Index i,
                          double target_entropy) {
    double beta = 1.0, beta_lo = 0.0, beta_hi = std::numeric_limits<double>::infinity();
    const Eigen::Index n = d2.rows();
    Eigen::VectorXd row(n);
    for (int iter = 0; iter < 64; ++iter) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            row(j) = j == i ? 0.0 : std::exp(-beta * d2(i, j));
            sum += row(j);
        }
        if (sum <= 0.0) sum = 1e-300;
        double entropy = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i || row(j) <= 0.0) continue;
            const double pj = row(j) / sum;
            entropy -= pj * std::log(pj);
        }
        const double diff = entropy - target_entropy;
        if (std::abs(diff) < 1e-7) break;
        if (diff > 0) {
            beta_lo = beta;
            beta = std::isinf(beta_hi) ? beta * 2.0 : (beta + beta_hi) / 2.0;
        } else {
            beta_hi = beta;
            beta = (beta + beta_lo) / 2.0;
        }
        if (iter == 63) break;
    }
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        row(j) = j == i ? 0.0 : std::exp(-beta * d2(i, j));
        sum += row(j);
    }
    if (sum <= 0.0) sum = 1e-300;
    p.row(i) = row.transpose() / sum;
}

}  // namespace

Eigen::MatrixXd project_2d(const Eigen::MatrixXd& points, uint64_t seed, double perplexity) {
    const Eigen::Index n = points.rows();
    require(n >= 5, ErrorCode::TooFewPoints,
            "t-SNE needs at least 5 points, got " + std::to_string(n));
    require(perplexity > 0.0 && perplexity < static_cast<double>(n - 1) / 3.0,
            ErrorCode::BadPerplexity,
            "perplexity must lie in (0, (n-1)/3) = (0, " +
                std::to_string(static_cast<double>(n - 1) / 3.0) + ")");

    // Pairwise squared distances.
    Eigen::MatrixXd d2(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d2(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = (points.row(i) - points.row(j)).squaredNorm();
            d2(i, j) = d;
            d2(j, i) = d;
        }
    }

    Eigen::MatrixXd cond = Eigen::MatrixXd::Zero(n, n);
    const double target_entropy = std::log(perplexity);
    for (Eigen::Index i = 0; i < n; ++i) fill_conditional_row(d2, cond, i, target_entropy);

    Eigen::MatrixXd p = (cond + cond.transpose()) / (2.0 * static_cast<double>(n));
    p = p.cwiseMax(1e-12);

    Rng rng(derive_seed(seed, "tsne"));
    Eigen::MatrixXd y(n, 2);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) y(i, j) = rng.normal(0.0, 1e-4);

    constexpr int kIters = 500;
    constexpr int kExaggerationIters = 100;
    constexpr double kExaggeration = 12.0;
    const double eta = std::max(50.0, static_cast<double>(n) / 12.0) * 4.0;

    Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(n, 2);
    Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(n, 2);
    Eigen::MatrixXd grad(n, 2), q_num(n, n);

    for (int iter = 0; iter < kIters; ++iter) {
        const double exaggeration = iter < kExaggerationIters ? kExaggeration : 1.0;
        const double momentum = iter < 250 ? 0.5 : 0.8;

        double q_sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            q_num(i, i) = 0.0;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double v = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
                q_num(i, j) = v;
                q_num(j, i) = v;
                q_sum += 2.0 * v;
            }
        }
        if (q_sum < 1e-300) q_sum = 1e-300;

        grad.setZero();
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i == j) continue;
                const double q = std::max(q_num(i, j) / q_sum, 1e-12);
                const double mult = (exaggeration * p(i, j) - q) * q_num(i, j);
                grad.row(i) += 4.0 * mult * (y.row(i) - y.row(j));
            }
        }

        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < 2; ++j) {
                const bool same_sign = (grad(i, j) > 0.0) == (velocity(i, j) > 0.0);
                gains(i, j) = same_sign ? gains(i, j) * 0.8 : gains(i, j) + 0.2;
                if (gains(i, j) < 0.01) gains(i, j) = 0.01;
                velocity(i, j) = momentum * velocity(i, j) - eta * gains(i, j) * grad(i, j);
                y(i, j) += velocity(i, j);
            }
        }
        y.rowwise() -= y.colwise().mean();
    }
    return y;
}

}  // namespace scp
