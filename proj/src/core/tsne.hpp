#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace scp {

// Exact (O(n^2)) t-SNE to 2-D. Deterministic given the seed; output row order
// matches the input. Requires n >= 5 and perplexity < (n - 1) / 3.
Eigen::MatrixXd project_2d(const Eigen::MatrixXd& points, uint64_t seed, double perplexity);

}  // namespace scp
