#pragma once

#include <functional>
#include <vector>

namespace scp::testing {

// Independent reference implementations used only by tests. Everything here is
// deliberately plain scalar arithmetic with no code shared with src/core, so
// agreement is evidence rather than tautology.

double pearson_oracle(const std::vector<double>& a, const std::vector<double>& b);

// Soft contrastive loss by direct nested-loop evaluation of the formula, in a
// fixed summation order and without max-shift stabilization.
double softcl_oracle(const std::vector<std::vector<double>>& h, const std::vector<int>& labels,
                     const std::vector<std::vector<double>>& alpha, double tau,
                     std::vector<double>* per_anchor = nullptr);

// Causal supervised contrastive loss (all pair weights 1): the alpha == 1
// reduction target.
double supcon_causal_reference(const std::vector<std::vector<double>>& h,
                               const std::vector<int>& labels, double tau,
                               std::vector<double>* per_anchor = nullptr);

struct MetricsOracle {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::vector<double> per_class_f1;
    std::vector<bool> present;
};

MetricsOracle metrics_oracle(const std::vector<int>& gold, const std::vector<int>& pred,
                             int n_classes);

// Central finite differences over a flat parameter vector.
std::vector<double> finite_difference_gradient(const std::function<double(const std::vector<double>&)>& f,
                                               std::vector<double> at, double step = 1e-5);

// max(|a-b| / max(|a|, |b|, floor)) over all coordinates.
double max_relative_error(const std::vector<double>& a, const std::vector<double>& b,
                          double floor = 1e-6);

}  // namespace scp::testing
