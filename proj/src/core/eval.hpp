#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "core/dataio.hpp"
#include "core/model.hpp"

namespace scp {

struct EvalReport {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::vector<double> per_class_f1;   // indexed by schema order
    std::vector<bool> class_present;    // class appears in gold or predictions
    Eigen::MatrixXi confusion;          // rows gold, cols predicted
    int n = 0;
};

// Greedy staged decoding: each step's mask is filled with the argmax word of
// that step's distribution; the returned label is the argmax of the final
// step. Ties break to the lowest schema index.
int predict_label(const std::string& text, const Model& model);

// Representation h of a single input (the h fed to the contrastive loss;
// L2-normalized when the model was trained with normalize_h).
Eigen::VectorXd represent(const std::string& text, const Model& model);

EvalReport evaluate(const std::vector<Example>& examples, const Model& model);

// Metrics from already-decided predictions; the confusion-matrix core shared
// by evaluate and the tests.
EvalReport metrics_from_predictions(const std::vector<int>& gold, const std::vector<int>& predicted,
                                    size_t n_classes);

// Structured-text (JSON) export of every report field.
void save_report(const EvalReport& report, const LabelSchema& schema, const std::string& path);

}  // namespace scp
