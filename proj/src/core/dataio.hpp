#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "core/labels.hpp"

namespace scp {

struct Example {
    std::string text;
    std::string label;
    std::string source_id;
};

enum class MultiLabelPolicy {
    SingleOnly,  // keep only single-label rows (default; keeps K-shot semantics clean)
    Expand       // one example per label, ids suffixed "#<n>"
};

// Corpus file: TSV with columns text, label(s), id; an explicit
// "text\tlabel\tid" header is optional. The label field is a comma-separated
// list of label names or numeric indices into schema order. Output is sorted
// by source_id so downstream sampling is independent of row order.
std::vector<Example> load_corpus(const std::string& path, const LabelSchema& schema,
                                 MultiLabelPolicy policy = MultiLabelPolicy::SingleOnly);

struct FewShotSplit {
    std::vector<Example> train;
    std::vector<Example> validation;
    std::vector<Example> test;
    int k = 0;
    uint64_t seed = 0;
};

// K-shot protocol: k uniform picks per class from the train pool, then
// val_size validation examples from the remainder, then a uniform
// floor(test_fraction * |test_pool|) sample of the test pool. Deterministic
// given the seed; the three parts are disjoint by source_id.
FewShotSplit sample_few_shot(const std::vector<Example>& train_pool,
                             const std::vector<Example>& test_pool, int k, uint64_t seed,
                             const LabelSchema& schema, size_t val_size = 500,
                             double test_fraction = 0.05);

// Rater judgment table: TSV, header of label names in any order, one row of
// mean scores per item. Columns are canonicalized to schema order.
Eigen::MatrixXd load_rater_judgments(const std::string& path, const LabelSchema& schema);

// Split artifact: JSON listing k, seed, and member source_ids per partition.
void save_split(const FewShotSplit& split, const std::string& path);
FewShotSplit load_split(const std::string& path, const std::vector<Example>& train_pool,
                        const std::vector<Example>& test_pool);

}  // namespace scp
