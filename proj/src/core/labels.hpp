#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace scp {

struct HierarchyEntry {
    std::string basic;
    std::string secondary;
    std::string tertiary;
};

// The label universe. Label order is canonical: every matrix and vector in the
// pipeline is indexed in this order.
class LabelSchema {
public:
    LabelSchema(std::vector<std::string> labels,
                std::vector<std::string> verbalizer,
                std::vector<HierarchyEntry> hierarchy = {},
                std::string mask_token = "[MASK]");

    // Schema file: TSV with header "label, verbalizer_word[, basic, secondary,
    // tertiary]". A "# mask_token=..." comment overrides the mask marker.
    static LabelSchema load(const std::string& path);

    // Attaches a hierarchy from a standalone mapping file (one "label, basic,
    // secondary, tertiary" row per label; header optional). The mapping must
    // cover every schema label.
    LabelSchema with_hierarchy_file(const std::string& path) const;

    size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(size_t i) const { return labels_.at(i); }
    const std::string& verbalizer(size_t i) const { return verbalizer_.at(i); }
    const std::string& verbalizer(const std::string& label) const;

    // -1 when unknown.
    int index_of(const std::string& label) const;
    int require_index(const std::string& label) const;  // throws UnknownLabel

    bool has_hierarchy() const { return !hierarchy_.empty(); }
    const HierarchyEntry& hierarchy(size_t i) const;

    const std::string& mask_token() const { return mask_token_; }

private:
    std::vector<std::string> labels_;
    std::vector<std::string> verbalizer_;
    std::vector<HierarchyEntry> hierarchy_;
    std::unordered_map<std::string, int> index_;
    std::string mask_token_;
};

// Pearson correlations between labels; symmetric, unit diagonal, entries in
// [-1, 1]. Carries its own label order so saved files are self-describing.
class CorrelationMatrix {
public:
    CorrelationMatrix(std::vector<std::string> labels, Eigen::MatrixXd rho);

    static CorrelationMatrix load(const std::string& path);
    void save(const std::string& path) const;  // bit-exact re-loadable

    // Reindexes rows/columns into schema order; ColumnMismatch when the label
    // sets differ.
    CorrelationMatrix canonicalized(const LabelSchema& schema) const;

    size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    double rho(size_t i, size_t j) const { return rho_(i, j); }
    const Eigen::MatrixXd& matrix() const { return rho_; }

private:
    std::vector<std::string> labels_;
    Eigen::MatrixXd rho_;
};

// Positive contrastive weights alpha; the soft contrastive loss divides by
// alpha, so every entry is clamped into [epsilon, 1] with diagonal exactly 1.
class WeightMatrix {
public:
    WeightMatrix(std::vector<std::string> labels, Eigen::MatrixXd alpha, double epsilon);

    static WeightMatrix ones(std::vector<std::string> labels);  // plain SupCon weights
    static WeightMatrix load(const std::string& path);
    void save(const std::string& path) const;

    size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    double alpha(size_t i, size_t j) const { return alpha_(i, j); }
    const Eigen::MatrixXd& matrix() const { return alpha_; }
    double epsilon() const { return epsilon_; }

private:
    std::vector<std::string> labels_;
    Eigen::MatrixXd alpha_;
    double epsilon_;
};

// Sample Pearson coefficient. DegenerateInput when either vector is constant;
// the caller decides any fallback.
double pearson(std::span<const double> a, std::span<const double> b);

// Column-pairwise Pearson over mean rater judgment scores (rows = items,
// columns = labels in schema order). Diagonal is forced to 1.
CorrelationMatrix estimate_correlation(const Eigen::MatrixXd& judgments, const LabelSchema& schema);

// alpha[i][j] = max(rho[i][j], epsilon) off-diagonal, 1 on the diagonal.
WeightMatrix correlation_to_weights(const CorrelationMatrix& rho, double epsilon);

}  // namespace scp
