#include "core/labels.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "core/error.hpp"
#include "core/tsv.hpp"

namespace scp {

namespace {

void check_square_symmetric(const std::vector<std::string>& labels, const Eigen::MatrixXd& m,
                            const char* what) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    require(m.rows() == n && m.cols() == n, ErrorCode::InvariantViolation,
            std::string(what) + " shape does not match label count");
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            require(m(i, j) == m(j, i), ErrorCode::InvariantViolation,
                    std::string(what) + " is not symmetric at (" + labels[i] + ", " + labels[j] + ")");
}

std::string matrix_to_tsv(const std::vector<std::string>& labels, const Eigen::MatrixXd& m,
                          const std::string& preamble) {
    std::ostringstream out;
    out << preamble;
    for (size_t i = 0; i < labels.size(); ++i) out << (i ? "\t" : "") << labels[i];
    out << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "\t" : "") << format_double(m(i, j));
        out << "\n";
    }
    return out.str();
}

struct LoadedMatrix {
    std::vector<std::string> labels;
    Eigen::MatrixXd m;
    std::vector<std::string> comments;
};

LoadedMatrix load_matrix_tsv(const std::string& path) {
    TsvFile file = read_tsv(path);
    require(!file.rows.empty(), ErrorCode::ParseError, path + " is empty");
    LoadedMatrix out;
    out.labels = file.rows[0];
    out.comments = file.comments;
    const size_t n = out.labels.size();
    require(file.rows.size() == n + 1, ErrorCode::ParseError,
            path + ": expected " + std::to_string(n) + " data rows, found " +
                std::to_string(file.rows.size() - 1));
    out.m.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (size_t i = 0; i < n; ++i) {
        const auto& row = file.rows[i + 1];
        require(row.size() == n, ErrorCode::ParseError,
                path + ": line " + std::to_string(file.line_numbers[i + 1]) + " has " +
                    std::to_string(row.size()) + " fields, expected " + std::to_string(n));
        for (size_t j = 0; j < n; ++j) {
            try {
                size_t used = 0;
                out.m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    std::stod(row[j], &used);
                require(used == row[j].size(), ErrorCode::ParseError,
                        path + ": bad number '" + row[j] + "'");
            } catch (const std::invalid_argument&) {
                fail(ErrorCode::ParseError, path + ": bad number '" + row[j] + "'");
            }
        }
    }
    return out;
}

}  // namespace

LabelSchema::LabelSchema(std::vector<std::string> labels, std::vector<std::string> verbalizer,
                         std::vector<HierarchyEntry> hierarchy, std::string mask_token)
    : labels_(std::move(labels)),
      verbalizer_(std::move(verbalizer)),
      hierarchy_(std::move(hierarchy)),
      mask_token_(std::move(mask_token)) {
    require(labels_.size() >= 2, ErrorCode::InvariantViolation, "schema needs at least 2 labels");
    require(verbalizer_.size() == labels_.size(), ErrorCode::InvariantViolation,
            "verbalizer must be total over labels");
    require(hierarchy_.empty() || hierarchy_.size() == labels_.size(), ErrorCode::InvariantViolation,
            "hierarchy, when present, must be total over labels");
    require(!mask_token_.empty(), ErrorCode::InvariantViolation, "mask token must be non-empty");
    for (size_t i = 0; i < labels_.size(); ++i) {
        require(!labels_[i].empty(), ErrorCode::InvariantViolation, "empty label name");
        require(!verbalizer_[i].empty(), ErrorCode::InvariantViolation,
                "empty verbalizer word for label " + labels_[i]);
        auto [it, inserted] = index_.emplace(labels_[i], static_cast<int>(i));
        (void)it;
        require(inserted, ErrorCode::InvariantViolation, "duplicate label " + labels_[i]);
    }
    for (const auto& h : hierarchy_) {
        require(!h.basic.empty() && !h.secondary.empty() && !h.tertiary.empty(),
                ErrorCode::InvariantViolation, "hierarchy entries must be non-empty");
    }
}

LabelSchema LabelSchema::load(const std::string& path) {
    TsvFile file = read_tsv(path);
    require(!file.rows.empty(), ErrorCode::ParseError, path + " is empty");

    std::string mask_token = "[MASK]";
    for (const auto& c : file.comments) {
        const std::string key = "# mask_token=";
        if (c.rfind(key, 0) == 0) mask_token = c.substr(key.size());
    }

    const auto& header = file.rows[0];
    bool with_hierarchy = false;
    if (header.size() == 5 && header[2] == "basic" && header[3] == "secondary" &&
        header[4] == "tertiary") {
        with_hierarchy = true;
    } else {
        require(header.size() == 2, ErrorCode::ParseError,
                path + ": header must be 'label\\tverbalizer_word' optionally followed by "
                       "'basic\\tsecondary\\ttertiary'");
    }
    require(header[0] == "label" && header[1] == "verbalizer_word", ErrorCode::ParseError,
            path + ": unexpected header");

    std::vector<std::string> labels, verbalizer;
    std::vector<HierarchyEntry> hierarchy;
    for (size_t r = 1; r < file.rows.size(); ++r) {
        const auto& row = file.rows[r];
        require(row.size() == header.size(), ErrorCode::ParseError,
                path + ": line " + std::to_string(file.line_numbers[r]) + " has " +
                    std::to_string(row.size()) + " fields");
        labels.push_back(row[0]);
        verbalizer.push_back(row[1]);
        if (with_hierarchy) hierarchy.push_back({row[2], row[3], row[4]});
    }
    return LabelSchema(std::move(labels), std::move(verbalizer), std::move(hierarchy),
                       std::move(mask_token));
}

LabelSchema LabelSchema::with_hierarchy_file(const std::string& path) const {
    TsvFile file = read_tsv(path);
    std::unordered_map<std::string, HierarchyEntry> mapping;
    for (size_t r = 0; r < file.rows.size(); ++r) {
        const auto& row = file.rows[r];
        if (r == 0 && row.size() == 4 && row[0] == "label") continue;  // header
        require(row.size() == 4, ErrorCode::ParseError,
                path + ": line " + std::to_string(file.line_numbers[r]) +
                    " needs 4 fields (label, basic, secondary, tertiary)");
        require(mapping.emplace(row[0], HierarchyEntry{row[1], row[2], row[3]}).second,
                ErrorCode::ParseError, path + ": duplicate mapping for label " + row[0]);
    }
    std::vector<HierarchyEntry> hierarchy;
    for (const auto& label : labels_) {
        auto it = mapping.find(label);
        require(it != mapping.end(), ErrorCode::MissingHierarchy,
                path + " has no mapping for label " + label);
        hierarchy.push_back(it->second);
    }
    return LabelSchema(labels_, verbalizer_, std::move(hierarchy), mask_token_);
}

const std::string& LabelSchema::verbalizer(const std::string& label) const {
    return verbalizer_[static_cast<size_t>(require_index(label))];
}

int LabelSchema::index_of(const std::string& label) const {
    auto it = index_.find(label);
    return it == index_.end() ? -1 : it->second;
}

int LabelSchema::require_index(const std::string& label) const {
    int i = index_of(label);
    if (i < 0) fail(ErrorCode::UnknownLabel, "label '" + label + "' not in schema");
    return i;
}

const HierarchyEntry& LabelSchema::hierarchy(size_t i) const {
    require(has_hierarchy(), ErrorCode::MissingHierarchy, "schema has no hierarchy mapping");
    return hierarchy_.at(i);
}

CorrelationMatrix::CorrelationMatrix(std::vector<std::string> labels, Eigen::MatrixXd rho)
    : labels_(std::move(labels)), rho_(std::move(rho)) {
    check_square_symmetric(labels_, rho_, "correlation matrix");
    constexpr double kTol = 1e-9;
    for (Eigen::Index i = 0; i < rho_.rows(); ++i) {
        require(rho_(i, i) == 1.0, ErrorCode::InvariantViolation,
                "correlation diagonal must be exactly 1");
        for (Eigen::Index j = 0; j < rho_.cols(); ++j)
            require(rho_(i, j) >= -1.0 - kTol && rho_(i, j) <= 1.0 + kTol,
                    ErrorCode::InvariantViolation, "correlation entry outside [-1, 1]");
    }
}

CorrelationMatrix CorrelationMatrix::load(const std::string& path) {
    LoadedMatrix lm = load_matrix_tsv(path);
    return CorrelationMatrix(std::move(lm.labels), std::move(lm.m));
}

void CorrelationMatrix::save(const std::string& path) const {
    write_text_file(path, matrix_to_tsv(labels_, rho_, ""));
}

CorrelationMatrix CorrelationMatrix::canonicalized(const LabelSchema& schema) const {
    require(schema.size() == size(), ErrorCode::ColumnMismatch,
            "correlation matrix has " + std::to_string(size()) + " labels, schema has " +
                std::to_string(schema.size()));
    std::vector<Eigen::Index> pos(schema.size());
    for (size_t i = 0; i < schema.size(); ++i) {
        int from = -1;
        for (size_t j = 0; j < labels_.size(); ++j)
            if (labels_[j] == schema.label(i)) { from = static_cast<int>(j); break; }
        require(from >= 0, ErrorCode::ColumnMismatch,
                "correlation matrix is missing label " + schema.label(i));
        pos[i] = from;
    }
    Eigen::MatrixXd out(rho_.rows(), rho_.cols());
    for (size_t i = 0; i < schema.size(); ++i)
        for (size_t j = 0; j < schema.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rho_(pos[i], pos[j]);
    return CorrelationMatrix(schema.labels(), std::move(out));
}

WeightMatrix::WeightMatrix(std::vector<std::string> labels, Eigen::MatrixXd alpha, double epsilon)
    : labels_(std::move(labels)), alpha_(std::move(alpha)), epsilon_(epsilon) {
    require(epsilon_ > 0.0 && epsilon_ < 1.0, ErrorCode::BadEpsilon,
            "epsilon must lie in (0, 1), got " + format_double(epsilon_));
    check_square_symmetric(labels_, alpha_, "weight matrix");
    for (Eigen::Index i = 0; i < alpha_.rows(); ++i) {
        require(alpha_(i, i) == 1.0, ErrorCode::InvariantViolation,
                "weight diagonal must be exactly 1");
        for (Eigen::Index j = 0; j < alpha_.cols(); ++j)
            require(alpha_(i, j) >= epsilon_ && alpha_(i, j) <= 1.0, ErrorCode::InvariantViolation,
                    "weight entry outside [epsilon, 1]");
    }
}

WeightMatrix WeightMatrix::ones(std::vector<std::string> labels) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    return WeightMatrix(std::move(labels), Eigen::MatrixXd::Ones(n, n), 0.5);
}

WeightMatrix WeightMatrix::load(const std::string& path) {
    LoadedMatrix lm = load_matrix_tsv(path);
    double epsilon = 0.05;
    for (const auto& c : lm.comments) {
        const std::string key = "# epsilon=";
        if (c.rfind(key, 0) == 0) epsilon = std::stod(c.substr(key.size()));
    }
    return WeightMatrix(std::move(lm.labels), std::move(lm.m), epsilon);
}

void WeightMatrix::save(const std::string& path) const {
    write_text_file(path,
                    matrix_to_tsv(labels_, alpha_, "# epsilon=" + format_double(epsilon_) + "\n"));
}

double pearson(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), ErrorCode::LengthMismatch,
            "vectors of length " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    require(a.size() >= 2, ErrorCode::InvalidArgument, "need at least 2 observations");
    const double n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    require(saa > 0.0, ErrorCode::DegenerateInput, "first vector has zero variance");
    require(sbb > 0.0, ErrorCode::DegenerateInput, "second vector has zero variance");
    double r = sab / std::sqrt(saa * sbb);
    // Rounding can push perfectly collinear inputs a hair outside [-1, 1].
    if (r > 1.0) r = 1.0;
    if (r < -1.0) r = -1.0;
    return r;
}

CorrelationMatrix estimate_correlation(const Eigen::MatrixXd& judgments, const LabelSchema& schema) {
    const auto n_labels = static_cast<Eigen::Index>(schema.size());
    require(judgments.cols() == n_labels, ErrorCode::ColumnMismatch,
            "judgment matrix has " + std::to_string(judgments.cols()) + " columns, schema has " +
                std::to_string(schema.size()) + " labels");
    require(judgments.rows() >= 2, ErrorCode::InvalidArgument,
            "need at least 2 judgment rows");

    std::vector<std::vector<double>> cols(static_cast<size_t>(n_labels));
    for (Eigen::Index j = 0; j < n_labels; ++j) {
        cols[static_cast<size_t>(j)].assign(judgments.col(j).data(),
                                            judgments.col(j).data() + judgments.rows());
        double lo = judgments.col(j).minCoeff();
        double hi = judgments.col(j).maxCoeff();
        require(lo != hi, ErrorCode::DegenerateInput,
                "constant judgment column for label " + schema.label(static_cast<size_t>(j)));
    }

    Eigen::MatrixXd rho = Eigen::MatrixXd::Identity(n_labels, n_labels);
    for (Eigen::Index i = 0; i < n_labels; ++i) {
        for (Eigen::Index j = i + 1; j < n_labels; ++j) {
            double r = pearson(cols[static_cast<size_t>(i)], cols[static_cast<size_t>(j)]);
            rho(i, j) = r;
            rho(j, i) = r;
        }
    }
    return CorrelationMatrix(schema.labels(), std::move(rho));
}

WeightMatrix correlation_to_weights(const CorrelationMatrix& rho, double epsilon) {
    require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::BadEpsilon,
            "epsilon must lie in (0, 1), got " + format_double(epsilon));
    const auto n = static_cast<Eigen::Index>(rho.size());
    Eigen::MatrixXd alpha(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) {
                alpha(i, j) = 1.0;
            } else {
                double a = std::max(rho.rho(static_cast<size_t>(i), static_cast<size_t>(j)), epsilon);
                alpha(i, j) = std::min(a, 1.0);
            }
        }
    }
    return WeightMatrix(rho.labels(), std::move(alpha), epsilon);
}

}  // namespace scp
