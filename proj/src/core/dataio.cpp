#include "core/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/tsv.hpp"

namespace scp {

namespace {

using nlohmann::json;

std::vector<std::string> split_on_comma(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(part);
    return out;
}

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string resolve_label(const std::string& token, const LabelSchema& schema, size_t lineno) {
    if (all_digits(token)) {
        const size_t idx = std::stoul(token);
        require(idx < schema.size(), ErrorCode::UnknownLabel,
                "line " + std::to_string(lineno) + ": label index " + token + " out of range");
        return schema.label(idx);
    }
    require(schema.index_of(token) >= 0, ErrorCode::UnknownLabel,
            "line " + std::to_string(lineno) + ": unknown label '" + token + "'");
    return token;
}

}  // namespace

std::vector<Example> load_corpus(const std::string& path, const LabelSchema& schema,
                                 MultiLabelPolicy policy) {
    TsvFile file = read_tsv(path);
    std::vector<Example> out;
    std::unordered_set<std::string> seen_ids;
    size_t start = 0;
    if (!file.rows.empty() && file.rows[0] == std::vector<std::string>{"text", "label", "id"})
        start = 1;
    for (size_t r = start; r < file.rows.size(); ++r) {
        const auto& row = file.rows[r];
        const size_t lineno = file.line_numbers[r];
        require(row.size() == 3, ErrorCode::ParseError,
                path + ": line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                    " fields, expected 3 (text, label, id)");
        require(!row[0].empty(), ErrorCode::ParseError,
                path + ": line " + std::to_string(lineno) + " has empty text");
        require(!row[2].empty(), ErrorCode::ParseError,
                path + ": line " + std::to_string(lineno) + " has empty id");
        std::vector<std::string> raw_labels = split_on_comma(row[1]);
        require(!raw_labels.empty() && !raw_labels[0].empty(), ErrorCode::ParseError,
                path + ": line " + std::to_string(lineno) + " has empty label field");
        if (raw_labels.size() > 1 && policy == MultiLabelPolicy::SingleOnly) continue;
        for (size_t li = 0; li < raw_labels.size(); ++li) {
            Example ex;
            ex.text = row[0];
            ex.label = resolve_label(raw_labels[li], schema, lineno);
            ex.source_id = raw_labels.size() == 1 ? row[2] : row[2] + "#" + std::to_string(li);
            require(seen_ids.insert(ex.source_id).second, ErrorCode::InvariantViolation,
                    path + ": duplicate source id '" + ex.source_id + "' at line " +
                        std::to_string(lineno));
            out.push_back(std::move(ex));
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Example& a, const Example& b) { return a.source_id < b.source_id; });
    return out;
}

FewShotSplit sample_few_shot(const std::vector<Example>& train_pool,
                             const std::vector<Example>& test_pool, int k, uint64_t seed,
                             const LabelSchema& schema, size_t val_size, double test_fraction) {
    require(k >= 1, ErrorCode::InvalidArgument, "k must be at least 1");
    require(test_fraction > 0.0 && test_fraction <= 1.0, ErrorCode::InvalidArgument,
            "test_fraction must lie in (0, 1]");

    std::vector<std::vector<size_t>> by_class(schema.size());
    for (size_t i = 0; i < train_pool.size(); ++i)
        by_class[static_cast<size_t>(schema.require_index(train_pool[i].label))].push_back(i);
    for (size_t c = 0; c < schema.size(); ++c)
        require(by_class[c].size() >= static_cast<size_t>(k), ErrorCode::InsufficientExamples,
                "class '" + schema.label(c) + "' has " + std::to_string(by_class[c].size()) +
                    " examples, need k=" + std::to_string(k));
    require(train_pool.size() >= schema.size() * static_cast<size_t>(k) + val_size,
            ErrorCode::InsufficientExamples,
            "train pool of " + std::to_string(train_pool.size()) + " cannot supply " +
                std::to_string(schema.size() * static_cast<size_t>(k)) + " shots plus " +
                std::to_string(val_size) + " validation examples");

    Rng rng(derive_seed(seed, "split"));
    FewShotSplit split;
    split.k = k;
    split.seed = seed;

    std::vector<bool> taken(train_pool.size(), false);
    for (size_t c = 0; c < schema.size(); ++c) {
        const auto& pool = by_class[c];
        for (size_t pick : rng.sample_indices(pool.size(), static_cast<size_t>(k))) {
            split.train.push_back(train_pool[pool[pick]]);
            taken[pool[pick]] = true;
        }
    }

    std::vector<size_t> remainder;
    for (size_t i = 0; i < train_pool.size(); ++i)
        if (!taken[i]) remainder.push_back(i);
    require(remainder.size() >= val_size, ErrorCode::InsufficientExamples,
            "only " + std::to_string(remainder.size()) + " examples left for validation, need " +
                std::to_string(val_size));
    for (size_t pick : rng.sample_indices(remainder.size(), val_size))
        split.validation.push_back(train_pool[remainder[pick]]);

    const auto n_test =
        static_cast<size_t>(test_fraction * static_cast<double>(test_pool.size()));
    require(n_test >= 1, ErrorCode::InsufficientExamples,
            "test pool of " + std::to_string(test_pool.size()) + " yields an empty test sample");
    for (size_t pick : rng.sample_indices(test_pool.size(), n_test))
        split.test.push_back(test_pool[pick]);

    return split;
}

Eigen::MatrixXd load_rater_judgments(const std::string& path, const LabelSchema& schema) {
    TsvFile file = read_tsv(path);
    require(file.rows.size() >= 3, ErrorCode::ParseError,
            path + ": need a header plus at least 2 item rows");
    const auto& header = file.rows[0];
    require(header.size() == schema.size(), ErrorCode::ColumnMismatch,
            path + ": has " + std::to_string(header.size()) + " columns, schema has " +
                std::to_string(schema.size()) + " labels");
    std::vector<Eigen::Index> dest(header.size());
    std::set<std::string> seen;
    for (size_t j = 0; j < header.size(); ++j) {
        int idx = schema.index_of(header[j]);
        require(idx >= 0, ErrorCode::ColumnMismatch,
                path + ": column '" + header[j] + "' is not a schema label");
        require(seen.insert(header[j]).second, ErrorCode::ColumnMismatch,
                path + ": duplicate column '" + header[j] + "'");
        dest[j] = idx;
    }

    const size_t n_items = file.rows.size() - 1;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n_items), static_cast<Eigen::Index>(schema.size()));
    for (size_t r = 1; r < file.rows.size(); ++r) {
        const auto& row = file.rows[r];
        require(row.size() == header.size(), ErrorCode::ParseError,
                path + ": line " + std::to_string(file.line_numbers[r]) + " has " +
                    std::to_string(row.size()) + " fields");
        for (size_t j = 0; j < row.size(); ++j) {
            try {
                m(static_cast<Eigen::Index>(r - 1), dest[j]) = std::stod(row[j]);
            } catch (const std::exception&) {
                fail(ErrorCode::ParseError, path + ": bad number '" + row[j] + "' at line " +
                                                std::to_string(file.line_numbers[r]));
            }
        }
    }
    return m;
}

void save_split(const FewShotSplit& split, const std::string& path) {
    json doc;
    doc["format"] = "scp-split";
    doc["version"] = 1;
    doc["k"] = split.k;
    doc["seed"] = split.seed;
    auto ids = [](const std::vector<Example>& part) {
        std::vector<std::string> out;
        out.reserve(part.size());
        for (const auto& ex : part) out.push_back(ex.source_id);
        return out;
    };
    doc["train"] = ids(split.train);
    doc["validation"] = ids(split.validation);
    doc["test"] = ids(split.test);
    write_text_file(path, doc.dump(2) + "\n");
}

FewShotSplit load_split(const std::string& path, const std::vector<Example>& train_pool,
                        const std::vector<Example>& test_pool) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        fail(ErrorCode::ParseError, path + ": " + e.what());
    }
    require(doc.value("format", "") == "scp-split", ErrorCode::ParseError,
            path + ": not a split artifact");
    require(doc.value("version", 0) == 1, ErrorCode::VersionMismatch,
            path + ": unsupported split version");

    std::unordered_map<std::string, const Example*> train_by_id, test_by_id;
    for (const auto& ex : train_pool) train_by_id.emplace(ex.source_id, &ex);
    for (const auto& ex : test_pool) test_by_id.emplace(ex.source_id, &ex);

    auto resolve = [&](const char* key, const auto& by_id) {
        std::vector<Example> out;
        for (const auto& id : doc.at(key)) {
            auto it = by_id.find(id.template get<std::string>());
            require(it != by_id.end(), ErrorCode::ParseError,
                    path + ": split id '" + id.template get<std::string>() +
                        "' not found in the corpus");
            out.push_back(*it->second);
        }
        return out;
    };

    FewShotSplit split;
    split.k = doc.at("k").get<int>();
    split.seed = doc.at("seed").get<uint64_t>();
    split.train = resolve("train", train_by_id);
    split.validation = resolve("validation", train_by_id);
    split.test = resolve("test", test_by_id);
    return split;
}

}  // namespace scp
