#include "core/model.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "core/error.hpp"

namespace scp {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'S', 'C', 'P', 'C', 'K', 'P', 'T', '1'};
constexpr uint32_t kVersion = 1;

json schema_to_json(const LabelSchema& schema) {
    json j;
    j["labels"] = schema.labels();
    std::vector<std::string> verbalizer;
    for (size_t i = 0; i < schema.size(); ++i) verbalizer.push_back(schema.verbalizer(i));
    j["verbalizer"] = verbalizer;
    if (schema.has_hierarchy()) {
        std::vector<std::vector<std::string>> h;
        for (size_t i = 0; i < schema.size(); ++i) {
            const auto& e = schema.hierarchy(i);
            h.push_back({e.basic, e.secondary, e.tertiary});
        }
        j["hierarchy"] = h;
    }
    j["mask_token"] = schema.mask_token();
    return j;
}

LabelSchema schema_from_json(const json& j) {
    std::vector<HierarchyEntry> hierarchy;
    if (j.contains("hierarchy")) {
        for (const auto& e : j.at("hierarchy"))
            hierarchy.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>(),
                                 e.at(2).get<std::string>()});
    }
    return LabelSchema(j.at("labels").get<std::vector<std::string>>(),
                       j.at("verbalizer").get<std::vector<std::string>>(), std::move(hierarchy),
                       j.at("mask_token").get<std::string>());
}

json encoder_config_to_json(const EncoderConfig& c) {
    return json{{"hidden_dim", c.hidden_dim},
                {"ffn_dim", c.ffn_dim},
                {"n_layers", c.n_layers},
                {"max_sequence_length", c.max_sequence_length},
                {"seed", c.seed},
                {"h_mode", to_string(c.h_mode)},
                {"h_step", c.h_step}};
}

EncoderConfig encoder_config_from_json(const json& j) {
    EncoderConfig c;
    c.hidden_dim = j.at("hidden_dim").get<int>();
    c.ffn_dim = j.at("ffn_dim").get<int>();
    c.n_layers = j.at("n_layers").get<int>();
    c.max_sequence_length = j.at("max_sequence_length").get<int>();
    c.seed = j.at("seed").get<uint64_t>();
    c.h_mode = h_mode_from_string(j.at("h_mode").get<std::string>());
    c.h_step = j.at("h_step").get<int>();
    return c;
}

json train_config_to_json(const TrainConfig& c) {
    return json{{"learning_rate", c.learning_rate},
                {"batch_size", c.batch_size},
                {"tau", c.tau},
                {"epochs", c.epochs},
                {"seed", c.seed},
                {"scope", to_string(c.scope)},
                {"fill_policy", to_string(c.fill_policy)},
                {"target_mode", to_string(c.target_mode)},
                {"normalize_h", c.normalize_h},
                {"optimizer", to_string(c.optimizer)},
                {"early_stop_patience", c.early_stop_patience},
                {"memory_capacity", c.memory_capacity},
                {"template_fragments", c.template_fragments}};
}

TrainConfig train_config_from_json(const json& j) {
    TrainConfig c;
    c.learning_rate = j.at("learning_rate").get<double>();
    c.batch_size = j.at("batch_size").get<int>();
    c.tau = j.at("tau").get<double>();
    c.epochs = j.at("epochs").get<int>();
    c.seed = j.at("seed").get<uint64_t>();
    c.scope = scope_from_string(j.at("scope").get<std::string>());
    c.fill_policy = fill_policy_from_string(j.at("fill_policy").get<std::string>());
    c.target_mode = target_mode_from_string(j.at("target_mode").get<std::string>());
    c.normalize_h = j.at("normalize_h").get<bool>();
    c.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
    c.early_stop_patience = j.at("early_stop_patience").get<int>();
    c.memory_capacity = j.at("memory_capacity").get<uint64_t>();
    c.template_fragments = j.at("template_fragments").get<std::vector<std::string>>();
    return c;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <typename T>
void put(std::string& buf, const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_string(std::string& buf, const std::string& s) {
    put(buf, static_cast<uint32_t>(s.size()));
    buf.append(s);
}

class Reader {
public:
    Reader(const std::string& data, const std::string& path) : data_(data), path_(path) {}

    template <typename T>
    T get() {
        T v;
        require(pos_ + sizeof(T) <= data_.size(), ErrorCode::CorruptFile, path_ + " is truncated");
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    std::string get_string() {
        auto len = get<uint32_t>();
        require(pos_ + len <= data_.size(), ErrorCode::CorruptFile, path_ + " is truncated");
        std::string s = data_.substr(pos_, len);
        pos_ += len;
        return s;
    }

    size_t pos() const { return pos_; }

private:
    const std::string& data_;
    std::string path_;
    size_t pos_ = 0;
};

}  // namespace

ChainTemplates chain_templates(const TrainConfig& config, const LabelSchema& schema) {
    if (config.template_fragments.empty()) return ChainTemplates::defaults(schema.mask_token());
    require(config.template_fragments.size() == 4, ErrorCode::InvalidArgument,
            "template override needs exactly 4 fragments");
    return ChainTemplates::from_fragments(
        {config.template_fragments[0], config.template_fragments[1],
         config.template_fragments[2], config.template_fragments[3]},
        schema.mask_token());
}

uint64_t Model::architecture_hash() const {
    json j;
    j["encoder"] = encoder_config_to_json(encoder_config);
    j["schema"] = schema_to_json(schema);
    j["vocab"] = vocab.tokens();
    j["target_mode"] = to_string(train_config.target_mode);
    j["fill_policy"] = to_string(train_config.fill_policy);
    j["tau"] = train_config.tau;
    j["normalize_h"] = train_config.normalize_h;
    j["template_fragments"] = train_config.template_fragments;
    return fnv1a(j.dump());
}

void save_checkpoint(const Model& model, const std::string& path) {
    json meta;
    meta["encoder"] = encoder_config_to_json(model.encoder_config);
    meta["train"] = train_config_to_json(model.train_config);
    meta["schema"] = schema_to_json(model.schema);
    meta["vocab"] = model.vocab.tokens();
    meta["global_step"] = model.global_step;
    meta["global_epoch"] = model.global_epoch;

    std::string body;
    put(body, kVersion);
    put(body, model.architecture_hash());
    put_string(body, meta.dump());
    put(body, static_cast<uint32_t>(model.params.tensors.size()));
    for (const auto& [name, tensor] : model.params.tensors) {
        put_string(body, name);
        put(body, static_cast<uint64_t>(tensor.rows()));
        put(body, static_cast<uint64_t>(tensor.cols()));
        body.append(reinterpret_cast<const char*>(tensor.data()),
                    static_cast<size_t>(tensor.size()) * sizeof(double));
    }
    const auto crc = static_cast<uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size())));

    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path);
    out.write(kMagic, sizeof(kMagic));
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.write(reinterpret_cast<const char*>(&crc), sizeof(crc));
    if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

Model load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    require(data.size() > sizeof(kMagic) + sizeof(uint32_t), ErrorCode::CorruptFile,
            path + " is truncated");
    require(std::memcmp(data.data(), kMagic, sizeof(kMagic)) == 0, ErrorCode::CorruptFile,
            path + " is not a checkpoint");

    const std::string body = data.substr(sizeof(kMagic), data.size() - sizeof(kMagic) - 4);
    uint32_t stored_crc;
    std::memcpy(&stored_crc, data.data() + data.size() - 4, 4);
    const auto crc = static_cast<uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size())));
    require(crc == stored_crc, ErrorCode::CorruptFile, path + " fails its checksum");

    Reader r(body, path);
    const auto version = r.get<uint32_t>();
    require(version == kVersion, ErrorCode::VersionMismatch,
            path + " has checkpoint version " + std::to_string(version) + ", expected " +
                std::to_string(kVersion));
    const auto stored_hash = r.get<uint64_t>();

    json meta;
    try {
        meta = json::parse(r.get_string());
    } catch (const json::exception& e) {
        fail(ErrorCode::CorruptFile, path + ": bad metadata: " + e.what());
    }

    Params params;
    const auto n_tensors = r.get<uint32_t>();
    for (uint32_t i = 0; i < n_tensors; ++i) {
        std::string name = r.get_string();
        const auto rows = static_cast<Eigen::Index>(r.get<uint64_t>());
        const auto cols = static_cast<Eigen::Index>(r.get<uint64_t>());
        Eigen::MatrixXd tensor(rows, cols);
        for (Eigen::Index c = 0; c < cols; ++c)
            for (Eigen::Index rr = 0; rr < rows; ++rr) tensor(rr, c) = r.get<double>();
        params.tensors.emplace_back(std::move(name), std::move(tensor));
    }

    Model model{std::move(params),
                encoder_config_from_json(meta.at("encoder")),
                train_config_from_json(meta.at("train")),
                schema_from_json(meta.at("schema")),
                Vocabulary(meta.at("vocab").get<std::vector<std::string>>()),
                meta.at("global_step").get<int64_t>(),
                meta.at("global_epoch").get<int64_t>()};
    require(model.architecture_hash() == stored_hash, ErrorCode::CorruptFile,
            path + ": architecture hash does not match its metadata");
    return model;
}

std::string to_string(SoftclScope v) {
    return v == SoftclScope::Batch ? "batch" : "epoch-memory";
}
std::string to_string(Optimizer v) { return v == Optimizer::Sgd ? "sgd" : "adam"; }
std::string to_string(FillPolicy v) {
    switch (v) {
        case FillPolicy::Gold: return "gold";
        case FillPolicy::Predicted: return "predicted";
        case FillPolicy::UnfilledForbidden: return "unfilled-forbidden";
    }
    return "gold";
}
std::string to_string(TargetMode v) {
    return v == TargetMode::Literal ? "literal" : "hierarchy";
}
std::string to_string(HMode v) { return v == HMode::Slice ? "slice" : "projection"; }

SoftclScope scope_from_string(const std::string& s) {
    if (s == "batch") return SoftclScope::Batch;
    if (s == "epoch-memory") return SoftclScope::EpochMemory;
    fail(ErrorCode::ParseError, "unknown softcl scope '" + s + "'");
}
Optimizer optimizer_from_string(const std::string& s) {
    if (s == "sgd") return Optimizer::Sgd;
    if (s == "adam") return Optimizer::Adam;
    fail(ErrorCode::ParseError, "unknown optimizer '" + s + "'");
}
FillPolicy fill_policy_from_string(const std::string& s) {
    if (s == "gold") return FillPolicy::Gold;
    if (s == "predicted") return FillPolicy::Predicted;
    if (s == "unfilled-forbidden") return FillPolicy::UnfilledForbidden;
    fail(ErrorCode::ParseError, "unknown fill policy '" + s + "'");
}
TargetMode target_mode_from_string(const std::string& s) {
    if (s == "literal") return TargetMode::Literal;
    if (s == "hierarchy") return TargetMode::Hierarchy;
    fail(ErrorCode::ParseError, "unknown target mode '" + s + "'");
}
HMode h_mode_from_string(const std::string& s) {
    if (s == "slice") return HMode::Slice;
    if (s == "projection") return HMode::Projection;
    fail(ErrorCode::ParseError, "unknown h mode '" + s + "'");
}

}  // namespace scp
