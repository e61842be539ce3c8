#include "core/encoder.hpp"

#include <cmath>
#include <set>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace scp {

Eigen::MatrixXd& Params::at(const std::string& name) {
    for (auto& [n, t] : tensors)
        if (n == name) return t;
    fail(ErrorCode::Internal, "unknown parameter tensor " + name);
}

const Eigen::MatrixXd& Params::at(const std::string& name) const {
    for (const auto& [n, t] : tensors)
        if (n == name) return t;
    fail(ErrorCode::Internal, "unknown parameter tensor " + name);
}

bool Params::operator==(const Params& other) const {
    if (tensors.size() != other.tensors.size()) return false;
    for (size_t i = 0; i < tensors.size(); ++i) {
        if (tensors[i].first != other.tensors[i].first) return false;
        if (tensors[i].second.rows() != other.tensors[i].second.rows() ||
            tensors[i].second.cols() != other.tensors[i].second.cols())
            return false;
        if (tensors[i].second != other.tensors[i].second) return false;
    }
    return true;
}

int StepTargetVocab::index_of(const std::string& word) const {
    for (size_t i = 0; i < words.size(); ++i)
        if (words[i] == word) return static_cast<int>(i);
    return -1;
}

StepTargetVocab step_target_vocab(const LabelSchema& schema, TargetMode mode, size_t step,
                                  const Vocabulary& vocab) {
    require(step < 4, ErrorCode::InvalidArgument, "chain steps are 0..3");
    StepTargetVocab out;
    if (mode == TargetMode::Literal || step == 3) {
        // One slot per label, in schema order.
        for (size_t i = 0; i < schema.size(); ++i) out.words.push_back(schema.verbalizer(i));
    } else {
        require(schema.has_hierarchy(), ErrorCode::MissingHierarchy,
                "hierarchy target mode requires a schema hierarchy mapping");
        std::set<std::string> seen;
        for (size_t i = 0; i < schema.size(); ++i) {
            const HierarchyEntry& h = schema.hierarchy(i);
            const std::string& w = step == 0 ? h.basic : step == 1 ? h.secondary : h.tertiary;
            if (seen.insert(w).second) out.words.push_back(w);
        }
    }
    for (const auto& w : out.words) {
        int id = vocab.lookup(w);
        require(id >= 0, ErrorCode::UnknownVerbalizerToken,
                "verbalizer word '" + w + "' is not in the encoder vocabulary");
        out.token_ids.push_back(id);
    }
    return out;
}

ReferenceEncoder::ReferenceEncoder(EncoderConfig config, const Vocabulary& vocab, int n_classes)
    : config_(config), vocab_(vocab), n_classes_(n_classes) {
    require(config_.hidden_dim >= n_classes_, ErrorCode::DimensionTooSmall,
            "hidden_dim must be at least the class count for the [CLS] slice");
    require(config_.hidden_dim > 0 && config_.ffn_dim > 0 && config_.n_layers > 0,
            ErrorCode::InvalidArgument, "encoder dimensions must be positive");
    require(config_.max_sequence_length > 0, ErrorCode::InvalidArgument,
            "max_sequence_length must be positive");
    require(config_.h_step >= 0 && config_.h_step < 4, ErrorCode::InvalidArgument,
            "h_step must be a chain step in 0..3");
}

Params ReferenceEncoder::init_params() const {
    Rng rng(derive_seed(config_.seed, "init"));
    const int d = config_.hidden_dim;
    const int f = config_.ffn_dim;
    const auto V = static_cast<int>(vocab_.size());
    const int L = config_.max_sequence_length;

    auto normal = [&rng](int rows, int cols, double sigma) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal(0.0, sigma);
        return m;
    };

    // Small init keeps the blocks near-linear and attention near-uniform at
    // the start, which trains fastest under plain SGD at this scale.
    constexpr double kEmbSigma = 0.2;
    constexpr double kWeightSigma = 0.1;

    Params p;
    p.tensors.emplace_back("tok_emb", normal(V, d, kEmbSigma));
    p.tensors.emplace_back("pos_emb", normal(L, d, kEmbSigma));
    for (int l = 0; l < config_.n_layers; ++l) {
        const std::string pre = "l" + std::to_string(l) + ".";
        p.tensors.emplace_back(pre + "ln1.g", Eigen::MatrixXd::Ones(1, d));
        p.tensors.emplace_back(pre + "ln1.b", Eigen::MatrixXd::Zero(1, d));
        p.tensors.emplace_back(pre + "attn.wq", normal(d, d, kWeightSigma));
        p.tensors.emplace_back(pre + "attn.bq", Eigen::MatrixXd::Zero(1, d));
        p.tensors.emplace_back(pre + "attn.wk", normal(d, d, kWeightSigma));
        p.tensors.emplace_back(pre + "attn.bk", Eigen::MatrixXd::Zero(1, d));
        p.tensors.emplace_back(pre + "attn.wv", normal(d, d, kWeightSigma));
        p.tensors.emplace_back(pre + "attn.bv", Eigen::MatrixXd::Zero(1, d));
        p.tensors.emplace_back(pre + "attn.wo", normal(d, d, kWeightSigma));
        p.tensors.emplace_back(pre + "attn.bo", Eigen::MatrixXd::Zero(1, d));
        p.tensors.emplace_back(pre + "ln2.g", Eigen::MatrixXd::Ones(1, d));
        p.tensors.emplace_back(pre + "ln2.b", Eigen::MatrixXd::Zero(1, d));
        p.tensors.emplace_back(pre + "ffn.w1", normal(d, f, kWeightSigma));
        p.tensors.emplace_back(pre + "ffn.b1", Eigen::MatrixXd::Zero(1, f));
        p.tensors.emplace_back(pre + "ffn.w2", normal(f, d, kWeightSigma));
        p.tensors.emplace_back(pre + "ffn.b2", Eigen::MatrixXd::Zero(1, d));
    }
    p.tensors.emplace_back("final_ln.g", Eigen::MatrixXd::Ones(1, d));
    p.tensors.emplace_back("final_ln.b", Eigen::MatrixXd::Zero(1, d));
    // Zero head: the untrained mask distribution is exactly uniform.
    p.tensors.emplace_back("head.w", Eigen::MatrixXd::Zero(d, V));
    p.tensors.emplace_back("head.b", Eigen::MatrixXd::Zero(1, V));
    // Identity projection: projection mode equals slice mode at initialization.
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(d, n_classes_);
    proj.topRows(n_classes_) = Eigen::MatrixXd::Identity(n_classes_, n_classes_);
    p.tensors.emplace_back("proj.w", std::move(proj));
    p.tensors.emplace_back("proj.b", Eigen::MatrixXd::Zero(1, n_classes_));
    return p;
}

ad::Tape::Var ReferenceEncoder::TapedParams::at(const std::string& name) const {
    for (size_t i = 0; i < params->tensors.size(); ++i)
        if (params->tensors[i].first == name) return vars[i];
    fail(ErrorCode::Internal, "unknown parameter tensor " + name);
}

ReferenceEncoder::TapedParams ReferenceEncoder::register_params(ad::Tape& tape,
                                                                const Params& params,
                                                                bool trainable) const {
    TapedParams tp;
    tp.params = &params;
    tp.vars.reserve(params.tensors.size());
    for (const auto& [name, tensor] : params.tensors)
        tp.vars.push_back(trainable ? tape.input(tensor) : tape.constant(tensor));
    return tp;
}

size_t ReferenceEncoder::locate_mask(const std::vector<int>& token_ids, size_t step_index) const {
    require(static_cast<int>(token_ids.size()) <= config_.max_sequence_length,
            ErrorCode::SequenceTooLong,
            "step " + std::to_string(step_index + 1) + " tokenizes to " +
                std::to_string(token_ids.size()) + " tokens, limit " +
                std::to_string(config_.max_sequence_length));
    size_t mask_pos = 0, found = 0;
    for (size_t i = 0; i < token_ids.size(); ++i) {
        if (token_ids[i] == vocab_.mask_id()) {
            mask_pos = i;
            ++found;
        }
    }
    require(found != 0, ErrorCode::MaskNotFound,
            "step " + std::to_string(step_index + 1) + " has no mask token");
    require(found == 1, ErrorCode::MultipleMasks,
            "step " + std::to_string(step_index + 1) + " has " + std::to_string(found) +
                " mask tokens");
    return mask_pos;
}

ReferenceEncoder::StepForward ReferenceEncoder::forward_step(ad::Tape& tape, const TapedParams& p,
                                                             const std::vector<int>& token_ids,
                                                             size_t step_index) const {
    const size_t mask_pos = locate_mask(token_ids, step_index);
    const int n = static_cast<int>(token_ids.size());
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(config_.hidden_dim));

    std::vector<int> positions(token_ids.size());
    for (int i = 0; i < n; ++i) positions[static_cast<size_t>(i)] = i;

    auto x = tape.add(tape.gather_rows(p.at("tok_emb"), token_ids),
                      tape.gather_rows(p.at("pos_emb"), positions));
    for (int l = 0; l < config_.n_layers; ++l) {
        const std::string pre = "l" + std::to_string(l) + ".";
        auto a = tape.layer_norm_rows(x, p.at(pre + "ln1.g"), p.at(pre + "ln1.b"));
        auto q = tape.add_rowvec(tape.matmul(a, p.at(pre + "attn.wq")), p.at(pre + "attn.bq"));
        auto k = tape.add_rowvec(tape.matmul(a, p.at(pre + "attn.wk")), p.at(pre + "attn.bk"));
        auto v = tape.add_rowvec(tape.matmul(a, p.at(pre + "attn.wv")), p.at(pre + "attn.bv"));
        auto att = tape.row_softmax(tape.scale(tape.matmul_nt(q, k), inv_sqrt_d));
        auto o = tape.add_rowvec(tape.matmul(tape.matmul(att, v), p.at(pre + "attn.wo")),
                                 p.at(pre + "attn.bo"));
        x = tape.add(x, o);
        auto a2 = tape.layer_norm_rows(x, p.at(pre + "ln2.g"), p.at(pre + "ln2.b"));
        auto f1 = tape.tanh_(tape.add_rowvec(tape.matmul(a2, p.at(pre + "ffn.w1")),
                                             p.at(pre + "ffn.b1")));
        auto f2 = tape.add_rowvec(tape.matmul(f1, p.at(pre + "ffn.w2")), p.at(pre + "ffn.b2"));
        x = tape.add(x, f2);
    }
    auto final_h = tape.layer_norm_rows(x, p.at("final_ln.g"), p.at("final_ln.b"));

    StepForward out;
    out.mask_hidden = tape.row(final_h, static_cast<int>(mask_pos));
    out.mask_logits =
        tape.add_rowvec(tape.matmul(out.mask_hidden, p.at("head.w")), p.at("head.b"));
    out.cls_hidden = tape.row(final_h, 0);
    return out;
}

ad::Tape::Var ReferenceEncoder::h_from_cls(ad::Tape& tape, const TapedParams& p,
                                           ad::Tape::Var cls_hidden) const {
    if (config_.h_mode == HMode::Slice) return tape.cols(cls_hidden, 0, n_classes_);
    return tape.add_rowvec(tape.matmul(cls_hidden, p.at("proj.w")), p.at("proj.b"));
}

EncoderOutput ReferenceEncoder::encode_chain(const PromptChain& chain, const Params& params,
                                             const LabelSchema& schema, TargetMode mode) const {
    require(chain.steps.size() == 4, ErrorCode::InvalidArgument, "chain must have 4 steps");
    EncoderOutput out;
    for (size_t t = 0; t < 4; ++t) {
        ad::Tape tape;
        TapedParams tp = register_params(tape, params, false);
        std::vector<int> ids = vocab_.encode(chain.steps[t].text);
        StepForward sf = forward_step(tape, tp, ids, t);

        StepTargetVocab tv = step_target_vocab(schema, mode, t, vocab_);
        Eigen::VectorXd mask_hidden = tape.value(sf.mask_hidden).row(0);
        out.step_distributions[t] = mask_label_distribution(mask_hidden, params.at("head.w"),
                                                            params.at("head.b"), tv.token_ids);

        if (static_cast<int>(t) == config_.h_step) {
            out.cls_hidden = tape.value(sf.cls_hidden).row(0);
            const Eigen::MatrixXd& pw = params.at("proj.w");
            const Eigen::MatrixXd& pb = params.at("proj.b");
            out.h = cls_representation(out.cls_hidden, n_classes_, config_.h_mode, &pw, &pb);
        }
    }
    return out;
}

Eigen::VectorXd mask_label_distribution(const Eigen::VectorXd& hidden_at_mask,
                                        const Eigen::MatrixXd& head_w,
                                        const Eigen::MatrixXd& head_b,
                                        const std::vector<int>& target_token_ids) {
    require(hidden_at_mask.size() == head_w.rows(), ErrorCode::DimensionTooSmall,
            "hidden dimension does not match the head");
    require(!target_token_ids.empty(), ErrorCode::InvalidArgument, "no target tokens");
    Eigen::VectorXd logits = (hidden_at_mask.transpose() * head_w + head_b.row(0)).transpose();
    for (int id : target_token_ids)
        require(id >= 0 && id < logits.size(), ErrorCode::UnknownVerbalizerToken,
                "verbalizer token id out of vocabulary range");
    const double m = logits.maxCoeff();
    Eigen::VectorXd probs = (logits.array() - m).exp();
    probs /= probs.sum();
    Eigen::VectorXd restricted(static_cast<Eigen::Index>(target_token_ids.size()));
    for (size_t j = 0; j < target_token_ids.size(); ++j)
        restricted(static_cast<Eigen::Index>(j)) = probs(target_token_ids[j]);
    restricted /= restricted.sum();
    return restricted;
}

Eigen::VectorXd cls_representation(const Eigen::VectorXd& cls_hidden, int n_classes, HMode mode,
                                   const Eigen::MatrixXd* proj_w, const Eigen::MatrixXd* proj_b) {
    require(cls_hidden.size() >= n_classes, ErrorCode::DimensionTooSmall,
            "[CLS] hidden vector shorter than the class count");
    if (mode == HMode::Slice) return cls_hidden.head(n_classes);
    require(proj_w && proj_w->rows() == cls_hidden.size() && proj_w->cols() == n_classes,
            ErrorCode::DimensionTooSmall, "projection shape mismatch");
    Eigen::VectorXd out = (cls_hidden.transpose() * (*proj_w)).transpose();
    if (proj_b) out += proj_b->row(0).transpose();
    return out;
}

std::vector<int> resolve_verbalizer_ids(const MlmBackend& backend, const LabelSchema& schema,
                                        const std::function<void(const std::string&)>& warn_once) {
    std::vector<int> ids;
    for (size_t i = 0; i < schema.size(); ++i) {
        const std::string& word = schema.verbalizer(i);
        std::vector<int> sub = backend.lookup_word(word);
        require(!sub.empty(), ErrorCode::UnknownVerbalizerToken,
                "verbalizer word '" + word + "' unknown to the backend");
        if (sub.size() > 1 && warn_once)
            warn_once("verbalizer '" + word + "' (label " + schema.label(i) +
                      ") splits into " + std::to_string(sub.size()) +
                      " sub-tokens; using the first");
        ids.push_back(sub[0]);
    }
    return ids;
}

}  // namespace scp
