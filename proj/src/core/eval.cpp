#include "core/eval.hpp"

#include <nlohmann/json.hpp>

#include "core/error.hpp"
#include "core/tsv.hpp"

namespace scp {

namespace {

int argmax_lowest_index(const Eigen::VectorXd& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i)
        if (v(i) > v(best)) best = i;
    return best;
}

}  // namespace

int predict_label(const std::string& text, const Model& model) {
    const ReferenceEncoder enc = model.encoder();
    const TargetMode mode = model.train_config.target_mode;
    const ChainTemplates templates = chain_templates(model.train_config, model.schema);
    ChainBuilder builder(text, model.schema, &templates);
    Eigen::VectorXd final_dist;
    for (size_t t = 0; t < 4; ++t) {
        StepTargetVocab tv = step_target_vocab(model.schema, mode, t, model.vocab);
        ad::Tape tape;
        auto tp = enc.register_params(tape, model.params, false);
        std::vector<int> ids = model.vocab.encode(builder.current().text);
        auto sf = enc.forward_step(tape, tp, ids, t);
        Eigen::VectorXd mask_hidden = tape.value(sf.mask_hidden).row(0);
        Eigen::VectorXd dist = mask_label_distribution(mask_hidden, model.params.at("head.w"),
                                                       model.params.at("head.b"), tv.token_ids);
        const int pick = argmax_lowest_index(dist);
        if (t < 3) {
            builder.advance(tv.words[static_cast<size_t>(pick)]);
        } else {
            final_dist = dist;
        }
    }
    return argmax_lowest_index(final_dist);
}

Eigen::VectorXd represent(const std::string& text, const Model& model) {
    const ReferenceEncoder enc = model.encoder();
    // h comes from the configured step of a chain whose earlier masks are
    // greedily predicted, mirroring inference-time conditions.
    const TargetMode mode = model.train_config.target_mode;
    const ChainTemplates templates = chain_templates(model.train_config, model.schema);
    ChainBuilder builder(text, model.schema, &templates);
    for (int t = 0; t < model.encoder_config.h_step; ++t) {
        StepTargetVocab tv = step_target_vocab(model.schema, mode, static_cast<size_t>(t),
                                               model.vocab);
        ad::Tape tape;
        auto tp = enc.register_params(tape, model.params, false);
        auto sf = enc.forward_step(tape, tp, model.vocab.encode(builder.current().text),
                                   static_cast<size_t>(t));
        Eigen::VectorXd mask_hidden = tape.value(sf.mask_hidden).row(0);
        Eigen::VectorXd dist = mask_label_distribution(mask_hidden, model.params.at("head.w"),
                                                       model.params.at("head.b"), tv.token_ids);
        builder.advance(tv.words[static_cast<size_t>(argmax_lowest_index(dist))]);
    }
    ad::Tape tape;
    auto tp = enc.register_params(tape, model.params, false);
    auto sf = enc.forward_step(tape, tp, model.vocab.encode(builder.current().text),
                               static_cast<size_t>(model.encoder_config.h_step));
    auto h = enc.h_from_cls(tape, tp, sf.cls_hidden);
    if (model.train_config.normalize_h) h = tape.l2_normalize_row(h);
    return tape.value(h).row(0);
}

EvalReport evaluate(const std::vector<Example>& examples, const Model& model) {
    require(!examples.empty(), ErrorCode::EmptyInput, "no examples to evaluate");
    std::vector<int> gold, predicted;
    gold.reserve(examples.size());
    predicted.reserve(examples.size());
    for (const auto& ex : examples) {
        gold.push_back(model.schema.require_index(ex.label));
        predicted.push_back(predict_label(ex.text, model));
    }
    return metrics_from_predictions(gold, predicted, model.schema.size());
}

EvalReport metrics_from_predictions(const std::vector<int>& gold, const std::vector<int>& predicted,
                                    size_t n_classes) {
    require(gold.size() == predicted.size(), ErrorCode::LengthMismatch,
            "gold and prediction lists differ in length");
    require(!gold.empty(), ErrorCode::EmptyInput, "no predictions");

    EvalReport report;
    report.n = static_cast<int>(gold.size());
    const auto c = static_cast<Eigen::Index>(n_classes);
    report.confusion = Eigen::MatrixXi::Zero(c, c);
    for (size_t i = 0; i < gold.size(); ++i) {
        require(gold[i] >= 0 && gold[i] < static_cast<int>(n_classes), ErrorCode::UnknownLabel,
                "gold label index out of range");
        require(predicted[i] >= 0 && predicted[i] < static_cast<int>(n_classes),
                ErrorCode::UnknownLabel, "predicted label index out of range");
        report.confusion(gold[i], predicted[i]) += 1;
    }

    report.accuracy =
        static_cast<double>(report.confusion.trace()) / static_cast<double>(report.n);

    report.per_class_f1.assign(n_classes, 0.0);
    report.class_present.assign(n_classes, false);
    double f1_sum = 0.0;
    int n_present = 0;
    for (Eigen::Index i = 0; i < c; ++i) {
        const int tp = report.confusion(i, i);
        const int gold_count = report.confusion.row(i).sum();
        const int pred_count = report.confusion.col(i).sum();
        if (gold_count == 0 && pred_count == 0) continue;  // absent class: excluded from the mean
        report.class_present[static_cast<size_t>(i)] = true;
        ++n_present;
        // Present class with zero precision+recall scores 0.
        double f1 = 0.0;
        if (tp > 0) {
            const double precision = static_cast<double>(tp) / static_cast<double>(pred_count);
            const double recall = static_cast<double>(tp) / static_cast<double>(gold_count);
            f1 = 2.0 * precision * recall / (precision + recall);
        }
        report.per_class_f1[static_cast<size_t>(i)] = f1;
        f1_sum += f1;
    }
    report.macro_f1 = n_present > 0 ? f1_sum / static_cast<double>(n_present) : 0.0;
    return report;
}

void save_report(const EvalReport& report, const LabelSchema& schema, const std::string& path) {
    nlohmann::json j;
    j["accuracy"] = report.accuracy;
    j["macro_f1"] = report.macro_f1;
    j["n"] = report.n;
    nlohmann::json per_class = nlohmann::json::object();
    for (size_t i = 0; i < report.per_class_f1.size(); ++i)
        if (report.class_present[i]) per_class[schema.label(i)] = report.per_class_f1[i];
    j["per_class_f1"] = per_class;
    std::vector<std::vector<int>> confusion;
    for (Eigen::Index i = 0; i < report.confusion.rows(); ++i) {
        std::vector<int> row;
        for (Eigen::Index k = 0; k < report.confusion.cols(); ++k)
            row.push_back(report.confusion(i, k));
        confusion.push_back(std::move(row));
    }
    j["confusion"] = confusion;
    j["labels"] = schema.labels();
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace scp
