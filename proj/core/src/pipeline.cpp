#include "deeplcp/pipeline.hpp"

#include <algorithm>
#include <ostream>

#include "deeplcp/text_format.hpp"

namespace deeplcp {

namespace {

enum : std::uint64_t { kSplitStream = 1, kTrainStream = 2, kBaselineStream = 3 };

}  // namespace

void write_eval_report(std::ostream& out, std::string_view prefix, const EvalReport& r) {
    out << prefix << ".accuracy=" << format_fixed(r.accuracy, 6) << '\n'
        << prefix << ".error_rate=" << format_fixed(r.error_rate, 6) << '\n'
        << prefix << ".loss=" << format_fixed(r.mean_loss, 6) << '\n'
        << prefix << ".auc=" << format_fixed(r.auc, 6) << '\n'
        << prefix << ".tp=" << r.tp << '\n'
        << prefix << ".fp=" << r.fp << '\n'
        << prefix << ".tn=" << r.tn << '\n'
        << prefix << ".fn=" << r.fn << '\n';
}

std::string_view to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::knn: return "knn";
        case BaselineKind::tree: return "tree";
        case BaselineKind::forest: return "forest";
        case BaselineKind::ann: return "ann";
    }
    return "?";
}

std::optional<BaselineKind> parse_baseline_kind(std::string_view s) {
    for (auto k : kBaselineKinds) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

std::vector<double> baseline_scores(BaselineKind kind, std::span<const Sample> train, std::span<const Sample> test,
                                    const BaselineOptions& options, std::uint64_t seed) {
    std::vector<double> scores;
    scores.reserve(test.size());
    switch (kind) {
        case BaselineKind::knn: {
            const KnnIndex index({train.begin(), train.end()});
            for (const auto& s : test) scores.push_back(index.predict(s.features, options.knn_k).score);
            break;
        }
        case BaselineKind::tree: {
            const auto tree = tree_fit(train, options.tree);
            for (const auto& s : test) scores.push_back(tree_predict(*tree, s.features).probability);
            break;
        }
        case BaselineKind::forest: {
            auto params = options.forest;
            params.seed = seed;
            const auto forest = forest_fit(train, params);
            for (const auto& s : test) scores.push_back(forest_predict(forest, s.features).vote_fraction);
            break;
        }
        case BaselineKind::ann: {
            auto config = options.ann;
            config.seed = seed;
            const auto model = ann_fit(train, config);
            for (const auto& s : test) scores.push_back(ann_predict(model, s.features).p_affected);
            break;
        }
    }
    return scores;
}

PipelineResult run_pipeline(const PipelineOptions& options, const SemanticContext& ctx, std::uint64_t seed) {
    PipelineResult result;
    result.seed = seed;

    auto synth = options.synth;
    synth.seed = seed;
    const auto data = generate(synth, ctx);
    result.intercept = data.intercept;
    synth.intercept = data.intercept;

    const auto& records = data.records;
    std::vector<Label> labels;
    labels.reserve(records.size());
    for (const auto& r : records) labels.push_back(*r.label);
    result.affected = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::affected));

    const auto idx = split_indices(records.size(), derive_seed(seed, kSplitStream), synth.train_fraction,
                                   options.stratified ? std::span<const Label>(labels) : std::span<const Label>());
    result.train_size = idx.train.size();
    result.test_size = idx.test.size();

    std::vector<Example> train_set, test_set;
    std::vector<Sample> train_samples, test_samples;
    std::vector<double> truth;
    std::vector<Label> test_labels;
    auto add = [&](std::size_t i, std::vector<Example>& ex, std::vector<Sample>& samples) {
        auto m = ctx.transform(records[i]);
        samples.push_back({to_features(featurize(m)), labels[i]});
        ex.push_back({std::move(m.values), labels[i]});
    };
    for (auto i : idx.train) add(i, train_set, train_samples);
    for (auto i : idx.test) {
        add(i, test_set, test_samples);
        truth.push_back(ground_truth_prob(synth, ctx, records[i]));
        test_labels.push_back(labels[i]);
    }
    result.bayes_auc = evaluate(truth, test_labels).auc;

    auto train_config = options.train;
    train_config.seed = derive_seed(seed, kTrainStream);
    auto trained = train(train_config, train_set, test_set);
    result.cnn_train = score_set(trained.model, train_set);
    std::vector<double> scores;
    scores.reserve(test_set.size());
    for (const auto& e : test_set) scores.push_back(predict(trained.model, e.input).p_affected);
    result.cnn = evaluate(scores, test_labels);
    result.history = std::move(trained.history);

    if (options.run_baselines) {
        for (std::size_t b = 0; b < kBaselineKinds.size(); ++b) {
            const auto s = baseline_scores(kBaselineKinds[b], train_samples, test_samples, options.baselines,
                                           derive_seed(seed, kBaselineStream + b));
            result.baselines[b] = evaluate(s, test_labels);
        }
    }
    return result;
}

void write_pipeline_report(std::ostream& out, const PipelineResult& r) {
    using R = ReferenceFigures;
    out << "reference.note=published figures from the unavailable hospital data set; not reproducible here\n"
        << "reference.cnn.validation_accuracy_pct=" << format_fixed(R::validation_accuracy, 2) << '\n'
        << "reference.cnn.train_accuracy_pct=" << format_fixed(R::train_accuracy, 2) << '\n'
        << "reference.cnn.validation_loss=" << format_fixed(R::validation_loss, 4) << '\n'
        << "reference.cnn.train_loss=" << format_fixed(R::train_loss, 4) << '\n'
        << "reference.cnn.auc=" << format_fixed(R::auc, 2) << '\n'
        << "reference.knn.accuracy_pct=" << format_fixed(R::knn_accuracy, 2) << '\n'
        << "reference.tree.accuracy_pct=" << format_fixed(R::tree_accuracy, 2) << '\n'
        << "reference.forest.accuracy_pct=" << format_fixed(R::forest_accuracy, 2) << '\n'
        << "reference.ann.accuracy_pct=" << format_fixed(R::ann_accuracy, 2) << '\n';
    out << "seed=" << r.seed << '\n'
        << "data.intercept=" << format_fixed(r.intercept, 6) << '\n'
        << "data.records=" << r.train_size + r.test_size << '\n'
        << "data.affected=" << r.affected << '\n'
        << "data.train=" << r.train_size << '\n'
        << "data.test=" << r.test_size << '\n'
        << "bayes.auc=" << format_fixed(r.bayes_auc, 6) << '\n'
        << "cnn.train.accuracy=" << format_fixed(r.cnn_train.accuracy, 6) << '\n'
        << "cnn.train.loss=" << format_fixed(r.cnn_train.loss, 6) << '\n';
    write_eval_report(out, "cnn.test", r.cnn);
    for (std::size_t b = 0; b < kBaselineKinds.size(); ++b) {
        if (r.baselines[b]) write_eval_report(out, std::string(to_string(kBaselineKinds[b])) + ".test", *r.baselines[b]);
    }
}

}  // namespace deeplcp
