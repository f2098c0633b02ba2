#ifndef DEEPLCP_PIPELINE_HPP
#define DEEPLCP_PIPELINE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>
#include <string_view>

#include "deeplcp/baselines.hpp"
#include "deeplcp/metrics.hpp"
#include "deeplcp/nn.hpp"
#include "deeplcp/semantic.hpp"
#include "deeplcp/synth.hpp"

namespace deeplcp {

// Reference figures measured on a hospital data set that is not available.
// Printed in the report header only; nothing here reproduces them.
struct ReferenceFigures {
    static constexpr double validation_accuracy = 94.59;
    static constexpr double train_accuracy = 93.88;
    static constexpr double validation_loss = 0.1699;
    static constexpr double train_loss = 0.1773;
    static constexpr double auc = 0.99;
    static constexpr double knn_accuracy = 86.48;
    static constexpr double tree_accuracy = 93.69;
    static constexpr double forest_accuracy = 91.89;
    static constexpr double ann_accuracy = 85.59;
};

enum class BaselineKind { knn, tree, forest, ann };
inline constexpr std::array<BaselineKind, 4> kBaselineKinds{BaselineKind::knn, BaselineKind::tree,
                                                            BaselineKind::forest, BaselineKind::ann};
std::string_view to_string(BaselineKind kind);
std::optional<BaselineKind> parse_baseline_kind(std::string_view s);

struct BaselineOptions {
    std::size_t knn_k = 5;
    TreeParams tree{};
    ForestParams forest{};
    AnnConfig ann{};
};

// Fits one baseline on `train` and returns p_affected for every `test` sample.
std::vector<double> baseline_scores(BaselineKind kind, std::span<const Sample> train, std::span<const Sample> test,
                                    const BaselineOptions& options, std::uint64_t seed);

struct PipelineOptions {
    SynthConfig synth;
    TrainConfig train;
    BaselineOptions baselines;
    bool stratified = true;
    bool run_baselines = true;
};

struct PipelineResult {
    std::uint64_t seed = 0;
    double intercept = 0.0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::size_t affected = 0;
    double bayes_auc = 0.0;  // test-set AUC of the planted noise-free probabilities
    SetScore cnn_train;
    EvalReport cnn;
    TrainHistory history;
    std::array<std::optional<EvalReport>, 4> baselines;  // indexed like kBaselineKinds
};

// Generate, split, train and evaluate. Every random stream is derived from
// `seed`, which replaces options.synth.seed.
PipelineResult run_pipeline(const PipelineOptions& options, const SemanticContext& ctx, std::uint64_t seed);

// "<prefix>.accuracy=..." style lines for one report (ROC points excluded).
void write_eval_report(std::ostream& out, std::string_view prefix, const EvalReport& r);

// key=value lines: reference constants, then the measured results.
void write_pipeline_report(std::ostream& out, const PipelineResult& result);

}  // namespace deeplcp

#endif  // DEEPLCP_PIPELINE_HPP
