#ifndef DEEPLCP_BASELINES_HPP
#define DEEPLCP_BASELINES_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "deeplcp/matrix.hpp"
#include "deeplcp/nn.hpp"
#include "deeplcp/records.hpp"
#include "deeplcp/semantic.hpp"

namespace deeplcp {

inline constexpr std::size_t kFeatureCount = kReducedRows;

using FeatureVector18 = std::array<double, kFeatureCount>;

// Row sums of a reduced matrix. Throws ShapeError for other shapes.
FeatureVector18 featurize(const Matrix& reduced);
FeatureVector18 featurize(const SemanticMatrix& reduced);

// The classical baselines work on any fixed dimension; the pipeline feeds
// them 18-dimensional row-sum features.
struct Sample {
    std::vector<double> features;
    Label label = Label::affected;
};

std::vector<double> to_features(const FeatureVector18& f);

// ---------------------------------------------------------------------------
// k nearest neighbours
// ---------------------------------------------------------------------------

struct KnnResult {
    Label label = Label::affected;
    double score = 0.0;  // fraction of the k neighbours labelled "affected"
    std::vector<std::size_t> neighbours;  // training indices, nearest first
};

class KnnIndex {
public:
    explicit KnnIndex(std::vector<Sample> samples) : samples_(std::move(samples)) {}

    std::size_t size() const noexcept { return samples_.size(); }
    const std::vector<Sample>& samples() const noexcept { return samples_; }

    // Euclidean distance; equal distances go to the lower training index.
    // Majority vote; k must be odd so the vote cannot tie.
    // Throws EmptyIndex, KTooLarge, ConfigError for even k (including 0).
    KnnResult predict(std::span<const double> query, std::size_t k) const;

private:
    std::vector<Sample> samples_;
};

// ---------------------------------------------------------------------------
// CART decision tree
// ---------------------------------------------------------------------------

struct TreeParams {
    std::size_t max_depth = 8;
    std::size_t min_leaf = 1;
};

struct TreeNode {
    // Internal node: go left when x[feature] <= threshold.
    std::size_t feature = 0;
    double threshold = 0.0;
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;
    // Leaf (and, for inspection, every internal node): class counts.
    std::size_t affected = 0;
    std::size_t unaffected = 0;

    bool is_leaf() const noexcept { return !left; }
    double affected_fraction() const noexcept;
    std::size_t depth() const noexcept;
    std::size_t leaf_count() const noexcept;
};

struct TreePrediction {
    Label label = Label::affected;
    double probability = 0.0;  // fraction of "affected" in the leaf
};

// Greedy Gini splits at midpoints between sorted distinct values; the first
// (feature index, threshold) among equally good splits wins. A node becomes a
// leaf when it is pure, at max_depth, or no split strictly lowers the weighted
// Gini impurity while keeping min_leaf samples on each side. Throws EmptyData.
std::unique_ptr<TreeNode> tree_fit(std::span<const Sample> data, const TreeParams& params);
TreePrediction tree_predict(const TreeNode& tree, std::span<const double> query);

double gini(std::size_t affected, std::size_t unaffected);

// ---------------------------------------------------------------------------
// Random forest
// ---------------------------------------------------------------------------

struct ForestParams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 8;
    std::size_t min_leaf = 1;
    double feature_frac = 0.25;  // fraction of features considered per split
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

struct Forest {
    std::vector<std::unique_ptr<TreeNode>> trees;
    std::vector<std::uint64_t> tree_seeds;  // seed + tree index
};

struct ForestPrediction {
    Label label = Label::unaffected;
    double vote_fraction = 0.0;  // fraction of trees voting "affected"
};

Forest forest_fit(std::span<const Sample> data, const ForestParams& params);
// Majority vote; a tied vote goes to "unaffected".
ForestPrediction forest_predict(const Forest& forest, std::span<const double> query);

// Tree fitting with per-split feature subsampling, shared by the forest.
std::unique_ptr<TreeNode> tree_fit_subsampled(std::span<const Sample> data, const TreeParams& params,
                                              double feature_frac, std::uint64_t seed);

// ---------------------------------------------------------------------------
// ANN: dense 18 -> 10 (ReLU) -> dropout -> 2 (softmax)
// ---------------------------------------------------------------------------

inline constexpr std::size_t kAnnHidden = 10;

struct AnnConfig {
    std::size_t epochs = 200;
    double dropout = 0.75;  // drop probability at the hidden layer
    double learning_rate = 1e-3;
    std::size_t batch_size = 16;
    OptimizerKind optimizer = OptimizerKind::adam;
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError
};

struct AnnModel {
    std::size_t inputs = kFeatureCount;
    std::vector<double> w1;  // hidden x inputs
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // 2 x hidden
    std::vector<double> b2;  // 2
    double dropout = 0.75;

    std::vector<std::span<double>> tensors();
    std::vector<std::span<const double>> tensors() const;

    friend bool operator==(const AnnModel&, const AnnModel&) = default;
};

AnnModel ann_init(std::size_t inputs, const AnnConfig& config);

struct AnnCache {
    std::vector<double> input;
    std::vector<double> hidden_pre;
    std::vector<double> hidden;  // after ReLU and mask
    std::array<double, kClassCount> logits{};
    Prediction prediction;
};

// mask: per hidden unit multiplier (0 or 1/(1-dropout) in training, empty for
// inference, which uses no scaling).
AnnCache ann_forward(const AnnModel& model, std::span<const double> input, std::span<const double> mask = {});
AnnModel ann_backward(const AnnModel& model, const AnnCache& cache, std::span<const double> mask, Label label);

AnnModel ann_fit(std::span<const Sample> data, const AnnConfig& config);
Prediction ann_predict(const AnnModel& model, std::span<const double> input);

}  // namespace deeplcp

#endif  // DEEPLCP_BASELINES_HPP
