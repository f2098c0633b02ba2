#include "deeplcp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deeplcp/error.hpp"
#include "deeplcp/random.hpp"

namespace deeplcp {

FeatureVector18 featurize(const Matrix& reduced) {
    if (reduced.rows() != kReducedRows || reduced.cols() != kWordSlots) {
        throw ShapeError("featurize expects an 18x13 reduced matrix");
    }
    FeatureVector18 f{};
    for (std::size_t r = 0; r < kReducedRows; ++r) {
        const auto row = reduced.row(r);
        f[r] = std::accumulate(row.begin(), row.end(), 0.0);
    }
    return f;
}

FeatureVector18 featurize(const SemanticMatrix& reduced) {
    if (reduced.form != MatrixForm::reduced) throw ShapeError("featurize expects a reduced matrix");
    return featurize(reduced.values);
}

std::vector<double> to_features(const FeatureVector18& f) {
    return {f.begin(), f.end()};
}

// ---------------------------------------------------------------------------
// KNN
// ---------------------------------------------------------------------------

KnnResult KnnIndex::predict(std::span<const double> query, std::size_t k) const {
    if (samples_.empty()) throw EmptyIndex();
    if (k % 2 == 0) throw ConfigError("k must be odd and at least 1");
    if (k > samples_.size()) throw KTooLarge(k, samples_.size());

    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& x = samples_[i].features;
        if (x.size() != query.size()) throw ShapeError("knn query dimension mismatch");
        double d2 = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double diff = x[j] - query[j];
            d2 += diff * diff;
        }
        dist.emplace_back(d2, i);
    }
    // Pairs compare by (distance, index): the lower index wins ties.
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

    KnnResult result;
    std::size_t affected = 0;
    for (std::size_t i = 0; i < k; ++i) {
        result.neighbours.push_back(dist[i].second);
        affected += samples_[dist[i].second].label == Label::affected ? 1 : 0;
    }
    result.score = static_cast<double>(affected) / static_cast<double>(k);
    result.label = 2 * affected > k ? Label::affected : Label::unaffected;
    return result;
}

// ---------------------------------------------------------------------------
// Decision tree
// ---------------------------------------------------------------------------

double gini(std::size_t affected, std::size_t unaffected) {
    const double n = static_cast<double>(affected + unaffected);
    if (n == 0.0) return 0.0;
    const double pa = static_cast<double>(affected) / n;
    const double pu = static_cast<double>(unaffected) / n;
    return 1.0 - pa * pa - pu * pu;
}

double TreeNode::affected_fraction() const noexcept {
    const auto n = affected + unaffected;
    return n == 0 ? 0.0 : static_cast<double>(affected) / static_cast<double>(n);
}

std::size_t TreeNode::depth() const noexcept {
    if (is_leaf()) return 0;
    return 1 + std::max(left->depth(), right->depth());
}

std::size_t TreeNode::leaf_count() const noexcept {
    if (is_leaf()) return 1;
    return left->leaf_count() + right->leaf_count();
}

namespace {

constexpr double kImprovementTolerance = 1e-12;

class TreeBuilder {
public:
    TreeBuilder(std::span<const Sample> data, const TreeParams& params, double feature_frac, std::uint64_t seed)
        : data_(data), params_(params), feature_frac_(feature_frac), rng_(seed) {
        dims_ = data.front().features.size();
        for (const auto& s : data) {
            if (s.features.size() != dims_) throw ShapeError("samples have different dimensions");
        }
    }

    std::unique_ptr<TreeNode> build(std::vector<std::size_t> indices, std::size_t depth) {
        auto node = std::make_unique<TreeNode>();
        for (auto i : indices) (data_[i].label == Label::affected ? node->affected : node->unaffected)++;
        const double parent = gini(node->affected, node->unaffected);
        if (parent == 0.0 || depth >= params_.max_depth || indices.size() < 2 * std::max<std::size_t>(params_.min_leaf, 1)) {
            return node;
        }

        const auto features = candidate_features();
        const double n = static_cast<double>(indices.size());
        double best_score = parent - kImprovementTolerance;
        bool found = false;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;

        std::vector<std::size_t> sorted = indices;
        for (std::size_t f : features) {
            std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
                return data_[a].features[f] < data_[b].features[f];
            });
            std::size_t left_aff = 0, left_un = 0;
            const std::size_t total_aff = node->affected, total_un = node->unaffected;
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                (data_[sorted[i]].label == Label::affected ? left_aff : left_un)++;
                const double here = data_[sorted[i]].features[f];
                const double next = data_[sorted[i + 1]].features[f];
                if (!(here < next)) continue;
                const std::size_t nl = i + 1;
                const std::size_t nr = sorted.size() - nl;
                if (nl < params_.min_leaf || nr < params_.min_leaf) continue;
                const double score = (static_cast<double>(nl) * gini(left_aff, left_un) +
                                      static_cast<double>(nr) * gini(total_aff - left_aff, total_un - left_un)) / n;
                // Strictly better only: earlier (feature, threshold) wins ties.
                if (score < best_score - (found ? kImprovementTolerance : 0.0)) {
                    best_score = score;
                    best_feature = f;
                    best_threshold = here + (next - here) / 2.0;
                    found = true;
                }
            }
        }
        if (!found) return node;

        std::vector<std::size_t> left, right;
        for (auto i : indices) (data_[i].features[best_feature] <= best_threshold ? left : right).push_back(i);
        node->feature = best_feature;
        node->threshold = best_threshold;
        node->left = build(std::move(left), depth + 1);
        node->right = build(std::move(right), depth + 1);
        return node;
    }

private:
    std::vector<std::size_t> candidate_features() {
        std::vector<std::size_t> all(dims_);
        std::iota(all.begin(), all.end(), 0);
        const auto m = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::llround(feature_frac_ * static_cast<double>(dims_))), 1, dims_);
        if (m >= dims_) return all;
        // Partial Fisher-Yates, then ascending order for deterministic tie-breaks.
        for (std::size_t i = 0; i < m; ++i) {
            const auto j = i + static_cast<std::size_t>(rng_.below(dims_ - i));
            std::swap(all[i], all[j]);
        }
        all.resize(m);
        std::sort(all.begin(), all.end());
        return all;
    }

    std::span<const Sample> data_;
    TreeParams params_;
    double feature_frac_;
    Rng rng_;
    std::size_t dims_ = 0;
};

}  // namespace

std::unique_ptr<TreeNode> tree_fit_subsampled(std::span<const Sample> data, const TreeParams& params,
                                              double feature_frac, std::uint64_t seed) {
    if (data.empty()) throw EmptyData();
    if (!(feature_frac > 0.0 && feature_frac <= 1.0)) throw ConfigError("feature_frac must be in (0, 1]");
    std::vector<std::size_t> indices(data.size());
    std::iota(indices.begin(), indices.end(), 0);
    return TreeBuilder(data, params, feature_frac, seed).build(std::move(indices), 0);
}

std::unique_ptr<TreeNode> tree_fit(std::span<const Sample> data, const TreeParams& params) {
    return tree_fit_subsampled(data, params, 1.0, 0);
}

TreePrediction tree_predict(const TreeNode& tree, std::span<const double> query) {
    const TreeNode* node = &tree;
    while (!node->is_leaf()) {
        if (node->feature >= query.size()) throw ShapeError("tree query dimension mismatch");
        node = query[node->feature] <= node->threshold ? node->left.get() : node->right.get();
    }
    const double p = node->affected_fraction();
    return {p >= 0.5 ? Label::affected : Label::unaffected, p};
}

// ---------------------------------------------------------------------------
// Forest
// ---------------------------------------------------------------------------

Forest forest_fit(std::span<const Sample> data, const ForestParams& params) {
    if (data.empty()) throw EmptyData();
    if (params.n_trees == 0) throw ConfigError("forest needs at least one tree");
    Forest forest;
    const TreeParams tree_params{params.max_depth, params.min_leaf};
    for (std::size_t t = 0; t < params.n_trees; ++t) {
        const std::uint64_t seed = params.seed + t;
        forest.tree_seeds.push_back(seed);
        if (!params.bootstrap) {
            forest.trees.push_back(tree_fit_subsampled(data, tree_params, params.feature_frac, seed));
            continue;
        }
        Rng rng(seed);
        std::vector<Sample> sample;
        sample.reserve(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) sample.push_back(data[static_cast<std::size_t>(rng.below(data.size()))]);
        forest.trees.push_back(tree_fit_subsampled(sample, tree_params, params.feature_frac, derive_seed(seed, 1)));
    }
    return forest;
}

ForestPrediction forest_predict(const Forest& forest, std::span<const double> query) {
    if (forest.trees.empty()) throw EmptyData();
    std::size_t votes = 0;
    for (const auto& tree : forest.trees) votes += tree_predict(*tree, query).label == Label::affected ? 1 : 0;
    const std::size_t n = forest.trees.size();
    ForestPrediction p;
    p.vote_fraction = static_cast<double>(votes) / static_cast<double>(n);
    p.label = 2 * votes > n ? Label::affected : Label::unaffected;
    return p;
}

// ---------------------------------------------------------------------------
// ANN
// ---------------------------------------------------------------------------

void AnnConfig::validate() const {
    if (epochs == 0) throw ConfigError("ann epochs must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("ann learning rate must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
    if (batch_size == 0) throw ConfigError("ann batch size must be positive");
}

std::vector<std::span<double>> AnnModel::tensors() {
    return {w1, b1, w2, b2};
}

std::vector<std::span<const double>> AnnModel::tensors() const {
    return {w1, b1, w2, b2};
}

AnnModel ann_init(std::size_t inputs, const AnnConfig& config) {
    AnnModel m;
    m.inputs = inputs;
    m.dropout = config.dropout;
    m.w1.resize(kAnnHidden * inputs);
    m.b1.assign(kAnnHidden, 0.0);
    m.w2.resize(kClassCount * kAnnHidden);
    m.b2.assign(kClassCount, 0.0);
    Rng rng(config.seed);
    const double l1 = std::sqrt(6.0 / static_cast<double>(inputs + kAnnHidden));
    for (double& w : m.w1) w = rng.uniform(-l1, l1);
    const double l2 = std::sqrt(6.0 / static_cast<double>(kAnnHidden + kClassCount));
    for (double& w : m.w2) w = rng.uniform(-l2, l2);
    return m;
}

AnnCache ann_forward(const AnnModel& model, std::span<const double> input, std::span<const double> mask) {
    if (input.size() != model.inputs) throw ShapeError("ann input dimension mismatch");
    if (!mask.empty() && mask.size() != kAnnHidden) throw ShapeError("dropout mask size mismatch");
    AnnCache c;
    c.input.assign(input.begin(), input.end());
    c.hidden_pre.resize(kAnnHidden);
    dense_forward(model.w1, model.b1, input, c.hidden_pre);
    c.hidden.resize(kAnnHidden);
    for (std::size_t h = 0; h < kAnnHidden; ++h) {
        c.hidden[h] = std::max(c.hidden_pre[h], 0.0) * (mask.empty() ? 1.0 : mask[h]);
    }
    dense_forward(model.w2, model.b2, c.hidden, c.logits);
    c.prediction = softmax(c.logits[0], c.logits[1]);
    return c;
}

AnnModel ann_backward(const AnnModel& model, const AnnCache& cache, std::span<const double> mask, Label label) {
    AnnModel g;
    g.inputs = model.inputs;
    g.dropout = model.dropout;
    g.w1.assign(model.w1.size(), 0.0);
    g.b1.assign(model.b1.size(), 0.0);
    g.w2.assign(model.w2.size(), 0.0);
    g.b2.assign(model.b2.size(), 0.0);

    const std::array<double, kClassCount> dz{
        cache.prediction.p_affected - (label == Label::affected ? 1.0 : 0.0),
        cache.prediction.p_unaffected - (label == Label::unaffected ? 1.0 : 0.0),
    };
    std::vector<double> dhidden(kAnnHidden);
    dense_backward(model.w2, cache.hidden, dz, g.w2, g.b2, dhidden);
    for (std::size_t h = 0; h < kAnnHidden; ++h) {
        const double m = mask.empty() ? 1.0 : mask[h];
        dhidden[h] = cache.hidden_pre[h] > 0.0 ? dhidden[h] * m : 0.0;
    }
    dense_backward(model.w1, cache.input, dhidden, g.w1, g.b1, {});
    return g;
}

AnnModel ann_fit(std::span<const Sample> data, const AnnConfig& config) {
    config.validate();
    if (data.empty()) throw EmptyData();
    const std::size_t dims = data.front().features.size();
    for (const auto& s : data) {
        if (s.features.size() != dims) throw ShapeError("samples have different dimensions");
    }

    AnnModel model = ann_init(dims, config);
    Optimizer optimizer(OptimizerConfig{config.optimizer, config.learning_rate});
    const double keep = 1.0 - config.dropout;
    Rng mask_rng(derive_seed(config.seed, 0xD50));
    std::vector<std::size_t> order(data.size());
    std::vector<double> mask(kAnnHidden, 1.0);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        Rng rng(derive_seed(config.seed, epoch + 1));
        rng.shuffle(std::span<std::size_t>(order));
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(start + config.batch_size, order.size());
            AnnModel grad = model;
            for (auto t : grad.tensors()) std::fill(t.begin(), t.end(), 0.0);
            for (std::size_t i = start; i < end; ++i) {
                const Sample& s = data[order[i]];
                if (config.dropout > 0.0) {
                    for (double& m : mask) m = mask_rng.bernoulli(keep) ? 1.0 / keep : 0.0;
                }
                const auto cache = ann_forward(model, s.features, mask);
                const auto g = ann_backward(model, cache, mask, s.label);
                auto dst = grad.tensors();
                const auto src = g.tensors();
                for (std::size_t k = 0; k < dst.size(); ++k) {
                    for (std::size_t j = 0; j < dst[k].size(); ++j) dst[k][j] += src[k][j];
                }
            }
            const double scale = 1.0 / static_cast<double>(end - start);
            for (auto t : grad.tensors()) {
                for (double& v : t) v *= scale;
            }
            optimizer.step(model.tensors(), std::as_const(grad).tensors());
        }
    }
    return model;
}

Prediction ann_predict(const AnnModel& model, std::span<const double> input) {
    return ann_forward(model, input).prediction;
}

}  // namespace deeplcp
