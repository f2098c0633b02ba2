#ifndef DEEPLCP_METRICS_HPP
#define DEEPLCP_METRICS_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "deeplcp/error.hpp"
#include "deeplcp/random.hpp"
#include "deeplcp/records.hpp"

namespace deeplcp {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;

    friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct EvalReport {
    std::size_t size = 0;
    double accuracy = 0.0;
    double error_rate = 0.0;
    double mean_loss = 0.0;
    std::size_t tp = 0;  // "affected" is the positive class
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
    std::vector<RocPoint> roc;
    double auc = 0.0;
};

// scores are p_affected. Threshold 0.5 with ties classified "affected"; ROC by
// sweeping every distinct score; AUC by the trapezoidal rule.
// Throws LengthMismatch, EmptyData, SingleClassAuc.
EvalReport evaluate(std::span<const double> scores, std::span<const Label> labels);

// Direct O(n^2) Mann-Whitney statistic (ties count 1/2).
double auc_pairwise(std::span<const double> scores, std::span<const Label> labels);

// Two-column "fpr tpr" text.
void write_roc(std::ostream& out, std::span<const RocPoint> roc);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Seeded shuffle then cut. The train size is round(train_frac * n), kept in
// [1, n-1]. With `labels`, each label class is shuffled and cut separately so
// both sides keep the label ratio (within one example per class).
// Throws TooFewRecords (n < 2), ConfigError (train_frac outside (0, 1)).
SplitIndices split_indices(std::size_t n, std::uint64_t seed, double train_frac,
                           std::span<const Label> labels = {});

template <typename T>
std::pair<std::vector<T>, std::vector<T>> split(std::span<const T> items, std::uint64_t seed, double train_frac,
                                                std::span<const Label> stratify_labels = {}) {
    const auto idx = split_indices(items.size(), seed, train_frac, stratify_labels);
    std::pair<std::vector<T>, std::vector<T>> out;
    out.first.reserve(idx.train.size());
    out.second.reserve(idx.test.size());
    for (auto i : idx.train) out.first.push_back(items[i]);
    for (auto i : idx.test) out.second.push_back(items[i]);
    return out;
}

}  // namespace deeplcp

#endif  // DEEPLCP_METRICS_HPP
