#include "deeplcp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "deeplcp/nn.hpp"
#include "deeplcp/text_format.hpp"

namespace deeplcp {

namespace {

void check_inputs(std::span<const double> scores, std::span<const Label> labels) {
    if (scores.size() != labels.size()) throw LengthMismatch(scores.size(), labels.size());
    if (scores.empty()) throw EmptyData();
}

std::pair<std::size_t, std::size_t> class_counts(std::span<const Label> labels) {
    const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::affected));
    return {pos, labels.size() - pos};
}

}  // namespace

EvalReport evaluate(std::span<const double> scores, std::span<const Label> labels) {
    check_inputs(scores, labels);
    const auto [pos, neg] = class_counts(labels);
    if (pos == 0 || neg == 0) throw SingleClassAuc();

    EvalReport r;
    r.size = scores.size();
    double total_loss = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= 0.5;
        const bool actual = labels[i] == Label::affected;
        if (predicted && actual) ++r.tp;
        else if (predicted) ++r.fp;
        else if (actual) ++r.fn;
        else ++r.tn;
        total_loss += loss(Prediction{scores[i], 1.0 - scores[i]}, labels[i]);
    }
    const auto n = static_cast<double>(r.size);
    r.accuracy = static_cast<double>(r.tp + r.tn) / n;
    r.error_rate = static_cast<double>(r.fp + r.fn) / n;
    r.mean_loss = total_loss / n;

    // Sweep thresholds from the highest distinct score down.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    r.roc.push_back({0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    // Twice the area in count units: sum of dfp * (tp_prev + tp_cur). Kept in
    // integers so the trapezoid is exact before the final division.
    unsigned long long twice_area = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        const std::size_t tp_prev = tp, fp_prev = fp;
        while (i < order.size() && scores[order[i]] == s) {
            (labels[order[i]] == Label::affected ? tp : fp)++;
            ++i;
        }
        twice_area += static_cast<unsigned long long>(fp - fp_prev) * (tp_prev + tp);
        r.roc.push_back({static_cast<double>(fp) / static_cast<double>(neg), static_cast<double>(tp) / static_cast<double>(pos)});
    }
    r.auc = static_cast<double>(twice_area) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
    return r;
}

double auc_pairwise(std::span<const double> scores, std::span<const Label> labels) {
    check_inputs(scores, labels);
    const auto [pos, neg] = class_counts(labels);
    if (pos == 0 || neg == 0) throw SingleClassAuc();
    double wins = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != Label::affected) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != Label::unaffected) continue;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

void write_roc(std::ostream& out, std::span<const RocPoint> roc) {
    for (const auto& p : roc) out << format_double(p.fpr) << ' ' << format_double(p.tpr) << '\n';
}

SplitIndices split_indices(std::size_t n, std::uint64_t seed, double train_frac, std::span<const Label> labels) {
    if (n < 2) throw TooFewRecords(n);
    if (!(train_frac > 0.0 && train_frac < 1.0)) throw ConfigError("train fraction must be in (0, 1)");
    if (!labels.empty() && labels.size() != n) throw LengthMismatch(n, labels.size());

    SplitIndices out;
    Rng rng(seed);
    auto cut = [&](std::vector<std::size_t> pool) {
        rng.shuffle(std::span<std::size_t>(pool));
        const auto k = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(pool.size())));
        out.train.insert(out.train.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
        out.test.insert(out.test.end(), pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end());
    };
    if (labels.empty()) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        cut(std::move(all));
    } else {
        for (Label cls : {Label::affected, Label::unaffected}) {
            std::vector<std::size_t> pool;
            for (std::size_t i = 0; i < n; ++i) {
                if (labels[i] == cls) pool.push_back(i);
            }
            cut(std::move(pool));
        }
    }
    // Keep both sides non-empty.
    if (out.train.empty()) {
        out.train.push_back(out.test.back());
        out.test.pop_back();
    } else if (out.test.empty()) {
        out.test.push_back(out.train.back());
        out.train.pop_back();
    }
    return out;
}

}  // namespace deeplcp
