#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "deeplcp/error.hpp"
#include "deeplcp/metrics.hpp"
#include "deeplcp/random.hpp"

using namespace deeplcp;

namespace {

constexpr Label A = Label::affected;
constexpr Label U = Label::unaffected;

struct Scored {
    std::vector<double> scores;
    std::vector<Label> labels;
};

Scored random_scored(Rng& rng, std::size_t n, bool coarse) {
    Scored s;
    do {
        s.scores.clear();
        s.labels.clear();
        for (std::size_t i = 0; i < n; ++i) {
            // Coarse scores force ties.
            s.scores.push_back(coarse ? static_cast<double>(rng.below(5)) / 4.0 : rng.uniform());
            s.labels.push_back(rng.bernoulli(0.5) ? A : U);
        }
    } while (std::count(s.labels.begin(), s.labels.end(), A) == 0 ||
             std::count(s.labels.begin(), s.labels.end(), U) == 0);
    return s;
}

}  // namespace

TEST_CASE("auc reference examples") {
    const std::vector<Label> labels{A, A, U, U};
    CHECK(evaluate(std::vector<double>{0.9, 0.8, 0.2, 0.1}, labels).auc == 1.0);
    CHECK(evaluate(std::vector<double>{0.5, 0.5, 0.5, 0.5}, labels).auc == 0.5);
    CHECK(evaluate(std::vector<double>{0.9, 0.3, 0.5, 0.1}, labels).auc == 0.75);
    CHECK(evaluate(std::vector<double>{0.1, 0.2, 0.8, 0.9}, labels).auc == 0.0);
}

TEST_CASE("trapezoid auc equals the pairwise statistic") {
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const auto s = random_scored(rng, 2 + rng.below(80), i % 2 == 0);
        CHECK(std::abs(evaluate(s.scores, s.labels).auc - auc_pairwise(s.scores, s.labels)) <= 1e-12);
    }
}

TEST_CASE("auc symmetry and invariances") {
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
        const auto s = random_scored(rng, 40, i % 3 == 0);
        const double auc = evaluate(s.scores, s.labels).auc;
        auto flipped = s.labels;
        for (auto& l : flipped) l = l == A ? U : A;
        CHECK(evaluate(s.scores, flipped).auc == doctest::Approx(1.0 - auc).epsilon(1e-12));

        auto shifted = s.scores;
        for (auto& x : shifted) x = x * 0.5 + 0.25;
        CHECK(evaluate(shifted, s.labels).auc == doctest::Approx(auc).epsilon(1e-12));

        auto cubed = s.scores;
        for (auto& x : cubed) x = std::exp(3.0 * x);
        CHECK(auc_pairwise(cubed, s.labels) == doctest::Approx(auc).epsilon(1e-12));
    }
}

TEST_CASE("roc curve invariants and confusion counts") {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const auto s = random_scored(rng, 1 + rng.below(60) + 1, i % 2 == 1);
        const auto r = evaluate(s.scores, s.labels);
        REQUIRE(r.roc.size() >= 2);
        CHECK(r.roc.front() == RocPoint{0.0, 0.0});
        CHECK(r.roc.back() == RocPoint{1.0, 1.0});
        for (std::size_t k = 1; k < r.roc.size(); ++k) {
            CHECK(r.roc[k].fpr >= r.roc[k - 1].fpr);
            CHECK(r.roc[k].tpr >= r.roc[k - 1].tpr);
        }
        CHECK(r.accuracy + r.error_rate == doctest::Approx(1.0));
        CHECK(r.tp + r.fp + r.tn + r.fn == r.size);
        CHECK(r.auc >= 0.0);
        CHECK(r.auc <= 1.0);
    }
}

TEST_CASE("threshold ties go to affected") {
    const auto r = evaluate(std::vector<double>{0.5, 0.5}, std::vector<Label>{A, U});
    CHECK(r.tp == 1);
    CHECK(r.fp == 1);
    CHECK(r.accuracy == 0.5);
    CHECK(r.mean_loss == doctest::Approx(std::log(2.0)));
}

TEST_CASE("evaluation errors") {
    CHECK_THROWS_AS(evaluate(std::vector<double>{0.1, 0.2}, std::vector<Label>{A, A}), SingleClassAuc);
    CHECK_THROWS_AS(evaluate(std::vector<double>{0.1}, std::vector<Label>{A, U}), LengthMismatch);
    CHECK_THROWS_AS(evaluate(std::vector<double>{}, std::vector<Label>{}), EmptyData);
    CHECK_THROWS_AS(auc_pairwise(std::vector<double>{0.3}, std::vector<Label>{U}), SingleClassAuc);
}

TEST_CASE("split sizes, disjointness and seeding") {
    const auto s = split_indices(601, 7, 490.0 / 601.0);
    CHECK(s.train.size() == 490);
    CHECK(s.test.size() == 111);
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.test.begin(), s.test.end());
    CHECK(all.size() == 601);
    CHECK(*all.rbegin() == 600);

    const auto again = split_indices(601, 7, 490.0 / 601.0);
    CHECK(again.train == s.train);
    CHECK(again.test == s.test);
    CHECK(split_indices(601, 8, 490.0 / 601.0).train != s.train);

    CHECK_THROWS_AS(split_indices(1, 0, 0.5), TooFewRecords);
    CHECK_THROWS_AS(split_indices(10, 0, 1.0), ConfigError);
    CHECK_THROWS_AS(split_indices(10, 0, 0.0), ConfigError);

    const auto tiny = split_indices(2, 3, 0.99);
    CHECK(tiny.train.size() == 1);
    CHECK(tiny.test.size() == 1);
}

TEST_CASE("stratified split keeps the label ratio") {
    Rng rng(4);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::vector<Label> labels(60, A);
        labels.resize(100, U);
        rng.shuffle(std::span<Label>(labels));
        const auto s = split_indices(100, seed, 0.5, labels);
        const auto train_a = std::count_if(s.train.begin(), s.train.end(), [&](std::size_t i) { return labels[i] == A; });
        const auto test_a = std::count_if(s.test.begin(), s.test.end(), [&](std::size_t i) { return labels[i] == A; });
        CHECK(std::abs(static_cast<long>(train_a) - 30) <= 1);
        CHECK(std::abs(static_cast<long>(test_a) - 30) <= 1);
        CHECK(std::abs(static_cast<long>(s.train.size() - train_a) - 20) <= 1);
    }
    const std::vector<int> items{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const auto [train, test] = split(std::span<const int>(items), 5, 0.7);
    CHECK(train.size() == 7);
    CHECK(test.size() == 3);
}
