// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "../support/gradcheck.hpp"
#include "deeplcp/baselines.hpp"
#include "deeplcp/defaults.hpp"
#include "deeplcp/metrics.hpp"
#include "deeplcp/nn.hpp"
#include "deeplcp/pipeline.hpp"
#include "deeplcp/rules.hpp"
#include "deeplcp/semantic.hpp"
#include "deeplcp/synth.hpp"

using namespace deeplcp;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double x) {
    std::ostringstream os;
    os.setf(std::ios::scientific);
    os.precision(2);
    os << x;
    return os.str();
}

std::string fixed(double x, int digits = 4) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << x;
    return os.str();
}

const SemanticContext& ctx() {
    static const SemanticContext c = SemanticContext::defaults();
    return c;
}

// 1 ------------------------------------------------------------------------

Verdict reference_header() {
    PipelineResult dummy;
    std::ostringstream os;
    write_pipeline_report(os, dummy);
    const std::string text = os.str();
    using R = ReferenceFigures;
    const std::vector<std::string> expected{
        "reference.cnn.validation_accuracy_pct=" + fixed(R::validation_accuracy, 2),
        "reference.cnn.train_accuracy_pct=" + fixed(R::train_accuracy, 2),
        "reference.cnn.validation_loss=" + fixed(R::validation_loss, 4),
        "reference.cnn.train_loss=" + fixed(R::train_loss, 4),
        "reference.cnn.auc=" + fixed(R::auc, 2),
        "reference.knn.accuracy_pct=" + fixed(R::knn_accuracy, 2),
        "reference.tree.accuracy_pct=" + fixed(R::tree_accuracy, 2),
        "reference.forest.accuracy_pct=" + fixed(R::forest_accuracy, 2),
        "reference.ann.accuracy_pct=" + fixed(R::ann_accuracy, 2),
    };
    const std::array<double, 9> published{94.59, 93.88, 0.1699, 0.1773, 0.99, 86.48, 93.69, 91.89, 85.59};
    const std::array<double, 9> stored{R::validation_accuracy, R::train_accuracy, R::validation_loss,
                                       R::train_loss,          R::auc,            R::knn_accuracy,
                                       R::tree_accuracy,       R::forest_accuracy, R::ann_accuracy};
    Verdict v;
    if (stored != published) v = {false, "reference constants differ from the published figures"};
    // Header: reference lines come before any measured line.
    const auto first_measured = text.find("\nseed=");
    for (const auto& line : expected) {
        const auto pos = text.find(line + "\n");
        if (pos == std::string::npos || pos > first_measured) v = {false, "missing or misplaced: " + line};
    }
    if (v.pass) v.detail = "9 reference figures in the report header, marked not reproducible";
    return v;
}

// 2 ------------------------------------------------------------------------

Verdict gradients() {
    const auto t0 = Clock::now();
    Rng rng(2024);
    double worst = 0.0;
    std::size_t checked = 0;
    for (int i = 0; i < 20; ++i) {
        const auto model = testing::random_model(rng);
        const auto input = testing::random_input(rng);
        const Label label = rng.bernoulli(0.5) ? Label::affected : Label::unaffected;
        const auto g = testing::check_gradients(model, input, label, 1e-5);
        worst = std::max(worst, g.max_rel_error);
        checked += g.checked;
    }
    const double secs = seconds_since(t0);
    Verdict v;
    v.pass = worst < 1e-4 && secs < 10.0;
    v.detail = "20 triples, " + std::to_string(checked) + " parameters, max rel error " + sci(worst) + ", " + fixed(secs, 2) + " s";
    return v;
}

// 3 ------------------------------------------------------------------------

Verdict shapes() {
    Verdict v;
    std::array<std::size_t, kFilterCount> heights = kFilterHeights;
    std::sort(heights.begin(), heights.end());
    if (kFilterCount != 6 || heights != std::array<std::size_t, 6>{5, 5, 6, 6, 7, 7}) {
        return {false, "filter bank is not 2x heights 5/6/7"};
    }
    TrainConfig cfg;
    cfg.seed = 3;
    const auto model = init_model(cfg);
    for (std::size_t f = 0; f < kFilterCount; ++f) {
        const auto& filter = model.params.filters[f];
        if (filter.height != kFilterHeights[f] || filter.width != 13 || filter.weights.size() != filter.height * 13) {
            return {false, "filter " + std::to_string(f) + " has the wrong shape"};
        }
    }
    Rng rng(3);
    std::size_t passes = 0;
    auto check_pass = [&](const Matrix& x) {
        const auto cache = forward(model, x);
        ++passes;
        for (std::size_t f = 0; f < kFilterCount; ++f) {
            const std::size_t expected = 18 - kFilterHeights[f] + 1;
            if (cache.feature_maps[f].size() != expected) return false;
            if (expected != (kFilterHeights[f] == 5 ? 14u : kFilterHeights[f] == 6 ? 13u : 12u)) return false;
        }
        if (cache.pooled.size() != 6 || cache.logits.size() != 2) return false;
        const auto& p = cache.prediction;
        return p.p_affected >= 0 && p.p_unaffected >= 0 && std::abs(p.p_affected + p.p_unaffected - 1.0) < 1e-12;
    };
    for (int i = 0; i < 500; ++i) {
        if (!check_pass(testing::random_input(rng))) return {false, "forward pass " + std::to_string(passes)};
    }
    for (int i = 0; i < 500; ++i) {
        if (!check_pass(ctx().transform(random_record(rng, ctx().schema)).values)) {
            return {false, "forward pass " + std::to_string(passes)};
        }
    }
    bool rejected = false;
    try {
        forward(model, Matrix(31, 13));
    } catch (const ShapeError&) {
        rejected = true;
    }
    if (!rejected) return {false, "31x13 input was not rejected"};
    v.detail = std::to_string(passes) + " forward passes: maps 14/13/12, pooled 6, 2-class simplex";
    return v;
}

// 4 ------------------------------------------------------------------------

Verdict information() {
    Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        auto record = random_record(rng, ctx().schema);
        for (auto& value : record.values) {
            if (rng.bernoulli(0.1)) value = std::string(kUnknownValue);
        }
        const auto raw = build_raw_matrix(record, ctx().rules, ctx().schema);
        const auto reduced = reduce(raw, ctx().plan);
        if (!(unreduce(reduced) == raw)) return {false, "unreduce mismatch on record " + std::to_string(i)};
        std::vector<double> a, b;
        for (double x : raw.values.data()) {
            if (x != 0.0) a.push_back(x);
        }
        for (double x : reduced.values.data()) {
            if (x != 0.0) b.push_back(x);
        }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) return {false, "nonzero multisets differ on record " + std::to_string(i)};
    }
    return {true, "1000 records: exact unreduce and equal nonzero multisets"};
}

// 5 ------------------------------------------------------------------------

Verdict oracles() {
    Rng rng(5);
    std::vector<Sample> points;
    for (int i = 0; i < 40; ++i) {
        Sample s;
        for (int d = 0; d < 18; ++d) s.features.push_back(rng.uniform());
        s.label = rng.bernoulli(0.5) ? Label::affected : Label::unaffected;
        points.push_back(std::move(s));
    }
    const KnnIndex index(points);
    for (int q = 0; q < 100; ++q) {
        std::vector<double> x(18);
        for (auto& v : x) v = rng.uniform();
        const std::size_t k = 1 + 2 * rng.below(8);
        std::vector<std::pair<double, std::size_t>> all;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double d = 0.0;
            for (std::size_t j = 0; j < 18; ++j) d += (points[i].features[j] - x[j]) * (points[i].features[j] - x[j]);
            all.emplace_back(d, i);
        }
        std::sort(all.begin(), all.end());
        std::size_t votes = 0;
        std::vector<std::size_t> ids;
        for (std::size_t i = 0; i < k; ++i) {
            ids.push_back(all[i].second);
            votes += points[all[i].second].label == Label::affected;
        }
        const auto r = index.predict(x, k);
        const Label expected = 2 * votes > k ? Label::affected : Label::unaffected;
        if (r.neighbours != ids || r.label != expected) return {false, "knn query " + std::to_string(q)};
    }

    double worst = 0.0;
    for (int s = 0; s < 200; ++s) {
        const std::size_t n = 2 + rng.below(100);
        std::vector<double> scores;
        std::vector<Label> labels;
        for (std::size_t i = 0; i < n; ++i) {
            scores.push_back(s % 2 ? static_cast<double>(rng.below(6)) / 5.0 : rng.uniform());
            labels.push_back(i == 0 ? Label::affected : i == 1 ? Label::unaffected
                                                               : (rng.bernoulli(0.5) ? Label::affected : Label::unaffected));
        }
        worst = std::max(worst, std::abs(evaluate(scores, labels).auc - auc_pairwise(scores, labels)));
    }
    if (!(worst <= 1e-12)) return {false, "auc gap " + std::to_string(worst)};

    const std::vector<Sample> six{
        {{1, 5}, Label::affected},   {{2, 1}, Label::affected},   {{3, 4}, Label::unaffected},
        {{4, 2}, Label::affected},   {{5, 3}, Label::unaffected}, {{6, 6}, Label::unaffected},
    };
    const auto tree = tree_fit(six, {2, 1});
    const bool tree_ok = !tree->is_leaf() && tree->feature == 0 && tree->threshold == 2.5 && tree->left->is_leaf() &&
                         tree->left->affected == 2 && !tree->right->is_leaf() && tree->right->feature == 1 &&
                         tree->right->threshold == 2.5 && tree->right->left->affected == 1 &&
                         tree->right->left->unaffected == 0 && tree->right->right->unaffected == 3 &&
                         tree->right->right->affected == 0;
    if (!tree_ok) return {false, "6-point tree differs from the enumerated splits"};
    return {true, "knn 100/100 queries, auc max gap " + fixed(worst * 1e15, 3) + "e-15 over 200 sets, tree matches"};
}

// 6, 7 ---------------------------------------------------------------------

struct Benchmark {
    std::vector<PipelineResult> runs;
    double seconds = 0.0;
};

Benchmark run_benchmark() {
    Benchmark b;
    const auto t0 = Clock::now();
    PipelineOptions options;
    options.synth = benchmark_config(ctx().schema);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        b.runs.push_back(run_pipeline(options, ctx(), seed));
        const auto& r = b.runs.back();
        std::cerr << "seed " << seed << ": cnn acc " << fixed(r.cnn.accuracy) << " auc " << fixed(r.cnn.auc)
                  << " bayes auc " << fixed(r.bayes_auc);
        for (std::size_t k = 0; k < kBaselineKinds.size(); ++k) {
            std::cerr << ' ' << to_string(kBaselineKinds[k]) << ' ' << fixed(r.baselines[k]->accuracy);
        }
        std::cerr << '\n';
    }
    b.seconds = seconds_since(t0);
    return b;
}

Verdict synthetic_benchmark(const Benchmark& b) {
    double acc = 0.0, auc = 0.0, bayes = 0.0;
    bool sizes = true;
    for (const auto& r : b.runs) {
        acc += r.cnn.accuracy;
        auc += r.cnn.auc;
        bayes += r.bayes_auc;
        sizes = sizes && r.train_size == 490 && r.test_size == 111;
    }
    const double n = static_cast<double>(b.runs.size());
    acc /= n;
    auc /= n;
    bayes /= n;
    Verdict v;
    v.pass = sizes && acc >= 0.88 && auc >= 0.95 && b.seconds < 300.0;
    v.detail = "5 seeds, split " + std::string(sizes ? "490/111" : "WRONG") + ": mean cnn accuracy " + fixed(acc) +
               " (>= 0.88), auc " + fixed(auc) + " (>= 0.95), bayes auc " + fixed(bayes) + ", " +
               fixed(b.seconds, 1) + " s";
    return v;
}

Verdict baseline_ordering(const Benchmark& b) {
    const double n = static_cast<double>(b.runs.size());
    double cnn = 0.0;
    std::array<double, 4> mean{};
    for (const auto& r : b.runs) {
        cnn += r.cnn.accuracy / n;
        for (std::size_t k = 0; k < 4; ++k) mean[k] += r.baselines[k]->accuracy / n;
    }
    Verdict v;
    v.pass = true;
    double best = 0.0;
    std::ostringstream os;
    for (std::size_t k = 0; k < 4; ++k) {
        os << to_string(kBaselineKinds[k]) << ' ' << fixed(mean[k]) << ", ";
        v.pass = v.pass && mean[k] >= 0.75;
        best = std::max(best, mean[k]);
    }
    v.pass = v.pass && cnn >= best - 0.05;
    os << "cnn " << fixed(cnn) << " (best baseline " << fixed(best) << ")";
    v.detail = os.str();
    return v;
}

// 8 ------------------------------------------------------------------------

std::string capture(const std::string& command, int& status) {
    std::string out;
    FILE* pipe = ::popen(command.c_str(), "r");
    if (!pipe) {
        status = -1;
        return out;
    }
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    status = ::pclose(pipe);
    return out;
}

Verdict determinism() {
    const std::string cmd = std::string("\"") + DEEPLCP_CLI_PATH + "\" pipeline --seed 1 2>/dev/null";
    int s1 = 0, s2 = 0;
    const auto a = capture(cmd, s1);
    const auto b = capture(cmd, s2);
    if (s1 != 0 || s2 != 0) return {false, "pipeline invocation failed"};
    if (a.empty() || a != b) return {false, "pipeline outputs differ"};

    Rng rng(8);
    std::vector<Example> data;
    for (int i = 0; i < 30; ++i) data.push_back({testing::random_input(rng), i % 2 ? Label::affected : Label::unaffected});
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.seed = 8;
    const auto model = train(cfg, data).model;
    const auto path = (std::filesystem::temp_directory_path() / "deeplcp_acceptance_model.txt").string();
    save_model(model, path);
    const auto loaded = load_model(path);
    std::filesystem::remove(path);
    if (!(loaded == model)) return {false, "model changed in a save/load round trip"};
    for (const auto& e : data) {
        if (!(predict(loaded, e.input) == predict(model, e.input))) return {false, "loaded model predicts differently"};
    }
    return {true, "two pipeline runs byte-identical (" + std::to_string(a.size()) +
                      " bytes); model round-trip exact"};
}

// 9 ------------------------------------------------------------------------

std::string mutate(const std::string& base, Rng& rng) {
    static const std::vector<std::string> tokens{
        "rule", "attribute:", "map:", "default", "->", ";", "{", "}", "[", ")", ",", "inf", "-inf", "\"",
        "0.5", "1.5", "-0.2", "nan", "1e400", "age", "gender", "smoking_status", "\n", "#", "category:", "theme:",
        "major_risk", "symptom", "\"yes\"", "[0, 40)", "[40, 30)", "0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0",
    };
    std::string s = base;
    const int edits = 1 + static_cast<int>(rng.below(6));
    for (int e = 0; e < edits && !s.empty(); ++e) {
        const auto pos = static_cast<std::size_t>(rng.below(s.size()));
        switch (rng.below(7)) {
            case 0:  // delete a byte span
                s.erase(pos, 1 + rng.below(20));
                break;
            case 1:  // random byte
                s[pos] = static_cast<char>(rng.below(256));
                break;
            case 2:  // insert a token
                s.insert(pos, tokens[rng.below(tokens.size())]);
                break;
            case 3: {  // duplicate a line
                const auto start = s.rfind('\n', pos);
                const auto from = start == std::string::npos ? 0 : start + 1;
                const auto end = s.find('\n', pos);
                const auto line = s.substr(from, end == std::string::npos ? std::string::npos : end - from + 1);
                s.insert(from, line);
                break;
            }
            case 4: {  // delete a line
                const auto start = s.rfind('\n', pos);
                const auto from = start == std::string::npos ? 0 : start + 1;
                const auto end = s.find('\n', pos);
                s.erase(from, end == std::string::npos ? std::string::npos : end - from + 1);
                break;
            }
            case 5:  // truncate
                s.resize(pos);
                break;
            default: {  // swap two spans
                const auto other = static_cast<std::size_t>(rng.below(s.size()));
                const auto len = std::min<std::size_t>({1 + rng.below(12), s.size() - pos, s.size() - other});
                if (pos + len <= other || other + len <= pos) {
                    for (std::size_t i = 0; i < len; ++i) std::swap(s[pos + i], s[other + i]);
                }
                break;
            }
        }
    }
    return s;
}

Verdict fuzz_rules() {
    const std::string base = format_ruleset(ctx().rules);
    const std::string original(default_rules_text());
    Rng rng(9);
    std::size_t rejected = 0, accepted = 0;
    for (int i = 0; i < 10000; ++i) {
        const std::string text = mutate(i % 2 ? base : original, rng);
        const auto line_count = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) + 1;
        RuleParseResult result;
        try {
            result = parse_ruleset(text, ctx().schema);
        } catch (const std::exception& e) {
            return {false, "case " + std::to_string(i) + " threw: " + e.what()};
        } catch (...) {
            return {false, "case " + std::to_string(i) + " threw a non-standard exception"};
        }
        if (result.ok() != result.diagnostics.empty()) return {false, "case " + std::to_string(i) + ": inconsistent result"};
        if (result.ok()) {
            ++accepted;
            continue;
        }
        ++rejected;
        for (const auto& d : result.diagnostics) {
            if (d.line < 1 || d.line > line_count || d.message.empty()) {
                return {false, "case " + std::to_string(i) + ": diagnostic without a valid line"};
            }
        }
    }
    return {true, "10000 mutants: " + std::to_string(rejected) + " rejected with line-anchored diagnostics, " +
                      std::to_string(accepted) + " accepted, no crash"};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* name, const Verdict& v) {
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << v.detail << '\n'
                  << std::flush;
        failures += v.pass ? 0 : 1;
    };
    auto guarded = [](auto&& fn) -> Verdict {
        try {
            return fn();
        } catch (const std::exception& e) {
            return {false, std::string("exception: ") + e.what()};
        }
    };

    report(1, "reference figures", guarded(reference_header));
    report(2, "gradient check", guarded(gradients));
    report(3, "architecture shapes", guarded(shapes));
    report(4, "information preservation", guarded(information));
    report(5, "oracle equivalences", guarded(oracles));
    Benchmark bench;
    std::string bench_error;
    try {
        bench = run_benchmark();
    } catch (const std::exception& e) {
        bench_error = e.what();
    }
    if (bench_error.empty()) {
        report(6, "synthetic benchmark", synthetic_benchmark(bench));
        report(7, "baseline ordering", baseline_ordering(bench));
    } else {
        report(6, "synthetic benchmark", {false, "exception: " + bench_error});
        report(7, "baseline ordering", {false, "exception: " + bench_error});
    }
    report(8, "determinism", guarded(determinism));
    report(9, "rule parser fuzzing", guarded(fuzz_rules));
    return failures == 0 ? 0 : 1;
}
