#include "deeplcp/synth.hpp"

#include <algorithm>
#include <cmath>

#include "deeplcp/defaults.hpp"
#include "deeplcp/text_format.hpp"

namespace deeplcp {

namespace {

constexpr std::size_t kCalibrationSamples = 20000;
constexpr std::uint64_t kCalibrationStream = 0xca11b4a7e;

double linear(const SynthConfig& cfg, const FeatureVector18& f) {
    double z = cfg.intercept;
    for (std::size_t g = 0; g < kFeatureCount; ++g) z += cfg.coefficients[g] * f[g];
    return z;
}

std::string draw_value(Rng& rng, const AttributeSpec& spec) {
    if (spec.kind == AttributeKind::categorical) {
        return spec.allowed_values[rng.below(spec.allowed_values.size())];
    }
    const auto lo = static_cast<long long>(std::ceil(spec.min_value));
    const auto hi = static_cast<long long>(std::floor(spec.max_value));
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return std::to_string(lo + static_cast<long long>(rng.below(span)));
}

}  // namespace

double logistic(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void SynthConfig::validate(const Schema& schema) const {
    if (record_count == 0) throw ConfigError("record_count must be positive");
    if (!(prevalence > 0.0 && prevalence < 1.0)) throw ConfigError("prevalence must be in (0, 1)");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ConfigError("noise_sigma must be >= 0");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must be in (0, 1)");
    if (!std::isfinite(intercept)) throw ConfigError("intercept must be finite");
    bool any_nonzero = false;
    bool major_positive = false;
    for (std::size_t g = 0; g < kFeatureCount; ++g) {
        if (!std::isfinite(coefficients[g])) throw ConfigError("coefficients must be finite");
        if (coefficients[g] != 0.0) any_nonzero = true;
        if (coefficients[g] > 0.0 && schema.groups()[g].category == RiskCategory::major_risk) major_positive = true;
    }
    if (any_nonzero && !major_positive) {
        throw ConfigError("at least one major-risk group needs a positive coefficient");
    }
}

PersonRecord random_record(Rng& rng, const Schema& schema) {
    PersonRecord r;
    r.values.reserve(schema.attributes().size());
    for (const auto& spec : schema.attributes()) r.values.push_back(draw_value(rng, spec));
    return r;
}

double ground_truth_prob(const SynthConfig& cfg, const FeatureVector18& features) {
    return logistic(linear(cfg, features));
}

double ground_truth_prob(const SynthConfig& cfg, const SemanticContext& ctx, const PersonRecord& record) {
    return ground_truth_prob(cfg, featurize(ctx.transform(record)));
}

double calibrate_intercept(const SynthConfig& cfg, const SemanticContext& ctx) {
    Rng rng(derive_seed(cfg.seed, kCalibrationStream));
    std::vector<double> scores(kCalibrationSamples);
    for (auto& s : scores) {
        const auto f = featurize(ctx.transform(random_record(rng, ctx.schema)));
        double z = 0.0;
        for (std::size_t g = 0; g < kFeatureCount; ++g) z += cfg.coefficients[g] * f[g];
        s = z + cfg.noise_sigma * rng.normal();
    }
    auto share = [&](double b) {
        double total = 0.0;
        for (double s : scores) total += logistic(b + s);
        return total / static_cast<double>(scores.size());
    };
    // share() is increasing in b; widen the bracket until it holds the target.
    double lo = -1.0, hi = 1.0;
    while (share(lo) > cfg.prevalence && lo > -1e6) lo *= 2.0;
    while (share(hi) < cfg.prevalence && hi < 1e6) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        (share(mid) < cfg.prevalence ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

SynthSet generate(const SynthConfig& cfg, const SemanticContext& ctx) {
    cfg.validate(ctx.schema);
    SynthConfig used = cfg;
    if (cfg.calibrate_intercept) used.intercept = calibrate_intercept(cfg, ctx);

    SynthSet out;
    out.intercept = used.intercept;
    out.records.reserve(cfg.record_count);
    Rng rng(cfg.seed);
    for (std::size_t i = 0; i < cfg.record_count; ++i) {
        auto record = random_record(rng, ctx.schema);
        const double z = linear(used, featurize(ctx.transform(record))) + used.noise_sigma * rng.normal();
        record.label = rng.bernoulli(logistic(z)) ? Label::affected : Label::unaffected;
        out.records.push_back(std::move(record));
    }
    return out;
}

SynthConfig parse_synth_config(std::string_view text, const Schema& schema, const std::string& source) {
    const auto doc = parse_kv_document(text, source);
    SynthConfig cfg;
    auto number = [&](const KvEntry& e) {
        auto v = parse_double(e.value);
        if (!v) throw ConfigError(source, e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
        return *v;
    };
    auto count = [&](const KvEntry& e) {
        auto v = parse_integer(e.value);
        if (!v || *v < 0) throw ConfigError(source, e.line, "'" + e.key + "' expects a non-negative integer");
        return *v;
    };
    for (const auto& e : doc.top.entries) {
        if (e.key == "record_count") cfg.record_count = static_cast<std::size_t>(count(e));
        else if (e.key == "seed") cfg.seed = static_cast<std::uint64_t>(count(e));
        else if (e.key == "prevalence") cfg.prevalence = number(e);
        else if (e.key == "noise_sigma") cfg.noise_sigma = number(e);
        else if (e.key == "train_fraction") cfg.train_fraction = number(e);
        else if (e.key == "intercept") {
            if (e.value == "calibrate") {
                cfg.calibrate_intercept = true;
            } else {
                cfg.calibrate_intercept = false;
                cfg.intercept = number(e);
            }
        } else {
            throw ConfigError(source, e.line, "unknown key '" + e.key + "'");
        }
    }
    std::vector<bool> seen(kFeatureCount, false);
    for (const auto& block : doc.blocks) {
        if (block.kind != "coefficients" || !block.name.empty()) {
            throw ConfigError(source, block.line, "unknown block '" + block.kind + "'");
        }
        for (const auto& e : block.entries) {
            const auto& groups = schema.groups();
            auto it = std::find_if(groups.begin(), groups.end(), [&](const GroupSpec& g) { return g.name == e.key; });
            if (it == groups.end()) throw ConfigError(source, e.line, "unknown group '" + e.key + "'");
            const auto g = static_cast<std::size_t>(it - groups.begin());
            if (seen[g]) throw ConfigError(source, e.line, "duplicate coefficient for '" + e.key + "'");
            seen[g] = true;
            cfg.coefficients[g] = number(e);
        }
    }
    cfg.validate(schema);
    return cfg;
}

SynthConfig load_synth_config(const std::string& path, const Schema& schema) {
    return parse_synth_config(read_text_file(path), schema, path);
}

SynthConfig benchmark_config(const Schema& schema) {
    return parse_synth_config(benchmark_synth_text(), schema, "benchmark.synth");
}

}  // namespace deeplcp
