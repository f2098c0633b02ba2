#ifndef DEEPLCP_SYNTH_HPP
#define DEEPLCP_SYNTH_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deeplcp/baselines.hpp"
#include "deeplcp/random.hpp"
#include "deeplcp/records.hpp"
#include "deeplcp/semantic.hpp"

namespace deeplcp {

// Planted logistic model over the 18 row-sum features of the reduced matrix:
//   p = logistic(intercept + coefficients . features + N(0, noise_sigma))
struct SynthConfig {
    std::size_t record_count = 601;
    double prevalence = 355.0 / 601.0;  // target share of "affected"
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    FeatureVector18 coefficients{};
    double intercept = 0.0;
    // When set, generate() replaces `intercept` with the value that makes the
    // expected share of "affected" equal `prevalence`.
    bool calibrate_intercept = false;
    double train_fraction = 490.0 / 601.0;

    // Throws ConfigError. All-zero coefficients are accepted as a null model;
    // otherwise at least one major-risk group needs a positive coefficient.
    void validate(const Schema& schema) const;
};

struct SynthSet {
    std::vector<PersonRecord> records;  // labelled
    double intercept = 0.0;             // the intercept actually used
};

double logistic(double x);

// Intercept whose expected prevalence (noise included) matches cfg.prevalence,
// estimated by bisection on a fixed seeded sample of records.
double calibrate_intercept(const SynthConfig& cfg, const SemanticContext& ctx);

// Categorical values uniform over the allowed values, numeric values uniform
// integers in [min, max]. Deterministic given cfg.seed.
SynthSet generate(const SynthConfig& cfg, const SemanticContext& ctx);

// Values only, no labels.
PersonRecord random_record(Rng& rng, const Schema& schema);

// Noise-free probability of "affected" under the planted model.
double ground_truth_prob(const SynthConfig& cfg, const SemanticContext& ctx, const PersonRecord& record);
double ground_truth_prob(const SynthConfig& cfg, const FeatureVector18& features);

// File dialect (see docs/formats.md):
//   record_count: 601
//   prevalence: 0.5907
//   noise_sigma: 0.5
//   seed: 1
//   intercept: calibrate | <number>
//   train_fraction: 0.8153
//   coefficients
//     <group>: <number>
SynthConfig parse_synth_config(std::string_view text, const Schema& schema, const std::string& source = "<synth>");
SynthConfig load_synth_config(const std::string& path, const Schema& schema);
SynthConfig benchmark_config(const Schema& schema);

}  // namespace deeplcp

#endif  // DEEPLCP_SYNTH_HPP
