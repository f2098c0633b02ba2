#include <benchmark/benchmark.h>

#include <vector>

#include "deeplcp/baselines.hpp"
#include "deeplcp/nn.hpp"
#include "deeplcp/random.hpp"
#include "deeplcp/semantic.hpp"
#include "deeplcp/synth.hpp"

using namespace deeplcp;

namespace {

const SemanticContext& ctx() {
    static const SemanticContext c = SemanticContext::defaults();
    return c;
}

std::vector<PersonRecord> records(std::size_t n) {
    Rng rng(1);
    std::vector<PersonRecord> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_record(rng, ctx().schema));
    return out;
}

void BM_Transform(benchmark::State& state) {
    const auto rs = records(256);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ctx().transform(rs[i++ % rs.size()]));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Transform);

void BM_Forward(benchmark::State& state) {
    TrainConfig cfg;
    cfg.seed = 2;
    const auto model = init_model(cfg);
    const auto x = ctx().transform(records(1)[0]).values;
    for (auto _ : state) benchmark::DoNotOptimize(forward(model, x));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Forward);

void BM_ForwardBackward(benchmark::State& state) {
    TrainConfig cfg;
    cfg.seed = 3;
    const auto model = init_model(cfg);
    const auto x = ctx().transform(records(1)[0]).values;
    for (auto _ : state) {
        const auto cache = forward(model, x);
        benchmark::DoNotOptimize(backward(model, cache, Label::affected));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ForwardBackward);

void BM_KnnQuery(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(4);
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < n; ++i) {
        Sample s;
        for (std::size_t d = 0; d < kFeatureCount; ++d) s.features.push_back(rng.uniform());
        s.label = rng.bernoulli(0.5) ? Label::affected : Label::unaffected;
        samples.push_back(std::move(s));
    }
    const KnnIndex index(std::move(samples));
    std::vector<double> q(kFeatureCount, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(index.predict(q, 5));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_KnnQuery)->Arg(490)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
