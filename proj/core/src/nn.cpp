#include "deeplcp/nn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "deeplcp/error.hpp"
#include "deeplcp/random.hpp"
#include "deeplcp/text_format.hpp"

namespace deeplcp {

ConvFilter ConvFilter::zeros(std::size_t height, std::size_t width) {
    return ConvFilter{height, width, std::vector<double>(height * width, 0.0), 0.0};
}

std::vector<double> conv_forward(const Matrix& input, const ConvFilter& filter, Activation activation) {
    if (filter.width != input.cols() || filter.height == 0 || filter.height > input.rows() ||
        filter.weights.size() != filter.height * filter.width) {
        throw ShapeError("filter " + std::to_string(filter.height) + "x" + std::to_string(filter.width) +
                         " does not fit input " + std::to_string(input.rows()) + "x" + std::to_string(input.cols()));
    }
    const std::size_t positions = input.rows() - filter.height + 1;
    const std::size_t window = filter.height * filter.width;
    std::vector<double> out(positions);
    for (std::size_t t = 0; t < positions; ++t) {
        // Rows t..t+h-1 are contiguous in row-major storage.
        const double* x = input.data().data() + t * input.cols();
        double acc = filter.bias;
        for (std::size_t k = 0; k < window; ++k) acc += filter.weights[k] * x[k];
        out[t] = activation == Activation::relu ? std::max(acc, 0.0) : acc;
    }
    return out;
}

PooledValue max_over_time(std::span<const double> feature_map) {
    if (feature_map.empty()) throw EmptyMap();
    PooledValue best{feature_map[0], 0};
    for (std::size_t i = 1; i < feature_map.size(); ++i) {
        if (feature_map[i] > best.value) best = {feature_map[i], i};
    }
    return best;
}

Prediction softmax(double logit_affected, double logit_unaffected) {
    const double m = std::max(logit_affected, logit_unaffected);
    const double ea = std::exp(logit_affected - m);
    const double eu = std::exp(logit_unaffected - m);
    const double z = ea + eu;
    Prediction p{ea / z, eu / z};
    return p;
}

double loss(const Prediction& prediction, Label label) {
    return -std::log(std::max(prediction.probability(label), kProbabilityFloor));
}

void dense_forward(std::span<const double> weights, std::span<const double> bias, std::span<const double> input,
                   std::span<double> output) {
    if (weights.size() != output.size() * input.size() || bias.size() != output.size()) {
        throw ShapeError("dense layer shape mismatch");
    }
    for (std::size_t o = 0; o < output.size(); ++o) {
        double acc = bias[o];
        const double* w = weights.data() + o * input.size();
        for (std::size_t i = 0; i < input.size(); ++i) acc += w[i] * input[i];
        output[o] = acc;
    }
}

void dense_backward(std::span<const double> weights, std::span<const double> input, std::span<const double> grad_output,
                    std::span<double> grad_weights, std::span<double> grad_bias, std::span<double> grad_input) {
    const std::size_t in = input.size();
    const std::size_t out = grad_output.size();
    if (weights.size() != in * out || grad_weights.size() != in * out || grad_bias.size() != out ||
        (!grad_input.empty() && grad_input.size() != in)) {
        throw ShapeError("dense layer gradient shape mismatch");
    }
    for (std::size_t o = 0; o < out; ++o) {
        grad_bias[o] += grad_output[o];
        for (std::size_t i = 0; i < in; ++i) grad_weights[o * in + i] += grad_output[o] * input[i];
    }
    if (!grad_input.empty()) {
        for (std::size_t i = 0; i < in; ++i) {
            double acc = 0.0;
            for (std::size_t o = 0; o < out; ++o) acc += weights[o * in + i] * grad_output[o];
            grad_input[i] = acc;
        }
    }
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning rate must be positive, got " + format_double(learning_rate));
    }
    if (epochs == 0) throw ConfigError("epochs must be positive");
    if (batch_size == 0) throw ConfigError("batch size must be positive");
}

OptimizerConfig TrainConfig::optimizer_config() const {
    return OptimizerConfig{optimizer, learning_rate, beta1, beta2, epsilon};
}

CnnParameters CnnParameters::zeros() {
    CnnParameters p;
    for (std::size_t f = 0; f < kFilterCount; ++f) p.filters[f] = ConvFilter::zeros(kFilterHeights[f], kInputCols);
    return p;
}

std::vector<std::span<double>> CnnParameters::tensors() {
    std::vector<std::span<double>> out;
    for (auto& f : filters) {
        out.emplace_back(f.weights);
        out.emplace_back(&f.bias, 1);
    }
    out.emplace_back(dense_weights);
    out.emplace_back(dense_bias);
    return out;
}

std::vector<std::span<const double>> CnnParameters::tensors() const {
    std::vector<std::span<const double>> out;
    for (const auto& f : filters) {
        out.emplace_back(f.weights);
        out.emplace_back(&f.bias, 1);
    }
    out.emplace_back(dense_weights);
    out.emplace_back(dense_bias);
    return out;
}

CnnModel init_model(const TrainConfig& config) {
    CnnModel model;
    model.config = config;
    Rng rng(config.seed);
    for (std::size_t f = 0; f < kFilterCount; ++f) {
        // Two filters share each height; Glorot treats them as one kernel
        // with 1 input and 2 output channels.
        const double receptive = static_cast<double>(kFilterHeights[f] * kInputCols);
        const double limit = std::sqrt(6.0 / (receptive + 2.0 * receptive));
        for (double& w : model.params.filters[f].weights) w = rng.uniform(-limit, limit);
    }
    const double limit = std::sqrt(6.0 / static_cast<double>(kFilterCount + kClassCount));
    for (double& w : model.params.dense_weights) w = rng.uniform(-limit, limit);
    return model;
}

namespace {

void check_input(const Matrix& input) {
    if (input.rows() != kInputRows || input.cols() != kInputCols) {
        throw ShapeError("network input must be " + std::to_string(kInputRows) + "x" + std::to_string(kInputCols) +
                         ", got " + std::to_string(input.rows()) + "x" + std::to_string(input.cols()));
    }
}

}  // namespace

ForwardCache forward(const CnnModel& model, const Matrix& input) {
    check_input(input);
    ForwardCache cache;
    cache.input = input;
    for (std::size_t f = 0; f < kFilterCount; ++f) {
        cache.pre_activation[f] = conv_forward(input, model.params.filters[f], Activation::identity);
        auto& map = cache.feature_maps[f];
        map.resize(cache.pre_activation[f].size());
        std::transform(cache.pre_activation[f].begin(), cache.pre_activation[f].end(), map.begin(),
                       [](double v) { return std::max(v, 0.0); });
        const auto pooled = max_over_time(map);
        cache.pooled[f] = pooled.value;
        cache.argmax[f] = pooled.index;
    }
    dense_forward(model.params.dense_weights, model.params.dense_bias, cache.pooled, cache.logits);
    cache.prediction = softmax(cache.logits[0], cache.logits[1]);
    return cache;
}

Prediction predict(const CnnModel& model, const Matrix& input) {
    return forward(model, input).prediction;
}

CnnParameters backward(const CnnModel& model, const ForwardCache& cache, Label label) {
    CnnParameters grad = CnnParameters::zeros();
    // Softmax + cross-entropy: dL/dz = p - onehot(label).
    const std::array<double, kClassCount> dz{
        cache.prediction.p_affected - (label == Label::affected ? 1.0 : 0.0),
        cache.prediction.p_unaffected - (label == Label::unaffected ? 1.0 : 0.0),
    };
    std::array<double, kFilterCount> dpooled{};
    dense_backward(model.params.dense_weights, cache.pooled, dz, grad.dense_weights, grad.dense_bias, dpooled);

    for (std::size_t f = 0; f < kFilterCount; ++f) {
        const std::size_t t = cache.argmax[f];
        // Gradient reaches only the pooled position, and only through an active unit.
        if (cache.pre_activation[f][t] <= 0.0 || dpooled[f] == 0.0) continue;
        auto& g = grad.filters[f];
        const double* x = cache.input.data().data() + t * cache.input.cols();
        for (std::size_t k = 0; k < g.weights.size(); ++k) g.weights[k] = dpooled[f] * x[k];
        g.bias = dpooled[f];
    }
    return grad;
}

bool identical(const TrainHistory& a, const TrainHistory& b) {
    auto same = [](const std::vector<double>& x, const std::vector<double>& y) {
        return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
    };
    return same(a.train_loss, b.train_loss) && same(a.train_accuracy, b.train_accuracy) &&
           same(a.valid_loss, b.valid_loss) && same(a.valid_accuracy, b.valid_accuracy);
}

SetScore score_set(const CnnModel& model, std::span<const Example> examples) {
    if (examples.empty()) return {std::nan(""), std::nan("")};
    double total = 0.0;
    std::size_t correct = 0;
    for (const auto& ex : examples) {
        const auto p = predict(model, ex.input);
        total += loss(p, ex.label);
        correct += p.decision() == ex.label ? 1 : 0;
    }
    const auto n = static_cast<double>(examples.size());
    return {total / n, static_cast<double>(correct) / n};
}

namespace {

// Canonical order: by label, then lexicographically by matrix contents.
std::vector<std::size_t> canonical_order(std::span<const Example> examples) {
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ea = examples[a];
        const auto& eb = examples[b];
        if (ea.label != eb.label) return ea.label < eb.label;
        const auto da = ea.input.data();
        const auto db = eb.input.data();
        return std::lexicographical_compare(da.begin(), da.end(), db.begin(), db.end());
    });
    return order;
}

void add_into(CnnParameters& acc, const CnnParameters& g) {
    auto dst = acc.tensors();
    const auto src = g.tensors();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        for (std::size_t j = 0; j < dst[i].size(); ++j) dst[i][j] += src[i][j];
    }
}

}  // namespace

TrainResult train(const TrainConfig& config, std::span<const Example> train_set, std::span<const Example> valid_set) {
    config.validate();
    return train(init_model(config), train_set, valid_set);
}

TrainResult train(CnnModel model, std::span<const Example> train_set, std::span<const Example> valid_set) {
    const TrainConfig& config = model.config;
    config.validate();
    if (train_set.empty()) throw EmptyData();
    for (const auto& ex : train_set) check_input(ex.input);
    for (const auto& ex : valid_set) check_input(ex.input);

    std::vector<Example> ordered;
    ordered.reserve(train_set.size());
    for (auto i : canonical_order(train_set)) ordered.push_back(train_set[i]);
    Optimizer optimizer(config.optimizer_config());
    TrainHistory history;
    std::vector<std::size_t> order(train_set.size());

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        Rng rng(derive_seed(config.seed, epoch));
        rng.shuffle(std::span<std::size_t>(order));

        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(start + config.batch_size, order.size());
            CnnParameters batch_grad = CnnParameters::zeros();
            // Summed in batch order so the result is reproducible.
            for (std::size_t i = start; i < end; ++i) {
                const Example& ex = ordered[order[i]];
                const auto cache = forward(model, ex.input);
                add_into(batch_grad, backward(model, cache, ex.label));
            }
            const double scale = 1.0 / static_cast<double>(end - start);
            auto grad_tensors = batch_grad.tensors();
            for (auto& t : grad_tensors) {
                for (double& v : t) v *= scale;
            }
            const auto const_grads = std::as_const(batch_grad).tensors();
            optimizer.step(model.params.tensors(), const_grads);
        }

        const auto tr = score_set(model, ordered);
        const auto va = score_set(model, valid_set);
        history.train_loss.push_back(tr.loss);
        history.train_accuracy.push_back(tr.accuracy);
        history.valid_loss.push_back(va.loss);
        history.valid_accuracy.push_back(va.accuracy);
    }
    return {std::move(model), std::move(history)};
}

namespace {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_tensor(std::ostream& out, std::string_view name, std::size_t rows, std::size_t cols,
                  std::span<const double> values) {
    out << "tensor " << name << ' ' << rows << ' ' << cols << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c) out << ' ';
            out << format_g17(values[r * cols + c]);
        }
        out << '\n';
    }
}

class ModelReader {
public:
    ModelReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    std::optional<std::string> raw_line() {
        std::string line;
        if (!std::getline(in_, line)) return std::nullopt;
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }

    std::string next_line() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!trim(line).empty()) return line;
        }
        fail("unexpected end of file");
    }

    [[noreturn]] void fail(const std::string& message) const { throw FormatVersionError(source_, line_no_, message); }

    std::string keyed(std::string_view key) {
        const auto line = next_line();
        std::istringstream ls(line);
        std::string k, v, extra;
        if (!(ls >> k >> v) || k != key || (ls >> extra)) fail("expected '" + std::string(key) + " <value>'");
        return v;
    }

    double keyed_double(std::string_view key) {
        const auto v = parse_double(keyed(key));
        if (!v) fail("bad number for '" + std::string(key) + "'");
        return *v;
    }

    std::size_t keyed_count(std::string_view key) {
        const auto v = parse_integer(keyed(key));
        if (!v || *v < 0) fail("bad count for '" + std::string(key) + "'");
        return static_cast<std::size_t>(*v);
    }

    void tensor(std::string_view name, std::size_t rows, std::size_t cols, std::span<double> out) {
        const auto header = next_line();
        std::istringstream hs(header);
        std::string kw, n;
        std::size_t r = 0, c = 0;
        if (!(hs >> kw >> n >> r >> c) || kw != "tensor" || n != name || r != rows || c != cols) {
            fail("expected 'tensor " + std::string(name) + " " + std::to_string(rows) + " " + std::to_string(cols) +
                 "'");
        }
        for (std::size_t i = 0; i < rows; ++i) {
            std::istringstream ls(next_line());
            std::string cell;
            std::size_t j = 0;
            while (ls >> cell) {
                const auto v = parse_double(cell);
                if (!v || j >= cols) fail("bad row in tensor '" + std::string(name) + "'");
                out[i * cols + j++] = *v;
            }
            if (j != cols) fail("short row in tensor '" + std::string(name) + "'");
        }
    }

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_no_ = 0;
};

}  // namespace

void write_model(std::ostream& out, const CnnModel& model) {
    const auto& c = model.config;
    out << kModelMagic << '\n'
        << "format_version " << kModelFormatVersion << '\n'
        << "optimizer " << to_string(c.optimizer) << '\n'
        << "learning_rate " << format_g17(c.learning_rate) << '\n'
        << "epochs " << c.epochs << '\n'
        << "batch_size " << c.batch_size << '\n'
        << "seed " << c.seed << '\n'
        << "beta1 " << format_g17(c.beta1) << '\n'
        << "beta2 " << format_g17(c.beta2) << '\n'
        << "epsilon " << format_g17(c.epsilon) << '\n';
    for (std::size_t f = 0; f < kFilterCount; ++f) {
        const auto& flt = model.params.filters[f];
        const std::string prefix = "filter" + std::to_string(f);
        write_tensor(out, prefix + ".weights", flt.height, flt.width, flt.weights);
        write_tensor(out, prefix + ".bias", 1, 1, std::span<const double>(&flt.bias, 1));
    }
    write_tensor(out, "dense.weights", kClassCount, kFilterCount, model.params.dense_weights);
    write_tensor(out, "dense.bias", 1, kClassCount, model.params.dense_bias);
    out << "end\n";
}

CnnModel read_model(std::istream& in, const std::string& source) {
    ModelReader reader(in, source);
    const auto magic = reader.raw_line();
    if (!magic) throw FormatVersionError(source, 1, "empty model file");
    if (*magic != kModelMagic) throw FormatVersionError(source, 1, "not a model file (bad magic line)");
    if (reader.keyed_count("format_version") != kModelFormatVersion) {
        reader.fail("unsupported model format version");
    }

    CnnModel model;
    auto& c = model.config;
    const auto opt = parse_optimizer(reader.keyed("optimizer"));
    if (!opt) reader.fail("unknown optimizer");
    c.optimizer = *opt;
    c.learning_rate = reader.keyed_double("learning_rate");
    c.epochs = reader.keyed_count("epochs");
    c.batch_size = reader.keyed_count("batch_size");
    {
        const auto s = reader.keyed("seed");
        std::uint64_t seed = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
        if (ec != std::errc{} || ptr != s.data() + s.size()) reader.fail("bad seed");
        c.seed = seed;
    }
    c.beta1 = reader.keyed_double("beta1");
    c.beta2 = reader.keyed_double("beta2");
    c.epsilon = reader.keyed_double("epsilon");

    for (std::size_t f = 0; f < kFilterCount; ++f) {
        auto& flt = model.params.filters[f];
        const std::string prefix = "filter" + std::to_string(f);
        reader.tensor(prefix + ".weights", flt.height, flt.width, flt.weights);
        reader.tensor(prefix + ".bias", 1, 1, std::span<double>(&flt.bias, 1));
    }
    reader.tensor("dense.weights", kClassCount, kFilterCount, model.params.dense_weights);
    reader.tensor("dense.bias", 1, kClassCount, model.params.dense_bias);
    if (trim(reader.next_line()) != "end") reader.fail("expected 'end'");
    return model;
}

void save_model(const CnnModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_model(out, model);
    if (!out) throw IoError("error writing '" + path + "'");
}

CnnModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_model(in, path);
}

}  // namespace deeplcp
