#ifndef DEEPLCP_NN_HPP
#define DEEPLCP_NN_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "deeplcp/matrix.hpp"
#include "deeplcp/optim.hpp"
#include "deeplcp/records.hpp"

namespace deeplcp {

// Fixed network shape: full-width filters over an 18x13 reduced matrix,
// two filters per height 5/6/7, max-over-time pooling, dense 6 -> 2, softmax.
inline constexpr std::size_t kInputRows = 18;
inline constexpr std::size_t kInputCols = 13;
inline constexpr std::size_t kFilterCount = 6;
inline constexpr std::size_t kClassCount = 2;
inline constexpr std::array<std::size_t, kFilterCount> kFilterHeights{5, 5, 6, 6, 7, 7};

inline constexpr double kProbabilityFloor = 1e-12;

enum class Activation { identity, relu };

struct ConvFilter {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> weights;  // height x width, row-major
    double bias = 0.0;

    static ConvFilter zeros(std::size_t height, std::size_t width);

    friend bool operator==(const ConvFilter&, const ConvFilter&) = default;
};

// Class 0 is "affected", class 1 "unaffected".
struct Prediction {
    double p_affected = 0.5;
    double p_unaffected = 0.5;

    double probability(Label label) const noexcept {
        return label == Label::affected ? p_affected : p_unaffected;
    }
    // Threshold 0.5, ties go to "affected".
    Label decision() const noexcept { return p_affected >= 0.5 ? Label::affected : Label::unaffected; }

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

// Valid (no padding) stride-1 convolution of a full-width filter.
// Throws ShapeError unless filter.width == input.cols() and height <= rows.
std::vector<double> conv_forward(const Matrix& input, const ConvFilter& filter,
                                 Activation activation = Activation::relu);

struct PooledValue {
    double value = 0.0;
    std::size_t index = 0;  // first position holding the maximum
};

// Throws EmptyMap.
PooledValue max_over_time(std::span<const double> feature_map);

Prediction softmax(double logit_affected, double logit_unaffected);

// Cross-entropy -log p_true with the probability floored at 1e-12.
double loss(const Prediction& prediction, Label label);

// y = W x + b, W row-major (out x in).
void dense_forward(std::span<const double> weights, std::span<const double> bias, std::span<const double> input,
                   std::span<double> output);
// Accumulates dW += dy x^T, db += dy; writes dx = W^T dy when dx is non-empty.
void dense_backward(std::span<const double> weights, std::span<const double> input, std::span<const double> grad_output,
                    std::span<double> grad_weights, std::span<double> grad_bias, std::span<double> grad_input);

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t epochs = 200;
    std::size_t batch_size = 16;
    OptimizerKind optimizer = OptimizerKind::adam;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    // Throws ConfigError for nonpositive learning rate, epochs or batch size.
    void validate() const;
    OptimizerConfig optimizer_config() const;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Parameters of the network; also used for gradients (same shapes).
struct CnnParameters {
    std::array<ConvFilter, kFilterCount> filters;
    std::array<double, kClassCount * kFilterCount> dense_weights{};  // 2 x 6, row-major
    std::array<double, kClassCount> dense_bias{};

    static CnnParameters zeros();

    // Every tensor in a fixed order: filter weights and bias per filter, then
    // dense weights, then dense bias.
    std::vector<std::span<double>> tensors();
    std::vector<std::span<const double>> tensors() const;

    friend bool operator==(const CnnParameters&, const CnnParameters&) = default;
};

struct CnnModel {
    CnnParameters params = CnnParameters::zeros();
    TrainConfig config;

    friend bool operator==(const CnnModel&, const CnnModel&) = default;
};

// Glorot-uniform weights (+-sqrt(6 / (fan_in + fan_out)) per tensor), zero
// biases, drawn from config.seed.
CnnModel init_model(const TrainConfig& config);

struct ForwardCache {
    Matrix input;
    std::array<std::vector<double>, kFilterCount> pre_activation;
    std::array<std::vector<double>, kFilterCount> feature_maps;
    std::array<std::size_t, kFilterCount> argmax{};
    std::array<double, kFilterCount> pooled{};
    std::array<double, kClassCount> logits{};
    Prediction prediction;
};

// Throws ShapeError unless input is 18x13.
ForwardCache forward(const CnnModel& model, const Matrix& input);
Prediction predict(const CnnModel& model, const Matrix& input);

// Exact gradient of loss(forward(model, input), label) w.r.t. every parameter.
CnnParameters backward(const CnnModel& model, const ForwardCache& cache, Label label);

struct Example {
    Matrix input;
    Label label = Label::affected;
};

struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> train_accuracy;
    std::vector<double> valid_loss;      // NaN when no validation set was given
    std::vector<double> valid_accuracy;
};

// Bitwise comparison (NaN entries compare equal to identical NaNs).
bool identical(const TrainHistory& a, const TrainHistory& b);

struct TrainResult {
    CnnModel model;
    TrainHistory history;
};

struct SetScore {
    double loss = 0.0;
    double accuracy = 0.0;
};
SetScore score_set(const CnnModel& model, std::span<const Example> examples);

// Mini-batch training from init_model(config). Examples are first put in a
// canonical content order, then visited in a per-epoch order derived only from
// the seed, so the result does not depend on the order of `train_set`.
TrainResult train(const TrainConfig& config, std::span<const Example> train_set,
                  std::span<const Example> valid_set = {});
TrainResult train(CnnModel model, std::span<const Example> train_set, std::span<const Example> valid_set = {});

inline constexpr std::string_view kModelMagic = "DEEPLCP-CNN";
inline constexpr int kModelFormatVersion = 1;

void write_model(std::ostream& out, const CnnModel& model);
CnnModel read_model(std::istream& in, const std::string& source = "<model>");
void save_model(const CnnModel& model, const std::string& path);
CnnModel load_model(const std::string& path);

}  // namespace deeplcp

#endif  // DEEPLCP_NN_HPP
