#ifndef DEEPLCP_OPTIM_HPP
#define DEEPLCP_OPTIM_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace deeplcp {

enum class OptimizerKind { sgd, adam };

std::string_view to_string(OptimizerKind kind);
std::optional<OptimizerKind> parse_optimizer(std::string_view s);

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::adam;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Plain SGD or Adam over a fixed list of parameter tensors. The tensor list
// passed to step() must have the same shapes on every call.
class Optimizer {
public:
    explicit Optimizer(OptimizerConfig config) : config_(config) {}

    void step(const std::vector<std::span<double>>& params, const std::vector<std::span<const double>>& grads);

    std::size_t steps() const noexcept { return t_; }

private:
    OptimizerConfig config_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::size_t t_ = 0;
};

}  // namespace deeplcp

#endif  // DEEPLCP_OPTIM_HPP
