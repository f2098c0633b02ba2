#include "deeplcp/optim.hpp"

#include <cmath>

#include "deeplcp/error.hpp"

namespace deeplcp {

std::string_view to_string(OptimizerKind kind) {
    return kind == OptimizerKind::adam ? "adam" : "sgd";
}

std::optional<OptimizerKind> parse_optimizer(std::string_view s) {
    if (s == "adam") return OptimizerKind::adam;
    if (s == "sgd") return OptimizerKind::sgd;
    return std::nullopt;
}

void Optimizer::step(const std::vector<std::span<double>>& params, const std::vector<std::span<const double>>& grads) {
    if (params.size() != grads.size()) throw ShapeError("optimizer: parameter/gradient tensor count mismatch");
    std::size_t total = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].size() != grads[i].size()) throw ShapeError("optimizer: tensor shape mismatch");
        total += params[i].size();
    }
    ++t_;
    const double lr = config_.learning_rate;
    if (config_.kind == OptimizerKind::sgd) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            for (std::size_t j = 0; j < params[i].size(); ++j) params[i][j] -= lr * grads[i][j];
        }
        return;
    }

    if (m_.empty()) {
        m_.assign(total, 0.0);
        v_.assign(total, 0.0);
    } else if (m_.size() != total) {
        throw ShapeError("optimizer: parameter count changed between steps");
    }
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double bias1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double bias2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    std::size_t k = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        for (std::size_t j = 0; j < params[i].size(); ++j, ++k) {
            const double g = grads[i][j];
            m_[k] = b1 * m_[k] + (1.0 - b1) * g;
            v_[k] = b2 * v_[k] + (1.0 - b2) * g * g;
            const double m_hat = m_[k] / bias1;
            const double v_hat = v_[k] / bias2;
            params[i][j] -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
        }
    }
}

}  // namespace deeplcp
