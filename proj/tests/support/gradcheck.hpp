#ifndef DEEPLCP_TESTS_GRADCHECK_HPP
#define DEEPLCP_TESTS_GRADCHECK_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "deeplcp/nn.hpp"
#include "deeplcp/random.hpp"

namespace deeplcp::testing {

// Random model and an input whose ReLU pre-activations stay away from 0 and
// whose feature maps have a unique maximum, so the loss is smooth at the point.
inline CnnModel random_model(Rng& rng) {
    CnnModel m;
    for (std::size_t f = 0; f < kFilterCount; ++f) {
        m.params.filters[f] = ConvFilter::zeros(kFilterHeights[f], kInputCols);
        for (auto& w : m.params.filters[f].weights) w = rng.uniform(-0.3, 0.3);
        m.params.filters[f].bias = rng.uniform(0.2, 0.5);
    }
    for (auto& w : m.params.dense_weights) w = rng.uniform(-1.0, 1.0);
    for (auto& b : m.params.dense_bias) b = rng.uniform(-0.2, 0.2);
    return m;
}

inline Matrix random_input(Rng& rng) {
    Matrix x(kInputRows, kInputCols);
    for (auto& v : x.data()) v = rng.bernoulli(0.4) ? rng.uniform() : 0.0;
    return x;
}

struct GradCheck {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
};

// Central differences on every parameter. Relative error uses
// max(|analytic|, |numeric|, 1e-6) as the scale.
inline GradCheck check_gradients(const CnnModel& model, const Matrix& input, Label label, double step = 1e-5) {
    const auto analytic = backward(model, forward(model, input), label);
    const auto a_tensors = analytic.tensors();
    CnnModel probe = model;
    auto p_tensors = probe.params.tensors();
    GradCheck out;
    for (std::size_t t = 0; t < p_tensors.size(); ++t) {
        for (std::size_t i = 0; i < p_tensors[t].size(); ++i) {
            const double saved = p_tensors[t][i];
            p_tensors[t][i] = saved + step;
            const double up = loss(predict(probe, input), label);
            p_tensors[t][i] = saved - step;
            const double down = loss(predict(probe, input), label);
            p_tensors[t][i] = saved;
            const double numeric = (up - down) / (2.0 * step);
            const double a = a_tensors[t][i];
            const double scale = std::max({std::abs(a), std::abs(numeric), 1e-6});
            out.max_rel_error = std::max(out.max_rel_error, std::abs(a - numeric) / scale);
            ++out.checked;
        }
    }
    return out;
}

}  // namespace deeplcp::testing

#endif  // DEEPLCP_TESTS_GRADCHECK_HPP
