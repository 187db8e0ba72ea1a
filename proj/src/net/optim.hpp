#pragma once

#include <cmath>
#include <span>

#include "layers.hpp"

namespace ocean::net {

// theta -= lr * grad, then gradients are cleared.
template <class T>
void sgd_step(std::span<Parameter<T>* const> params, T lr) {
    if (lr <= T{0}) fail(ErrorCode::invalid_argument, "sgd: learning rate must be > 0");
    for (Parameter<T>* p : params) {
        for (std::size_t i = 0; i < p->value.numel(); ++i) {
            p->value[i] -= lr * p->grad[i];
            p->grad[i] = T{0};
        }
    }
}

// accum += grad^2; theta -= lr * grad / (sqrt(accum) + eps). The accumulator
// only grows, so per-parameter step sizes shrink over time.
template <class T>
void adagrad_step(std::span<Parameter<T>* const> params, T lr, T eps = T{1e-8}) {
    if (lr <= T{0}) fail(ErrorCode::invalid_argument, "adagrad: learning rate must be > 0");
    for (Parameter<T>* p : params) {
        for (std::size_t i = 0; i < p->value.numel(); ++i) {
            const T g = p->grad[i];
            p->accum[i] += g * g;
            p->value[i] -= lr * g / (std::sqrt(p->accum[i]) + eps);
            p->grad[i] = T{0};
        }
    }
}

} // namespace ocean::net
