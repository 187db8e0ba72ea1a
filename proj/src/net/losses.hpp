#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "../traits.hpp"
#include "tensor.hpp"

namespace ocean::net {

// Mean of squared differences over every entry; gradient 2(pred-target)/n.
template <class T>
T mse_loss(const Tensor<T>& pred, const Tensor<T>& target, Tensor<T>* grad = nullptr) {
    if (pred.shape() != target.shape())
        fail(ErrorCode::invalid_argument,
             "mse: shape mismatch " + pred.shape_str() + " vs " + target.shape_str());
    const std::size_t n = pred.numel();
    if (n == 0) fail(ErrorCode::invalid_argument, "mse: empty tensors");
    if (grad) *grad = Tensor<T>(pred.shape());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const T d = pred[i] - target[i];
        sum += static_cast<double>(d) * static_cast<double>(d);
        if (grad) (*grad)[i] = T{2} * d / static_cast<T>(n);
    }
    return static_cast<T>(sum / static_cast<double>(n));
}

// Five independent 2-way softmaxes over a [batch, 10] logit tensor, one
// contiguous pair per trait. The loss is the sum over traits of the mean
// negative log-probability of the true class; the gradient per group is
// (softmax - onehot) / batch.
template <class T>
T grouped_softmax_ce(const Tensor<T>& logits, std::span<const BinaryLabels> labels,
                     Tensor<T>* grad = nullptr, Tensor<T>* probs = nullptr) {
    constexpr std::size_t kGroups = TraitVector::kSize;
    if (logits.rank() != 2 || logits.dim(1) != 2 * kGroups)
        fail(ErrorCode::invalid_argument,
             "grouped ce: expected [batch, 10] logits, got " + logits.shape_str());
    const std::size_t batch = logits.dim(0);
    if (labels.size() != batch)
        fail(ErrorCode::invalid_argument, "grouped ce: labels do not match batch");
    if (grad) *grad = Tensor<T>(logits.shape());
    if (probs) *probs = Tensor<T>(logits.shape());
    double loss = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t g = 0; g < kGroups; ++g) {
            const int bit = labels[b].bits[g];
            if (bit != 0 && bit != 1)
                fail(ErrorCode::invalid_argument, "grouped ce: label bit must be 0 or 1");
            const T z0 = logits.at2(b, 2 * g);
            const T z1 = logits.at2(b, 2 * g + 1);
            const T m = std::max(z0, z1);
            const T e0 = std::exp(z0 - m);
            const T e1 = std::exp(z1 - m);
            const T denom = e0 + e1;
            const T p0 = e0 / denom;
            const T p1 = e1 / denom;
            const T p_true = bit == 0 ? p0 : p1;
            loss += -std::log(static_cast<double>(p_true));
            if (probs) {
                (*probs).at2(b, 2 * g) = p0;
                (*probs).at2(b, 2 * g + 1) = p1;
            }
            if (grad) {
                (*grad).at2(b, 2 * g) = (p0 - (bit == 0 ? T{1} : T{0})) / static_cast<T>(batch);
                (*grad).at2(b, 2 * g + 1) = (p1 - (bit == 1 ? T{1} : T{0})) / static_cast<T>(batch);
            }
        }
    }
    return static_cast<T>(loss / static_cast<double>(batch));
}

} // namespace ocean::net
