#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "tensor.hpp"

namespace ocean::net {

enum class Padding { valid, same };

inline const char* padding_name(Padding p) { return p == Padding::same ? "same" : "valid"; }

// valid -> floor((n-k)/s)+1, same -> ceil(n/s).
inline std::size_t conv_out_dim(std::size_t n, std::size_t k, std::size_t stride, Padding pad) {
    if (pad == Padding::same) return (n + stride - 1) / stride;
    if (k > n) fail(ErrorCode::invalid_argument, "conv: kernel larger than unpadded input");
    return (n - k) / stride + 1;
}

// Trainable tensor with its gradient and Adagrad accumulator.
template <class T>
struct Parameter {
    std::string name;
    Tensor<T> value;
    Tensor<T> grad;
    Tensor<T> accum;

    Parameter() = default;
    Parameter(std::string n, Tensor<T> v)
        : name(std::move(n)),
          value(std::move(v)),
          grad(Tensor<T>::zeros(value.shape())),
          accum(Tensor<T>::zeros(value.shape())) {}
};

template <class T>
class Layer {
public:
    virtual ~Layer() = default;

    // forward caches whatever backward needs; backward returns d(loss)/d(input)
    // and accumulates parameter gradients.
    virtual Tensor<T> forward(const Tensor<T>& x, bool training) = 0;
    virtual Tensor<T> backward(const Tensor<T>& dy) = 0;

    virtual std::vector<Parameter<T>*> params() { return {}; }
    virtual std::string describe() const = 0;
};

template <class T>
class ReluLayer final : public Layer<T> {
public:
    Tensor<T> forward(const Tensor<T>& x, bool) override {
        mask_.assign(x.numel(), 0);
        Tensor<T> y(x.shape());
        for (std::size_t i = 0; i < x.numel(); ++i) {
            if (x[i] > T{0}) {
                y[i] = x[i];
                mask_[i] = 1;
            }
        }
        return y;
    }

    // Subgradient 0 at x == 0.
    Tensor<T> backward(const Tensor<T>& dy) override {
        Tensor<T> dx(dy.shape());
        for (std::size_t i = 0; i < dy.numel(); ++i) dx[i] = mask_[i] ? dy[i] : T{0};
        return dx;
    }

    std::string describe() const override { return "relu"; }

private:
    std::vector<unsigned char> mask_;
};

template <class T>
class SigmoidLayer final : public Layer<T> {
public:
    Tensor<T> forward(const Tensor<T>& x, bool) override {
        out_ = Tensor<T>(x.shape());
        for (std::size_t i = 0; i < x.numel(); ++i)
            out_[i] = stable_sigmoid(x[i]);
        return out_;
    }

    Tensor<T> backward(const Tensor<T>& dy) override {
        Tensor<T> dx(dy.shape());
        for (std::size_t i = 0; i < dy.numel(); ++i)
            dx[i] = dy[i] * out_[i] * (T{1} - out_[i]);
        return dx;
    }

    std::string describe() const override { return "sigmoid"; }

    static T stable_sigmoid(T x) {
        if (x >= T{0}) {
            T z = std::exp(-x);
            return T{1} / (T{1} + z);
        }
        T z = std::exp(x);
        return z / (T{1} + z);
    }

private:
    Tensor<T> out_;
};

// Fully-connected y = x W + b. Inputs of rank > 2 are flattened to
// [batch, rest] on the way in and the gradient restored on the way out.
template <class T>
class DenseLayer final : public Layer<T> {
public:
    DenseLayer(std::size_t in_features, std::size_t out_features, Rng& rng,
               const std::string& name = "dense")
        : in_(in_features), out_(out_features) {
        const double bound = std::sqrt(6.0 / static_cast<double>(in_features + out_features));
        weight_ = Parameter<T>(name + ".W",
                               Tensor<T>::uniform({in_, out_}, static_cast<T>(-bound),
                                                  static_cast<T>(bound), rng));
        bias_ = Parameter<T>(name + ".b", Tensor<T>::zeros({out_}));
    }

    Tensor<T> forward(const Tensor<T>& x, bool) override {
        input_shape_ = x.shape();
        const std::size_t batch = x.dim(0);
        const std::size_t feat = x.numel() / batch;
        if (feat != in_)
            fail(ErrorCode::invalid_argument, "dense: input " + x.shape_str() + " has " +
                                                  std::to_string(feat) + " features, expected " +
                                                  std::to_string(in_));
        x_ = x.reshaped({batch, in_});
        Tensor<T> y({batch, out_});
        for (std::size_t b = 0; b < batch; ++b) {
            const T* xr = x_.data() + b * in_;
            T* yr = y.data() + b * out_;
            for (std::size_t o = 0; o < out_; ++o) yr[o] = bias_.value[o];
            for (std::size_t i = 0; i < in_; ++i) {
                const T xv = xr[i];
                if (xv == T{0}) continue;
                const T* wr = weight_.value.data() + i * out_;
                for (std::size_t o = 0; o < out_; ++o) yr[o] += xv * wr[o];
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) override {
        const std::size_t batch = x_.dim(0);
        Tensor<T> dx({batch, in_});
        for (std::size_t b = 0; b < batch; ++b) {
            const T* dyr = dy.data() + b * out_;
            const T* xr = x_.data() + b * in_;
            T* dxr = dx.data() + b * in_;
            for (std::size_t o = 0; o < out_; ++o) bias_.grad[o] += dyr[o];
            for (std::size_t i = 0; i < in_; ++i) {
                const T* wr = weight_.value.data() + i * out_;
                T* gwr = weight_.grad.data() + i * out_;
                T acc{0};
                const T xv = xr[i];
                for (std::size_t o = 0; o < out_; ++o) {
                    acc += dyr[o] * wr[o];
                    gwr[o] += xv * dyr[o];
                }
                dxr[i] = acc;
            }
        }
        return dx.reshaped(input_shape_);
    }

    std::vector<Parameter<T>*> params() override { return {&weight_, &bias_}; }

    std::string describe() const override {
        return "dense " + std::to_string(in_) + "->" + std::to_string(out_);
    }

    Parameter<T>& weight() { return weight_; }
    Parameter<T>& bias() { return bias_; }

private:
    std::size_t in_ = 0, out_ = 0;
    Parameter<T> weight_, bias_;
    Tensor<T> x_;
    std::vector<std::size_t> input_shape_;
};

// 2-D convolution over [batch, height, width, channels] with a
// [kh, kw, cin, cout] kernel. Same padding zero-fills borders.
template <class T>
class Conv2dLayer final : public Layer<T> {
public:
    Conv2dLayer(std::size_t kh, std::size_t kw, std::size_t cin, std::size_t cout,
                std::size_t stride, Padding pad, Rng& rng, const std::string& name = "conv")
        : kh_(kh), kw_(kw), cin_(cin), cout_(cout), stride_(stride), pad_(pad) {
        if (stride_ < 1) fail(ErrorCode::invalid_argument, "conv: stride must be >= 1");
        const double fan_in = static_cast<double>(kh * kw * cin);
        const double fan_out = static_cast<double>(kh * kw * cout);
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        kernel_ = Parameter<T>(name + ".K",
                               Tensor<T>::uniform({kh_, kw_, cin_, cout_},
                                                  static_cast<T>(-bound),
                                                  static_cast<T>(bound), rng));
    }

    Tensor<T> forward(const Tensor<T>& x, bool) override {
        check_input(x);
        x_ = x;
        const std::size_t B = x.dim(0), H = x.dim(1), W = x.dim(2);
        const std::size_t OH = conv_out_dim(H, kh_, stride_, pad_);
        const std::size_t OW = conv_out_dim(W, kw_, stride_, pad_);
        compute_padding(H, W, OH, OW);
        Tensor<T> y({B, OH, OW, cout_});
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t oh = 0; oh < OH; ++oh)
                for (std::size_t ow = 0; ow < OW; ++ow) {
                    T* yr = y.data() + ((b * OH + oh) * OW + ow) * cout_;
                    for (std::size_t r = 0; r < kh_; ++r) {
                        const long ih = static_cast<long>(oh * stride_ + r) - pad_top_;
                        if (ih < 0 || ih >= static_cast<long>(H)) continue;
                        for (std::size_t c = 0; c < kw_; ++c) {
                            const long iw = static_cast<long>(ow * stride_ + c) - pad_left_;
                            if (iw < 0 || iw >= static_cast<long>(W)) continue;
                            const T* xr = x.data() +
                                          ((b * H + static_cast<std::size_t>(ih)) * W +
                                           static_cast<std::size_t>(iw)) * cin_;
                            const T* kr = kernel_.value.data() + (r * kw_ + c) * cin_ * cout_;
                            for (std::size_t ci = 0; ci < cin_; ++ci) {
                                const T xv = xr[ci];
                                if (xv == T{0}) continue;
                                const T* kc = kr + ci * cout_;
                                for (std::size_t co = 0; co < cout_; ++co)
                                    yr[co] += xv * kc[co];
                            }
                        }
                    }
                }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) override {
        const std::size_t B = x_.dim(0), H = x_.dim(1), W = x_.dim(2);
        const std::size_t OH = dy.dim(1), OW = dy.dim(2);
        Tensor<T> dx(x_.shape());
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t oh = 0; oh < OH; ++oh)
                for (std::size_t ow = 0; ow < OW; ++ow) {
                    const T* dyr = dy.data() + ((b * OH + oh) * OW + ow) * cout_;
                    for (std::size_t r = 0; r < kh_; ++r) {
                        const long ih = static_cast<long>(oh * stride_ + r) - pad_top_;
                        if (ih < 0 || ih >= static_cast<long>(H)) continue;
                        for (std::size_t c = 0; c < kw_; ++c) {
                            const long iw = static_cast<long>(ow * stride_ + c) - pad_left_;
                            if (iw < 0 || iw >= static_cast<long>(W)) continue;
                            const std::size_t xoff =
                                ((b * H + static_cast<std::size_t>(ih)) * W +
                                 static_cast<std::size_t>(iw)) * cin_;
                            const std::size_t koff = (r * kw_ + c) * cin_ * cout_;
                            for (std::size_t ci = 0; ci < cin_; ++ci) {
                                const T xv = x_[xoff + ci];
                                T acc{0};
                                const T* kc = kernel_.value.data() + koff + ci * cout_;
                                T* gk = kernel_.grad.data() + koff + ci * cout_;
                                for (std::size_t co = 0; co < cout_; ++co) {
                                    acc += dyr[co] * kc[co];
                                    gk[co] += xv * dyr[co];
                                }
                                dx[xoff + ci] += acc;
                            }
                        }
                    }
                }
        return dx;
    }

    std::vector<Parameter<T>*> params() override { return {&kernel_}; }

    std::string describe() const override {
        return "conv " + std::to_string(kh_) + "x" + std::to_string(kw_) + "x" +
               std::to_string(cout_) + " stride " + std::to_string(stride_) + " " +
               padding_name(pad_);
    }

    Parameter<T>& kernel() { return kernel_; }

private:
    void check_input(const Tensor<T>& x) const {
        if (x.rank() != 4)
            fail(ErrorCode::invalid_argument, "conv: expected rank-4 input, got " + x.shape_str());
        if (x.dim(3) != cin_)
            fail(ErrorCode::invalid_argument,
                 "conv: input has " + std::to_string(x.dim(3)) + " channels, expected " +
                     std::to_string(cin_));
        if (pad_ == Padding::valid && (kh_ > x.dim(1) || kw_ > x.dim(2)))
            fail(ErrorCode::invalid_argument, "conv: kernel larger than input under valid padding");
    }

    void compute_padding(std::size_t H, std::size_t W, std::size_t OH, std::size_t OW) {
        if (pad_ == Padding::valid) {
            pad_top_ = pad_left_ = 0;
            return;
        }
        const long ph = std::max<long>(
            0, static_cast<long>((OH - 1) * stride_ + kh_) - static_cast<long>(H));
        const long pw = std::max<long>(
            0, static_cast<long>((OW - 1) * stride_ + kw_) - static_cast<long>(W));
        pad_top_ = ph / 2;
        pad_left_ = pw / 2;
    }

    std::size_t kh_, kw_, cin_, cout_, stride_;
    Padding pad_;
    long pad_top_ = 0, pad_left_ = 0;
    Parameter<T> kernel_;
    Tensor<T> x_;
};

// Per-channel max pooling; gradient routes to each window's argmax, first
// index on ties. Out-of-bounds positions under same padding never win.
template <class T>
class MaxPool2dLayer final : public Layer<T> {
public:
    MaxPool2dLayer(std::size_t kh, std::size_t kw, std::size_t stride, Padding pad)
        : kh_(kh), kw_(kw), stride_(stride), pad_(pad) {
        if (kh_ < 1 || kw_ < 1) fail(ErrorCode::invalid_argument, "maxpool: window must be >= 1");
    }

    Tensor<T> forward(const Tensor<T>& x, bool) override {
        if (x.rank() != 4)
            fail(ErrorCode::invalid_argument,
                 "maxpool: expected rank-4 input, got " + x.shape_str());
        input_shape_ = x.shape();
        const std::size_t B = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
        const std::size_t OH = conv_out_dim(H, kh_, stride_, pad_);
        const std::size_t OW = conv_out_dim(W, kw_, stride_, pad_);
        long pad_top = 0, pad_left = 0;
        if (pad_ == Padding::same) {
            pad_top = std::max<long>(
                          0, static_cast<long>((OH - 1) * stride_ + kh_) - static_cast<long>(H)) /
                      2;
            pad_left = std::max<long>(
                           0, static_cast<long>((OW - 1) * stride_ + kw_) - static_cast<long>(W)) /
                       2;
        }
        Tensor<T> y({B, OH, OW, C});
        argmax_.assign(y.numel(), 0);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t oh = 0; oh < OH; ++oh)
                for (std::size_t ow = 0; ow < OW; ++ow)
                    for (std::size_t ch = 0; ch < C; ++ch) {
                        bool first = true;
                        T best{};
                        std::size_t best_idx = 0;
                        for (std::size_t r = 0; r < kh_; ++r) {
                            const long ih = static_cast<long>(oh * stride_ + r) - pad_top;
                            if (ih < 0 || ih >= static_cast<long>(H)) continue;
                            for (std::size_t c = 0; c < kw_; ++c) {
                                const long iw = static_cast<long>(ow * stride_ + c) - pad_left;
                                if (iw < 0 || iw >= static_cast<long>(W)) continue;
                                const std::size_t idx =
                                    ((b * H + static_cast<std::size_t>(ih)) * W +
                                     static_cast<std::size_t>(iw)) * C + ch;
                                if (first || x[idx] > best) {
                                    best = x[idx];
                                    best_idx = idx;
                                    first = false;
                                }
                            }
                        }
                        if (first)
                            fail(ErrorCode::invalid_argument,
                                 "maxpool: window has no in-bounds element");
                        const std::size_t out_idx = ((b * OH + oh) * OW + ow) * C + ch;
                        y[out_idx] = best;
                        argmax_[out_idx] = best_idx;
                    }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) override {
        Tensor<T> dx(input_shape_);
        for (std::size_t i = 0; i < dy.numel(); ++i) dx[argmax_[i]] += dy[i];
        return dx;
    }

    std::string describe() const override {
        return "maxpool " + std::to_string(kh_) + "x" + std::to_string(kw_) + " stride " +
               std::to_string(stride_) + " " + padding_name(pad_);
    }

private:
    std::size_t kh_, kw_, stride_;
    Padding pad_;
    std::vector<std::size_t> argmax_;
    std::vector<std::size_t> input_shape_;
};

// Batch normalization. Per-feature statistics for [B, F] inputs, per-channel
// for [B, H, W, C]. Training uses population batch statistics and refreshes
// the running estimates; inference uses the running estimates.
template <class T>
class BatchNormLayer final : public Layer<T> {
public:
    explicit BatchNormLayer(std::size_t features, T momentum = T{0.9}, T epsilon = T{1e-5},
                            const std::string& name = "bn")
        : features_(features), momentum_(momentum), epsilon_(epsilon) {
        if (epsilon_ <= T{0}) fail(ErrorCode::invalid_argument, "batchnorm: epsilon must be > 0");
        gamma_ = Parameter<T>(name + ".gamma", Tensor<T>({features_}));
        beta_ = Parameter<T>(name + ".beta", Tensor<T>::zeros({features_}));
        for (std::size_t i = 0; i < features_; ++i) gamma_.value[i] = T{1};
        running_mean_.assign(features_, T{0});
        running_var_.assign(features_, T{1});
    }

    Tensor<T> forward(const Tensor<T>& x, bool training) override {
        const std::size_t rows = plan(x);
        training_ = training;
        xhat_ = Tensor<T>(x.shape());
        Tensor<T> y(x.shape());
        if (training) {
            if (rows < 2)
                fail(ErrorCode::invalid_argument,
                     "batchnorm: training needs at least 2 samples per feature, got " +
                         std::to_string(rows));
            mean_.assign(features_, T{0});
            var_.assign(features_, T{0});
            visit(x, [&](std::size_t, std::size_t f, const T& v) { mean_[f] += v; });
            for (std::size_t f = 0; f < features_; ++f) mean_[f] /= static_cast<T>(rows);
            visit(x, [&](std::size_t, std::size_t f, const T& v) {
                const T d = v - mean_[f];
                var_[f] += d * d;
            });
            for (std::size_t f = 0; f < features_; ++f) var_[f] /= static_cast<T>(rows);
            for (std::size_t f = 0; f < features_; ++f) {
                running_mean_[f] = momentum_ * running_mean_[f] + (T{1} - momentum_) * mean_[f];
                running_var_[f] = momentum_ * running_var_[f] + (T{1} - momentum_) * var_[f];
            }
        } else {
            mean_ = running_mean_;
            var_ = running_var_;
        }
        inv_std_.resize(features_);
        for (std::size_t f = 0; f < features_; ++f)
            inv_std_[f] = T{1} / std::sqrt(var_[f] + epsilon_);
        rows_ = rows;
        for (std::size_t i = 0; i < x.numel(); ++i) {
            const std::size_t f = i % features_;
            xhat_[i] = (x[i] - mean_[f]) * inv_std_[f];
            y[i] = gamma_.value[f] * xhat_[i] + beta_.value[f];
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) override {
        const std::size_t N = rows_;
        Tensor<T> dx(dy.shape());
        std::vector<T> sum_dxhat(features_, T{0});
        std::vector<T> sum_dxhat_xhat(features_, T{0});
        for (std::size_t i = 0; i < dy.numel(); ++i) {
            const std::size_t f = i % features_;
            const T dxhat = dy[i] * gamma_.value[f];
            sum_dxhat[f] += dxhat;
            sum_dxhat_xhat[f] += dxhat * xhat_[i];
            gamma_.grad[f] += dy[i] * xhat_[i];
            beta_.grad[f] += dy[i];
        }
        if (training_) {
            // dx = (1/N)·inv_std·(N·dxhat − Σdxhat − x̂·Σ(dxhat·x̂))
            for (std::size_t i = 0; i < dy.numel(); ++i) {
                const std::size_t f = i % features_;
                const T dxhat = dy[i] * gamma_.value[f];
                dx[i] = inv_std_[f] *
                        (dxhat - (sum_dxhat[f] + xhat_[i] * sum_dxhat_xhat[f]) / static_cast<T>(N));
            }
        } else {
            for (std::size_t i = 0; i < dy.numel(); ++i) {
                const std::size_t f = i % features_;
                dx[i] = dy[i] * gamma_.value[f] * inv_std_[f];
            }
        }
        return dx;
    }

    std::vector<Parameter<T>*> params() override { return {&gamma_, &beta_}; }

    std::string describe() const override { return "batchnorm " + std::to_string(features_); }

    const std::vector<T>& running_mean() const { return running_mean_; }
    const std::vector<T>& running_var() const { return running_var_; }
    void set_running(std::vector<T> mean, std::vector<T> var) {
        running_mean_ = std::move(mean);
        running_var_ = std::move(var);
    }
    std::size_t features() const { return features_; }

private:
    std::size_t plan(const Tensor<T>& x) const {
        if (x.rank() < 2)
            fail(ErrorCode::invalid_argument, "batchnorm: expected rank >= 2 input");
        if (x.shape().back() != features_)
            fail(ErrorCode::invalid_argument,
                 "batchnorm: trailing dimension " + std::to_string(x.shape().back()) +
                     " != features " + std::to_string(features_));
        return x.numel() / features_;
    }

    template <class Fn>
    void visit(const Tensor<T>& x, Fn&& fn) const {
        for (std::size_t i = 0; i < x.numel(); ++i) fn(i / features_, i % features_, x[i]);
    }

    std::size_t features_;
    T momentum_, epsilon_;
    Parameter<T> gamma_, beta_;
    std::vector<T> running_mean_, running_var_;
    std::vector<T> mean_, var_, inv_std_;
    Tensor<T> xhat_;
    std::size_t rows_ = 0;
    bool training_ = false;
};

} // namespace ocean::net
