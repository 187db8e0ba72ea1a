#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../rng.hpp"

namespace ocean::net {

// Dense row-major array. Small by design: shape + flat storage + the
// accessors the layers need.
template <class T>
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
        data_.assign(numel_of(shape_), T{0});
    }

    Tensor(std::vector<std::size_t> shape, std::vector<T> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != numel_of(shape_))
            fail(ErrorCode::invalid_argument, "tensor: data length does not match shape");
    }

    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }

    static Tensor uniform(std::vector<std::size_t> shape, T lo, T hi, Rng& rng) {
        Tensor t(std::move(shape));
        for (T& x : t.data_) x = static_cast<T>(rng.uniform(static_cast<double>(lo),
                                                            static_cast<double>(hi)));
        return t;
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t i) const { return shape_[i]; }
    std::size_t numel() const { return data_.size(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& storage() { return data_; }
    const std::vector<T>& storage() const { return data_; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    T& at2(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    const T& at2(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

    T& at4(std::size_t b, std::size_t h, std::size_t w, std::size_t c) {
        return data_[((b * shape_[1] + h) * shape_[2] + w) * shape_[3] + c];
    }
    const T& at4(std::size_t b, std::size_t h, std::size_t w, std::size_t c) const {
        return data_[((b * shape_[1] + h) * shape_[2] + w) * shape_[3] + c];
    }

    // Reinterpret as [batch, features] without copying data.
    Tensor reshaped(std::vector<std::size_t> shape) const {
        if (numel_of(shape) != data_.size())
            fail(ErrorCode::invalid_argument, "tensor: reshape changes element count");
        return Tensor(std::move(shape), data_);
    }

    bool finite() const {
        for (T x : data_)
            if (!std::isfinite(static_cast<double>(x))) return false;
        return true;
    }

    std::string shape_str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < shape_.size(); ++i)
            s += (i ? "x" : "") + std::to_string(shape_[i]);
        return s + "]";
    }

    static std::size_t numel_of(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        return shape.empty() ? 0 : n;
    }

private:
    std::vector<std::size_t> shape_;
    std::vector<T> data_;
};

} // namespace ocean::net
