#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "error.hpp"

namespace ocean {

// Five trait loadings in fixed order: Openness, Conscientiousness,
// Extraversion, Agreeableness, Neuroticism.
struct TraitVector {
    double o = 0.0;
    double c = 0.0;
    double e = 0.0;
    double a = 0.0;
    double n = 0.0;

    static constexpr std::size_t kSize = 5;

    double operator[](std::size_t i) const {
        const std::array<const double*, kSize> p{&o, &c, &e, &a, &n};
        return *p[i];
    }

    double& operator[](std::size_t i) {
        const std::array<double*, kSize> p{&o, &c, &e, &a, &n};
        return *p[i];
    }

    bool finite() const {
        for (std::size_t i = 0; i < kSize; ++i)
            if (!std::isfinite((*this)[i])) return false;
        return true;
    }

    static constexpr std::array<const char*, kSize> trait_names() {
        return {"O", "C", "E", "A", "N"};
    }

    friend bool operator==(const TraitVector&, const TraitVector&) = default;
};

// One bit per trait, same O,C,E,A,N order.
struct BinaryLabels {
    std::array<int, TraitVector::kSize> bits{};

    friend bool operator==(const BinaryLabels&, const BinaryLabels&) = default;
};

// A trait below zero maps to 0, anything at or above zero to 1.
inline BinaryLabels binarize(const TraitVector& t) {
    if (!t.finite())
        fail(ErrorCode::invalid_argument, "binarize: trait vector is not finite");
    BinaryLabels out;
    for (std::size_t i = 0; i < TraitVector::kSize; ++i)
        out.bits[i] = t[i] < 0.0 ? 0 : 1;
    return out;
}

} // namespace ocean
