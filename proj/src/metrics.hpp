#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "traits.hpp"

namespace ocean {

// Per-trait RMSE over [B,5] row-major prediction/target arrays.
std::array<double, TraitVector::kSize> rmse_per_trait(std::span<const double> pred,
                                                      std::span<const double> target);

struct ConfusionMatrix {
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;

    std::uint64_t total() const { return tp + tn + fp + fn; }
};

struct TraitClassMetrics {
    ConfusionMatrix cm;
    double accuracy = 0.0;
    // Absent when the denominator is zero; an all-negative predictor gets
    // no precision rather than a flattering one.
    std::optional<double> precision;
    std::optional<double> recall;
};

// Positive class is bit 1; bits must be 0 or 1.
std::array<TraitClassMetrics, TraitVector::kSize> binary_metrics(
    std::span<const BinaryLabels> predicted, std::span<const BinaryLabels> actual);

struct MetricsReport {
    std::string model;
    std::string split;
    std::size_t count = 0;
    std::array<double, TraitVector::kSize> rmse{};
    std::optional<std::array<double, TraitVector::kSize>> baseline_rmse;
    std::optional<std::array<double, TraitVector::kSize>> improvement; // (base-model)/base
    std::optional<std::array<TraitClassMetrics, TraitVector::kSize>> classification;

    nlohmann::json to_json() const;
    std::string to_text_table() const;
};

// Side-by-side per-trait RMSE with a relative-improvement column. Both
// reports must describe the same evaluation set.
MetricsReport compare_report(const MetricsReport& model, const MetricsReport& baseline);

} // namespace ocean
