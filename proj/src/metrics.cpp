#include "metrics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "error.hpp"

namespace ocean {

std::array<double, TraitVector::kSize> rmse_per_trait(std::span<const double> pred,
                                                      std::span<const double> target) {
    constexpr std::size_t k = TraitVector::kSize;
    if (pred.size() != target.size() || pred.size() % k != 0 || pred.empty())
        fail(ErrorCode::invalid_argument, "rmse: expected matching non-empty [B,5] arrays");
    const std::size_t n = pred.size() / k;
    std::array<double, k> out{};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const double d = pred[i * k + j] - target[i * k + j];
            out[j] += d * d;
        }
    for (std::size_t j = 0; j < k; ++j) out[j] = std::sqrt(out[j] / static_cast<double>(n));
    return out;
}

std::array<TraitClassMetrics, TraitVector::kSize> binary_metrics(
    std::span<const BinaryLabels> predicted, std::span<const BinaryLabels> actual) {
    if (predicted.size() != actual.size())
        fail(ErrorCode::invalid_argument, "binary metrics: size mismatch");
    std::array<TraitClassMetrics, TraitVector::kSize> out{};
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        for (std::size_t t = 0; t < TraitVector::kSize; ++t) {
            const int p = predicted[i].bits[t];
            const int a = actual[i].bits[t];
            if ((p != 0 && p != 1) || (a != 0 && a != 1))
                fail(ErrorCode::invalid_argument, "binary metrics: bits must be 0 or 1");
            ConfusionMatrix& cm = out[t].cm;
            if (p == 1 && a == 1) ++cm.tp;
            else if (p == 0 && a == 0) ++cm.tn;
            else if (p == 1 && a == 0) ++cm.fp;
            else ++cm.fn;
        }
    }
    for (auto& m : out) {
        const ConfusionMatrix& cm = m.cm;
        const std::uint64_t total = cm.total();
        m.accuracy = total ? static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total) : 0.0;
        if (cm.tp + cm.fp > 0)
            m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
        if (cm.tp + cm.fn > 0)
            m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    }
    return out;
}

MetricsReport compare_report(const MetricsReport& model, const MetricsReport& baseline) {
    if (model.count != baseline.count || model.split != baseline.split)
        fail(ErrorCode::invalid_argument,
             "compare_report: reports describe different evaluation sets (" + model.split + "/" +
                 std::to_string(model.count) + " vs " + baseline.split + "/" +
                 std::to_string(baseline.count) + ")");
    MetricsReport out = model;
    out.baseline_rmse = baseline.rmse;
    std::array<double, TraitVector::kSize> imp{};
    for (std::size_t i = 0; i < TraitVector::kSize; ++i)
        imp[i] = baseline.rmse[i] > 0.0 ? (baseline.rmse[i] - model.rmse[i]) / baseline.rmse[i]
                                        : 0.0;
    out.improvement = imp;
    return out;
}

nlohmann::json MetricsReport::to_json() const {
    nlohmann::json j;
    j["model"] = model;
    j["split"] = split;
    j["count"] = count;
    const auto names = TraitVector::trait_names();
    if (!classification)
        for (std::size_t i = 0; i < TraitVector::kSize; ++i) j["rmse"][names[i]] = rmse[i];
    if (baseline_rmse)
        for (std::size_t i = 0; i < TraitVector::kSize; ++i)
            j["baseline_rmse"][names[i]] = (*baseline_rmse)[i];
    if (improvement)
        for (std::size_t i = 0; i < TraitVector::kSize; ++i)
            j["improvement"][names[i]] = (*improvement)[i];
    if (classification) {
        for (std::size_t i = 0; i < TraitVector::kSize; ++i) {
            const TraitClassMetrics& m = (*classification)[i];
            nlohmann::json c;
            c["tp"] = m.cm.tp;
            c["tn"] = m.cm.tn;
            c["fp"] = m.cm.fp;
            c["fn"] = m.cm.fn;
            c["accuracy"] = m.accuracy;
            if (m.precision) c["precision"] = *m.precision;
            if (m.recall) c["recall"] = *m.recall;
            j["classification"][names[i]] = c;
        }
    }
    return j;
}

std::string MetricsReport::to_text_table() const {
    std::ostringstream os;
    os << "model " << model << " on " << split << " (" << count << " sentences)\n";
    const auto names = TraitVector::trait_names();
    auto row = [&](const std::string& label, const std::array<double, 5>& vals,
                   bool percent = false) {
        os << std::left << std::setw(14) << label;
        for (std::size_t i = 0; i < TraitVector::kSize; ++i) {
            os << std::right << std::setw(9) << std::fixed << std::setprecision(percent ? 1 : 4)
               << (percent ? vals[i] * 100.0 : vals[i]);
            if (percent) os << '%';
        }
        os << "\n";
    };
    os << std::left << std::setw(14) << "";
    for (std::size_t i = 0; i < TraitVector::kSize; ++i)
        os << std::right << std::setw(9) << names[i];
    os << "\n";
    if (!classification) row("rmse", rmse);
    if (baseline_rmse) row("model0 rmse", *baseline_rmse);
    if (improvement) row("improvement", *improvement, true);
    if (classification) {
        std::array<double, 5> acc{};
        for (std::size_t i = 0; i < TraitVector::kSize; ++i)
            acc[i] = (*classification)[i].accuracy;
        row("accuracy", acc, true);
        for (std::size_t i = 0; i < TraitVector::kSize; ++i) {
            const TraitClassMetrics& m = (*classification)[i];
            os << "  " << names[i] << ": tp=" << m.cm.tp << " tn=" << m.cm.tn
               << " fp=" << m.cm.fp << " fn=" << m.cm.fn;
            if (m.precision)
                os << " precision=" << std::fixed << std::setprecision(4) << *m.precision;
            else
                os << " precision=n/a";
            if (m.recall)
                os << " recall=" << std::fixed << std::setprecision(4) << *m.recall;
            else
                os << " recall=n/a";
            os << "\n";
        }
    }
    return os.str();
}

} // namespace ocean
