#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "network.hpp"

namespace ocean::net {

struct GradCheckBlock {
    std::string name;
    double max_rel_err = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckBlock> blocks;

    double max_rel_err() const {
        double m = 0.0;
        for (const auto& b : blocks) m = std::max(m, b.max_rel_err);
        return m;
    }

    bool all_below(double tol) const { return max_rel_err() < tol; }
};

// ||analytic - numeric||_inf scaled by the larger block magnitude, so
// truncation noise on near-zero entries does not dominate.
inline double block_rel_err(const std::vector<double>& analytic,
                            const std::vector<double>& numeric) {
    double diff = 0.0, scale = 1e-6;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
        scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
    }
    return diff / scale;
}

// Central finite differences, h on 64-bit reals, against the network's
// analytic backward pass. loss_fn maps the network output to a scalar and
// (when grad != nullptr) fills the output gradient. The fragment must be
// deterministic; batch-norm layers see batch statistics, whose contribution
// to the gradient is part of what is being checked.
inline GradCheckReport check_network_gradients(
    Network<double>& net, const Tensor<double>& input,
    const std::function<double(const Tensor<double>&, Tensor<double>*)>& loss_fn,
    bool training = true, double h = 1e-4) {
    GradCheckReport report;

    net.zero_grads();
    Tensor<double> out = net.forward(input, training);
    Tensor<double> dloss;
    loss_fn(out, &dloss);
    Tensor<double> analytic_dx = net.backward(dloss);

    auto params = net.params();
    std::vector<std::vector<double>> analytic_grads;
    for (Parameter<double>* p : params) analytic_grads.push_back(p->grad.storage());

    auto eval_loss = [&]() {
        Tensor<double> y = net.forward(input, training);
        return loss_fn(y, nullptr);
    };

    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Parameter<double>* p = params[pi];
        std::vector<double> numeric(p->value.numel());
        for (std::size_t i = 0; i < p->value.numel(); ++i) {
            const double saved = p->value[i];
            p->value[i] = saved + h;
            const double lp = eval_loss();
            p->value[i] = saved - h;
            const double lm = eval_loss();
            p->value[i] = saved;
            numeric[i] = (lp - lm) / (2.0 * h);
        }
        report.blocks.push_back({p->name, block_rel_err(analytic_grads[pi], numeric)});
    }

    {
        Tensor<double> x = input;
        std::vector<double> numeric(x.numel());
        for (std::size_t i = 0; i < x.numel(); ++i) {
            const double saved = x[i];
            x[i] = saved + h;
            const double lp = loss_fn(net.forward(x, training), nullptr);
            x[i] = saved - h;
            const double lm = loss_fn(net.forward(x, training), nullptr);
            x[i] = saved;
            numeric[i] = (lp - lm) / (2.0 * h);
        }
        report.blocks.push_back({"input", block_rel_err(analytic_dx.storage(), numeric)});
    }

    net.zero_grads();
    return report;
}

} // namespace ocean::net
