#pragma once

#include <fstream>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "layers.hpp"

namespace ocean::net {

// Structural description of one layer, enough to rebuild it on load.
struct LayerConfig {
    enum class Kind { dense, conv, maxpool, batchnorm, relu, sigmoid };
    Kind kind{};
    std::size_t in = 0, out = 0;                          // dense
    std::size_t kh = 0, kw = 0, cin = 0, cout = 0;        // conv / maxpool window
    std::size_t stride = 1;
    Padding pad = Padding::valid;
    std::size_t features = 0;                             // batchnorm
};

// Sequential layer stack. Checkpoints are a JSON manifest plus a flat
// little-endian float32 block file; see docs/formats.md for the layout.
template <class T>
class Network {
public:
    Network() = default;
    Network(Network&&) noexcept = default;
    Network& operator=(Network&&) noexcept = default;

    void add_dense(std::size_t in, std::size_t out, Rng& rng) {
        auto name = "L" + std::to_string(layers_.size()) + ".dense";
        layers_.push_back(std::make_unique<DenseLayer<T>>(in, out, rng, name));
        LayerConfig c;
        c.kind = LayerConfig::Kind::dense;
        c.in = in;
        c.out = out;
        configs_.push_back(c);
    }

    void add_conv(std::size_t kh, std::size_t kw, std::size_t cin, std::size_t cout,
                  std::size_t stride, Padding pad, Rng& rng) {
        auto name = "L" + std::to_string(layers_.size()) + ".conv";
        layers_.push_back(std::make_unique<Conv2dLayer<T>>(kh, kw, cin, cout, stride, pad, rng,
                                                           name));
        LayerConfig c;
        c.kind = LayerConfig::Kind::conv;
        c.kh = kh;
        c.kw = kw;
        c.cin = cin;
        c.cout = cout;
        c.stride = stride;
        c.pad = pad;
        configs_.push_back(c);
    }

    void add_maxpool(std::size_t kh, std::size_t kw, std::size_t stride, Padding pad) {
        layers_.push_back(std::make_unique<MaxPool2dLayer<T>>(kh, kw, stride, pad));
        LayerConfig c;
        c.kind = LayerConfig::Kind::maxpool;
        c.kh = kh;
        c.kw = kw;
        c.stride = stride;
        c.pad = pad;
        configs_.push_back(c);
    }

    void add_batchnorm(std::size_t features) {
        auto name = "L" + std::to_string(layers_.size()) + ".bn";
        layers_.push_back(std::make_unique<BatchNormLayer<T>>(features, T{0.9}, T{1e-5}, name));
        LayerConfig c;
        c.kind = LayerConfig::Kind::batchnorm;
        c.features = features;
        configs_.push_back(c);
    }

    void add_relu() {
        layers_.push_back(std::make_unique<ReluLayer<T>>());
        configs_.push_back({LayerConfig::Kind::relu});
    }

    void add_sigmoid() {
        layers_.push_back(std::make_unique<SigmoidLayer<T>>());
        configs_.push_back({LayerConfig::Kind::sigmoid});
    }

    Tensor<T> forward(const Tensor<T>& x, bool training) {
        Tensor<T> cur = x;
        for (auto& layer : layers_) cur = layer->forward(cur, training);
        return cur;
    }

    Tensor<T> backward(const Tensor<T>& dloss) {
        Tensor<T> cur = dloss;
        for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) cur = (*it)->backward(cur);
        return cur;
    }

    std::vector<Parameter<T>*> params() {
        std::vector<Parameter<T>*> out;
        for (auto& layer : layers_)
            for (Parameter<T>* p : layer->params()) out.push_back(p);
        return out;
    }

    void zero_grads() {
        for (Parameter<T>* p : params())
            std::fill(p->grad.storage().begin(), p->grad.storage().end(), T{0});
    }

    std::size_t param_count() {
        std::size_t n = 0;
        for (Parameter<T>* p : params()) n += p->value.numel();
        return n;
    }

    std::size_t layer_count() const { return layers_.size(); }
    Layer<T>& layer(std::size_t i) { return *layers_[i]; }
    const std::vector<LayerConfig>& configs() const { return configs_; }

    std::vector<std::string> describe() const {
        std::vector<std::string> out;
        for (const auto& layer : layers_) out.push_back(layer->describe());
        return out;
    }

    // Writes <stem>.json and <stem>.bin; `extra` is merged into the manifest
    // (model id, hyperparameters, provenance, ...).
    void save(const std::string& stem, const nlohmann::json& extra = {}) {
        nlohmann::json manifest;
        manifest["format"] = "ocean-net v1";
        manifest["layers"] = nlohmann::json::array();
        for (const LayerConfig& c : configs_) manifest["layers"].push_back(config_to_json(c));

        std::ofstream bin(stem + ".bin", std::ios::binary);
        if (!bin) fail(ErrorCode::io, "checkpoint: cannot write " + stem + ".bin");
        std::size_t offset = 0;
        nlohmann::json blocks = nlohmann::json::array();
        auto write_block = [&](const std::string& name, const std::vector<std::size_t>& shape,
                               const T* data, std::size_t n) {
            nlohmann::json b;
            b["name"] = name;
            b["shape"] = shape;
            b["offset"] = offset;
            blocks.push_back(b);
            for (std::size_t i = 0; i < n; ++i) {
                float v = static_cast<float>(data[i]);
                bin.write(reinterpret_cast<const char*>(&v), sizeof(float));
            }
            offset += n;
        };
        for (Parameter<T>* p : params())
            write_block(p->name, p->value.shape(), p->value.data(), p->value.numel());
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            if (auto* bn = dynamic_cast<BatchNormLayer<T>*>(layers_[i].get())) {
                const std::string base = "L" + std::to_string(i) + ".bn.";
                write_block(base + "running_mean", {bn->features()}, bn->running_mean().data(),
                            bn->features());
                write_block(base + "running_var", {bn->features()}, bn->running_var().data(),
                            bn->features());
            }
        }
        if (!bin) fail(ErrorCode::io, "checkpoint: write failed for " + stem + ".bin");
        manifest["blocks"] = blocks;
        manifest["float_count"] = offset;
        for (auto it = extra.begin(); it != extra.end(); ++it) manifest[it.key()] = it.value();

        std::ofstream mf(stem + ".json", std::ios::binary);
        if (!mf) fail(ErrorCode::io, "checkpoint: cannot write " + stem + ".json");
        mf << manifest.dump(2) << "\n";
    }

    static Network load(const std::string& stem, nlohmann::json* manifest_out = nullptr) {
        std::ifstream mf(stem + ".json");
        if (!mf) fail(ErrorCode::io, "checkpoint: cannot open " + stem + ".json");
        nlohmann::json manifest = nlohmann::json::parse(mf, nullptr, false);
        if (manifest.is_discarded())
            fail(ErrorCode::parse, "checkpoint: invalid manifest " + stem + ".json");

        Network net;
        Rng rng(0); // placeholder init, overwritten by stored weights
        for (const auto& jc : manifest.at("layers")) {
            LayerConfig c = config_from_json(jc);
            switch (c.kind) {
                case LayerConfig::Kind::dense: net.add_dense(c.in, c.out, rng); break;
                case LayerConfig::Kind::conv:
                    net.add_conv(c.kh, c.kw, c.cin, c.cout, c.stride, c.pad, rng);
                    break;
                case LayerConfig::Kind::maxpool: net.add_maxpool(c.kh, c.kw, c.stride, c.pad); break;
                case LayerConfig::Kind::batchnorm: net.add_batchnorm(c.features); break;
                case LayerConfig::Kind::relu: net.add_relu(); break;
                case LayerConfig::Kind::sigmoid: net.add_sigmoid(); break;
            }
        }

        std::ifstream bin(stem + ".bin", std::ios::binary);
        if (!bin) fail(ErrorCode::io, "checkpoint: cannot open " + stem + ".bin");
        std::vector<float> raw(manifest.at("float_count").get<std::size_t>());
        bin.read(reinterpret_cast<char*>(raw.data()),
                 static_cast<std::streamsize>(raw.size() * sizeof(float)));
        if (bin.gcount() != static_cast<std::streamsize>(raw.size() * sizeof(float)))
            fail(ErrorCode::parse, "checkpoint: " + stem + ".bin is truncated");

        std::unordered_map<std::string, std::pair<std::size_t, std::vector<std::size_t>>> index;
        for (const auto& b : manifest.at("blocks"))
            index[b.at("name").get<std::string>()] = {
                b.at("offset").get<std::size_t>(),
                b.at("shape").get<std::vector<std::size_t>>()};

        auto fill = [&](const std::string& name, T* dst, std::size_t n) {
            auto it = index.find(name);
            if (it == index.end())
                fail(ErrorCode::parse, "checkpoint: missing block '" + name + "'");
            const std::size_t off = it->second.first;
            if (off + n > raw.size())
                fail(ErrorCode::parse, "checkpoint: block '" + name + "' out of range");
            for (std::size_t i = 0; i < n; ++i) dst[i] = static_cast<T>(raw[off + i]);
        };
        for (Parameter<T>* p : net.params()) fill(p->name, p->value.data(), p->value.numel());
        for (std::size_t i = 0; i < net.layers_.size(); ++i) {
            if (auto* bn = dynamic_cast<BatchNormLayer<T>*>(net.layers_[i].get())) {
                const std::string base = "L" + std::to_string(i) + ".bn.";
                std::vector<T> mean(bn->features()), var(bn->features());
                fill(base + "running_mean", mean.data(), mean.size());
                fill(base + "running_var", var.data(), var.size());
                bn->set_running(std::move(mean), std::move(var));
            }
        }
        if (manifest_out) *manifest_out = std::move(manifest);
        return net;
    }

private:
    static nlohmann::json config_to_json(const LayerConfig& c) {
        nlohmann::json j;
        switch (c.kind) {
            case LayerConfig::Kind::dense:
                j["kind"] = "dense";
                j["in"] = c.in;
                j["out"] = c.out;
                break;
            case LayerConfig::Kind::conv:
                j["kind"] = "conv";
                j["kh"] = c.kh;
                j["kw"] = c.kw;
                j["cin"] = c.cin;
                j["cout"] = c.cout;
                j["stride"] = c.stride;
                j["padding"] = padding_name(c.pad);
                break;
            case LayerConfig::Kind::maxpool:
                j["kind"] = "maxpool";
                j["kh"] = c.kh;
                j["kw"] = c.kw;
                j["stride"] = c.stride;
                j["padding"] = padding_name(c.pad);
                break;
            case LayerConfig::Kind::batchnorm:
                j["kind"] = "batchnorm";
                j["features"] = c.features;
                break;
            case LayerConfig::Kind::relu: j["kind"] = "relu"; break;
            case LayerConfig::Kind::sigmoid: j["kind"] = "sigmoid"; break;
        }
        return j;
    }

    static LayerConfig config_from_json(const nlohmann::json& j) {
        LayerConfig c;
        const std::string kind = j.at("kind").get<std::string>();
        auto pad_of = [&]() {
            return j.at("padding").get<std::string>() == "same" ? Padding::same : Padding::valid;
        };
        if (kind == "dense") {
            c.kind = LayerConfig::Kind::dense;
            c.in = j.at("in").get<std::size_t>();
            c.out = j.at("out").get<std::size_t>();
        } else if (kind == "conv") {
            c.kind = LayerConfig::Kind::conv;
            c.kh = j.at("kh").get<std::size_t>();
            c.kw = j.at("kw").get<std::size_t>();
            c.cin = j.at("cin").get<std::size_t>();
            c.cout = j.at("cout").get<std::size_t>();
            c.stride = j.at("stride").get<std::size_t>();
            c.pad = pad_of();
        } else if (kind == "maxpool") {
            c.kind = LayerConfig::Kind::maxpool;
            c.kh = j.at("kh").get<std::size_t>();
            c.kw = j.at("kw").get<std::size_t>();
            c.stride = j.at("stride").get<std::size_t>();
            c.pad = pad_of();
        } else if (kind == "batchnorm") {
            c.kind = LayerConfig::Kind::batchnorm;
            c.features = j.at("features").get<std::size_t>();
        } else if (kind == "relu") {
            c.kind = LayerConfig::Kind::relu;
        } else if (kind == "sigmoid") {
            c.kind = LayerConfig::Kind::sigmoid;
        } else {
            fail(ErrorCode::parse, "checkpoint: unknown layer kind '" + kind + "'");
        }
        return c;
    }

    std::vector<std::unique_ptr<Layer<T>>> layers_;
    std::vector<LayerConfig> configs_;
};

} // namespace ocean::net
