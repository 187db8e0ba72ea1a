// ocean — command-line front end for the trait-learning pipeline.
//
// Built entirely on the public C API (ocean/ocean.h). Assembles one JSON
// config per invocation: config file (if any), then --key=value overrides,
// flags winning over file values.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <ocean/ocean.h>

namespace {

using nlohmann::json;

// "train.epochs=3" -> doc["train"]["epochs"] = 3 (JSON value when parseable).
bool apply_override(json& doc, const std::string& spec, std::string& err) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
        err = "override must look like key.path=value: " + spec;
        return false;
    }
    std::string pointer = "/";
    for (char c : spec.substr(0, eq)) pointer += c == '.' ? '/' : c;
    const std::string raw = spec.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    try {
        doc[json::json_pointer(pointer)] = value;
    } catch (const std::exception& e) {
        err = std::string("bad override key: ") + e.what();
        return false;
    }
    return true;
}

int run_command(const std::string& command, const json& config) {
    const std::string doc = config.dump();
    const ocean_status st = ocean_run(command.c_str(), doc.c_str());
    if (st != OCEAN_OK) {
        std::cerr << "ocean " << command << ": " << ocean_status_name(st) << ": "
                  << ocean_last_error() << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ocean: Big Five trait learning from text"};
    app.set_version_flag("--version", std::string(ocean_version()));
    app.require_subcommand(1);

    std::string config_path;
    if (const char* env = std::getenv("OCEAN_CONFIG")) config_path = env;
    app.add_option("-c,--config", config_path, "JSON config file (default: $OCEAN_CONFIG)");

    std::vector<std::string> overrides;
    app.add_option("-s,--set", overrides,
                   "Config override key.path=value (repeatable, wins over the file)");

    long long seed = -1;
    app.add_option("--seed", seed, "Global seed (shorthand for --set seed=N)");

    struct Sub {
        CLI::App* cmd;
        const char* name;
    };
    std::vector<Sub> subs;
    auto sub = [&](const char* name, const char* desc) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        cmd->fallthrough(); // global -c/--set/--seed may follow the subcommand
        subs.push_back({cmd, name});
        return cmd;
    };

    sub("prep", "Label raw documents and write the labeled sentence corpus");
    sub("vocab", "Build the frequency-ranked vocabulary from the labeled corpus");
    sub("embed", "Train skip-gram embeddings over the labeled corpus");
    auto* train = sub("train", "Train one catalog model");
    auto* evalc = sub("eval", "Evaluate a checkpoint against a split, with model-0 baseline");
    sub("predict", "Predict traits for raw input lines with a trained checkpoint");
    sub("gradcheck", "Run the finite-difference gradient suite");
    sub("catalog", "Print the 16-model catalog as JSON");

    long long model_id = -1;
    train->add_option("--model", model_id, "Catalog model id (0..15)");
    std::string eval_split;
    evalc->add_option("--split", eval_split, "Split to evaluate: train|validation|test");

    CLI11_PARSE(app, argc, argv);

    json config = json::object();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "ocean: cannot open config file " << config_path << "\n";
            return 1;
        }
        config = json::parse(in, nullptr, false);
        if (config.is_discarded() || !config.is_object()) {
            std::cerr << "ocean: invalid JSON config " << config_path << "\n";
            return 1;
        }
    }
    if (seed >= 0) config["seed"] = seed;
    if (model_id >= 0) config["model"]["id"] = model_id;
    if (!eval_split.empty()) config["eval"]["split"] = eval_split;
    for (const std::string& o : overrides) {
        std::string err;
        if (!apply_override(config, o, err)) {
            std::cerr << "ocean: " << err << "\n";
            return 1;
        }
    }

    for (const Sub& s : subs)
        if (s.cmd->parsed()) return run_command(s.name, config);
    std::cerr << "ocean: no subcommand\n";
    return 1;
}
