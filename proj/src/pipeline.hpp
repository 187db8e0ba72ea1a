#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ocean::pipeline {

// One JSON document drives every stage; see README for the key reference.
// Stages communicate through files only, so any stage can be re-run in
// isolation and re-runs with unchanged inputs and seed are byte-identical.
class RunConfig {
public:
    RunConfig() : doc_(nlohmann::json::object()) {}
    explicit RunConfig(nlohmann::json doc);

    static RunConfig from_file(const std::string& path);

    const nlohmann::json& doc() const { return doc_; }

    std::uint64_t seed() const;
    std::string path(const std::string& key) const;          // "" when absent
    std::string require_path(const std::string& key) const;  // must exist on disk

    template <class T>
    T get(const std::string& json_pointer, T fallback) const {
        const auto ptr = nlohmann::json::json_pointer(json_pointer);
        if (!doc_.contains(ptr)) return fallback;
        return doc_.at(ptr).get<T>();
    }

    // Applies a dotted key override, e.g. "train.epochs=3"; values parse as
    // JSON when possible and fall back to strings.
    void override_key(const std::string& dotted_key, const std::string& value);

private:
    nlohmann::json doc_;
};

// Provenance block stamped into every artifact: tool version, seed, and
// FNV-1a digests of the stage inputs. Deliberately timestamp-free.
std::string provenance_json(const RunConfig& cfg, const std::vector<std::string>& input_paths);

inline constexpr const char* kCommands[] = {"prep",  "vocab",   "embed",    "train",
                                            "eval",  "predict", "gradcheck", "catalog"};

// Dispatches one subcommand; throws ocean::Error on failure. Human-readable
// progress goes to `out`.
void run(const std::string& command, const RunConfig& cfg, std::ostream& out);

void stage_prep(const RunConfig& cfg, std::ostream& out);
void stage_vocab(const RunConfig& cfg, std::ostream& out);
void stage_embed(const RunConfig& cfg, std::ostream& out);
void stage_train(const RunConfig& cfg, std::ostream& out);
void stage_eval(const RunConfig& cfg, std::ostream& out);
void stage_predict(const RunConfig& cfg, std::ostream& out);
void stage_gradcheck(const RunConfig& cfg, std::ostream& out);

nlohmann::json catalog_as_json();

struct GradCheckCase {
    std::string name;
    double max_rel_err = 0.0;
    bool gated = true; // false: degenerate case, only required to be finite
};

// The canonical layer-by-layer finite-difference suite (64-bit, h = 1e-4),
// covering every stride/padding combination the catalog uses plus the
// losses and the negative-sampling objective.
std::vector<GradCheckCase> gradcheck_suite();

} // namespace ocean::pipeline
