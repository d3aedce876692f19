#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "volnmf/eval.hpp"
#include "volnmf/geometry.hpp"
#include "volnmf/solver.hpp"

namespace volnmf {

inline std::string placement_name(ConstraintPlacement p) {
    switch (p) {
        case ConstraintPlacement::MRowsSumOne: return "m-rows";
        case ConstraintPlacement::MColsSumOne: return "m-cols";
        case ConstraintPlacement::HRowsSumOne: return "h-rows";
        case ConstraintPlacement::HColsSumOne: return "h-cols";
        case ConstraintPlacement::NonnegOnly: return "nonneg";
    }
    return "nonneg";
}

inline ConstraintPlacement placement_from_name(const std::string& name) {
    if (name == "m-rows") return ConstraintPlacement::MRowsSumOne;
    if (name == "m-cols") return ConstraintPlacement::MColsSumOne;
    if (name == "h-rows") return ConstraintPlacement::HRowsSumOne;
    if (name == "h-cols") return ConstraintPlacement::HColsSumOne;
    if (name == "nonneg") return ConstraintPlacement::NonnegOnly;
    throw Error("unknown placement '" + name + "'");
}

/// Everything needed to re-run a command and to audit what it produced.
/// Re-running the stored command reproduces the outputs byte for byte.
struct RunManifest {
    std::vector<std::string> command; // argv, program name excluded
    nlohmann::json config;            // resolved numeric configuration
    std::string dataset_id;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
    nlohmann::json metrics; // optional MetricsReport snapshot
    std::int64_t wall_time_ms = 0;
};

inline nlohmann::json metrics_to_json(const MetricsReport& m) {
    return {{"fit_rel", m.fit_rel},
            {"volume_logdet", m.volume_logdet},
            {"volume_logdet_h", m.volume_logdet_h},
            {"sparsity_m", m.sparsity_m},
            {"sparsity_h", m.sparsity_h},
            {"delta_metric", m.delta_metric}};
}

inline void save_manifest(const RunManifest& m, const std::filesystem::path& path) {
    nlohmann::json j;
    j["command"] = m.command;
    j["config"] = m.config;
    j["dataset_id"] = m.dataset_id;
    j["seed"] = m.seed;
    j["outputs"] = m.outputs;
    if (!m.metrics.is_null()) j["metrics"] = m.metrics;
    j["wall_time_ms"] = m.wall_time_ms;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

inline std::vector<std::string> load_manifest_command(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad manifest '" + path.string() + "': " + e.what());
    }
    if (!j.contains("command") || !j["command"].is_array())
        throw ParseError("manifest '" + path.string() + "' has no command array");
    return j["command"].get<std::vector<std::string>>();
}

} // namespace volnmf
