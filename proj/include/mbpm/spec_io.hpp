#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "mbpm/model.hpp"

namespace mbpm {

// Model documents: schema in README.md. Errors are SpecError with the
// offending field path as message prefix.
ModelSpec parse_model(const nlohmann::json& doc);
ModelSpec parse_model_text(std::string_view text);
ModelSpec load_model_file(const std::string& path);

nlohmann::json to_json(const StateFunction& f);
StateFunction parse_state_function(const nlohmann::json& j, const std::string& path = "value");

// Canonical document of a model (normalized defaults, sorted keys).
nlohmann::json to_json(const ModelSpec& spec);

// 64-bit FNV-1a of the canonical document, as 16 hex digits.
std::string spec_digest(const ModelSpec& spec);

}  // namespace mbpm
