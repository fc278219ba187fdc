#pragma once

#include <string>

#include <json.hpp>

#include "tieq/model.hpp"

namespace tieq {

// Model file schema (all numbers IEEE doubles, tensors indexed [node][from][to]):
// {
//   "states": d,
//   "action": {"bounds": [[a,b],...], "per_dim": n, "include_vertices": false},
//   "discount": {"family": ...},
//   "reward": {"form": "separable", "g": [[...]]}
//           | {"form": "general", "values": [[[...]]], "tail_bound": x},
//   "kernel": {"type": "transition"|"generator", "data": [[[...]]]},
//   "cone": {"iota": .., "theta": ..},        optional
//   "lipschitz": x                            optional
// }
// Schema problems raise ConfigError carrying the JSON pointer of the issue.

ModelSpec model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const ModelSpec& model);

ModelSpec load_model(const std::string& path);
void save_model(const ModelSpec& model, const std::string& path);

nlohmann::json load_json_file(const std::string& path);

} // namespace tieq
