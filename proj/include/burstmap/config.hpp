#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "burstmap/model.hpp"

namespace burstmap {

using json = nlohmann::json;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string experiment;
  std::string preset = "b0";           // used when params is empty
  std::optional<ModelParams> params;   // explicit constants override the preset
  std::uint64_t seed = 1;
  std::string out = "out";
  int threads = 0;                     // 0: environment or hardware default
  json options = json::object();       // experiment specific

  // Throws ConfigError for unknown presets and InvalidParams for
  // parameters that do not burst.
  ModelParams model_params() const;
};

// Accepts a config object or a run manifest holding one under "config".
RunConfig config_from_json(const json& j);
json to_json(const RunConfig& cfg);
RunConfig load_config(const std::string& path);

// Checks the experiment name and the model parameters.
void validate(const RunConfig& cfg);

// Keys sorted, two-space indent, trailing newline.
std::string dump_stable(const json& j);

json to_json(const ModelParams& p);
ModelParams params_from_json(const json& j);

}  // namespace burstmap
