#include "burstmap/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "burstmap/experiments.hpp"

namespace burstmap {

ModelParams RunConfig::model_params() const {
  if (params) return *params;
  const auto p = preset_by_name(preset);
  if (!p) throw ConfigError("unknown preset '" + preset + "' (expected b0 or b05)");
  return *p;
}

json to_json(const ModelParams& p) {
  return {{"epsilon", p.epsilon}, {"w", p.w}, {"a", p.a}, {"b", p.b}};
}

ModelParams params_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("params must be an object");
  ModelParams p;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw ConfigError("params." + k + " must be a number");
    if (k == "epsilon") p.epsilon = v.get<double>();
    else if (k == "w") p.w = v.get<double>();
    else if (k == "a") p.a = v.get<double>();
    else if (k == "b") p.b = v.get<double>();
    else throw ConfigError("unknown model parameter '" + k + "'");
  }
  return p;
}

RunConfig config_from_json(const json& in) {
  const json& j = in.contains("config") && in.at("config").is_object() ? in.at("config") : in;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "experiment") c.experiment = v.get<std::string>();
      else if (k == "preset") c.preset = v.get<std::string>();
      else if (k == "params") c.params = params_from_json(v);
      else if (k == "seed") {
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
          throw ConfigError("seed must be an unsigned integer");
        }
        c.seed = v.get<std::uint64_t>();
      } else if (k == "out") c.out = v.get<std::string>();
      else if (k == "threads") c.threads = v.get<int>();
      else if (k == "options") {
        if (!v.is_object()) throw ConfigError("options must be an object");
        c.options = v;
      } else {
        throw ConfigError("unknown config key '" + k + "'");
      }
    }
  } catch (const json::type_error& e) {
    throw ConfigError(std::string("config has a value of the wrong type: ") + e.what());
  }
  return c;
}

json to_json(const RunConfig& c) {
  json j = {{"experiment", c.experiment},
            {"preset", c.preset},
            {"seed", c.seed},
            {"out", c.out},
            {"threads", c.threads},
            {"options", c.options}};
  if (c.params) j["params"] = to_json(*c.params);
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path);
  try {
      return config_from_json(json::parse(f));
    } catch (const json::exception& e) {
      throw ConfigError("config " + path + ": " + e.what());
    }
  }

  void validate(const RunConfig& c) {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
      std::ostringstream msg;
      msg << "unknown experiment '" << c.experiment << "'; expected one of";
      for (const auto& n : names) msg << ' ' << n;
      throw ConfigError(msg.str());
    }
    if (c.threads < 0) throw ConfigError("threads must be >= 0");
    BurstModel model(c.model_params());
    (void)model;
  }

  std::string dump_stable(const json& j) { return j.dump(2) + "\n"; }

  }  // namespace burstmap
