#pragma once

#include <map>
#include <string>
#include <string_view>

#include "scenfuzz/environment.h"
#include "scenfuzz/error.h"

namespace scenfuzz::internal {

// Copies recognised overrides into their fields; unknown keys are a config
// error so typos do not silently fall back to defaults.
inline void ApplyEnvParams(std::string_view env_name, const EnvParams& overrides,
                           const std::map<std::string, double*>& fields) {
  for (const auto& [key, value] : overrides) {
    auto it = fields.find(key);
    if (it == fields.end()) {
      throw Error(ErrorCode::kConfig, "environment '" + std::string(env_name) +
                                          "' has no parameter '" + key + "'");
    }
    *it->second = value;
  }
}

}  // namespace scenfuzz::internal
