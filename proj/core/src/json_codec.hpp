// Copyright 2026 The scorelab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// nlohmann/json adapters for the library's value types. Private to the
// library; the public API exchanges files and strings only.

#include <json.hpp>

#include <initializer_list>
#include <string>

#include "scorelab/errors.hpp"
#include "scorelab/net.hpp"
#include "scorelab/sde.hpp"
#include "scorelab/target.hpp"

namespace scorelab::codec {

using Json = nlohmann::ordered_json;

Json to_json(const SdeSchedule::Params& p);
SdeSchedule::Params schedule_from_json(const Json& j, const std::string& where);

Json to_json(const NetArchitecture& a);
NetArchitecture architecture_from_json(const Json& j, const std::string& where);

Json to_json(const GaussianMixture& gm);
GaussianMixture mixture_from_json(const Json& j, const std::string& where);

inline std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

// Typed field access with ConfigError naming `where.key` on failure.
template <class T>
T required(const Json& j, const std::string& where, const std::string& key) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null())
    throw ConfigError(join(where, key), "required field is missing");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(join(where, key), std::string("wrong type: ") + e.what());
  }
}

template <class T>
T optional(const Json& j, const std::string& where, const std::string& key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return required<T>(j, where, key);
}

// Fails on keys outside `allowed`, catching typos in hand-written configs.
void reject_unknown(const Json& j, const std::string& where,
                    std::initializer_list<const char*> allowed);

}  // namespace scorelab::codec
