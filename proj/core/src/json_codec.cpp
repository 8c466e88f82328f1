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

#include "json_codec.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace scorelab::codec {

void reject_unknown(const Json& j, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where.empty() ? "<root>" : where, "expected an object");
  for (const auto& item : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* a) { return item.key() == a; });
    if (!ok) throw ConfigError(join(where, item.key()), "unknown field");
  }
}

Json to_json(const SdeSchedule::Params& p) {
  Json j;
  j["kind"] = to_string(p.kind);
  j["beta_min"] = p.beta_min;
  j["beta_max"] = p.beta_max;
  j["sigma_min"] = p.sigma_min;
  j["sigma_max"] = p.sigma_max;
  j["t_min"] = p.t_min;
  j["t_max"] = p.t_max;
  return j;
}

SdeSchedule::Params schedule_from_json(const Json& j, const std::string& where) {
  reject_unknown(j, where, {"kind", "beta_min", "beta_max", "sigma_min", "sigma_max", "t_min", "t_max"});
  SdeSchedule::Params p;
  p.kind = sde_kind_from_string(optional<std::string>(j, where, "kind", "VP"));
  p.beta_min = optional<double>(j, where, "beta_min", p.beta_min);
  p.beta_max = optional<double>(j, where, "beta_max", p.beta_max);
  p.sigma_min = optional<double>(j, where, "sigma_min", p.sigma_min);
  p.sigma_max = optional<double>(j, where, "sigma_max", p.sigma_max);
  p.t_min = optional<double>(j, where, "t_min", p.t_min);
  p.t_max = optional<double>(j, where, "t_max", p.t_max);
  SdeSchedule check(p);
  return p;
}

Json to_json(const NetArchitecture& a) {
  Json j;
  j["data_dim"] = a.data_dim;
  j["hidden"] = a.hidden;
  j["activation"] = to_string(a.activation);
  j["embedding"] = {{"features", a.embedding.features},
                    {"freq_min", a.embedding.freq_min},
                    {"freq_max", a.embedding.freq_max}};
  j["output_scale"] = to_string(a.output_scale);
  if (a.output_scale == OutputScale::kInvSigma) j["schedule"] = to_json(a.schedule);
  return j;
}

NetArchitecture architecture_from_json(const Json& j, const std::string& where) {
  reject_unknown(j, where,
                 {"data_dim", "hidden", "activation", "embedding", "output_scale", "schedule"});
  NetArchitecture a;
  a.data_dim = optional<int>(j, where, "data_dim", a.data_dim);
  a.hidden = optional<std::vector<int>>(j, where, "hidden", a.hidden);
  a.activation = activation_from_string(optional<std::string>(j, where, "activation", "tanh"));
  if (j.contains("embedding")) {
    const std::string w = join(where, "embedding");
    const Json& e = j.at("embedding");
    reject_unknown(e, w, {"features", "freq_min", "freq_max"});
    a.embedding.features = optional<int>(e, w, "features", a.embedding.features);
    a.embedding.freq_min = optional<double>(e, w, "freq_min", a.embedding.freq_min);
    a.embedding.freq_max = optional<double>(e, w, "freq_max", a.embedding.freq_max);
  }
  a.output_scale = output_scale_from_string(optional<std::string>(j, where, "output_scale", "none"));
  if (j.contains("schedule")) a.schedule = schedule_from_json(j.at("schedule"), join(where, "schedule"));
  a.validate();
  return a;
}

Json to_json(const GaussianMixture& gm) {
  Json j;
  j["weights"] = gm.weights;
  Json means = Json::array(), covs = Json::array();
  for (int k = 0; k < gm.size(); ++k) {
    means.push_back(std::vector<double>(gm.means[k].data(), gm.means[k].data() + gm.means[k].size()));
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < gm.covariances[k].rows(); ++r) {
      std::vector<double> row(gm.covariances[k].cols());
      for (Eigen::Index c = 0; c < gm.covariances[k].cols(); ++c) row[c] = gm.covariances[k](r, c);
      rows.push_back(row);
    }
    covs.push_back(rows);
  }
  j["means"] = means;
  j["covariances"] = covs;
  return j;
}

GaussianMixture mixture_from_json(const Json& j, const std::string& where) {
  reject_unknown(j, where, {"preset", "dim", "weights", "means", "covariances"});
  GaussianMixture gm;
  if (j.contains("preset")) {
    gm = mixture_preset(required<std::string>(j, where, "preset"), optional<int>(j, where, "dim", 2));
  } else {
    gm.weights = required<std::vector<double>>(j, where, "weights");
    const auto means = required<std::vector<std::vector<double>>>(j, where, "means");
    const auto covs = required<std::vector<std::vector<std::vector<double>>>>(j, where, "covariances");
    for (const auto& m : means) gm.means.push_back(Eigen::Map<const Vector>(m.data(), m.size()));
    for (std::size_t k = 0; k < covs.size(); ++k) {
      const auto& c = covs[k];
      Matrix cm(c.size(), c.empty() ? 0 : c.front().size());
      for (std::size_t r = 0; r < c.size(); ++r) {
        if (c[r].size() != static_cast<std::size_t>(cm.cols()))
          throw ConfigError(fmt::format("{}[{}]", join(where, "covariances"), k), "ragged matrix");
        for (std::size_t q = 0; q < c[r].size(); ++q) cm(r, q) = c[r][q];
      }
      gm.covariances.push_back(cm);
    }
  }
  gm.validate();
  return gm;
}

}  // namespace scorelab::codec
