#pragma once

#include <string>

#include <json.hpp>

#include "persuasion/model.hpp"
#include "persuasion/stability.hpp"

namespace persuasion {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::string fnv1a_digest(const std::string& bytes);

// Accepts a JSON number (integers exact, floats via their shortest decimal
// form) or a string like "3/8" or "0.25".
Rational rational_from_json(const nlohmann::json& v);

Instance load_instance_json(const nlohmann::json& j);
Instance load_instance_file(const std::string& path);
nlohmann::json instance_to_json(const Instance& inst);

nlohmann::json profile_to_json(const ActionProfile& p, const Instance& inst);
ActionProfile profile_from_json(const nlohmann::json& j, const Instance& inst);

int action_index(const std::string& name, const Instance& inst);
int world_index(const std::string& name, const Instance& inst);
int type_index(const nlohmann::json& key, const Instance& inst);

template <class S>
ExplicitPolicy<S> load_policy_json(const nlohmann::json& j, const Instance& inst) {
  if (!j.contains("policy") || !j["policy"].is_object())
    throw ModelError(Errc::FormatError, "policy: missing 'policy' object");
  ExplicitPolicy<S> out;
  out.channel = channel_from_string(j.value("channel", "public"));
  out.kernel.resize(inst.num_worlds());
  for (const auto& [wname, entries] : j["policy"].items()) {
    int w = world_index(wname, inst);
    for (const auto& e : entries) {
      MetaSignal s;
      if (!e.contains("recommendation"))
        throw ModelError(Errc::FormatError, "policy entry: missing recommendation");
      for (const auto& a : e["recommendation"])
        s.rec.push_back(action_index(a.template get<std::string>(), inst));
      if (static_cast<int>(s.rec.size()) != inst.num_agents)
        throw ModelError(Errc::FormatError, "policy entry: recommendation length != agents");
      if (e.contains("labels")) {
        for (const auto& g : e["labels"]) s.labels.push_back(g.template get<std::string>());
        if (static_cast<int>(s.labels.size()) != inst.num_agents)
          throw ModelError(Errc::FormatError, "policy entry: labels length != agents");
      } else {
        s.labels.assign(inst.num_agents, "");
      }
      Rational q = rational_from_json(e.at("probability"));
      if constexpr (std::is_same_v<S, double>)
        out.add_mass(w, s, to_double(q));
      else
        out.add_mass(w, s, q);
    }
  }
  check_policy_kernel(out, inst);
  return out;
}

template <class S>
nlohmann::json policy_to_json(const ExplicitPolicy<S>& policy, const Instance& inst) {
  nlohmann::json j;
  j["channel"] = channel_name(policy.channel);
  nlohmann::json pol = nlohmann::json::object();
  for (int w = 0; w < inst.num_worlds(); ++w) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [sid, q] : policy.kernel[w]) {
      if (q == S(0)) continue;
      nlohmann::json e;
      nlohmann::json rec = nlohmann::json::array();
      for (int a : policy.pool[sid].rec) rec.push_back(inst.actions[a]);
      e["recommendation"] = rec;
      e["labels"] = policy.pool[sid].labels;
      if constexpr (std::is_same_v<S, double>)
        e["probability"] = q;
      else
        e["probability"] = rational_to_string(q);
      entries.push_back(std::move(e));
    }
    pol[inst.worlds[w]] = std::move(entries);
  }
  j["policy"] = std::move(pol);
  return j;
}

}  // namespace persuasion
