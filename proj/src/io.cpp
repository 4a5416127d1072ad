#include "persuasion/io.hpp"

#include <fstream>
#include <sstream>

namespace persuasion {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError(Errc::FileNotFound, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError(Errc::FileNotFound, "cannot write " + path);
  out << content;
}

std::string fnv1a_digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Rational rational_from_json(const json& v) {
  if (v.is_string()) return rational_from_string(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_float()) return rational_from_double(v.get<double>());
  throw ModelError(Errc::FormatError, "expected a number or fraction string");
}

int action_index(const std::string& name, const Instance& inst) {
  for (size_t a = 0; a < inst.actions.size(); ++a)
    if (inst.actions[a] == name) return static_cast<int>(a);
  throw ModelError(Errc::FormatError, "unknown action '" + name + "'");
}

int world_index(const std::string& name, const Instance& inst) {
  for (size_t w = 0; w < inst.worlds.size(); ++w)
    if (inst.worlds[w] == name) return static_cast<int>(w);
  throw ModelError(Errc::FormatError, "unknown world '" + name + "'");
}

// Types are addressed as "T1", "T2", ... (or a 1-based integer).
int type_index(const json& key, const Instance& inst) {
  int t = -1;
  if (key.is_number_integer()) {
    t = key.get<int>() - 1;
  } else {
    std::string s = key.get<std::string>();
    if (s.size() >= 2 && (s[0] == 'T' || s[0] == 't'))
      t = std::atoi(s.c_str() + 1) - 1;
  }
  if (t < 0 || t >= inst.num_types())
    throw ModelError(Errc::FormatError, "unknown type '" + key.dump() + "'");
  return t;
}

ActionProfile profile_from_json(const json& j, const Instance& inst) {
  if (!j.is_object()) throw ModelError(Errc::FormatError, "profile must be an object");
  ActionProfile p;
  p.counts.assign(static_cast<size_t>(inst.num_types()) * inst.num_actions(), 0);
  for (const auto& [tkey, amap] : j.items()) {
    int t = type_index(json(tkey), inst);
    for (const auto& [aname, cnt] : amap.items())
      p.at(t, action_index(aname, inst), inst.num_actions()) = cnt.get<int>();
  }
  for (int t = 0; t < inst.num_types(); ++t) {
    int sum = 0;
    for (int a = 0; a < inst.num_actions(); ++a) sum += p.at(t, a, inst.num_actions());
    if (sum != static_cast<int>(inst.types[t].size()))
      throw ModelError(Errc::FormatError,
                       "profile: type T" + std::to_string(t + 1) + " counts sum to " +
                           std::to_string(sum) + ", expected " +
                           std::to_string(inst.types[t].size()));
  }
  return p;
}

json profile_to_json(const ActionProfile& p, const Instance& inst) {
  json j = json::object();
  for (int t = 0; t < inst.num_types(); ++t) {
    json amap = json::object();
    for (int a = 0; a < inst.num_actions(); ++a) {
      int c = p.at(t, a, inst.num_actions());
      if (c > 0) amap[inst.actions[a]] = c;
    }
    j["T" + std::to_string(t + 1)] = std::move(amap);
  }
  return j;
}

Instance load_instance_json(const json& j) {
  Instance inst;
  try {
    inst.worlds = j.at("worlds").get<std::vector<std::string>>();
    for (const auto& p : j.at("prior")) inst.prior.push_back(rational_from_json(p));
    inst.num_agents = j.at("agents").get<int>();
    inst.actions = j.at("actions").get<std::vector<std::string>>();
    for (const auto& ty : j.at("types")) {
      std::vector<int> agents;
      for (const auto& i : ty) agents.push_back(i.get<int>() - 1);  // 1-based in files
      inst.types.push_back(std::move(agents));
    }
    inst.deviation_bound = j.at("deviation_bound").get<int>();
  } catch (const json::exception& e) {
    throw ModelError(Errc::FormatError, e.what());
  }

  inst.init_structure();
  inst.allocate_utilities();

  bool has_agent_default = false, has_principal_default = false;
  Rational agent_default(0), principal_default(0);
  if (j.contains("default_utility")) {
    const json& d = j["default_utility"];
    if (d.is_object()) {
      if (d.contains("agent")) {
        agent_default = rational_from_json(d["agent"]);
        has_agent_default = true;
      }
      if (d.contains("principal")) {
        principal_default = rational_from_json(d["principal"]);
        has_principal_default = true;
      }
    } else {
      agent_default = principal_default = rational_from_json(d);
      has_agent_default = has_principal_default = true;
    }
  }

  std::vector<bool> principal_set(static_cast<size_t>(inst.profiles.size()) * inst.num_worlds(),
                                  false);
  if (has_agent_default)
    for (size_t i = 0; i < inst.agent_u_q.size(); ++i) {
      inst.agent_u_q[i] = agent_default;
      inst.agent_u_set[i] = true;
    }
  if (has_principal_default)
    for (size_t i = 0; i < inst.principal_u_q.size(); ++i) {
      inst.principal_u_q[i] = principal_default;
      principal_set[i] = true;
    }

  for (const auto& rec : j.value("agent_utilities", json::array())) {
    int t = type_index(rec.at("type"), inst);
    int a = action_index(rec.at("action").get<std::string>(), inst);
    int p = inst.profiles.index_of(profile_from_json(rec.at("profile"), inst));
    int w = world_index(rec.at("world").get<std::string>(), inst);
    inst.set_agent_utility(t, a, p, w, rational_from_json(rec.at("value")));
  }
  for (const auto& rec : j.value("principal_utilities", json::array())) {
    int p = inst.profiles.index_of(profile_from_json(rec.at("profile"), inst));
    int w = world_index(rec.at("world").get<std::string>(), inst);
    inst.set_principal_utility(p, w, rational_from_json(rec.at("value")));
    principal_set[inst.principal_u_index(p, w)] = true;
  }

  for (size_t i = 0; i < principal_set.size(); ++i)
    if (!principal_set[i])
      throw ModelError(Errc::MissingUtility, "principal_utilities: unspecified (profile, world) "
                                             "entry and no default_utility");
  inst.finalize();
  return inst;
}

Instance load_instance_file(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ModelError(Errc::FormatError, std::string("instance parse: ") + e.what());
  }
  return load_instance_json(j);
}

json instance_to_json(const Instance& inst) {
  json j;
  j["worlds"] = inst.worlds;
  json prior = json::array();
  for (const auto& p : inst.prior) prior.push_back(rational_to_string(p));
  j["prior"] = prior;
  j["agents"] = inst.num_agents;
  j["actions"] = inst.actions;
  json types = json::array();
  for (const auto& ty : inst.types) {
    json t = json::array();
    for (int i : ty) t.push_back(i + 1);
    types.push_back(std::move(t));
  }
  j["types"] = types;
  j["deviation_bound"] = inst.deviation_bound;

  json agent_entries = json::array();
  for (int t = 0; t < inst.num_types(); ++t)
    for (int a = 0; a < inst.num_actions(); ++a)
      for (int p = 0; p < inst.profiles.size(); ++p)
        for (int w = 0; w < inst.num_worlds(); ++w) {
          if (!inst.agent_u_set[inst.agent_u_index(t, a, p, w)]) continue;
          json e;
          e["type"] = "T" + std::to_string(t + 1);
          e["action"] = inst.actions[a];
          e["profile"] = profile_to_json(inst.profiles[p], inst);
          e["world"] = inst.worlds[w];
          e["value"] = rational_to_string(inst.agent_u_q[inst.agent_u_index(t, a, p, w)]);
          agent_entries.push_back(std::move(e));
        }
  j["agent_utilities"] = std::move(agent_entries);

  json principal_entries = json::array();
  for (int p = 0; p < inst.profiles.size(); ++p)
    for (int w = 0; w < inst.num_worlds(); ++w) {
      json e;
      e["profile"] = profile_to_json(inst.profiles[p], inst);
      e["world"] = inst.worlds[w];
      e["value"] = rational_to_string(inst.principal_u_q[inst.principal_u_index(p, w)]);
      principal_entries.push_back(std::move(e));
    }
  j["principal_utilities"] = std::move(principal_entries);
  return j;
}

}  // namespace persuasion
