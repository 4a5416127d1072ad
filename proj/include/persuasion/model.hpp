#pragma once

#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "persuasion/common.hpp"

namespace persuasion {

// Joint action: one action index per agent.
using ActionVector = std::vector<int>;

// Type-anonymized count matrix rho(T,a), flattened row-major by type.
struct ActionProfile {
  std::vector<int> counts;

  int at(int type, int action, int num_actions) const {
    return counts[static_cast<size_t>(type) * num_actions + action];
  }
  int& at(int type, int action, int num_actions) {
    return counts[static_cast<size_t>(type) * num_actions + action];
  }
  bool operator==(const ActionProfile& o) const { return counts == o.counts; }
  auto operator<=>(const ActionProfile& o) const { return counts <=> o.counts; }
};

// All feasible profiles of an instance, in lexicographic order of the
// flattened count vector, with index lookup.
class ProfileSpace {
 public:
  void build(const std::vector<int>& type_sizes, int num_actions);

  int size() const { return static_cast<int>(profiles_.size()); }
  const ActionProfile& operator[](int idx) const { return profiles_[idx]; }
  int index_of(const ActionProfile& p) const;
  int num_actions() const { return num_actions_; }
  int num_types() const { return num_types_; }

  // Stars-and-bars count, computed without enumeration.
  static std::uint64_t count(const std::vector<int>& type_sizes, int num_actions);

 private:
  int num_types_ = 0;
  int num_actions_ = 0;
  std::vector<ActionProfile> profiles_;
  std::map<std::vector<int>, int> index_;
};

struct Instance {
  std::vector<std::string> worlds;
  std::vector<Rational> prior;
  std::vector<double> prior_d;
  int num_agents = 0;
  std::vector<std::string> actions;
  std::vector<std::vector<int>> types;  // 0-based agent ids, ascending within each type
  std::vector<int> type_of;             // agent -> type index
  int deviation_bound = 1;
  ProfileSpace profiles;

  // Dense utility tables indexed [type][action][profile][world] and
  // [profile][world].  Both exact and double views are kept; the double
  // tables are derived from the rationals at load time.
  std::vector<Rational> agent_u_q;
  std::vector<double> agent_u_d;
  std::vector<Rational> principal_u_q;
  std::vector<double> principal_u_d;
  std::vector<bool> agent_u_set;  // which agent cells were explicitly given or defaulted

  int num_worlds() const { return static_cast<int>(worlds.size()); }
  int num_actions() const { return static_cast<int>(actions.size()); }
  int num_types() const { return static_cast<int>(types.size()); }

  size_t agent_u_index(int t, int a, int p, int w) const {
    return ((static_cast<size_t>(t) * num_actions() + a) * profiles.size() + p) * num_worlds() + w;
  }
  size_t principal_u_index(int p, int w) const {
    return static_cast<size_t>(p) * num_worlds() + w;
  }

  template <class S>
  S agent_utility(int type, int action, int profile, int world) const {
    if constexpr (std::is_same_v<S, double>)
      return agent_u_d[agent_u_index(type, action, profile, world)];
    else
      return agent_u_q[agent_u_index(type, action, profile, world)];
  }
  template <class S>
  S principal_utility(int profile, int world) const {
    if constexpr (std::is_same_v<S, double>)
      return principal_u_d[principal_u_index(profile, world)];
    else
      return principal_u_q[principal_u_index(profile, world)];
  }
  template <class S>
  S prior_of(int world) const {
    if constexpr (std::is_same_v<S, double>)
      return prior_d[world];
    else
      return prior[world];
  }

  // Validates worlds/prior/types/bound and builds type_of + profile space,
  // so utility tables can be allocated and filled.  Idempotent.
  void init_structure();
  // init_structure plus utility-totality checks and double-table derivation.
  void finalize();

  // Allocates utility tables (all cells unset) after init_structure.
  void allocate_utilities();
  void set_agent_utility(int t, int a, int p, int w, const Rational& v) {
    agent_u_q[agent_u_index(t, a, p, w)] = v;
    agent_u_set[agent_u_index(t, a, p, w)] = true;
  }
  void set_principal_utility(int p, int w, const Rational& v) {
    principal_u_q[principal_u_index(p, w)] = v;
  }
};

// rho_a(T, x) = |{i in T : a_i = x}|
ActionProfile profile_of(const ActionVector& a, const Instance& inst);

template <class S>
S agent_utility_of_vector(int agent, const ActionVector& a, int world, const Instance& inst) {
  if (agent < 0 || agent >= inst.num_agents)
    throw ModelError(Errc::UnknownAgent, "agent index " + std::to_string(agent + 1));
  ActionProfile rho = profile_of(a, inst);
  int p = inst.profiles.index_of(rho);
  return inst.agent_utility<S>(inst.type_of[agent], a[agent], p, world);
}

// Canonical representative of each profile: within each type, agents in
// ascending index order take actions in ascending action order with the
// multiplicities the profile prescribes.
class RepresentativeSet {
 public:
  explicit RepresentativeSet(const Instance& inst);
  const ActionVector& of_profile(int profile_idx) const { return reps_[profile_idx]; }
  int size() const { return static_cast<int>(reps_.size()); }

 private:
  std::vector<ActionVector> reps_;
};

}  // namespace persuasion
