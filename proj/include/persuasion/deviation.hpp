#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "persuasion/common.hpp"
#include "persuasion/model.hpp"

namespace persuasion {

// delta(T, a, a') — number of agents of subtype (T,a) moving to a'.
// Stored flattened over (type, from, to); diagonal cells are always zero.
struct Deviation {
  std::vector<int> moves;  // size |T| * |A| * |A|

  int at(int type, int from, int to, int num_actions) const {
    return moves[(static_cast<size_t>(type) * num_actions + from) * num_actions + to];
  }
  int& at(int type, int from, int to, int num_actions) {
    return moves[(static_cast<size_t>(type) * num_actions + from) * num_actions + to];
  }
  int mass() const {
    int m = 0;
    for (int c : moves) m += c;
    return m;
  }
  // Total outflow of a subtype.
  int out_mass(int type, int from, int num_actions) const {
    int m = 0;
    for (int to = 0; to < num_actions; ++to) m += at(type, from, to, num_actions);
    return m;
  }
  bool operator==(const Deviation& o) const { return moves == o.moves; }
  auto operator<=>(const Deviation& o) const { return moves <=> o.moves; }

  std::string to_string(const Instance& inst) const;
};

// D*: all deviations with mass in [1, d], in lexicographic order of the
// flattened move vector.
std::vector<Deviation> enumerate_all_deviations(const Instance& inst, const Limits& limits = {});

// Closed-form |D*| (integer points with mass in [1,d] over the off-diagonal cells).
std::uint64_t count_all_deviations(const Instance& inst);

bool deviation_feasible_from(const ActionProfile& rho, const Deviation& d, const Instance& inst);

// D_rho: the subset of D* whose per-subtype outflow fits in rho.
std::vector<Deviation> feasible_deviations(const ActionProfile& rho, const Instance& inst,
                                           const Limits& limits = {});

// rho ⊕ delta.  Throws InfeasibleDeviation when delta is not in D_rho.
ActionProfile apply_to_profile(const ActionProfile& rho, const Deviation& d, const Instance& inst);

// Pointwise replacement a ⊕ {(agent, action)}.
ActionVector apply_to_vector(const ActionVector& a, const std::vector<std::pair<int, int>>& devs,
                             const Instance& inst);

// Aggregates per-agent moves into the count form (used by property tests).
Deviation deviation_of_moves(const ActionVector& a, const std::vector<std::pair<int, int>>& devs,
                             const Instance& inst);

// Coalition shape for the private channel: how many agents of each type
// deviate to each target action.  From-actions are whatever the deviators
// hold when the signal realizes, so they are not part of the shape.
struct TargetTemplate {
  std::vector<int> counts;  // size |T| * |A|

  int at(int type, int target, int num_actions) const {
    return counts[static_cast<size_t>(type) * num_actions + target];
  }
  int& at(int type, int target, int num_actions) {
    return counts[static_cast<size_t>(type) * num_actions + target];
  }
  int mass() const {
    int m = 0;
    for (int c : counts) m += c;
    return m;
  }
  int type_mass(int type, int num_actions) const {
    int m = 0;
    for (int x = 0; x < num_actions; ++x) m += at(type, x, num_actions);
    return m;
  }
  bool operator==(const TargetTemplate& o) const { return counts == o.counts; }
  auto operator<=>(const TargetTemplate& o) const { return counts <=> o.counts; }

  std::string to_string(const Instance& inst) const;
};

// All templates with mass in [1, d], segment-lexicographic order.
std::vector<TargetTemplate> enumerate_target_templates(const Instance& inst,
                                                       const Limits& limits = {});

std::uint64_t count_target_templates(const Instance& inst);

// Lemma-style disjoint-representatives system: sets B_i over a ground set,
// demands r_i.
struct HallSystem {
  std::vector<std::uint64_t> sets;  // bitmmasks over ground elements 0..63
  std::vector<int> demands;
  int ground_size = 0;
};

// True iff disjoint subsets of the given sizes exist; checks the union
// condition over every subset of indices, mirroring the lemma statement.
bool hall_feasible(const HallSystem& sys);

}  // namespace persuasion
