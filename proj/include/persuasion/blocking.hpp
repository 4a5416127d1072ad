#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "persuasion/deviation.hpp"
#include "persuasion/model.hpp"
#include "persuasion/stability.hpp"

namespace persuasion {

// One element of a public blocking profile: subtype (type, from) refuses to
// take role `to` in deviation `dev` (an index into the family domain).
struct PublicTuple {
  int dev;
  int type, from, to;
  bool operator==(const PublicTuple&) const = default;
  auto operator<=>(const PublicTuple&) const = default;
};

struct PublicBlockingProfile {
  std::vector<PublicTuple> tuples;  // sorted; covers every domain deviation
  bool operator==(const PublicBlockingProfile&) const = default;
};

// Candidate tuples per feasible deviation of one profile.  Minimal covers are
// the Cartesian product of per-deviation candidate choices.
struct PublicFamily {
  int profile_idx = -1;
  std::vector<Deviation> domain;  // D_rho
  std::vector<std::vector<PublicTuple>> candidates;

  std::uint64_t cover_count() const;
  PublicBlockingProfile cover(std::uint64_t index) const;  // mixed-radix decode
};

PublicFamily enumerate_public_family(int profile_idx, const Instance& inst,
                                     const Limits& limits = {});
std::vector<PublicBlockingProfile> enumerate_public_blocking_profiles(const PublicFamily& family,
                                                                      const Limits& limits = {});

// gamma(delta) = (A', N'): agents of one type (one subtype, in the
// semi-private case) who all refuse every role in A'.  A disengaged value
// (no option) marks a deviation no realizable coalition can stage from the
// signal's own profile, which therefore needs no witness.
struct GammaOption {
  int type = -1;
  int from = -1;  // subtype action (semi-private); -1 for the private channel
  std::uint32_t aprime_mask = 0;
  std::vector<int> agents;  // N', ascending
  bool operator==(const GammaOption&) const = default;
};

struct GammaAssignment {
  std::vector<std::optional<GammaOption>> chosen;  // aligned with the family domain
  bool operator==(const GammaAssignment&) const = default;
};

// Per-profile blocking structure.  The semi-private domain is D_rho (count
// deviations); the private domain is the target-template space, since a
// private agent never observes the other deviators' current actions.
struct GammaFamily {
  Channel channel = Channel::SemiPrivate;
  int profile_idx = -1;
  std::shared_ptr<const std::vector<Deviation>> domain;            // semi-private
  std::shared_ptr<const std::vector<TargetTemplate>> templates;    // private
  std::vector<std::vector<std::optional<GammaOption>>> options;

  size_t domain_size() const { return channel == Channel::Private ? templates->size() : domain->size(); }
  std::uint64_t assignment_count() const;
  GammaAssignment assignment(std::uint64_t index) const;
};

// Structurally valid options (lemma conditions 1-3) per deviation, in the
// deterministic tie-break order; condition 4 is left to the LP.
GammaFamily enumerate_gamma_family(int profile_idx, Channel channel, const Instance& inst,
                                   const Limits& limits = {},
                                   std::shared_ptr<const std::vector<Deviation>> dstar = nullptr,
                                   std::shared_ptr<const std::vector<TargetTemplate>> kstar =
                                       nullptr);

// Agents of type t that could fill at least one of the masked target slots,
// i.e. are not already recommended every target in the mask.
std::vector<int> template_eligible_agents(const ActionVector& abar, int type,
                                          std::uint32_t target_mask, const Instance& inst);

// True when no all-mover coalition of this shape exists from abar.
bool template_unrealizable(const TargetTemplate& tpl, const ActionVector& abar,
                           const Instance& inst);
std::vector<GammaAssignment> enumerate_gamma_assignments(const GammaFamily& family,
                                                         const Limits& limits = {});

// Per-agent component beta_i: the (deviation, A') pairs whose N' contains the
// agent.
struct BetaEntry {
  int dev;
  std::uint32_t aprime_mask;
  bool operator==(const BetaEntry&) const = default;
  auto operator<=>(const BetaEntry&) const = default;
};
using AgentBeta = std::vector<BetaEntry>;

AgentBeta agent_beta(const GammaAssignment& gamma, int agent);
std::string beta_label(const AgentBeta& beta);
std::string public_label(const PublicBlockingProfile& beta);

namespace detail {

// Weak "blocked" inequality (lemma condition 4) for one agent posterior.
// Public and semi-private compare at the world marginal; private compares
// expected utilities over the joint posterior restricted to vectors where
// the deviation can actually execute.
template <class S>
bool blocks_deviation(const Posterior<S>& post, Channel channel, int type, int stay, int dev_to,
                      int profile_idx, const Deviation& delta, const Instance& inst) {
  if (channel == Channel::Private) {
    S lhs(0), rhs(0);
    for (size_t r = 0; r < post.recs.size(); ++r) {
      ActionProfile rho = profile_of(post.recs[r], inst);
      if (!deviation_feasible_from(rho, delta, inst)) continue;
      int pb = inst.profiles.index_of(rho);
      int pd = inst.profiles.index_of(apply_to_profile(rho, delta, inst));
      for (int w = 0; w < inst.num_worlds(); ++w) {
        const S& pr = post.joint[r][w];
        if (pr == S(0)) continue;
        lhs += pr * inst.agent_utility<S>(type, stay, pb, w);
        rhs += pr * inst.agent_utility<S>(type, dev_to, pd, w);
      }
    }
    return lhs >= rhs;
  }
  int pd = inst.profiles.index_of(
      apply_to_profile(inst.profiles[profile_idx], delta, inst));
  S lhs(0), rhs(0);
  for (int w = 0; w < inst.num_worlds(); ++w) {
    const S& pr = post.world_marginal[w];
    if (pr == S(0)) continue;
    lhs += pr * inst.agent_utility<S>(type, stay, profile_idx, w);
    rhs += pr * inst.agent_utility<S>(type, dev_to, pd, w);
  }
  return lhs >= rhs;
}

}  // namespace detail

// The exact set of weakly-holding public tuples at a world posterior.
// Throws UncoveredDeviation when some feasible deviation has no holding
// tuple, i.e. the signal is unstable.
template <class S>
PublicBlockingProfile public_blocking_profile(const std::vector<S>& world_posterior,
                                              const ActionVector& a, const Instance& inst,
                                              const Limits& limits = {}) {
  ActionProfile rho = profile_of(a, inst);
  int pidx = inst.profiles.index_of(rho);
  PublicFamily family = enumerate_public_family(pidx, inst, limits);
  Posterior<S> post;
  post.world_marginal = world_posterior;
  PublicBlockingProfile out;
  for (size_t di = 0; di < family.domain.size(); ++di) {
    bool covered = false;
    for (const PublicTuple& cand : family.candidates[di]) {
      if (detail::blocks_deviation(post, Channel::Public, cand.type, cand.from, cand.to, pidx,
                                   family.domain[di], inst)) {
        out.tuples.push_back(cand);
        covered = true;
      }
    }
    if (!covered)
      throw ModelError(Errc::UncoveredDeviation, family.domain[di].to_string(inst));
  }
  return out;
}

namespace detail {

// Coalition mates for a private template plan, taking the slot (own_type,
// own_target) for the probing agent and filling the rest with the smallest
// distinct other agents of each required type.  Returns false when the plan
// cannot be staffed at all.
inline bool staff_template(const TargetTemplate& tpl, int agent, int own_target,
                           const Instance& inst, std::vector<int>& agents,
                           std::vector<int>& actions) {
  int A = inst.num_actions();
  agents = {agent};
  actions = {own_target};
  for (int t2 = 0; t2 < inst.num_types(); ++t2)
    for (int x = 0; x < A; ++x) {
      int need = tpl.at(t2, x, A) - (t2 == inst.type_of[agent] && x == own_target ? 1 : 0);
      for (int q : inst.types[t2]) {
        if (need == 0) break;
        if (q == agent) continue;
        if (std::find(agents.begin(), agents.end(), q) != agents.end()) continue;
        agents.push_back(q);
        actions.push_back(x);
        --need;
      }
      if (need > 0) return false;
    }
  return true;
}

// Strict willingness of one agent to take a slot of the plan, partners
// filled per staff_template.  Posteriors of lottery policies are
// exchangeable over same-type partners, so the partner choice is
// immaterial there.
template <class S>
bool template_slot_willing(const Posterior<S>& post, int agent, int own_target,
                           const TargetTemplate& tpl, const Instance& inst) {
  std::vector<int> agents, actions;
  if (!staff_template(tpl, agent, own_target, inst, agents, actions)) return false;
  return deviator_gain(post, agent, agents, actions, inst) > S(0);
}

}  // namespace detail

// Deterministic gamma construction from a stable signal's posteriors:
// smallest type (smallest subtype for semi-private), then smallest A' in
// sequence order, then the lexicographically-first refusing set of the
// minimum size meeting condition 3.  Throws NoBlockingWitness when the
// signal is unstable.
template <class S>
GammaAssignment gamma_from_signal(const std::vector<Posterior<S>>& posteriors,
                                  const ActionVector& a, Channel channel, const Instance& inst,
                                  const Limits& limits = {}) {
  ActionProfile rho = profile_of(a, inst);
  int pidx = inst.profiles.index_of(rho);
  int A = inst.num_actions();
  GammaAssignment out;

  if (channel == Channel::Private) {
    std::vector<TargetTemplate> domain = enumerate_target_templates(inst, limits);
    out.chosen.resize(domain.size());
    for (size_t di = 0; di < domain.size(); ++di) {
      const TargetTemplate& tpl = domain[di];
      if (template_unrealizable(tpl, a, inst)) {
        out.chosen[di] = std::nullopt;
        continue;
      }
      bool found = false;
      for (int t = 0; t < inst.num_types() && !found; ++t) {
        if (tpl.type_mass(t, A) == 0) continue;
        std::vector<int> targets;
        for (int x = 0; x < A; ++x)
          if (tpl.at(t, x, A) > 0) targets.push_back(x);
        std::vector<int> pick;
        auto walk = [&](auto&& self, size_t start) -> bool {
          if (!pick.empty()) {
            std::uint32_t mask = 0;
            int moved = 0;
            for (int x : pick) {
              mask |= 1u << x;
              moved += tpl.at(t, x, A);
            }
            std::vector<int> eligible = template_eligible_agents(a, t, mask, inst);
            std::vector<int> refusing;
            for (int i : eligible) {
              bool refuses_all = true;
              for (int x : pick) {
                if (a[i] == x) continue;  // no slot for i at this target
                if (detail::template_slot_willing(posteriors[i], i, x, tpl, inst)) {
                  refuses_all = false;
                  break;
                }
              }
              if (refuses_all) refusing.push_back(i);
            }
            int smin = std::max(1, static_cast<int>(eligible.size()) - moved + 1);
            if (static_cast<int>(refusing.size()) >= smin) {
              out.chosen[di] = GammaOption{
                  t, -1, mask, std::vector<int>(refusing.begin(), refusing.begin() + smin)};
              return true;
            }
          }
          for (size_t k = start; k < targets.size(); ++k) {
            pick.push_back(targets[k]);
            if (self(self, k + 1)) return true;
            pick.pop_back();
          }
          return false;
        };
        found = walk(walk, 0);
      }
      if (!found) throw ModelError(Errc::NoBlockingWitness, tpl.to_string(inst));
    }
    return out;
  }

  std::vector<Deviation> domain = feasible_deviations(rho, inst, limits);
  out.chosen.resize(domain.size());
  for (size_t di = 0; di < domain.size(); ++di) {
    const Deviation& delta = domain[di];
    bool found = false;
    for (int t = 0; t < inst.num_types() && !found; ++t) {
      for (int from = 0; from < A && !found; ++from) {
        if (delta.out_mass(t, from, A) == 0) continue;
        int cnt = rho.at(t, from, A);
        if (cnt == 0) continue;
        std::vector<int> subtype_agents;
        for (int i : inst.types[t])
          if (a[i] == from) subtype_agents.push_back(i);
        std::vector<int> targets;
        for (int to = 0; to < A; ++to)
          if (delta.at(t, from, to, A) > 0) targets.push_back(to);
        // Subsets of the positive targets in sorted-sequence order.
        std::vector<int> pick;
        auto walk = [&](auto&& self, size_t start) -> bool {
          if (!pick.empty()) {
            int moved = 0;
            std::uint32_t mask = 0;
            for (int to : pick) {
              moved += delta.at(t, from, to, A);
              mask |= 1u << to;
            }
            std::vector<int> refusing;
            for (int i : subtype_agents) {
              bool refuses_all = true;
              for (int to : pick)
                if (!detail::blocks_deviation(posteriors[i], channel, t, from, to, pidx, delta,
                                              inst)) {
                  refuses_all = false;
                  break;
                }
              if (refuses_all) refusing.push_back(i);
            }
            int smin = std::max(1, cnt - moved + 1);
            if (static_cast<int>(refusing.size()) >= smin) {
              out.chosen[di] = GammaOption{
                  t, from, mask, std::vector<int>(refusing.begin(), refusing.begin() + smin)};
              return true;
            }
          }
          for (size_t k = start; k < targets.size(); ++k) {
            pick.push_back(targets[k]);
            if (self(self, k + 1)) return true;
            pick.pop_back();
          }
          return false;
        };
        found = walk(walk, 0);
      }
    }
    if (!found) throw ModelError(Errc::NoBlockingWitness, delta.to_string(inst));
  }
  return out;
}

// Signature (representative, blocking profile) of a stable signal under a
// policy, per channel.
struct Signature {
  Channel channel = Channel::Public;
  int profile_idx = -1;
  ActionVector representative;
  std::optional<PublicBlockingProfile> public_blocking;
  std::optional<GammaAssignment> gamma;
};

template <class S>
Signature signature_of(const ExplicitPolicy<S>& policy, const MetaSignal& s, Channel channel,
                       const Instance& inst, const Limits& limits = {}) {
  Signature sig;
  sig.channel = channel;
  ActionProfile rho = profile_of(s.rec, inst);
  sig.profile_idx = inst.profiles.index_of(rho);
  sig.representative = RepresentativeSet(inst).of_profile(sig.profile_idx);
  std::vector<Posterior<S>> posteriors;
  for (int i = 0; i < inst.num_agents; ++i)
    posteriors.push_back(posterior(policy, view_of(s, i, channel), inst));
  if (channel == Channel::Public) {
    sig.public_blocking =
        public_blocking_profile<S>(posteriors[0].world_marginal, s.rec, inst, limits);
  } else {
    sig.gamma = gamma_from_signal(posteriors, s.rec, channel, inst, limits);
  }
  return sig;
}

}  // namespace persuasion
