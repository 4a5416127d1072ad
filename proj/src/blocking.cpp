#include "persuasion/blocking.hpp"

#include <algorithm>

namespace persuasion {

std::uint64_t PublicFamily::cover_count() const {
  std::uint64_t n = 1;
  for (const auto& c : candidates)
    n = checked_mul(n, c.size(), "public blocking profiles", std::uint64_t{1} << 62);
  return n;
}

PublicBlockingProfile PublicFamily::cover(std::uint64_t index) const {
  PublicBlockingProfile out;
  out.tuples.reserve(candidates.size());
  for (size_t di = 0; di < candidates.size(); ++di) {
    std::uint64_t radix = candidates[di].size();
    out.tuples.push_back(candidates[di][index % radix]);
    index /= radix;
  }
  return out;
}

PublicFamily enumerate_public_family(int profile_idx, const Instance& inst,
                                     const Limits& limits) {
  PublicFamily family;
  family.profile_idx = profile_idx;
  family.domain = feasible_deviations(inst.profiles[profile_idx], inst, limits);
  int A = inst.num_actions();
  family.candidates.resize(family.domain.size());
  for (size_t di = 0; di < family.domain.size(); ++di) {
    const Deviation& d = family.domain[di];
    for (int t = 0; t < inst.num_types(); ++t)
      for (int from = 0; from < A; ++from)
        for (int to = 0; to < A; ++to)
          if (d.at(t, from, to, A) > 0)
            family.candidates[di].push_back(PublicTuple{static_cast<int>(di), t, from, to});
  }
  return family;
}

std::vector<PublicBlockingProfile> enumerate_public_blocking_profiles(const PublicFamily& family,
                                                                      const Limits& limits) {
  std::uint64_t n = family.cover_count();
  if (n > limits.enumeration_cap)
    throw GuardExceeded("public blocking profiles", n, limits.enumeration_cap);
  std::vector<PublicBlockingProfile> out;
  out.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k) out.push_back(family.cover(k));
  return out;
}

std::uint64_t GammaFamily::assignment_count() const {
  std::uint64_t n = 1;
  for (const auto& o : options)
    n = checked_mul(n, o.size(), "blocking profiles", std::uint64_t{1} << 62);
  return n;
}

GammaAssignment GammaFamily::assignment(std::uint64_t index) const {
  GammaAssignment out;
  out.chosen.reserve(options.size());
  for (const auto& opts : options) {
    std::uint64_t radix = opts.size();
    out.chosen.push_back(opts[index % radix]);
    index /= radix;
  }
  return out;
}

std::vector<int> template_eligible_agents(const ActionVector& abar, int type,
                                          std::uint32_t target_mask, const Instance& inst) {
  std::vector<int> out;
  for (int i : inst.types[type])
    if (target_mask & ~(std::uint32_t{1} << abar[i])) out.push_back(i);
  return out;
}

bool template_unrealizable(const TargetTemplate& tpl, const ActionVector& abar,
                           const Instance& inst) {
  int A = inst.num_actions();
  for (int t = 0; t < inst.num_types(); ++t) {
    std::vector<int> targets;
    for (int x = 0; x < A; ++x)
      if (tpl.at(t, x, A) > 0) targets.push_back(x);
    if (targets.empty()) continue;
    // Hall condition on slot eligibility alone, over every subset of slots.
    for (std::uint32_t sub = 1; sub < (1u << targets.size()); ++sub) {
      std::uint32_t mask = 0;
      int demand = 0;
      for (size_t k = 0; k < targets.size(); ++k)
        if (sub >> k & 1) {
          mask |= 1u << targets[k];
          demand += tpl.at(t, targets[k], A);
        }
      if (static_cast<int>(template_eligible_agents(abar, t, mask, inst).size()) < demand)
        return true;
    }
  }
  return false;
}

namespace {

// Shared N'-emission.  Only refusing sets of the minimum size meeting
// condition 3 are enumerated: the deterministic tie-break never selects a
// larger one, so larger sets cannot occur in any signature.
void emit_refusal_options(std::vector<std::optional<GammaOption>>& opts, int type, int from,
                          std::uint32_t mask, const std::vector<int>& pool, int smin) {
  int s = std::max(1, smin);
  if (s > static_cast<int>(pool.size())) return;
  std::vector<int> sel;
  auto combos = [&](auto&& self, size_t start, int need) -> void {
    if (need == 0) {
      opts.push_back(GammaOption{type, from, mask, sel});
      return;
    }
    for (size_t k = start; k + need <= pool.size(); ++k) {
      sel.push_back(pool[k]);
      self(self, k + 1, need - 1);
      sel.pop_back();
    }
  };
  combos(combos, 0, s);
}

}  // namespace

GammaFamily enumerate_gamma_family(int profile_idx, Channel channel, const Instance& inst,
                                   const Limits& limits,
                                   std::shared_ptr<const std::vector<Deviation>> dstar,
                                   std::shared_ptr<const std::vector<TargetTemplate>> kstar) {
  GammaFamily family;
  family.channel = channel;
  family.profile_idx = profile_idx;
  const ActionProfile& rho = inst.profiles[profile_idx];
  int A = inst.num_actions();
  RepresentativeSet reps(inst);
  const ActionVector& abar = reps.of_profile(profile_idx);
  (void)dstar;

  if (channel == Channel::Private) {
    if (!kstar)
      kstar = std::make_shared<const std::vector<TargetTemplate>>(
          enumerate_target_templates(inst, limits));
    family.templates = std::move(kstar);
    family.options.resize(family.templates->size());
    for (size_t di = 0; di < family.templates->size(); ++di) {
      const TargetTemplate& tpl = (*family.templates)[di];
      auto& opts = family.options[di];
      if (template_unrealizable(tpl, abar, inst)) {
        // No coalition of this shape can be staffed; the fixed tie-break
        // assigns the empty witness, so no other option reaches a signature.
        opts.push_back(std::nullopt);
        continue;
      }
      for (int t = 0; t < inst.num_types(); ++t) {
        if (tpl.type_mass(t, A) == 0) continue;
        std::vector<int> targets;
        for (int x = 0; x < A; ++x)
          if (tpl.at(t, x, A) > 0) targets.push_back(x);
        std::vector<int> pick;
        auto walk = [&](auto&& self, size_t start) -> void {
          if (!pick.empty()) {
            std::uint32_t mask = 0;
            int moved = 0;
            for (int x : pick) {
              mask |= 1u << x;
              moved += tpl.at(t, x, A);
            }
            std::vector<int> eligible = template_eligible_agents(abar, t, mask, inst);
            emit_refusal_options(opts, t, -1, mask, eligible,
                                 static_cast<int>(eligible.size()) - moved + 1);
          }
          for (size_t k = start; k < targets.size(); ++k) {
            pick.push_back(targets[k]);
            self(self, k + 1);
            pick.pop_back();
          }
        };
        walk(walk, 0);
      }
      if (opts.empty())
        throw ModelError(Errc::FormatError, "no structural blocking option for coalition shape " +
                                                tpl.to_string(inst));
    }
    return family;
  }

  family.domain = std::make_shared<const std::vector<Deviation>>(
      feasible_deviations(rho, inst, limits));
  family.options.resize(family.domain->size());
  for (size_t di = 0; di < family.domain->size(); ++di) {
    const Deviation& delta = (*family.domain)[di];
    auto& opts = family.options[di];
    for (int t = 0; t < inst.num_types(); ++t) {
      for (int from = 0; from < A; ++from) {
        if (delta.out_mass(t, from, A) == 0) continue;
        int cnt = rho.at(t, from, A);
        if (cnt == 0) continue;
        std::vector<int> subtype_agents;
        for (int i : inst.types[t])
          if (abar[i] == from) subtype_agents.push_back(i);
        std::vector<int> targets;
        for (int to = 0; to < A; ++to)
          if (delta.at(t, from, to, A) > 0) targets.push_back(to);
        std::vector<int> pick;
        auto walk = [&](auto&& self, size_t start) -> void {
          if (!pick.empty()) {
            int moved = 0;
            std::uint32_t mask = 0;
            for (int to : pick) {
              moved += delta.at(t, from, to, A);
              mask |= 1u << to;
            }
            emit_refusal_options(opts, t, from, mask, subtype_agents, cnt - moved + 1);
          }
          for (size_t k = start; k < targets.size(); ++k) {
            pick.push_back(targets[k]);
            self(self, k + 1);
            pick.pop_back();
          }
        };
        walk(walk, 0);
      }
    }
    if (opts.empty())
      throw ModelError(Errc::FormatError, "no structural blocking option for deviation " +
                                              delta.to_string(inst));
  }
  return family;
}

std::vector<GammaAssignment> enumerate_gamma_assignments(const GammaFamily& family,
                                                         const Limits& limits) {
  std::uint64_t n = family.assignment_count();
  if (n > limits.enumeration_cap)
    throw GuardExceeded("blocking profiles", n, limits.enumeration_cap);
  std::vector<GammaAssignment> out;
  out.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k) out.push_back(family.assignment(k));
  return out;
}

AgentBeta agent_beta(const GammaAssignment& gamma, int agent) {
  AgentBeta beta;
  for (size_t di = 0; di < gamma.chosen.size(); ++di) {
    const auto& opt = gamma.chosen[di];
    if (!opt) continue;
    if (std::binary_search(opt->agents.begin(), opt->agents.end(), agent))
      beta.push_back(BetaEntry{static_cast<int>(di), opt->aprime_mask});
  }
  return beta;  // domain order, already sorted by dev index
}

std::string beta_label(const AgentBeta& beta) {
  std::string s;
  for (const auto& e : beta) {
    if (!s.empty()) s += ";";
    s += "d" + std::to_string(e.dev) + ":" + std::to_string(e.aprime_mask);
  }
  return s.empty() ? "-" : s;
}

std::string public_label(const PublicBlockingProfile& beta) {
  std::string s;
  for (const auto& t : beta.tuples) {
    if (!s.empty()) s += ";";
    s += "d" + std::to_string(t.dev) + ":" + std::to_string(t.type) + ":" +
         std::to_string(t.from) + ">" + std::to_string(t.to);
  }
  return s.empty() ? "-" : s;
}

}  // namespace persuasion
