#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "persuasion/deviation.hpp"
#include "persuasion/model.hpp"

namespace persuasion {

enum class Channel { Public, SemiPrivate, Private };

const char* channel_name(Channel c);
Channel channel_from_string(const std::string& s);

// Meta-signal (a, g): a recommendation vector plus one opaque label per agent.
struct MetaSignal {
  ActionVector rec;
  std::vector<std::string> labels;

  bool operator==(const MetaSignal& o) const { return rec == o.rec && labels == o.labels; }
  auto operator<=>(const MetaSignal& o) const = default;
};

// sigma : Omega -> Delta(signals).  Signals are deduplicated by value; kernel
// probabilities for coinciding signals are summed.
template <class S>
struct ExplicitPolicy {
  Channel channel = Channel::Public;
  std::vector<MetaSignal> pool;                      // distinct signals
  std::vector<std::vector<std::pair<int, S>>> kernel;  // per world: (pool id, prob)

  void add_mass(int world, const MetaSignal& s, const S& p) {
    if (p == S(0)) return;
    int id = -1;
    for (size_t k = 0; k < pool.size(); ++k)
      if (pool[k] == s) { id = static_cast<int>(k); break; }
    if (id < 0) {
      id = static_cast<int>(pool.size());
      pool.push_back(s);
    }
    for (auto& [sid, q] : kernel[world])
      if (sid == id) { q += p; return; }
    kernel[world].push_back({id, p});
  }

  S mass(int world, int sig) const {
    for (const auto& [sid, q] : kernel[world])
      if (sid == sig) return q;
    return S(0);
  }
};

// The part of a meta-signal agent i observes.
struct AgentView {
  Channel channel;
  int agent;
  ActionVector rec_part;            // full vector (public/semi) or {a_i} (private)
  std::vector<std::string> labels;  // all labels (public) or {g_i}
};

AgentView view_of(const MetaSignal& s, int agent, Channel channel);

// Joint posterior over (recommendation vector, world), plus its world marginal.
template <class S>
struct Posterior {
  std::vector<ActionVector> recs;              // distinct support vectors
  std::vector<std::vector<S>> joint;           // [rec][world]
  std::vector<S> world_marginal;               // [world]

  S total() const {
    S t(0);
    for (const auto& row : joint)
      for (const auto& v : row) t += v;
    return t;
  }
};

template <class S>
struct Witness {
  std::vector<int> agents;   // N', ascending
  std::vector<int> actions;  // a'_i per member of N'
  std::vector<S> gains;      // strict expected improvement per member
};

template <class S>
struct SignalReport {
  bool stable = true;
  std::optional<Witness<S>> witness;
};

template <class S>
struct PolicyReport {
  bool stable = true;
  int signals_checked = 0;
  int zero_mass_skipped = 0;
  std::optional<MetaSignal> unstable_signal;
  std::optional<Witness<S>> witness;
};

template <class S>
struct StabilityOptions {
  // Margin for the strict ">" in the instability condition; exact mode uses 0.
  S epsilon = std::is_same_v<S, double> ? S(1e-7) : S(0);
};

namespace detail {

inline bool view_matches(const MetaSignal& s, const AgentView& v) {
  switch (v.channel) {
    case Channel::Public:
      return s.rec == v.rec_part && s.labels == v.labels;
    case Channel::SemiPrivate:
      return s.rec == v.rec_part && s.labels[v.agent] == v.labels[0];
    case Channel::Private:
      return s.rec[v.agent] == v.rec_part[0] && s.labels[v.agent] == v.labels[0];
  }
  return false;
}

}  // namespace detail

// Bayes update for one agent view.  Throws ZeroProbabilitySignal when the
// view has no mass under the policy and prior.
template <class S>
Posterior<S> posterior(const ExplicitPolicy<S>& policy, const AgentView& view,
                       const Instance& inst) {
  std::map<ActionVector, int> rec_ids;
  Posterior<S> post;
  S denom(0);
  int W = inst.num_worlds();
  for (int w = 0; w < W; ++w) {
    S mu = inst.prior_of<S>(w);
    if (mu == S(0)) continue;
    for (const auto& [sid, q] : policy.kernel[w]) {
      if (q == S(0)) continue;
      if (!detail::view_matches(policy.pool[sid], view)) continue;
      const ActionVector& rec = policy.pool[sid].rec;
      auto [it, inserted] = rec_ids.try_emplace(rec, static_cast<int>(post.recs.size()));
      if (inserted) {
        post.recs.push_back(rec);
        post.joint.emplace_back(W, S(0));
      }
      S m = mu * q;
      post.joint[it->second][w] += m;
      denom += m;
    }
  }
  if (denom == S(0))
    throw ModelError(Errc::ZeroProbabilitySignal, "agent " + std::to_string(view.agent + 1));
  post.world_marginal.assign(W, S(0));
  for (auto& row : post.joint)
    for (int w = 0; w < W; ++w) {
      row[w] /= denom;
      post.world_marginal[w] += row[w];
    }
  return post;
}

// Expected gain of one deviator under its posterior, for the group move
// (agents, actions).  a-tilde ranges over the posterior support; the
// deviation replaces every deviator's realized entry.
template <class S>
S deviator_gain(const Posterior<S>& post, int agent, const std::vector<int>& agents,
                const std::vector<int>& actions, const Instance& inst) {
  int A = inst.num_actions();
  S gain(0);
  int my_action = -1;
  for (size_t k = 0; k < agents.size(); ++k)
    if (agents[k] == agent) my_action = actions[k];
  int t = inst.type_of[agent];
  for (size_t r = 0; r < post.recs.size(); ++r) {
    const ActionVector& rec = post.recs[r];
    ActionProfile base = profile_of(rec, inst);
    ActionProfile dev = base;
    for (size_t k = 0; k < agents.size(); ++k) {
      int j = agents[k];
      if (rec[j] == actions[k]) continue;
      dev.at(inst.type_of[j], rec[j], A)--;
      dev.at(inst.type_of[j], actions[k], A)++;
    }
    int pb = inst.profiles.index_of(base);
    int pd = inst.profiles.index_of(dev);
    for (int w = 0; w < inst.num_worlds(); ++w) {
      const S& pr = post.joint[r][w];
      if (pr == S(0)) continue;
      gain += pr * (inst.agent_utility<S>(t, my_action, pd, w) -
                    inst.agent_utility<S>(t, rec[agent], pb, w));
    }
  }
  return gain;
}

// Definition of instability given per-agent posteriors: searches subsets N'
// of size 1..d (ascending, then lexicographic) and all off-recommendation
// action assignments; a witness needs a strict gain for every member.
template <class S>
SignalReport<S> stable_at(const std::vector<Posterior<S>>& posteriors, const ActionVector& rec,
                          const Instance& inst, const StabilityOptions<S>& opts = {}) {
  SignalReport<S> report;
  int n = inst.num_agents;
  int A = inst.num_actions();
  int d = inst.deviation_bound;
  std::vector<int> subset;
  std::vector<int> assign;

  auto try_assignments = [&](auto&& self, size_t pos) -> bool {
    if (pos == subset.size()) {
      std::vector<S> gains;
      gains.reserve(subset.size());
      for (int j : subset) {
        S g = deviator_gain(posteriors[j], j, subset, assign, inst);
        if (!(g > opts.epsilon)) return false;
        gains.push_back(g);
      }
      report.stable = false;
      report.witness = Witness<S>{subset, assign, gains};
      return true;
    }
    int i = subset[pos];
    for (int a = 0; a < A; ++a) {
      if (a == rec[i]) continue;  // deviating to the recommendation is vacuous
      assign[pos] = a;
      if (self(self, pos + 1)) return true;
    }
    return false;
  };

  auto subsets = [&](auto&& self, int start, int remaining) -> bool {
    if (remaining == 0) {
      assign.assign(subset.size(), 0);
      return try_assignments(try_assignments, 0);
    }
    for (int i = start; i <= n - remaining; ++i) {
      subset.push_back(i);
      if (self(self, i + 1, remaining - 1)) return true;
      subset.pop_back();
    }
    return false;
  };

  for (int size = 1; size <= d; ++size) {
    subset.clear();
    if (subsets(subsets, 0, size)) break;
  }
  return report;
}

template <class S>
SignalReport<S> is_signal_stable(const ExplicitPolicy<S>& policy, const MetaSignal& s,
                                 const Instance& inst, const StabilityOptions<S>& opts = {}) {
  std::vector<Posterior<S>> posteriors;
  posteriors.reserve(inst.num_agents);
  for (int i = 0; i < inst.num_agents; ++i)
    posteriors.push_back(posterior(policy, view_of(s, i, policy.channel), inst));
  return stable_at(posteriors, s.rec, inst, opts);
}

template <class S>
PolicyReport<S> is_policy_stable(const ExplicitPolicy<S>& policy, const Instance& inst,
                                 const StabilityOptions<S>& opts = {}) {
  PolicyReport<S> out;
  // Support of the policy in pool order, deduplicated across worlds.
  std::vector<bool> in_support(policy.pool.size(), false);
  for (int w = 0; w < inst.num_worlds(); ++w)
    for (const auto& [sid, q] : policy.kernel[w])
      if (q > S(0) && inst.prior_of<S>(w) > S(0)) in_support[sid] = true;
  for (size_t sid = 0; sid < policy.pool.size(); ++sid) {
    if (!in_support[sid]) {
      ++out.zero_mass_skipped;
      continue;
    }
    ++out.signals_checked;
    auto rep = is_signal_stable(policy, policy.pool[sid], inst, opts);
    if (!rep.stable) {
      out.stable = false;
      out.unstable_signal = policy.pool[sid];
      out.witness = rep.witness;
      return out;
    }
  }
  return out;
}

// u_0(sigma) = E_w E_s u_0(rho_a(s) | w)
template <class S>
S policy_value(const ExplicitPolicy<S>& policy, const Instance& inst) {
  S value(0);
  for (int w = 0; w < inst.num_worlds(); ++w) {
    S mu = inst.prior_of<S>(w);
    if (mu == S(0)) continue;
    for (const auto& [sid, q] : policy.kernel[w]) {
      if (q == S(0)) continue;
      int p = inst.profiles.index_of(profile_of(policy.pool[sid].rec, inst));
      value += mu * q * inst.principal_utility<S>(p, w);
    }
  }
  return value;
}

// Kernel validity: non-negative entries, per-world sums within 1e-9 of 1.
template <class S>
void check_policy_kernel(const ExplicitPolicy<S>& policy, const Instance& inst) {
  Rational tol = Rational(1) / Rational(1000000000);
  for (int w = 0; w < inst.num_worlds(); ++w) {
    S sum(0);
    for (const auto& [sid, q] : policy.kernel[w]) {
      if (q < S(0))
        throw ModelError(Errc::KernelNotNormalized,
                         "negative probability in world " + inst.worlds[w]);
      sum += q;
    }
    S err = sum - S(1);
    if (err < S(0)) err = -err;
    bool bad;
    if constexpr (std::is_same_v<S, double>)
      bad = err > 1e-9;
    else
      bad = err > Rational(tol);
    if (bad)
      throw ModelError(Errc::KernelNotNormalized,
                       "world " + inst.worlds[w] + " kernel does not sum to 1");
  }
}

}  // namespace persuasion
