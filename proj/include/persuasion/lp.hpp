#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "persuasion/blocking.hpp"
#include "persuasion/model.hpp"
#include "persuasion/simplex.hpp"
#include "persuasion/stability.hpp"

namespace persuasion {

// A built channel LP plus the signal metadata needed to turn a solution back
// into an explicit policy.  Variable (s, w) has index s * |worlds| + w.
template <class S>
struct BuiltLp {
  Channel channel = Channel::Public;
  LinearProgram<S> lp;
  std::vector<ActionVector> recs;                // representative per signal
  std::vector<std::vector<std::string>> labels;  // per signal, one label per agent
  std::uint64_t constraint_rows = 0;             // stability rows before simplex rows
};

template <class S>
struct SolvedPolicy {
  Channel channel = Channel::Public;
  ExplicitPolicy<S> policy;
  S value = S(0);  // recomputed from the kernel
};

namespace detail {

template <class S>
class RowSink {
 public:
  explicit RowSink(LinearProgram<S>& lp, std::uint64_t cap) : lp_(lp), cap_(cap) {}

  void add_le_zero(std::vector<std::pair<int, S>> coeffs) {
    std::erase_if(coeffs, [](const auto& cv) { return cv.second == S(0); });
    if (coeffs.empty()) return;  // vacuous 0 <= 0
    if (!seen_.insert(coeffs).second) return;
    if (lp_.rows.size() >= cap_)
      throw GuardExceeded("lp constraint rows", lp_.rows.size() + 1, cap_);
    typename LinearProgram<S>::Row row;
    row.coeffs = std::move(coeffs);
    row.relation = '<';
    row.rhs = S(0);
    lp_.rows.push_back(std::move(row));
  }

 private:
  LinearProgram<S>& lp_;
  std::uint64_t cap_;
  std::set<std::vector<std::pair<int, S>>> seen_;
};

// rho_p ⊕ delta profile index, or -1 when infeasible.  Memoized.
class DeviatedIndex {
 public:
  DeviatedIndex(const Instance& inst, const std::vector<Deviation>& domain)
      : inst_(inst), domain_(domain) {}
  int get(int profile, int dev) {
    auto [it, fresh] = memo_.try_emplace({profile, dev}, -2);
    if (!fresh) return it->second;
    const Deviation& d = domain_[dev];
    if (!deviation_feasible_from(inst_.profiles[profile], d, inst_)) {
      it->second = -1;
    } else {
      it->second = inst_.profiles.index_of(apply_to_profile(inst_.profiles[profile], d, inst_));
    }
    return it->second;
  }

 private:
  const Instance& inst_;
  const std::vector<Deviation>& domain_;
  std::map<std::pair<int, int>, int> memo_;
};

template <class S>
void add_objective_and_simplex(BuiltLp<S>& built, const Instance& inst) {
  int W = inst.num_worlds();
  std::uint64_t nsig = built.recs.size();
  built.lp.num_vars = static_cast<int>(nsig * W);
  built.lp.objective.assign(built.lp.num_vars, S(0));
  for (std::uint64_t s = 0; s < nsig; ++s) {
    int p = inst.profiles.index_of(profile_of(built.recs[s], inst));
    for (int w = 0; w < W; ++w)
      built.lp.objective[s * W + w] =
          inst.prior_of<S>(w) * inst.principal_utility<S>(p, w);
  }
  built.constraint_rows = built.lp.rows.size();
  for (int w = 0; w < W; ++w) {
    typename LinearProgram<S>::Row row;
    row.relation = '=';
    row.rhs = S(1);
    for (std::uint64_t s = 0; s < nsig; ++s) row.coeffs.push_back({s * W + w, S(1)});
    built.lp.rows.push_back(std::move(row));
  }
  built.lp.var_names.resize(built.lp.num_vars);
  for (std::uint64_t s = 0; s < nsig; ++s)
    for (int w = 0; w < W; ++w)
      built.lp.var_names[s * W + w] = "s" + std::to_string(s) + "_w" + std::to_string(w);
}

}  // namespace detail

// Public LP: one variable per (representative, minimal cover, world); one
// constraint per chosen blocking tuple keeping the deviation weakly
// unprofitable under the signal's own mass.
template <class S>
BuiltLp<S> build_public_lp(const Instance& inst, const Limits& limits = {}) {
  BuiltLp<S> built;
  built.channel = Channel::Public;
  RepresentativeSet reps(inst);
  int W = inst.num_worlds();

  // Guard the total signal count up front.
  std::uint64_t total = 0;
  std::vector<PublicFamily> families;
  for (int p = 0; p < inst.profiles.size(); ++p) {
    families.push_back(enumerate_public_family(p, inst, limits));
    total += families.back().cover_count();
    if (total > limits.enumeration_cap)
      throw GuardExceeded("public signal space", total, limits.enumeration_cap);
  }

  detail::RowSink<S> sink(built.lp, limits.enumeration_cap);
  for (int p = 0; p < inst.profiles.size(); ++p) {
    const PublicFamily& family = families[p];
    detail::DeviatedIndex devidx(inst, family.domain);
    std::uint64_t covers = family.cover_count();
    for (std::uint64_t k = 0; k < covers; ++k) {
      PublicBlockingProfile beta = family.cover(k);
      std::uint64_t sig = built.recs.size();
      built.recs.push_back(reps.of_profile(p));
      std::string lab = public_label(beta);
      built.labels.emplace_back(inst.num_agents, lab);
      for (const PublicTuple& tpl : beta.tuples) {
        int pd = devidx.get(p, tpl.dev);
        std::vector<std::pair<int, S>> coeffs;
        for (int w = 0; w < W; ++w) {
          S diff = inst.agent_utility<S>(tpl.type, tpl.to, pd, w) -
                   inst.agent_utility<S>(tpl.type, tpl.from, p, w);
          coeffs.push_back({static_cast<int>(sig * W + w), inst.prior_of<S>(w) * diff});
        }
        sink.add_le_zero(std::move(coeffs));
      }
    }
  }
  detail::add_objective_and_simplex(built, inst);
  return built;
}

// Semi-private LP: signals are (representative, gamma assignment); each
// constraint aggregates the agent's information set {beta' : beta'_i = beta_i}
// within the same representative.
template <class S>
BuiltLp<S> build_semiprivate_lp(const Instance& inst, const Limits& limits = {}) {
  BuiltLp<S> built;
  built.channel = Channel::SemiPrivate;
  RepresentativeSet reps(inst);
  int W = inst.num_worlds();

  std::uint64_t total = 0;
  std::vector<GammaFamily> families;
  for (int p = 0; p < inst.profiles.size(); ++p) {
    families.push_back(enumerate_gamma_family(p, Channel::SemiPrivate, inst, limits));
    total += families.back().assignment_count();
    if (total > limits.enumeration_cap)
      throw GuardExceeded("semi-private signal space", total, limits.enumeration_cap);
  }

  detail::RowSink<S> sink(built.lp, limits.enumeration_cap);
  for (int p = 0; p < inst.profiles.size(); ++p) {
    const GammaFamily& family = families[p];
    detail::DeviatedIndex devidx(inst, *family.domain);
    std::uint64_t count = family.assignment_count();
    std::uint64_t first_sig = built.recs.size();
    const ActionVector& abar = reps.of_profile(p);

    // Group signals by (agent, beta_i value).
    struct Group {
      AgentBeta beta;
      std::vector<std::uint64_t> signals;
    };
    std::map<std::pair<int, std::string>, Group> groups;
    for (std::uint64_t k = 0; k < count; ++k) {
      GammaAssignment gamma = family.assignment(k);
      std::uint64_t sig = first_sig + k;
      built.recs.push_back(abar);
      std::vector<std::string> labels(inst.num_agents);
      for (int i = 0; i < inst.num_agents; ++i) {
        AgentBeta beta = agent_beta(gamma, i);
        labels[i] = beta_label(beta);
        auto& g = groups[{i, labels[i]}];
        if (g.signals.empty()) g.beta = std::move(beta);
        g.signals.push_back(sig);
      }
      built.labels.push_back(std::move(labels));
    }

    for (const auto& [key, group] : groups) {
      int agent = key.first;
      int t = inst.type_of[agent];
      int stay = abar[agent];
      for (const BetaEntry& entry : group.beta) {
        int pd = devidx.get(p, entry.dev);
        for (int to = 0; to < inst.num_actions(); ++to) {
          if (!(entry.aprime_mask >> to & 1)) continue;
          std::vector<std::pair<int, S>> coeffs;
          for (std::uint64_t sig : group.signals)
            for (int w = 0; w < W; ++w) {
              S diff = inst.agent_utility<S>(t, to, pd, w) -
                       inst.agent_utility<S>(t, stay, p, w);
              coeffs.push_back({static_cast<int>(sig * W + w), inst.prior_of<S>(w) * diff});
            }
          std::sort(coeffs.begin(), coeffs.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });
          sink.add_le_zero(std::move(coeffs));
        }
      }
    }
  }
  detail::add_objective_and_simplex(built, inst);
  return built;
}

namespace detail {

// Expected deviated utility for the private rows: the probing agent plays
// own_target; the rest of the coalition shape is assigned uniformly and
// injectively to same-type roles of the realized profile (the law a lottery
// policy induces on partners), each moving from its realized action to its
// target.
template <class S>
class TemplateDevUtil {
 public:
  TemplateDevUtil(const Instance& inst, const std::vector<TargetTemplate>& templates)
      : inst_(inst), templates_(templates) {}

  const std::vector<S>& get(int profile, int type, int own_action, int own_target, int tpl_idx) {
    auto key = std::make_tuple(profile, type, own_action, own_target, tpl_idx);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    int A = inst_.num_actions();
    const TargetTemplate& tpl = templates_[tpl_idx];
    std::vector<std::pair<int, int>> slots;  // (type, target) per partner
    for (int t2 = 0; t2 < inst_.num_types(); ++t2)
      for (int x = 0; x < A; ++x) {
        int k = tpl.at(t2, x, A) - (t2 == type && x == own_target ? 1 : 0);
        for (int r = 0; r < k; ++r) slots.push_back({t2, x});
      }

    ActionProfile pool = inst_.profiles[profile];  // unassigned roles
    pool.at(type, own_action, A) -= 1;
    ActionProfile moved = inst_.profiles[profile];
    moved.at(type, own_action, A) -= 1;
    moved.at(type, own_target, A) += 1;

    std::vector<S> acc(inst_.num_worlds(), S(0));
    walk(slots, 0, S(1), pool, moved, type, own_target, acc);
    return memo_[key] = std::move(acc);
  }

 private:
  void walk(const std::vector<std::pair<int, int>>& slots, size_t idx, S prob,
            ActionProfile& pool, ActionProfile& moved, int own_type, int own_target,
            std::vector<S>& acc) {
    int A = inst_.num_actions();
    if (idx == slots.size()) {
      int p = inst_.profiles.index_of(moved);
      for (int w = 0; w < inst_.num_worlds(); ++w)
        acc[w] += prob * inst_.agent_utility<S>(own_type, own_target, p, w);
      return;
    }
    auto [t2, x] = slots[idx];
    int remaining = 0;
    for (int f = 0; f < A; ++f) remaining += pool.at(t2, f, A);
    for (int f = 0; f < A; ++f) {
      int avail = pool.at(t2, f, A);
      if (avail == 0) continue;
      S branch = prob * S(avail) / S(remaining);
      pool.at(t2, f, A) -= 1;
      moved.at(t2, f, A) -= 1;
      moved.at(t2, x, A) += 1;
      walk(slots, idx + 1, branch, pool, moved, own_type, own_target, acc);
      moved.at(t2, x, A) -= 1;
      moved.at(t2, f, A) += 1;
      pool.at(t2, f, A) += 1;
    }
  }

  const Instance& inst_;
  const std::vector<TargetTemplate>& templates_;
  std::map<std::tuple<int, int, int, int, int>, std::vector<S>> memo_;
};

}  // namespace detail

// Private LP over (representative, template blocking profile) signals.
// Information sets pool every signal and same-type role matching the
// constrained agent's view; each row keeps one coalition shape weakly
// unprofitable for the refusing agent, partners averaged over same-type
// roles exactly as the lottery expansion distributes them.
template <class S>
BuiltLp<S> build_private_lp(const Instance& inst, const Limits& limits = {}) {
  BuiltLp<S> built;
  built.channel = Channel::Private;
  RepresentativeSet reps(inst);
  int W = inst.num_worlds();
  auto kstar = std::make_shared<const std::vector<TargetTemplate>>(
      enumerate_target_templates(inst, limits));

  std::uint64_t total = 0;
  std::vector<GammaFamily> families;
  for (int p = 0; p < inst.profiles.size(); ++p) {
    families.push_back(
        enumerate_gamma_family(p, Channel::Private, inst, limits, nullptr, kstar));
    total += families.back().assignment_count();
    if (total > limits.enumeration_cap)
      throw GuardExceeded("private signal space", total, limits.enumeration_cap);
  }

  detail::TemplateDevUtil<S> devutil(inst, *kstar);

  // Views keyed by (type, recommended action, beta label); each collects
  // (signal, multiplicity) where multiplicity counts matching roles j.
  struct View {
    AgentBeta beta;
    std::map<std::uint64_t, int> weights;  // signal -> multiplicity
  };
  std::map<std::tuple<int, int, std::string>, View> views;
  std::vector<int> signal_profile;

  for (int p = 0; p < inst.profiles.size(); ++p) {
    const GammaFamily& family = families[p];
    std::uint64_t count = family.assignment_count();
    const ActionVector& abar = reps.of_profile(p);
    for (std::uint64_t k = 0; k < count; ++k) {
      GammaAssignment gamma = family.assignment(k);
      std::uint64_t sig = built.recs.size();
      built.recs.push_back(abar);
      signal_profile.push_back(p);
      std::vector<std::string> labels(inst.num_agents);
      for (int j = 0; j < inst.num_agents; ++j) {
        AgentBeta beta = agent_beta(gamma, j);
        labels[j] = beta_label(beta);
        auto& view = views[{inst.type_of[j], abar[j], labels[j]}];
        if (view.weights.empty()) view.beta = std::move(beta);
        view.weights[sig] += 1;
      }
      built.labels.push_back(std::move(labels));
    }
  }

  detail::RowSink<S> sink(built.lp, limits.enumeration_cap);
  for (const auto& [key, view] : views) {
    auto [t, stay, label] = key;
    (void)label;
    for (const BetaEntry& entry : view.beta) {
      for (int to = 0; to < inst.num_actions(); ++to) {
        if (!(entry.aprime_mask >> to & 1)) continue;
        if (to == stay) continue;  // no slot for this agent at its own action
        std::vector<std::pair<int, S>> coeffs;
        for (const auto& [sig, mult] : view.weights) {
          int p = signal_profile[sig];
          const std::vector<S>& dev = devutil.get(p, t, stay, to, entry.dev);
          for (int w = 0; w < W; ++w) {
            S diff = dev[w] - inst.agent_utility<S>(t, stay, p, w);
            coeffs.push_back(
                {static_cast<int>(sig * W + w), S(mult) * inst.prior_of<S>(w) * diff});
          }
        }
        sink.add_le_zero(std::move(coeffs));
      }
    }
  }
  detail::add_objective_and_simplex(built, inst);
  return built;
}

template <class S>
BuiltLp<S> build_channel_lp(Channel channel, const Instance& inst, const Limits& limits = {}) {
  switch (channel) {
    case Channel::Public: return build_public_lp<S>(inst, limits);
    case Channel::SemiPrivate: return build_semiprivate_lp<S>(inst, limits);
    case Channel::Private: return build_private_lp<S>(inst, limits);
  }
  throw ModelError(Errc::FormatError, "bad channel");
}

// Turns a solver solution into an explicit policy: clips round-off noise,
// renormalizes each world, drops zero-mass signals, recomputes the value.
template <class S>
SolvedPolicy<S> extract_policy(const BuiltLp<S>& built, const SolveResult<S>& sol,
                               const Instance& inst) {
  if (sol.status != SolveStatus::Optimal)
    throw ModelError(Errc::InfeasibleSolution, "solution is not optimal");
  int W = inst.num_worlds();
  std::uint64_t nsig = built.recs.size();

  // Feasibility residual check.
  for (const auto& row : built.lp.rows) {
    S lhs(0);
    for (const auto& [j, v] : row.coeffs) lhs += v * sol.x[j];
    S viol = row.relation == '=' ? lhs - row.rhs
                                 : (lhs > row.rhs ? lhs - row.rhs : S(0));
    if (viol < S(0)) viol = -viol;
    bool bad;
    if constexpr (std::is_same_v<S, double>)
      bad = viol > 1e-6;
    else
      bad = viol > S(0);
    if (bad) throw ModelError(Errc::InfeasibleSolution, "constraint violation beyond tolerance");
  }

  SolvedPolicy<S> out;
  out.channel = built.channel;
  out.policy.channel = built.channel;
  out.policy.kernel.resize(W);
  for (int w = 0; w < W; ++w) {
    S sum(0);
    std::vector<S> mass(nsig, S(0));
    for (std::uint64_t s = 0; s < nsig; ++s) {
      S v = sol.x[s * W + w];
      if constexpr (std::is_same_v<S, double>) {
        if (v < -1e-9) throw ModelError(Errc::InfeasibleSolution, "kernel entry below -1e-9");
        if (v < 1e-10) v = 0;  // round-off dust is not support
      }
      mass[s] = v;
      sum += v;
    }
    if (sum == S(0)) throw ModelError(Errc::InfeasibleSolution, "empty kernel in a world");
    for (std::uint64_t s = 0; s < nsig; ++s) {
      if (mass[s] == S(0)) continue;
      out.policy.add_mass(w, MetaSignal{built.recs[s], built.labels[s]}, mass[s] / sum);
    }
  }
  out.value = policy_value(out.policy, inst);
  return out;
}

// Plain-text dump: objective row, constraint rows, bounds.
template <class S>
std::string lp_to_text(const LinearProgram<S>& lp) {
  auto num = [](const S& v) {
    if constexpr (std::is_same_v<S, double>) {
      std::ostringstream os;
      os.precision(17);
      os << v;
      return os.str();
    } else {
      return rational_to_string(v);
    }
  };
  auto name = [&](int j) {
    return lp.var_names.empty() ? "x" + std::to_string(j) : lp.var_names[j];
  };
  std::ostringstream os;
  os << "Maximize\n obj:";
  for (int j = 0; j < lp.num_vars; ++j)
    if (lp.objective[j] != S(0)) os << " + " << num(lp.objective[j]) << " " << name(j);
  os << "\nSubject To\n";
  for (size_t r = 0; r < lp.rows.size(); ++r) {
    os << " c" << r << ":";
    for (const auto& [j, v] : lp.rows[r].coeffs) os << " + " << num(v) << " " << name(j);
    os << (lp.rows[r].relation == '=' ? " = " : " <= ") << num(lp.rows[r].rhs) << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < lp.num_vars; ++j) os << " " << name(j) << " >= 0\n";
  os << "End\n";
  return os.str();
}

}  // namespace persuasion
