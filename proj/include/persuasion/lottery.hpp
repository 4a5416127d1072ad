#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "persuasion/model.hpp"
#include "persuasion/stability.hpp"

namespace persuasion {

inline std::uint64_t count_type_permutations(const Instance& inst) {
  std::uint64_t total = 1;
  for (const auto& ty : inst.types) {
    for (std::uint64_t f = 2; f <= ty.size(); ++f)
      total = checked_mul(total, f, "type permutations", std::uint64_t{1} << 62);
  }
  return total;
}

// All permutations m with m(i) in T iff i in T, deterministic order
// (per-type lexicographic next_permutation, type-0 outermost).
inline std::vector<std::vector<int>> type_permutations(const Instance& inst,
                                                       const Limits& limits = {}) {
  std::uint64_t total = count_type_permutations(inst);
  if (total > limits.enumeration_cap)
    throw GuardExceeded("type permutations", total, limits.enumeration_cap);

  std::vector<std::vector<std::vector<int>>> per_type;
  for (const auto& ty : inst.types) {
    std::vector<int> image = ty;  // ascending start
    std::vector<std::vector<int>> all;
    do {
      all.push_back(image);
    } while (std::next_permutation(image.begin(), image.end()));
    per_type.push_back(std::move(all));
  }

  std::vector<std::vector<int>> out;
  out.reserve(total);
  std::vector<size_t> pick(per_type.size(), 0);
  while (true) {
    std::vector<int> m(inst.num_agents);
    for (size_t t = 0; t < per_type.size(); ++t)
      for (size_t pos = 0; pos < inst.types[t].size(); ++pos)
        m[inst.types[t][pos]] = per_type[t][pick[t]][pos];
    out.push_back(std::move(m));
    int t = static_cast<int>(per_type.size()) - 1;
    while (t >= 0 && ++pick[t] == per_type[t].size()) pick[t--] = 0;
    if (t < 0) break;
  }
  return out;
}

template <class S>
struct LotteryPolicy {
  ExplicitPolicy<S> base;
  ExplicitPolicy<S> expanded;
};

// lambda(sigma): uniform mixture over type-preserving permutations of each
// base signal, a'_i = a_{m(i)}, g'_i = g_{m(i)}.  Coinciding images merge by
// probability addition.  reveal_role appends m(i) to each label, giving the
// role-revealing variant used in the supporting lemmas.
template <class S>
LotteryPolicy<S> lotterize(const ExplicitPolicy<S>& base, const Instance& inst,
                           bool reveal_role = false, const Limits& limits = {}) {
  std::vector<std::vector<int>> perms = type_permutations(inst, limits);
  S share = S(1) / S(static_cast<int>(perms.size()));
  LotteryPolicy<S> out;
  out.base = base;
  out.expanded.channel = base.channel;
  out.expanded.kernel.resize(inst.num_worlds());
  for (int w = 0; w < inst.num_worlds(); ++w) {
    for (const auto& [sid, prob] : base.kernel[w]) {
      if (prob == S(0)) continue;
      const MetaSignal& s = base.pool[sid];
      for (const auto& m : perms) {
        MetaSignal image;
        image.rec.resize(inst.num_agents);
        image.labels.resize(inst.num_agents);
        for (int i = 0; i < inst.num_agents; ++i) {
          image.rec[i] = s.rec[m[i]];
          image.labels[i] = s.labels[m[i]];
          if (reveal_role) image.labels[i] += "#role=" + std::to_string(m[i]);
        }
        out.expanded.add_mass(w, image, prob * share);
      }
    }
  }
  return out;
}

}  // namespace persuasion
