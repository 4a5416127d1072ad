#include "persuasion/deviation.hpp"

#include <algorithm>
#include <bit>

namespace persuasion {

std::string Deviation::to_string(const Instance& inst) const {
  std::string s;
  int A = inst.num_actions();
  for (int t = 0; t < inst.num_types(); ++t)
    for (int from = 0; from < A; ++from)
      for (int to = 0; to < A; ++to) {
        int k = at(t, from, to, A);
        if (k == 0) continue;
        if (!s.empty()) s += " ";
        s += "T" + std::to_string(t + 1) + " " + inst.actions[from] + "->" + inst.actions[to] +
             " x" + std::to_string(k);
      }
  return s;
}

std::uint64_t count_all_deviations(const Instance& inst) {
  // Compositions with mass in [1, d] over C = |T|*|A|*(|A|-1) cells:
  // sum_{k=1..d} C(k + C - 1, C - 1).
  std::uint64_t cells = static_cast<std::uint64_t>(inst.num_types()) * inst.num_actions() *
                        (inst.num_actions() - 1);
  if (cells == 0) return 0;
  auto binom = [](std::uint64_t n, std::uint64_t k) -> std::uint64_t {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
      if (r > (std::uint64_t{1} << 62) / (n - k + i)) return std::uint64_t{1} << 62;
      r = r * (n - k + i) / i;
    }
    return r;
  };
  std::uint64_t total = 0;
  for (int k = 1; k <= inst.deviation_bound; ++k) {
    std::uint64_t c = binom(k + cells - 1, cells - 1);
    if (total > (std::uint64_t{1} << 62) - c) return std::uint64_t{1} << 62;
    total += c;
  }
  return total;
}

std::vector<Deviation> enumerate_all_deviations(const Instance& inst, const Limits& limits) {
  std::uint64_t n = count_all_deviations(inst);
  if (n > limits.enumeration_cap) throw GuardExceeded("deviation space D*", n, limits.enumeration_cap);

  int A = inst.num_actions();
  int T = inst.num_types();
  // Off-diagonal cells in (type, from, to) order; recursive composition walk
  // emits the flattened vectors in ascending lexicographic order.
  std::vector<size_t> cells;
  for (int t = 0; t < T; ++t)
    for (int from = 0; from < A; ++from)
      for (int to = 0; to < A; ++to)
        if (from != to) cells.push_back((static_cast<size_t>(t) * A + from) * A + to);

  std::vector<Deviation> out;
  Deviation cur;
  cur.moves.assign(static_cast<size_t>(T) * A * A, 0);
  auto rec = [&](auto&& self, size_t idx, int budget, int placed) -> void {
    if (idx == cells.size()) {
      if (placed >= 1) out.push_back(cur);
      return;
    }
    for (int k = 0; k <= budget; ++k) {
      cur.moves[cells[idx]] = k;
      self(self, idx + 1, budget - k, placed + k);
    }
    cur.moves[cells[idx]] = 0;
  };
  if (!cells.empty()) rec(rec, 0, inst.deviation_bound, 0);

  // Lexicographic over the positive (type, from, to, count) segments, so
  // unit moves from early cells come first.
  auto key = [&](const Deviation& d) {
    std::vector<std::pair<size_t, int>> segs;
    for (size_t c : cells)
      if (d.moves[c] > 0) segs.push_back({c, d.moves[c]});
    return segs;
  };
  std::sort(out.begin(), out.end(),
            [&](const Deviation& x, const Deviation& y) { return key(x) < key(y); });
  return out;
}

std::string TargetTemplate::to_string(const Instance& inst) const {
  std::string s;
  int A = inst.num_actions();
  for (int t = 0; t < inst.num_types(); ++t)
    for (int x = 0; x < A; ++x) {
      int k = at(t, x, A);
      if (k == 0) continue;
      if (!s.empty()) s += " ";
      s += "T" + std::to_string(t + 1) + " ->" + inst.actions[x] + " x" + std::to_string(k);
    }
  return s;
}

std::uint64_t count_target_templates(const Instance& inst) {
  std::uint64_t cells = static_cast<std::uint64_t>(inst.num_types()) * inst.num_actions();
  auto binom = [](std::uint64_t n, std::uint64_t k) -> std::uint64_t {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
      if (r > (std::uint64_t{1} << 62) / (n - k + i)) return std::uint64_t{1} << 62;
      r = r * (n - k + i) / i;
    }
    return r;
  };
  std::uint64_t total = 0;
  for (int k = 1; k <= inst.deviation_bound; ++k) {
    std::uint64_t c = binom(k + cells - 1, cells - 1);
    if (total > (std::uint64_t{1} << 62) - c) return std::uint64_t{1} << 62;
    total += c;
  }
  return total;
}

std::vector<TargetTemplate> enumerate_target_templates(const Instance& inst,
                                                       const Limits& limits) {
  std::uint64_t n = count_target_templates(inst);
  if (n > limits.enumeration_cap)
    throw GuardExceeded("target template space", n, limits.enumeration_cap);
  int A = inst.num_actions();
  int T = inst.num_types();
  size_t cells = static_cast<size_t>(T) * A;
  std::vector<TargetTemplate> out;
  TargetTemplate cur;
  cur.counts.assign(cells, 0);
  auto rec = [&](auto&& self, size_t idx, int budget, int placed) -> void {
    if (idx == cells) {
      if (placed >= 1) out.push_back(cur);
      return;
    }
    for (int k = 0; k <= budget; ++k) {
      cur.counts[idx] = k;
      self(self, idx + 1, budget - k, placed + k);
    }
    cur.counts[idx] = 0;
  };
  if (cells > 0) rec(rec, 0, inst.deviation_bound, 0);
  auto key = [&](const TargetTemplate& d) {
    std::vector<std::pair<size_t, int>> segs;
    for (size_t c = 0; c < cells; ++c)
      if (d.counts[c] > 0) segs.push_back({c, d.counts[c]});
    return segs;
  };
  std::sort(out.begin(), out.end(),
            [&](const TargetTemplate& x, const TargetTemplate& y) { return key(x) < key(y); });
  return out;
}

bool deviation_feasible_from(const ActionProfile& rho, const Deviation& d, const Instance& inst) {
  int A = inst.num_actions();
  for (int t = 0; t < inst.num_types(); ++t)
    for (int from = 0; from < A; ++from)
      if (d.out_mass(t, from, A) > rho.at(t, from, A)) return false;
  return true;
}

std::vector<Deviation> feasible_deviations(const ActionProfile& rho, const Instance& inst,
                                           const Limits& limits) {
  std::vector<Deviation> all = enumerate_all_deviations(inst, limits);
  std::vector<Deviation> out;
  for (auto& d : all)
    if (deviation_feasible_from(rho, d, inst)) out.push_back(std::move(d));
  return out;
}

ActionProfile apply_to_profile(const ActionProfile& rho, const Deviation& d,
                               const Instance& inst) {
  if (!deviation_feasible_from(rho, d, inst))
    throw ModelError(Errc::InfeasibleDeviation, d.to_string(inst));
  int A = inst.num_actions();
  ActionProfile out = rho;
  for (int t = 0; t < inst.num_types(); ++t)
    for (int from = 0; from < A; ++from)
      for (int to = 0; to < A; ++to) {
        int k = d.at(t, from, to, A);
        if (k == 0) continue;
        out.at(t, from, A) -= k;
        out.at(t, to, A) += k;
      }
  return out;
}

ActionVector apply_to_vector(const ActionVector& a, const std::vector<std::pair<int, int>>& devs,
                             const Instance& inst) {
  ActionVector out = a;
  std::vector<bool> used(inst.num_agents, false);
  for (auto [agent, action] : devs) {
    if (agent < 0 || agent >= inst.num_agents)
      throw ModelError(Errc::UnknownAgent, "agent index " + std::to_string(agent + 1));
    if (used[agent])
      throw ModelError(Errc::DuplicateAgent, "agent " + std::to_string(agent + 1) + " deviates twice");
    used[agent] = true;
    out[agent] = action;
  }
  return out;
}

Deviation deviation_of_moves(const ActionVector& a, const std::vector<std::pair<int, int>>& devs,
                             const Instance& inst) {
  int A = inst.num_actions();
  Deviation d;
  d.moves.assign(static_cast<size_t>(inst.num_types()) * A * A, 0);
  for (auto [agent, action] : devs)
    if (a[agent] != action) d.at(inst.type_of[agent], a[agent], action, A)++;
  return d;
}

bool hall_feasible(const HallSystem& sys) {
  int m = static_cast<int>(sys.sets.size());
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    std::uint64_t u = 0;
    long need = 0;
    for (int i = 0; i < m; ++i)
      if (mask >> i & 1) {
        u |= sys.sets[i];
        need += sys.demands[i];
      }
    if (std::popcount(u) < need) return false;
  }
  return true;
}

}  // namespace persuasion
