#pragma once

#include <random>
#include <string>

#include "persuasion/io.hpp"
#include "persuasion/model.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

inline persuasion::Instance load_fixture(const std::string& name) {
  return persuasion::load_instance_file(fixture_path(name));
}

inline nlohmann::json load_fixture_json(const std::string& name) {
  return nlohmann::json::parse(persuasion::read_file(fixture_path(name)));
}

template <class S>
persuasion::ExplicitPolicy<S> load_policy_fixture(const std::string& name,
                                                  const persuasion::Instance& inst) {
  return persuasion::load_policy_json<S>(load_fixture_json(name), inst);
}

// Random instance within the property-suite caps.  Utilities live on the
// 1/1000 grid in [-1, 1] so both numeric modes see the same values exactly.
struct RandomCaps {
  int max_worlds = 3;
  int max_agents = 4;
  int max_actions = 3;
  int max_types = 2;
  int max_deviators = 2;
};

inline persuasion::Instance random_instance(std::mt19937_64& rng, const RandomCaps& caps = {}) {
  using persuasion::Rational;
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  persuasion::Instance inst;
  int W = pick(1, caps.max_worlds);
  int n = pick(1, caps.max_agents);
  int A = pick(2, caps.max_actions);
  for (int w = 0; w < W; ++w) inst.worlds.push_back("w" + std::to_string(w + 1));
  std::vector<int> weights(W);
  int total = 0;
  for (int w = 0; w < W; ++w) {
    weights[w] = pick(1, 16);
    total += weights[w];
  }
  for (int w = 0; w < W; ++w) inst.prior.push_back(Rational(weights[w]) / Rational(total));
  inst.num_agents = n;
  for (int a = 0; a < A; ++a) inst.actions.push_back("a" + std::to_string(a + 1));
  int T = pick(1, std::min(caps.max_types, n));
  inst.types.resize(T);
  for (int i = 0; i < n; ++i) inst.types[T == 1 ? 0 : pick(0, T - 1)].push_back(i);
  // no empty types
  for (int t = 0; t < T; ++t)
    if (inst.types[t].empty()) {
      for (int s = 0; s < T; ++s)
        if (inst.types[s].size() > 1) {
          inst.types[t].push_back(inst.types[s].back());
          inst.types[s].pop_back();
          break;
        }
    }
  std::erase_if(inst.types, [](const auto& ty) { return ty.empty(); });
  inst.deviation_bound = pick(1, std::min(caps.max_deviators, n));
  inst.init_structure();
  inst.allocate_utilities();
  for (int t = 0; t < inst.num_types(); ++t)
    for (int a = 0; a < A; ++a)
      for (int p = 0; p < inst.profiles.size(); ++p)
        for (int w = 0; w < W; ++w)
          inst.set_agent_utility(t, a, p, w, Rational(pick(-1000, 1000)) / Rational(1000));
  for (int p = 0; p < inst.profiles.size(); ++p)
    for (int w = 0; w < W; ++w)
      inst.set_principal_utility(p, w, Rational(pick(-1000, 1000)) / Rational(1000));
  inst.finalize();
  return inst;
}

}  // namespace testutil
