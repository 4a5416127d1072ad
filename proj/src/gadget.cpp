#include "persuasion/gadget.hpp"

#include <algorithm>
#include <sstream>

namespace persuasion {

GraphInput parse_graph_text(const std::string& text) {
  std::istringstream in(text);
  GraphInput g;
  if (!(in >> g.num_vertices >> g.cover_size))
    throw ModelError(Errc::FormatError, "graph: expected '|V| k' on the first line");
  if (g.num_vertices < 1) throw ModelError(Errc::FormatError, "graph: need at least one vertex");
  if (g.cover_size < 0 || g.cover_size > g.num_vertices)
    throw ModelError(Errc::FormatError, "graph: k must be in [0, |V|]");
  int u, v;
  while (in >> u >> v) {
    if (u == v) throw ModelError(Errc::FormatError, "graph: self-loop at " + std::to_string(u));
    if (u < 1 || v < 1 || u > g.num_vertices || v > g.num_vertices)
      throw ModelError(Errc::FormatError, "graph: vertex out of range");
    g.edges.push_back({std::min(u, v) - 1, std::max(u, v) - 1});
  }
  return g;
}

Instance build_gadget(const GraphInput& g) {
  int V = g.num_vertices;
  int E = static_cast<int>(g.edges.size());
  int k = g.cover_size;
  int n = std::max(E + 2, 2 * V + 2);

  Instance inst;
  inst.worlds.push_back("w0");
  for (int i = 1; i <= V; ++i) inst.worlds.push_back("w" + std::to_string(i));
  inst.prior.assign(V + 1, Rational(1) / Rational(V + 1));
  inst.num_agents = n;
  inst.actions = {"a1", "a2", "a3", "a4"};
  inst.types.resize(1);
  for (int i = 0; i < n; ++i) inst.types[0].push_back(i);
  inst.deviation_bound = n - 1;
  inst.init_structure();
  inst.allocate_utilities();

  int W = V + 1;
  Rational dflt = Rational(-k - 1);
  for (int a = 0; a < 4; ++a)
    for (int p = 0; p < inst.profiles.size(); ++p)
      for (int w = 0; w < W; ++w) inst.set_agent_utility(0, a, p, w, dflt);
  // principal defaults to 0 (allocate_utilities zero-fills)

  auto profile_idx = [&](int c1, int c2, int c3, int c4) {
    ActionProfile p;
    p.counts = {c1, c2, c3, c4};
    return inst.profiles.index_of(p);
  };

  int rho_plus = profile_idx(n, 0, 0, 0);
  int rho_minus = profile_idx(0, n - 2, 1, 1);
  for (int w = 0; w < W; ++w) {
    inst.set_principal_utility(rho_plus, w, Rational(1));
    for (int a = 0; a < 4; ++a) {
      inst.set_agent_utility(0, a, rho_plus, w, Rational(0));
      inst.set_agent_utility(0, a, rho_minus, w, Rational(3));
    }
  }

  // rho'_j = (n-j-1, 1, 0, j), j = 1..V+1.  World w_j rewards the matching
  // vertex profile; the last one trades -k at w0 against 1 everywhere else.
  for (int j = 1; j <= V + 1; ++j) {
    int rp = profile_idx(n - j - 1, 1, 0, j);
    for (int a = 0; a < 4; ++a) {
      if (j <= V) {
        inst.set_agent_utility(0, a, rp, 0, Rational(-1));
        for (int kk = 1; kk <= V; ++kk)
          inst.set_agent_utility(0, a, rp, kk, Rational(kk == j ? 1 : 0));
      } else {
        inst.set_agent_utility(0, a, rp, 0, Rational(-k));
        for (int kk = 1; kk <= V; ++kk) inst.set_agent_utility(0, a, rp, kk, Rational(1));
      }
    }
    for (int w = 0; w < W; ++w) inst.set_agent_utility(0, 3, rp, w, Rational(2));  // a4 override
  }

  // rho_l = (n-l-2, 1, 1, l) per edge e_l = {i, j}, i < j: a2 probes w_i
  // against w0, a3 probes w_j.
  for (int l = 1; l <= E; ++l) {
    int rl = profile_idx(n - l - 2, 1, 1, l);
    int vi = g.edges[l - 1].first + 1;
    int vj = g.edges[l - 1].second + 1;
    for (int w = 0; w < W; ++w) {
      inst.set_agent_utility(0, 1, rl, w, Rational(0));
      inst.set_agent_utility(0, 2, rl, w, Rational(0));
    }
    inst.set_agent_utility(0, 1, rl, 0, Rational(1));
    inst.set_agent_utility(0, 1, rl, vi, Rational(-1));
    inst.set_agent_utility(0, 2, rl, 0, Rational(1));
    inst.set_agent_utility(0, 2, rl, vj, Rational(-1));
  }

  inst.finalize();
  return inst;
}

}  // namespace persuasion
