#include <doctest.h>

#include "helpers.hpp"
#include "persuasion/gadget.hpp"
#include "persuasion/io.hpp"

using namespace persuasion;

namespace {

GraphInput triangle() {
  GraphInput g;
  g.num_vertices = 3;
  g.edges = {{0, 1}, {0, 2}, {1, 2}};
  g.cover_size = 2;
  return g;
}

}  // namespace

TEST_CASE("triangle reduction dimensions") {
  Instance inst = build_gadget(triangle());
  CHECK(inst.num_agents == 8);  // max(|E|+2, 2|V|+2) = max(5, 8)
  CHECK(inst.deviation_bound == 7);
  CHECK(inst.num_worlds() == 4);
  CHECK(inst.num_actions() == 4);
  CHECK(inst.num_types() == 1);
  for (const auto& p : inst.prior) CHECK(p == Rational(1) / 4);
}

TEST_CASE("reduction utility tables") {
  GraphInput g = triangle();
  Instance inst = build_gadget(g);
  int n = inst.num_agents;
  int A = 4;

  auto pidx = [&](int c1, int c2, int c3, int c4) {
    ActionProfile p;
    p.counts = {c1, c2, c3, c4};
    return inst.profiles.index_of(p);
  };

  int rho_plus = pidx(n, 0, 0, 0);
  int rho_minus = pidx(0, n - 2, 1, 1);

  SUBCASE("principal pays one exactly on the all-first profile") {
    for (int p = 0; p < inst.profiles.size(); ++p)
      for (int w = 0; w < inst.num_worlds(); ++w)
        CHECK(inst.principal_utility<double>(p, w) == (p == rho_plus ? 1 : 0));
  }

  SUBCASE("agents get 0 at rho+ and 3 at rho- in every world") {
    for (int a = 0; a < A; ++a)
      for (int w = 0; w < inst.num_worlds(); ++w) {
        CHECK(inst.agent_utility<double>(0, a, rho_plus, w) == 0);
        CHECK(inst.agent_utility<double>(0, a, rho_minus, w) == 3);
      }
  }

  SUBCASE("vertex profiles pay the matching world") {
    for (int j = 1; j <= 3; ++j) {
      int rp = pidx(n - j - 1, 1, 0, j);
      CHECK(inst.agent_utility<double>(0, 0, rp, 0) == -1);
      CHECK(inst.agent_utility<double>(0, 0, rp, j) == 1);
      for (int k = 1; k <= 3; ++k)
        if (k != j) CHECK(inst.agent_utility<double>(0, 0, rp, k) == 0);
      // the a4 sweetener dominates
      for (int w = 0; w < 4; ++w) CHECK(inst.agent_utility<double>(0, 3, rp, w) == 2);
    }
    // the k-threshold profile
    int rp = pidx(n - 5, 1, 0, 4);
    CHECK(inst.agent_utility<double>(0, 0, rp, 0) == -g.cover_size);
    for (int i = 1; i <= 3; ++i) CHECK(inst.agent_utility<double>(0, 0, rp, i) == 1);
  }

  SUBCASE("edge profiles probe both endpoints against w0") {
    for (int l = 1; l <= 3; ++l) {
      int rl = pidx(n - l - 2, 1, 1, l);
      auto [u, v] = g.edges[l - 1];
      CHECK(inst.agent_utility<double>(0, 1, rl, 0) == 1);
      CHECK(inst.agent_utility<double>(0, 1, rl, u + 1) == -1);
      CHECK(inst.agent_utility<double>(0, 2, rl, 0) == 1);
      CHECK(inst.agent_utility<double>(0, 2, rl, v + 1) == -1);
      // a1 on an edge profile is an undefined case: default -k-1
      CHECK(inst.agent_utility<double>(0, 0, rl, 0) == -g.cover_size - 1);
    }
  }

  SUBCASE("undefined cells default to -k-1") {
    // a profile outside the reduction's table
    int stray = pidx(n - 2, 0, 2, 0);
    for (int a = 0; a < A; ++a)
      for (int w = 0; w < 4; ++w)
        CHECK(inst.agent_utility<double>(0, a, stray, w) == -g.cover_size - 1);
  }
}

TEST_CASE("reduction rows are valid profiles") {
  GraphInput g = triangle();
  Instance inst = build_gadget(g);
  int n = inst.num_agents;
  // all named rows sum to n and are mutually distinct
  std::set<std::vector<int>> rows;
  rows.insert({n, 0, 0, 0});
  rows.insert({0, n - 2, 1, 1});
  for (int l = 1; l <= 3; ++l) rows.insert({n - l - 2, 1, 1, l});
  for (int j = 1; j <= 4; ++j) rows.insert({n - j - 1, 1, 0, j});
  CHECK(rows.size() == 2 + 3 + 4);
  for (const auto& r : rows) {
    int sum = 0;
    for (int c : r) sum += c;
    CHECK(sum == n);
    ActionProfile p;
    p.counts = r;
    CHECK(inst.profiles.index_of(p) >= 0);
  }
}

TEST_CASE("serialization round trip") {
  Instance inst = build_gadget(triangle());
  nlohmann::json j = instance_to_json(inst);
  Instance back = load_instance_json(j);
  CHECK(back.num_agents == inst.num_agents);
  CHECK(back.deviation_bound == inst.deviation_bound);
  CHECK(back.worlds == inst.worlds);
  CHECK(back.agent_u_q == inst.agent_u_q);
  CHECK(back.principal_u_q == inst.principal_u_q);
}

TEST_CASE("graph text parsing") {
  GraphInput g = parse_graph_text("2 1\n1 2\n");
  CHECK(g.num_vertices == 2);
  CHECK(g.cover_size == 1);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0] == std::pair<int, int>{0, 1});

  CHECK_THROWS_AS(parse_graph_text("2 1\n1 1\n"), ModelError);   // self loop
  CHECK_THROWS_AS(parse_graph_text("2 1\n1 3\n"), ModelError);   // out of range
  CHECK_THROWS_AS(parse_graph_text("2 5\n1 2\n"), ModelError);   // k > |V|
  CHECK_THROWS_AS(parse_graph_text(""), ModelError);

  // micro fixture file parses and builds
  GraphInput micro = parse_graph_text(read_file(testutil::fixture_path("micro.graph")));
  Instance inst = build_gadget(micro);
  CHECK(inst.num_agents == 6);  // max(3, 6)
  CHECK(inst.deviation_bound == 5);
  CHECK(inst.num_worlds() == 3);
}
