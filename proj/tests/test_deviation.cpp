#include <doctest.h>

#include <random>
#include <set>

#include "helpers.hpp"
#include "persuasion/deviation.hpp"

using namespace persuasion;

namespace {

// Independent disjoint-selection search: assign each set a size-r_i subset,
// backtracking on overlaps.
bool brute_force_hall(const HallSystem& sys) {
  size_t m = sys.sets.size();
  auto rec = [&](auto&& self, size_t i, std::uint64_t used) -> bool {
    if (i == m) return true;
    std::vector<int> elems;
    for (int e = 0; e < sys.ground_size; ++e)
      if ((sys.sets[i] >> e & 1) && !(used >> e & 1)) elems.push_back(e);
    int r = sys.demands[i];
    if (r == 0) return self(self, i + 1, used);
    if (static_cast<int>(elems.size()) < r) return false;
    std::vector<int> pick;
    auto choose = [&](auto&& ch, size_t start, int need) -> bool {
      if (need == 0) {
        std::uint64_t mask = used;
        for (int e : pick) mask |= std::uint64_t{1} << e;
        return self(self, i + 1, mask);
      }
      for (size_t k = start; k + need <= elems.size(); ++k) {
        pick.push_back(elems[k]);
        if (ch(ch, k + 1, need - 1)) return true;
        pick.pop_back();
      }
      return false;
    };
    return choose(choose, 0, r);
  };
  return rec(rec, 0, 0);
}

Deviation make_dev(const Instance& inst, std::vector<std::tuple<int, int, int, int>> moves) {
  Deviation d;
  d.moves.assign(static_cast<size_t>(inst.num_types()) * inst.num_actions() * inst.num_actions(),
                 0);
  for (auto [t, from, to, k] : moves) d.at(t, from, to, inst.num_actions()) = k;
  return d;
}

}  // namespace

TEST_CASE("unit deviation spaces for one type") {
  Instance inst = testutil::load_fixture("private_gap.json");  // 2 actions, d=1
  auto all = enumerate_all_deviations(inst);
  REQUIRE(all.size() == 2);
  CHECK(all[0] == make_dev(inst, {{0, 0, 1, 1}}));
  CHECK(all[1] == make_dev(inst, {{0, 1, 0, 1}}));

  // same instance at d=2: masses (1),(2) per cell plus the mixed one
  auto j = testutil::load_fixture_json("private_gap.json");
  j["deviation_bound"] = 2;
  Instance inst2 = load_instance_json(j);
  auto all2 = enumerate_all_deviations(inst2);
  CHECK(all2.size() == 5);
  std::set<std::vector<int>> seen;
  for (const auto& d : all2) {
    CHECK(d.mass() >= 1);
    CHECK(d.mass() <= 2);
    CHECK(d.at(0, 0, 0, 2) == 0);
    CHECK(d.at(0, 1, 1, 2) == 0);
    CHECK(seen.insert(d.moves).second);
  }
  // deterministic segment-lexicographic order: unit a1->a2 first
  CHECK(all2[0] == make_dev(inst2, {{0, 0, 1, 1}}));
  CHECK(all2[1] == make_dev(inst2, {{0, 0, 1, 1}, {0, 1, 0, 1}}));
  CHECK(all2[2] == make_dev(inst2, {{0, 0, 1, 2}}));
  CHECK(all2[3] == make_dev(inst2, {{0, 1, 0, 1}}));
  CHECK(all2[4] == make_dev(inst2, {{0, 1, 0, 2}}));
}

TEST_CASE("feasible deviations from the counterexample profile") {
  Instance inst = testutil::load_fixture("counterexample.json");
  ActionProfile rho1 = profile_of({0, 0}, inst);
  auto feas = feasible_deviations(rho1, inst);
  // only moves out of a1 are feasible: two unit, two double, one mixed
  REQUIRE(feas.size() == 5);
  std::set<std::vector<int>> expect = {
      make_dev(inst, {{0, 0, 1, 1}}).moves,
      make_dev(inst, {{0, 0, 2, 1}}).moves,
      make_dev(inst, {{0, 0, 1, 2}}).moves,
      make_dev(inst, {{0, 0, 2, 2}}).moves,
      make_dev(inst, {{0, 0, 1, 1}, {0, 0, 2, 1}}).moves,
  };
  std::set<std::vector<int>> got;
  for (const auto& d : feas) got.insert(d.moves);
  CHECK(got == expect);

  // D_rho is always a subset of D*
  auto all = enumerate_all_deviations(inst);
  std::set<std::vector<int>> dstar;
  for (const auto& d : all) dstar.insert(d.moves);
  for (const auto& d : feas) CHECK(dstar.count(d.moves) == 1);
}

TEST_CASE("apply_to_profile walks to rho2 and conserves type totals") {
  Instance inst = testutil::load_fixture("counterexample.json");
  ActionProfile rho1 = profile_of({0, 0}, inst);
  Deviation split = make_dev(inst, {{0, 0, 1, 1}, {0, 0, 2, 1}});
  ActionProfile rho2 = apply_to_profile(rho1, split, inst);
  CHECK(rho2.at(0, 1, 3) == 1);
  CHECK(rho2.at(0, 2, 3) == 1);
  CHECK(rho2.at(0, 0, 3) == 0);

  // reverse move restores rho1
  Deviation merge = make_dev(inst, {{0, 1, 0, 1}, {0, 2, 0, 1}});
  CHECK(apply_to_profile(rho2, merge, inst) == rho1);

  // infeasible: nobody plays a2 in rho1
  Deviation bad = make_dev(inst, {{0, 1, 0, 1}});
  CHECK_THROWS_WITH_AS(apply_to_profile(rho1, bad, inst), doctest::Contains("InfeasibleDeviation"),
                       ModelError);
}

TEST_CASE("apply_to_vector replaces pointwise") {
  Instance inst = testutil::load_fixture("counterexample.json");
  CHECK(apply_to_vector({0, 0}, {{0, 1}, {1, 2}}, inst) == ActionVector{1, 2});
  CHECK(apply_to_vector({0, 0}, {}, inst) == ActionVector{0, 0});
  CHECK_THROWS_WITH_AS(apply_to_vector({0, 0}, {{0, 1}, {0, 2}}, inst),
                       doctest::Contains("DuplicateAgent"), ModelError);
}

TEST_CASE("vector and profile deviation application commute") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    Instance inst = testutil::random_instance(rng);
    ActionVector a(inst.num_agents);
    for (int i = 0; i < inst.num_agents; ++i) a[i] = static_cast<int>(rng() % inst.num_actions());
    // random subset of agents with random targets
    std::vector<std::pair<int, int>> devs;
    for (int i = 0; i < inst.num_agents && static_cast<int>(devs.size()) < inst.deviation_bound;
         ++i)
      if (rng() % 2) devs.push_back({i, static_cast<int>(rng() % inst.num_actions())});
    Deviation agg = deviation_of_moves(a, devs, inst);
    ActionProfile via_vector = profile_of(apply_to_vector(a, devs, inst), inst);
    if (agg.mass() == 0) {
      CHECK(via_vector == profile_of(a, inst));
    } else {
      CHECK(via_vector == apply_to_profile(profile_of(a, inst), agg, inst));
    }
  }
}

TEST_CASE("deviation counts match the closed form") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    testutil::RandomCaps caps;
    caps.max_deviators = 3;
    Instance inst = testutil::random_instance(rng, caps);
    if (inst.deviation_bound > 3) continue;
    auto all = enumerate_all_deviations(inst);
    CHECK(static_cast<std::uint64_t>(all.size()) == count_all_deviations(inst));
  }
}

TEST_CASE("explosion guard fires on absurd spaces") {
  auto j = testutil::load_fixture_json("fda.json");
  Instance inst = load_instance_json(j);
  Limits tight;
  tight.enumeration_cap = 3;
  CHECK_THROWS_AS(enumerate_all_deviations(inst, tight), GuardExceeded);
}

TEST_CASE("hall condition on the stated examples") {
  HallSystem sys;
  sys.ground_size = 3;
  sys.sets = {0b001, 0b001};
  sys.demands = {1, 1};
  CHECK_FALSE(hall_feasible(sys));

  sys.sets = {0b011, 0b110};
  sys.demands = {1, 1};
  CHECK(hall_feasible(sys));

  sys.sets = {0b001, 0b001};
  sys.demands = {0, 0};
  CHECK(hall_feasible(sys));
}

TEST_CASE("hall condition agrees with brute force exhaustively on small systems") {
  // every pair of sets over a ground of 3, all demand combinations
  for (int g = 1; g <= 3; ++g) {
    for (std::uint64_t b1 = 0; b1 < (1u << g); ++b1)
      for (std::uint64_t b2 = 0; b2 < (1u << g); ++b2)
        for (int r1 = 0; r1 <= g; ++r1)
          for (int r2 = 0; r2 <= g; ++r2) {
            HallSystem sys;
            sys.ground_size = g;
            sys.sets = {b1, b2};
            sys.demands = {r1, r2};
            CHECK(hall_feasible(sys) == brute_force_hall(sys));
          }
  }
}

TEST_CASE("hall condition agrees with brute force on random systems") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 4000; ++trial) {
    HallSystem sys;
    sys.ground_size = 1 + static_cast<int>(rng() % 8);
    int m = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < m; ++i) {
      sys.sets.push_back(rng() & ((std::uint64_t{1} << sys.ground_size) - 1));
      sys.demands.push_back(static_cast<int>(rng() % (sys.ground_size + 1)));
    }
    CHECK(hall_feasible(sys) == brute_force_hall(sys));
  }
}
