#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "helpers.hpp"
#include "persuasion/model.hpp"

using namespace persuasion;

namespace {

ActionVector named_vector(const Instance& inst, const std::vector<std::string>& names) {
  ActionVector v;
  for (const auto& s : names) v.push_back(action_index(s, inst));
  return v;
}

}  // namespace

TEST_CASE("committee fixture loads and reproduces the worked profile") {
  Instance inst = testutil::load_fixture("fda.json");
  CHECK(inst.num_agents == 5);
  CHECK(inst.num_worlds() == 2);
  CHECK(inst.num_types() == 2);
  CHECK(inst.deviation_bound == 2);
  CHECK(inst.profiles.size() == 12);
  CHECK(to_double(inst.prior[0]) == doctest::Approx(0.25));

  ActionVector a = named_vector(inst, {"reject", "accept", "accept", "reject", "accept"});
  ActionProfile rho = profile_of(a, inst);
  int A = inst.num_actions();
  CHECK(rho.at(0, action_index("reject", inst), A) == 1);
  CHECK(rho.at(0, action_index("accept", inst), A) == 1);
  CHECK(rho.at(1, action_index("reject", inst), A) == 1);
  CHECK(rho.at(1, action_index("accept", inst), A) == 2);

  int p = inst.profiles.index_of(rho);
  CHECK(inst.principal_utility<double>(p, world_index("safe", inst)) == 2);
  CHECK(inst.principal_utility<double>(p, world_index("unsafe", inst)) == 1);

  // canonical representative: ascending agents take ascending actions
  RepresentativeSet reps(inst);
  CHECK(reps.of_profile(p) ==
        named_vector(inst, {"reject", "accept", "reject", "accept", "accept"}));
}

TEST_CASE("counterexample fixture agent utilities match the tables") {
  Instance inst = testutil::load_fixture("counterexample.json");
  ActionVector both_a1 = named_vector(inst, {"a1", "a1"});
  ActionProfile rho1 = profile_of(both_a1, inst);
  CHECK(rho1.at(0, 0, 3) == 2);
  for (int w = 0; w < 2; ++w) {
    CHECK(agent_utility_of_vector<double>(0, both_a1, w, inst) == 1);
    CHECK(agent_utility_of_vector<double>(1, both_a1, w, inst) == 1);
  }
  // default agent utility is -1 away from the two special profiles
  ActionVector mixed = named_vector(inst, {"a1", "a2"});
  CHECK(agent_utility_of_vector<double>(0, mixed, 0, inst) == -1);
  CHECK_THROWS_AS(agent_utility_of_vector<double>(7, mixed, 0, inst), ModelError);
}

TEST_CASE("validation rejects malformed instances") {
  auto base = testutil::load_fixture_json("counterexample.json");

  SUBCASE("prior must sum to one") {
    auto j = base;
    j["prior"] = {0.5, 0.6};
    CHECK_THROWS_WITH_AS(load_instance_json(j), doctest::Contains("PriorNotNormalized"),
                         ModelError);
  }
  SUBCASE("types must partition the agents") {
    auto j = base;
    j["agents"] = 3;
    j["types"] = {{1, 2}, {2, 3}};
    CHECK_THROWS_WITH_AS(load_instance_json(j), doctest::Contains("TypesNotPartition"),
                         ModelError);
  }
  SUBCASE("types must cover the agents") {
    auto j = base;
    j["agents"] = 3;
    j["types"] = {{1, 2}};
    CHECK_THROWS_WITH_AS(load_instance_json(j), doctest::Contains("TypesNotPartition"),
                         ModelError);
  }
  SUBCASE("deviation bound range") {
    auto j = base;
    j["deviation_bound"] = 0;
    CHECK_THROWS_WITH_AS(load_instance_json(j), doctest::Contains("DeviationBoundOutOfRange"),
                         ModelError);
    j["deviation_bound"] = 3;
    CHECK_THROWS_WITH_AS(load_instance_json(j), doctest::Contains("DeviationBoundOutOfRange"),
                         ModelError);
  }
  SUBCASE("missing reachable agent utility") {
    auto j = base;
    j.erase("default_utility");
    CHECK_THROWS_WITH_AS(load_instance_json(j), doctest::Contains("MissingUtility"), ModelError);
  }
  SUBCASE("missing principal utility") {
    auto j = base;
    j["default_utility"] = {{"agent", -1}};
    CHECK_THROWS_WITH_AS(load_instance_json(j), doctest::Contains("MissingUtility"), ModelError);
  }
}

TEST_CASE("representatives invert profile_of on every profile") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = testutil::random_instance(rng);
    RepresentativeSet reps(inst);
    std::map<ActionVector, int> seen;
    for (int p = 0; p < inst.profiles.size(); ++p) {
      CHECK(inst.profiles.index_of(profile_of(reps.of_profile(p), inst)) == p);
      CHECK(seen.insert({reps.of_profile(p), p}).second);  // injective
    }
  }
}

TEST_CASE("profile count matches stars-and-bars and exhaustive enumeration") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    Instance inst = testutil::random_instance(rng);
    std::vector<int> sizes;
    for (const auto& ty : inst.types) sizes.push_back(static_cast<int>(ty.size()));
    CHECK(static_cast<std::uint64_t>(inst.profiles.size()) ==
          ProfileSpace::count(sizes, inst.num_actions()));

    if (inst.num_agents <= 6) {
      std::set<std::vector<int>> distinct;
      ActionVector v(inst.num_agents, 0);
      while (true) {
        distinct.insert(profile_of(v, inst).counts);
        int i = inst.num_agents - 1;
        while (i >= 0 && ++v[i] == inst.num_actions()) v[i--] = 0;
        if (i < 0) break;
      }
      CHECK(distinct.size() == static_cast<size_t>(inst.profiles.size()));
    }
  }
}

TEST_CASE("utility evaluation is invariant under type-preserving permutations") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    Instance inst = testutil::random_instance(rng);
    ActionVector a(inst.num_agents);
    for (int i = 0; i < inst.num_agents; ++i) a[i] = static_cast<int>(rng() % inst.num_actions());
    // swap two agents of the same type
    for (const auto& ty : inst.types) {
      if (ty.size() < 2) continue;
      int i = ty[0], j = ty[1];
      ActionVector b = a;
      std::swap(b[i], b[j]);
      for (int w = 0; w < inst.num_worlds(); ++w) {
        CHECK(agent_utility_of_vector<double>(i, a, w, inst) ==
              agent_utility_of_vector<double>(j, b, w, inst));
        for (int other = 0; other < inst.num_agents; ++other)
          if (other != i && other != j)
            CHECK(agent_utility_of_vector<double>(other, a, w, inst) ==
                  agent_utility_of_vector<double>(other, b, w, inst));
      }
    }
  }
}

TEST_CASE("rational parsing is exact") {
  CHECK(rational_from_string("0.25") == Rational(1) / Rational(4));
  CHECK(rational_from_string("3/8") == Rational(3) / Rational(8));
  CHECK(rational_from_string("-0.4") == Rational(-2) / Rational(5));
  CHECK(rational_from_double(0.4) == Rational(2) / Rational(5));
  CHECK(rational_from_double(-3.0) == Rational(-3));
  CHECK(rational_to_string(Rational(5) / Rational(10)) == "1/2");
}
