#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "persuasion/blocking.hpp"

using namespace persuasion;

namespace {

Deviation make_dev(const Instance& inst, std::vector<std::tuple<int, int, int, int>> moves) {
  Deviation d;
  d.moves.assign(static_cast<size_t>(inst.num_types()) * inst.num_actions() * inst.num_actions(),
                 0);
  for (auto [t, from, to, k] : moves) d.at(t, from, to, inst.num_actions()) = k;
  return d;
}

// Point-mass-on-recommendation posterior with the given world marginal.
template <class S>
Posterior<S> determinate_posterior(const ActionVector& rec, std::vector<S> marginal) {
  Posterior<S> p;
  p.recs = {rec};
  p.joint = {marginal};
  p.world_marginal = std::move(marginal);
  return p;
}

bool gamma_exists(const std::vector<Posterior<Rational>>& posts, const ActionVector& rec,
                  Channel ch, const Instance& inst) {
  try {
    gamma_from_signal(posts, rec, ch, inst);
    return true;
  } catch (const ModelError& e) {
    if (e.code() != Errc::NoBlockingWitness) throw;
    return false;
  }
}

}  // namespace

TEST_CASE("public blocking profile at a revealing posterior") {
  Instance inst = testutil::load_fixture("counterexample.json");
  ActionVector rec = {0, 0};
  Deviation split = make_dev(inst, {{0, 0, 1, 1}, {0, 0, 2, 1}});

  auto beta = public_blocking_profile<double>({1.0, 0.0}, rec, inst);
  int pidx = inst.profiles.index_of(profile_of(rec, inst));
  PublicFamily family = enumerate_public_family(pidx, inst);
  int split_idx = -1;
  for (size_t di = 0; di < family.domain.size(); ++di)
    if (family.domain[di] == split) split_idx = static_cast<int>(di);
  REQUIRE(split_idx >= 0);

  // in world w1 the a2 role of rho2 pays 0 <= 1, the a3 role pays 10 > 1
  bool has_a2 = false, has_a3 = false;
  for (const auto& t : beta.tuples) {
    if (t.dev != split_idx) continue;
    if (t.to == 1) has_a2 = true;
    if (t.to == 2) has_a3 = true;
  }
  CHECK(has_a2);
  CHECK_FALSE(has_a3);

  // at the prior both roles pay 5 > 1: nothing blocks the joint move
  CHECK_THROWS_WITH_AS(public_blocking_profile<double>({0.5, 0.5}, rec, inst),
                       doctest::Contains("UncoveredDeviation"), ModelError);
}

TEST_CASE("indifferent utilities block everything") {
  Instance inst = testutil::load_fixture("lottery_demo.json");  // all utilities zero
  RepresentativeSet reps(inst);
  for (int p = 0; p < inst.profiles.size(); ++p) {
    auto beta = public_blocking_profile<double>({1.0}, reps.of_profile(p), inst);
    PublicFamily family = enumerate_public_family(p, inst);
    size_t cand_total = 0;
    for (const auto& c : family.candidates) cand_total += c.size();
    CHECK(beta.tuples.size() == cand_total);
  }
}

TEST_CASE("minimal public cover counts") {
  SUBCASE("d=1 gives a single cover per profile") {
    Instance inst = testutil::load_fixture("private_gap.json");
    for (int p = 0; p < inst.profiles.size(); ++p) {
      PublicFamily family = enumerate_public_family(p, inst);
      CHECK(family.cover_count() == 1);
    }
  }
  SUBCASE("counterexample rho1 has two minimal covers") {
    Instance inst = testutil::load_fixture("counterexample.json");
    int p = inst.profiles.index_of(profile_of({0, 0}, inst));
    PublicFamily family = enumerate_public_family(p, inst);
    CHECK(family.cover_count() == 2);
    auto covers = enumerate_public_blocking_profiles(family);
    REQUIRE(covers.size() == 2);
    for (const auto& c : covers) CHECK(c.tuples.size() == family.domain.size());
    CHECK_FALSE(covers[0] == covers[1]);
  }
  SUBCASE("empty deviation domain yields the single empty profile") {
    nlohmann::json j = {
        {"worlds", {"w"}},        {"prior", {1}},        {"agents", 2},
        {"actions", {"only"}},    {"types", {{1, 2}}},   {"deviation_bound", 1},
        {"default_utility", 0},   {"agent_utilities", nlohmann::json::array()},
        {"principal_utilities", nlohmann::json::array()},
    };
    Instance inst = load_instance_json(j);
    PublicFamily family = enumerate_public_family(0, inst);
    CHECK(family.domain.empty());
    CHECK(family.cover_count() == 1);
    auto covers = enumerate_public_blocking_profiles(family);
    REQUIRE(covers.size() == 1);
    CHECK(covers[0].tuples.empty());
  }
}

TEST_CASE("gamma construction on the counterexample") {
  Instance inst = testutil::load_fixture("counterexample.json");
  ActionVector rec = {0, 0};
  Deviation split = make_dev(inst, {{0, 0, 1, 1}, {0, 0, 2, 1}});

  SUBCASE("revealing w1: the split deviation is refused via a2 by both agents") {
    std::vector<Posterior<Rational>> posts = {
        determinate_posterior<Rational>(rec, {1, 0}),
        determinate_posterior<Rational>(rec, {1, 0})};
    GammaAssignment gamma = gamma_from_signal(posts, rec, Channel::SemiPrivate, inst);
    auto domain = feasible_deviations(profile_of(rec, inst), inst);
    int split_idx = -1;
    for (size_t di = 0; di < domain.size(); ++di)
      if (domain[di] == split) split_idx = static_cast<int>(di);
    REQUIRE(split_idx >= 0);
    REQUIRE(gamma.chosen[split_idx].has_value());
    CHECK(gamma.chosen[split_idx]->aprime_mask == 0b010u);  // {a2}
    CHECK(gamma.chosen[split_idx]->agents == std::vector<int>{0, 1});
  }
  SUBCASE("uninformative signal has no witness for the split deviation") {
    std::vector<Posterior<Rational>> posts = {
        determinate_posterior<Rational>(rec, {Rational(1) / 2, Rational(1) / 2}),
        determinate_posterior<Rational>(rec, {Rational(1) / 2, Rational(1) / 2})};
    CHECK_THROWS_WITH_AS(gamma_from_signal(posts, rec, Channel::SemiPrivate, inst),
                         doctest::Contains("NoBlockingWitness"), ModelError);
  }
}

TEST_CASE("structural gamma enumeration") {
  SUBCASE("d=1 forces the whole subtype") {
    Instance inst = testutil::load_fixture("private_gap.json");
    for (int p = 0; p < inst.profiles.size(); ++p) {
      GammaFamily family = enumerate_gamma_family(p, Channel::SemiPrivate, inst);
      CHECK(family.assignment_count() == 1);
      GammaAssignment g = family.assignment(0);
      for (size_t di = 0; di < g.chosen.size(); ++di) {
        REQUIRE(g.chosen[di].has_value());
        int cnt = inst.profiles[p].at(g.chosen[di]->type, g.chosen[di]->from, 2);
        CHECK(static_cast<int>(g.chosen[di]->agents.size()) == cnt);
      }
    }
  }
  SUBCASE("counterexample rho1 matches generate-and-filter") {
    Instance inst = testutil::load_fixture("counterexample.json");
    int pidx = inst.profiles.index_of(profile_of({0, 0}, inst));
    const ActionProfile& rho = inst.profiles[pidx];
    GammaFamily family = enumerate_gamma_family(pidx, Channel::SemiPrivate, inst);
    // brute force per deviation: every (subtype, A', N') combo, conditions 1-3
    RepresentativeSet reps(inst);
    const ActionVector& abar = reps.of_profile(pidx);
    int A = inst.num_actions();
    for (size_t di = 0; di < family.domain->size(); ++di) {
      const Deviation& delta = (*family.domain)[di];
      int count = 0;
      for (int t = 0; t < inst.num_types(); ++t)
        for (int from = 0; from < A; ++from) {
          std::vector<int> subtype;
          for (int i : inst.types[t])
            if (abar[i] == from) subtype.push_back(i);
          for (std::uint32_t mask = 1; mask < (1u << A); ++mask) {
            bool ok = true;
            int moved = 0;
            for (int to = 0; to < A; ++to)
              if (mask >> to & 1) {
                if (delta.at(t, from, to, A) <= 0) ok = false;
                moved += delta.at(t, from, to, A);
              }
            if (!ok) continue;
            // minimum refusing-set size, all index sets of that size
            int smin = std::max(1, rho.at(t, from, A) - moved + 1);
            for (std::uint64_t nmask = 1; nmask < (1ull << subtype.size()); ++nmask)
              if (std::popcount(nmask) == smin) ++count;
          }
        }
      CHECK(static_cast<std::uint64_t>(count) == family.options[di].size());
    }
    CHECK(family.assignment_count() == 16);  // 1*2*1*2*4 over the five deviations
  }
  SUBCASE("condition 3 rejects undersized refusals") {
    // subtype of 3 with a unit deviation: N' smaller than the whole subtype fails
    Instance inst = testutil::load_fixture("fda.json");
    ActionProfile rho;
    rho.counts = {2, 0, 3, 0};  // everyone rejects
    int pidx = inst.profiles.index_of(rho);
    GammaFamily family = enumerate_gamma_family(pidx, Channel::SemiPrivate, inst);
    for (size_t di = 0; di < family.domain->size(); ++di) {
      const Deviation& delta = (*family.domain)[di];
      if (delta.mass() != 1) continue;
      for (const auto& opt : family.options[di]) {
        REQUIRE(opt.has_value());
        CHECK(static_cast<int>(opt->agents.size()) ==
              rho.at(opt->type, opt->from, inst.num_actions()));
      }
    }
  }
}

TEST_CASE("private blocking covers unrealizable coalition shapes with no witness") {
  Instance inst = testutil::load_fixture("private_gap.json");
  int p_rho1 = inst.profiles.index_of(profile_of({0, 0}, inst));
  GammaFamily family = enumerate_gamma_family(p_rho1, Channel::Private, inst);
  REQUIRE(family.templates->size() == 2);  // one slot toward a1, one toward a2
  CHECK(family.assignment_count() == 1);
  GammaAssignment g = family.assignment(0);
  // everyone already plays a1, so the toward-a1 shape cannot be staffed;
  // the toward-a2 shape pins both agents
  for (size_t di = 0; di < 2; ++di) {
    if ((*family.templates)[di].at(0, 1, 2) == 1) {
      REQUIRE(g.chosen[di].has_value());
      CHECK(g.chosen[di]->agents == std::vector<int>{0, 1});
    } else {
      CHECK_FALSE(g.chosen[di].has_value());
    }
  }
  // beta_i only reflects witnessed shapes
  AgentBeta b0 = agent_beta(g, 0);
  REQUIRE(b0.size() == 1);
  CHECK(beta_label(b0) != beta_label(AgentBeta{}));
}

TEST_CASE("convexity: tuples that hold at two posteriors hold at mixtures") {
  std::mt19937_64 rng(29);
  Instance inst = testutil::load_fixture("counterexample.json");
  RepresentativeSet reps(inst);
  for (int trial = 0; trial < 200; ++trial) {
    int p = static_cast<int>(rng() % inst.profiles.size());
    const ActionVector& rec = reps.of_profile(p);
    PublicFamily family = enumerate_public_family(p, inst);
    double q1 = (rng() % 101) / 100.0;
    double q2 = (rng() % 101) / 100.0;
    double lam = (rng() % 101) / 100.0;
    Posterior<double> pa = determinate_posterior<double>(rec, {q1, 1 - q1});
    Posterior<double> pb = determinate_posterior<double>(rec, {q2, 1 - q2});
    double qm = lam * q1 + (1 - lam) * q2;
    Posterior<double> pm = determinate_posterior<double>(rec, {qm, 1 - qm});
    for (size_t di = 0; di < family.domain.size(); ++di)
      for (const auto& cand : family.candidates[di]) {
        bool at_a = detail::blocks_deviation(pa, Channel::Public, cand.type, cand.from, cand.to,
                                             p, family.domain[di], inst);
        bool at_b = detail::blocks_deviation(pb, Channel::Public, cand.type, cand.from, cand.to,
                                             p, family.domain[di], inst);
        if (at_a && at_b)
          CHECK(detail::blocks_deviation(pm, Channel::Public, cand.type, cand.from, cand.to, p,
                                         family.domain[di], inst));
      }
  }
}

TEST_CASE("gamma existence coincides with oracle stability on posterior grids") {
  Instance inst = testutil::load_fixture("counterexample.json");
  RepresentativeSet reps(inst);
  StabilityOptions<Rational> exact_opts;
  int agree = 0;
  for (int p = 0; p < inst.profiles.size(); ++p) {
    const ActionVector& rec = reps.of_profile(p);
    for (int g1 = 0; g1 <= 4; ++g1)
      for (int g2 = 0; g2 <= 4; ++g2) {
        std::vector<Posterior<Rational>> posts = {
            determinate_posterior<Rational>(rec, {Rational(g1) / 4, 1 - Rational(g1) / 4}),
            determinate_posterior<Rational>(rec, {Rational(g2) / 4, 1 - Rational(g2) / 4})};
        bool stable = stable_at(posts, rec, inst, exact_opts).stable;
        bool witness = gamma_exists(posts, rec, Channel::SemiPrivate, inst);
        CHECK(stable == witness);
        ++agree;
      }
  }
  CHECK(agree == 6 * 25);
}

TEST_CASE("private gamma equivalence at d=1 over joint posterior grids") {
  Instance inst = testutil::load_fixture("private_gap.json");
  RepresentativeSet reps(inst);
  StabilityOptions<Rational> exact_opts;
  for (int p = 0; p < inst.profiles.size(); ++p) {
    const ActionVector& rec = reps.of_profile(p);
    // agent i's joint posterior over the two vectors consistent with rec[i]
    for (int g1 = 0; g1 <= 4; ++g1)
      for (int g2 = 0; g2 <= 4; ++g2) {
        auto joint_for = [&](int agent, int grid) {
          ActionVector same = rec, other = rec;
          other[1 - agent] = 1 - rec[1 - agent];
          Posterior<Rational> post;
          post.recs = {same, other};
          post.joint = {{Rational(grid) / 4}, {1 - Rational(grid) / 4}};
          post.world_marginal = {Rational(1)};
          return post;
        };
        std::vector<Posterior<Rational>> posts = {joint_for(0, g1), joint_for(1, g2)};
        bool stable = stable_at(posts, rec, inst, exact_opts).stable;
        bool witness = gamma_exists(posts, rec, Channel::Private, inst);
        CHECK(stable == witness);
      }
  }
}

TEST_CASE("signature of a revealing signal is its own blocking profile") {
  Instance inst = testutil::load_fixture("counterexample.json");
  auto reveal = testutil::load_policy_fixture<double>("counterexample_full_reveal.policy.json",
                                                      inst);
  Signature sig = signature_of(reveal, reveal.pool[0], Channel::Public, inst);
  CHECK(sig.representative == ActionVector{0, 0});
  REQUIRE(sig.public_blocking.has_value());
  // recomputing the blocking profile at the revealed posterior is a fixed point
  auto again = public_blocking_profile<double>({1.0, 0.0}, ActionVector{0, 0}, inst);
  CHECK(sig.public_blocking->tuples == again.tuples);
}
