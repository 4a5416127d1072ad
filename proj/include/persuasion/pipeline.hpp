#pragma once

#include <chrono>
#include <optional>

#include "persuasion/lottery.hpp"
#include "persuasion/lp.hpp"
#include "persuasion/stability.hpp"

namespace persuasion {

// One end-to-end channel solve: LP build, simplex, policy extraction,
// lottery expansion for the private channel, and the independent
// stability check of the resulting explicit policy.
template <class S>
struct ChannelRun {
  Channel channel = Channel::Public;
  SolveStatus status = SolveStatus::Infeasible;
  S lp_value = S(0);
  std::uint64_t lp_vars = 0, lp_rows = 0, iterations = 0;
  double wall_seconds = 0;
  std::optional<SolvedPolicy<S>> solved;
  std::optional<ExplicitPolicy<S>> verified_policy;  // expanded form for private
  std::optional<PolicyReport<S>> oracle;
};

template <class S>
ChannelRun<S> run_channel(const Instance& inst, Channel channel, const Limits& limits = {},
                          const SolveOptions& solve_opts = {}, bool reveal_role = false,
                          bool run_oracle = true) {
  auto t0 = std::chrono::steady_clock::now();
  ChannelRun<S> out;
  out.channel = channel;
  BuiltLp<S> built = build_channel_lp<S>(channel, inst, limits);
  out.lp_vars = built.lp.num_vars;
  out.lp_rows = built.lp.rows.size();
  SolveResult<S> sol = solve_lp(built.lp, solve_opts);
  out.status = sol.status;
  out.iterations = sol.iterations;
  if (sol.status == SolveStatus::Optimal) {
    out.lp_value = sol.objective;
    out.solved = extract_policy(built, sol, inst);
    if (channel == Channel::Private) {
      out.verified_policy = lotterize(out.solved->policy, inst, reveal_role, limits).expanded;
    } else {
      out.verified_policy = out.solved->policy;
    }
    if (run_oracle) out.oracle = is_policy_stable(*out.verified_policy, inst);
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace persuasion
