// Command-line frontend: validate instances, enumerate deviation and
// blocking spaces, solve the three channel LPs, expand lottery policies,
// verify stability, and generate vertex-cover reduction instances.
//
// Exit codes: 0 success (stable), 1 verify found the policy unstable,
// 2 no stable policy exists (LP infeasible), 3 explosion guard,
// 4 input/format error, 5 internal inconsistency (optimal LP but the
// extracted policy failed the oracle).

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "persuasion/gadget.hpp"
#include "persuasion/io.hpp"
#include "persuasion/pipeline.hpp"

using namespace persuasion;
using nlohmann::json;

namespace {

constexpr int kExitStable = 0;
constexpr int kExitUnstable = 1;
constexpr int kExitNoStablePolicy = 2;
constexpr int kExitGuard = 3;
constexpr int kExitInput = 4;
constexpr int kExitInconsistent = 5;

struct GlobalOpts {
  bool json = false;
  bool exact = false;
  std::uint64_t cap = 10'000'000;
  std::uint64_t max_pivots = 1'000'000;
};

Limits make_limits(const GlobalOpts& g) {
  Limits limits;
  limits.enumeration_cap = g.cap;
  limits.max_pivots = g.max_pivots;
  return limits;
}

void emit(const GlobalOpts& g, const json& machine, const std::string& human) {
  if (g.json)
    std::cout << machine.dump(1) << "\n";
  else
    std::cout << human;
}

// "T1:a1=2,a2=1;T2:x=3" or a bare profile index.
int parse_profile_arg(const std::string& arg, const Instance& inst) {
  if (arg.find(':') == std::string::npos) return std::stoi(arg);
  ActionProfile p;
  p.counts.assign(static_cast<size_t>(inst.num_types()) * inst.num_actions(), 0);
  std::istringstream groups(arg);
  std::string group;
  while (std::getline(groups, group, ';')) {
    auto colon = group.find(':');
    if (colon == std::string::npos)
      throw ModelError(Errc::FormatError, "profile: expected T<i>:action=count,...");
    int t = type_index(json(group.substr(0, colon)), inst);
    std::istringstream cells(group.substr(colon + 1));
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      auto eq = cell.find('=');
      if (eq == std::string::npos)
        throw ModelError(Errc::FormatError, "profile: expected action=count");
      p.at(t, action_index(cell.substr(0, eq), inst), inst.num_actions()) =
          std::stoi(cell.substr(eq + 1));
    }
  }
  return inst.profiles.index_of(p);
}

int cmd_validate(const std::string& path, const GlobalOpts& g) {
  std::string bytes = read_file(path);
  Instance inst = load_instance_file(path);
  json out;
  out["instance_digest"] = fnv1a_digest(bytes);
  out["worlds"] = inst.num_worlds();
  out["agents"] = inst.num_agents;
  out["actions"] = inst.num_actions();
  out["types"] = inst.num_types();
  out["deviation_bound"] = inst.deviation_bound;
  out["profiles"] = inst.profiles.size();
  out["status"] = "valid";
  std::ostringstream human;
  human << "valid instance: " << inst.num_agents << " agents, " << inst.num_worlds()
        << " worlds, " << inst.num_actions() << " actions, " << inst.num_types()
        << " types, d=" << inst.deviation_bound << ", " << inst.profiles.size()
        << " profiles (digest " << out["instance_digest"].get<std::string>() << ")\n";
  emit(g, out, human.str());
  return kExitStable;
}

int cmd_enumerate(const std::string& path, bool deviations, bool blocking,
                  const std::string& mode, const std::string& profile_arg, const GlobalOpts& g) {
  Instance inst = load_instance_file(path);
  Limits limits = make_limits(g);
  json out;
  std::ostringstream human;

  if (deviations || !blocking) {
    if (profile_arg.empty()) {
      auto all = enumerate_all_deviations(inst, limits);
      out["deviations"] = json::array();
      human << "D*: " << all.size() << " deviations\n";
      for (const auto& d : all) {
        out["deviations"].push_back(d.to_string(inst));
        human << "  " << d.to_string(inst) << "\n";
      }
    } else {
      int p = parse_profile_arg(profile_arg, inst);
      auto feas = feasible_deviations(inst.profiles[p], inst, limits);
      out["profile"] = profile_to_json(inst.profiles[p], inst);
      out["deviations"] = json::array();
      human << "D_rho for profile " << p << ": " << feas.size() << " deviations\n";
      for (const auto& d : feas) {
        out["deviations"].push_back(d.to_string(inst));
        human << "  " << d.to_string(inst) << "\n";
      }
    }
  }

  if (blocking) {
    if (profile_arg.empty())
      throw ModelError(Errc::FormatError, "--blocking needs --profile");
    int p = parse_profile_arg(profile_arg, inst);
    Channel ch = channel_from_string(mode);
    out["profile"] = profile_to_json(inst.profiles[p], inst);
    out["channel"] = channel_name(ch);
    if (ch == Channel::Public) {
      PublicFamily family = enumerate_public_family(p, inst, limits);
      std::uint64_t covers = family.cover_count();
      out["blocking_profiles"] = covers;
      human << "B^pub for profile " << p << ": " << covers << " minimal covers over "
            << family.domain.size() << " deviations\n";
      if (covers <= 64) {
        out["contents"] = json::array();
        for (std::uint64_t k = 0; k < covers; ++k) {
          PublicBlockingProfile beta = family.cover(k);
          json tuples = json::array();
          for (const auto& tpl : beta.tuples) {
            std::string line = family.domain[tpl.dev].to_string(inst) + " | T" +
                               std::to_string(tpl.type + 1) + " " + inst.actions[tpl.from] +
                               " refuses " + inst.actions[tpl.to];
            tuples.push_back(line);
            human << "  [" << k << "] " << line << "\n";
          }
          out["contents"].push_back(tuples);
        }
      }
    } else {
      GammaFamily family = enumerate_gamma_family(p, ch, inst, limits);
      std::uint64_t count = family.assignment_count();
      out["blocking_profiles"] = count;
      human << (ch == Channel::SemiPrivate ? "B^sm" : "B^pv") << " for profile " << p << ": "
            << count << " assignments over " << family.domain_size()
            << (ch == Channel::SemiPrivate ? " deviations\n" : " coalition shapes\n");
      if (count <= 64) {
        out["contents"] = json::array();
        for (std::uint64_t k = 0; k < count; ++k) {
          GammaAssignment gamma = family.assignment(k);
          json lines = json::array();
          for (size_t di = 0; di < gamma.chosen.size(); ++di) {
            std::string dom = ch == Channel::SemiPrivate
                                  ? (*family.domain)[di].to_string(inst)
                                  : (*family.templates)[di].to_string(inst);
            std::string line = dom + " | ";
            if (!gamma.chosen[di]) {
              line += "unrealizable";
            } else {
              const GammaOption& o = *gamma.chosen[di];
              line += "T" + std::to_string(o.type + 1);
              line += " refuses {";
              bool first = true;
              for (int x = 0; x < inst.num_actions(); ++x)
                if (o.aprime_mask >> x & 1) {
                  if (!first) line += ",";
                  line += inst.actions[x];
                  first = false;
                }
              line += "} via agents";
              for (int i : o.agents) line += " " + std::to_string(i + 1);
            }
            lines.push_back(line);
            human << "  [" << k << "] " << line << "\n";
          }
          out["contents"].push_back(lines);
        }
      }
    }
  }
  emit(g, out, human.str());
  return kExitStable;
}

template <class S>
int run_solve(const Instance& inst, const std::string& digest, Channel channel,
              const std::string& dump_lp, const std::string& out_policy,
              const std::string& out_report, bool reveal_role, const GlobalOpts& g) {
  Limits limits = make_limits(g);
  SolveOptions solve_opts;
  solve_opts.max_pivots = g.max_pivots;

  if (!dump_lp.empty()) {
    BuiltLp<S> built = build_channel_lp<S>(channel, inst, limits);
    write_file(dump_lp, lp_to_text(built.lp));
  }

  ChannelRun<S> run = run_channel<S>(inst, channel, limits, solve_opts, reveal_role);

  json report;
  report["instance_digest"] = digest;
  report["channel"] = channel_name(channel);
  report["mode"] = g.exact ? "rational" : "float";
  report["lp"] = {{"variables", run.lp_vars}, {"constraints", run.lp_rows}};
  report["status"] = solve_status_name(run.status);
  report["wall_time_s"] = run.wall_seconds;
  report["iterations"] = run.iterations;

  std::ostringstream human;
  human << channel_name(channel) << " LP: " << run.lp_vars << " variables, " << run.lp_rows
        << " rows -> " << solve_status_name(run.status) << " in " << run.wall_seconds << "s\n";

  int rc = kExitStable;
  if (run.status == SolveStatus::Optimal) {
    report["value"] = to_double(run.lp_value);
    if constexpr (!std::is_same_v<S, double>)
      report["value_exact"] = rational_to_string(run.lp_value);
    human << "optimal value " << to_double(run.lp_value) << "\n";
    const auto& oracle = *run.oracle;
    report["oracle"] = {{"verdict", oracle.stable ? "STABLE" : "UNSTABLE"},
                        {"signals_checked", oracle.signals_checked}};
    human << "oracle: " << (oracle.stable ? "STABLE" : "UNSTABLE") << " ("
          << oracle.signals_checked << " signals)\n";
    if (!oracle.stable) {
      json w;
      for (int i : oracle.witness->agents) w["agents"].push_back(i + 1);
      for (int a : oracle.witness->actions) w["actions"].push_back(inst.actions[a]);
      report["oracle"]["witness"] = w;
      rc = kExitInconsistent;
    }
    if (!out_policy.empty())
      write_file(out_policy, policy_to_json(run.channel == Channel::Private
                                                ? *run.verified_policy
                                                : run.solved->policy,
                                            inst)
                                 .dump(1) +
                                 "\n");
  } else if (run.status == SolveStatus::Infeasible) {
    human << "no stable policy exists for this channel\n";
    report["value"] = nullptr;
    rc = kExitNoStablePolicy;
  } else {
    human << "solver gave up: " << solve_status_name(run.status) << "\n";
    rc = kExitInconsistent;
  }

  if (!out_report.empty()) write_file(out_report, report.dump(1) + "\n");
  emit(g, report, human.str());
  return rc;
}

template <class S>
int run_verify(const Instance& inst, const std::string& policy_path, const GlobalOpts& g) {
  json pj = json::parse(read_file(policy_path));
  ExplicitPolicy<S> policy = load_policy_json<S>(pj, inst);
  PolicyReport<S> rep = is_policy_stable(policy, inst);
  S value = policy_value(policy, inst);

  json out;
  out["channel"] = channel_name(policy.channel);
  out["value"] = to_double(value);
  if constexpr (!std::is_same_v<S, double>) out["value_exact"] = rational_to_string(value);
  out["verdict"] = rep.stable ? "STABLE" : "UNSTABLE";
  out["signals_checked"] = rep.signals_checked;
  out["zero_mass_skipped"] = rep.zero_mass_skipped;

  std::ostringstream human;
  human << (rep.stable ? "STABLE" : "UNSTABLE") << "\n";
  human << "policy value: " << to_double(value) << "\n";
  if (!rep.stable) {
    human << "witness: agents";
    json w;
    for (size_t k = 0; k < rep.witness->agents.size(); ++k) {
      human << " " << rep.witness->agents[k] + 1;
      w["agents"].push_back(rep.witness->agents[k] + 1);
      w["actions"].push_back(inst.actions[rep.witness->actions[k]]);
      w["gains"].push_back(to_double(rep.witness->gains[k]));
    }
    human << " ->";
    for (int a : rep.witness->actions) human << " " << inst.actions[a];
    human << "\n";
    out["witness"] = w;
    json sig;
    for (int a : rep.unstable_signal->rec) sig.push_back(inst.actions[a]);
    out["unstable_signal"] = sig;
  }
  emit(g, out, human.str());
  return rep.stable ? kExitStable : kExitUnstable;
}

template <class S>
int run_lotterize(const Instance& inst, const std::string& in_path, const std::string& out_path,
                  bool reveal_role, const GlobalOpts& g) {
  json pj = json::parse(read_file(in_path));
  ExplicitPolicy<S> base = load_policy_json<S>(pj, inst);
  LotteryPolicy<S> lot = lotterize(base, inst, reveal_role, make_limits(g));
  write_file(out_path, policy_to_json(lot.expanded, inst).dump(1) + "\n");
  json out;
  out["permutations"] = count_type_permutations(inst);
  out["base_signals"] = base.pool.size();
  out["expanded_signals"] = lot.expanded.pool.size();
  std::ostringstream human;
  human << "expanded " << base.pool.size() << " base signals over "
        << count_type_permutations(inst) << " permutations into " << lot.expanded.pool.size()
        << " signals -> " << out_path << "\n";
  emit(g, out, human.str());
  return kExitStable;
}

int cmd_gadget(const std::string& graph_path, const std::string& out_path, const GlobalOpts& g) {
  GraphInput graph = parse_graph_text(read_file(graph_path));
  Instance inst = build_gadget(graph);
  write_file(out_path, instance_to_json(inst).dump(1) + "\n");
  json out;
  out["vertices"] = graph.num_vertices;
  out["edges"] = graph.edges.size();
  out["cover_size"] = graph.cover_size;
  out["agents"] = inst.num_agents;
  out["worlds"] = inst.num_worlds();
  out["deviation_bound"] = inst.deviation_bound;
  std::ostringstream human;
  human << "reduction instance: " << inst.num_agents << " agents, " << inst.num_worlds()
        << " worlds, d=" << inst.deviation_bound << " -> " << out_path << "\n";
  emit(g, out, human.str());
  return kExitStable;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal signaling policies for persuading typed agents with externalities"};
  app.require_subcommand(1);

  GlobalOpts g;
  if (const char* env = std::getenv("PERSUADE_EXACT"))
    g.exact = std::string(env) == "1" || std::string(env) == "true";

  std::string instance_path, policy_path, out_path, mode = "public", profile_arg;
  std::string dump_lp, out_policy, out_report, graph_path;
  bool deviations = false, blocking = false, reveal_role = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_flag("--json", g.json, "machine-readable output");
    cmd->add_flag("--exact", g.exact, "exact rational arithmetic");
    cmd->add_option("--cap", g.cap, "explosion guard cap");
    cmd->add_option("--max-pivots", g.max_pivots, "simplex pivot cap");
  };

  auto* validate = app.add_subcommand("validate", "check an instance file");
  validate->add_option("instance", instance_path)->required();
  add_common(validate);

  auto* enumerate = app.add_subcommand("enumerate", "dump deviation/blocking spaces");
  enumerate->add_option("instance", instance_path)->required();
  enumerate->add_flag("--deviations", deviations, "dump D* or D_rho");
  enumerate->add_flag("--blocking", blocking, "dump blocking profiles");
  enumerate->add_option("--mode", mode, "public|semi|private");
  enumerate->add_option("--profile", profile_arg, "profile index or T1:a=k,...");
  add_common(enumerate);

  auto* solve = app.add_subcommand("solve", "build and solve a channel LP");
  solve->add_option("instance", instance_path)->required();
  solve->add_option("--mode", mode, "public|semi|private")->required();
  solve->add_option("--dump-lp", dump_lp, "write the LP in text form");
  solve->add_option("--out", out_policy, "write the optimal policy");
  solve->add_option("--report", out_report, "write the run report");
  solve->add_flag("--reveal-role", reveal_role, "role-revealing lottery variant");
  add_common(solve);

  auto* lotterize_cmd = app.add_subcommand("lotterize", "expand a policy over type permutations");
  lotterize_cmd->add_option("instance", instance_path)->required();
  lotterize_cmd->add_option("policy", policy_path)->required();
  lotterize_cmd->add_option("output", out_path)->required();
  lotterize_cmd->add_flag("--reveal-role", reveal_role, "append roles to labels");
  add_common(lotterize_cmd);

  auto* verify = app.add_subcommand("verify", "stability-check a policy file");
  verify->add_option("instance", instance_path)->required();
  verify->add_option("policy", policy_path)->required();
  add_common(verify);

  auto* gadget = app.add_subcommand("gadget", "vertex-cover reduction instance");
  gadget->add_option("graph", graph_path)->required();
  gadget->add_option("output", out_path)->required();
  add_common(gadget);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(instance_path, g);
    if (enumerate->parsed())
      return cmd_enumerate(instance_path, deviations, blocking, mode, profile_arg, g);
    if (solve->parsed()) {
      std::string bytes = read_file(instance_path);
      Instance inst = load_instance_file(instance_path);
      Channel channel = channel_from_string(mode);
      std::string digest = fnv1a_digest(bytes);
      return g.exact ? run_solve<Rational>(inst, digest, channel, dump_lp, out_policy,
                                           out_report, reveal_role, g)
                     : run_solve<double>(inst, digest, channel, dump_lp, out_policy, out_report,
                                         reveal_role, g);
    }
    if (lotterize_cmd->parsed()) {
      Instance inst = load_instance_file(instance_path);
      return g.exact ? run_lotterize<Rational>(inst, policy_path, out_path, reveal_role, g)
                     : run_lotterize<double>(inst, policy_path, out_path, reveal_role, g);
    }
    if (verify->parsed()) {
      Instance inst = load_instance_file(instance_path);
      return g.exact ? run_verify<Rational>(inst, policy_path, g)
                     : run_verify<double>(inst, policy_path, g);
    }
    if (gadget->parsed()) return cmd_gadget(graph_path, out_path, g);
  } catch (const GuardExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGuard;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
