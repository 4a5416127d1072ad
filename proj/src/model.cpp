#include "persuasion/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace persuasion {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::PriorNotNormalized: return "PriorNotNormalized";
    case Errc::TypesNotPartition: return "TypesNotPartition";
    case Errc::MissingUtility: return "MissingUtility";
    case Errc::DeviationBoundOutOfRange: return "DeviationBoundOutOfRange";
    case Errc::UnknownAgent: return "UnknownAgent";
    case Errc::InfeasibleDeviation: return "InfeasibleDeviation";
    case Errc::DuplicateAgent: return "DuplicateAgent";
    case Errc::ZeroProbabilitySignal: return "ZeroProbabilitySignal";
    case Errc::UncoveredDeviation: return "UncoveredDeviation";
    case Errc::NoBlockingWitness: return "NoBlockingWitness";
    case Errc::InfeasibleSolution: return "InfeasibleSolution";
    case Errc::KernelNotNormalized: return "KernelNotNormalized";
    case Errc::FormatError: return "FormatError";
    case Errc::FileNotFound: return "FileNotFound";
  }
  return "UnknownError";
}

Rational rational_from_string(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' '; }), s.end());
  if (s.empty()) throw ModelError(Errc::FormatError, "empty number");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rational num(boost::multiprecision::cpp_int(s.substr(0, slash)));
    boost::multiprecision::cpp_int den(s.substr(slash + 1));
    if (den == 0) throw ModelError(Errc::FormatError, "zero denominator in " + text);
    return num / Rational(den);
  }
  bool neg = false;
  size_t i = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false;
  for (; i < s.size(); ++i) {
    if (s[i] == '.') {
      if (seen_dot) throw ModelError(Errc::FormatError, "bad number " + text);
      seen_dot = true;
    } else if (s[i] >= '0' && s[i] <= '9') {
      digits += s[i];
      if (seen_dot) ++frac_digits;
    } else {
      throw ModelError(Errc::FormatError, "bad number " + text);
    }
  }
  if (digits.empty()) throw ModelError(Errc::FormatError, "bad number " + text);
  // strip leading zeros: cpp_int would read them as an octal prefix
  size_t nz = digits.find_first_not_of('0');
  digits = nz == std::string::npos ? "0" : digits.substr(nz);
  Rational r{boost::multiprecision::cpp_int(digits)};
  for (long k = 0; k < frac_digits; ++k) r /= 10;
  return neg ? -r : r;
}

Rational rational_from_double(double x) {
  if (x == static_cast<long long>(x)) return Rational(static_cast<long long>(x));
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  std::string s(buf, res.ptr);
  // Shortest form may be scientific for extreme magnitudes; fall back to the
  // exact binary value in that case.
  if (s.find('e') != std::string::npos || s.find('E') != std::string::npos) {
    Rational r(x);
    return r;
  }
  return rational_from_string(s);
}

std::string rational_to_string(const Rational& q) {
  std::string num = numerator(q).str();
  if (denominator(q) == 1) return num;
  return num + "/" + denominator(q).str();
}

void ProfileSpace::build(const std::vector<int>& type_sizes, int num_actions) {
  num_types_ = static_cast<int>(type_sizes.size());
  num_actions_ = num_actions;
  profiles_.clear();
  index_.clear();

  // Compositions of |T| into |A| parts, ascending lexicographic order.
  auto compositions = [num_actions](int total) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(num_actions, 0);
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
      if (pos == num_actions - 1) {
        cur[pos] = remaining;
        out.push_back(cur);
        return;
      }
      for (int k = 0; k <= remaining; ++k) {
        cur[pos] = k;
        self(self, pos + 1, remaining - k);
      }
    };
    if (num_actions == 0) {
      if (total == 0) out.push_back({});
      return out;
    }
    rec(rec, 0, total);
    return out;
  };

  std::vector<std::vector<std::vector<int>>> per_type;
  per_type.reserve(type_sizes.size());
  for (int sz : type_sizes) per_type.push_back(compositions(sz));

  std::vector<int> pick(type_sizes.size(), 0);
  while (true) {
    ActionProfile p;
    p.counts.reserve(static_cast<size_t>(num_types_) * num_actions_);
    for (int t = 0; t < num_types_; ++t)
      for (int c : per_type[t][pick[t]]) p.counts.push_back(c);
    index_[p.counts] = static_cast<int>(profiles_.size());
    profiles_.push_back(std::move(p));
    int t = num_types_ - 1;
    while (t >= 0 && ++pick[t] == static_cast<int>(per_type[t].size())) pick[t--] = 0;
    if (t < 0) break;
  }
}

int ProfileSpace::index_of(const ActionProfile& p) const {
  auto it = index_.find(p.counts);
  if (it == index_.end())
    throw ModelError(Errc::FormatError, "profile not in the feasible profile space");
  return it->second;
}

std::uint64_t ProfileSpace::count(const std::vector<int>& type_sizes, int num_actions) {
  auto binom = [](std::uint64_t n, std::uint64_t k) {
    if (k > n) return std::uint64_t{0};
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  std::uint64_t total = 1;
  for (int sz : type_sizes)
    total = checked_mul(total, binom(sz + num_actions - 1, num_actions - 1), "profiles",
                        std::uint64_t{1} << 40);
  return total;
}

void Instance::init_structure() {
  if (worlds.empty()) throw ModelError(Errc::FormatError, "no worlds");
  if (actions.empty()) throw ModelError(Errc::FormatError, "no actions");
  if (num_agents <= 0) throw ModelError(Errc::FormatError, "agents must be positive");
  if (prior.size() != worlds.size())
    throw ModelError(Errc::FormatError, "prior length != number of worlds");

  Rational sum = 0;
  for (const auto& p : prior) {
    if (p < 0) throw ModelError(Errc::PriorNotNormalized, "prior: negative entry");
    sum += p;
  }
  Rational tol = Rational(1) / Rational(boost::multiprecision::cpp_int("1000000000000"));
  if (abs(sum - 1) > tol)
    throw ModelError(Errc::PriorNotNormalized, "prior: sums to " + rational_to_string(sum));

  // types must partition {1..n}
  std::vector<int> seen(num_agents, -1);
  for (size_t t = 0; t < types.size(); ++t) {
    for (int i : types[t]) {
      if (i < 0 || i >= num_agents)
        throw ModelError(Errc::TypesNotPartition,
                         "types: agent index " + std::to_string(i + 1) + " out of range");
      if (seen[i] != -1)
        throw ModelError(Errc::TypesNotPartition,
                         "types: agent " + std::to_string(i + 1) + " appears twice");
      seen[i] = static_cast<int>(t);
    }
  }
  for (int i = 0; i < num_agents; ++i)
    if (seen[i] == -1)
      throw ModelError(Errc::TypesNotPartition,
                       "types: agent " + std::to_string(i + 1) + " not covered");
  type_of = seen;
  for (auto& ty : types) std::sort(ty.begin(), ty.end());

  if (deviation_bound < 1 || deviation_bound > num_agents)
    throw ModelError(Errc::DeviationBoundOutOfRange,
                     "deviation_bound: " + std::to_string(deviation_bound) + " not in [1, " +
                         std::to_string(num_agents) + "]");

  std::vector<int> type_sizes;
  for (const auto& ty : types) type_sizes.push_back(static_cast<int>(ty.size()));
  profiles.build(type_sizes, num_actions());

  prior_d.resize(prior.size());
  for (size_t w = 0; w < prior.size(); ++w) prior_d[w] = to_double(prior[w]);
}

void Instance::allocate_utilities() {
  size_t agent_cells =
      static_cast<size_t>(num_types()) * num_actions() * profiles.size() * num_worlds();
  agent_u_q.assign(agent_cells, Rational(0));
  agent_u_set.assign(agent_cells, false);
  principal_u_q.assign(static_cast<size_t>(profiles.size()) * num_worlds(), Rational(0));
}

void Instance::finalize() {
  init_structure();

  // Utility totality: agent cells are required wherever rho(T,a) >= 1,
  // principal cells everywhere.
  size_t agent_cells =
      static_cast<size_t>(num_types()) * num_actions() * profiles.size() * num_worlds();
  size_t principal_cells = static_cast<size_t>(profiles.size()) * num_worlds();
  if (agent_u_q.size() != agent_cells || agent_u_set.size() != agent_cells ||
      principal_u_q.size() != principal_cells)
    throw ModelError(Errc::FormatError, "utility tables not sized; use the loader");
  for (int t = 0; t < num_types(); ++t)
    for (int a = 0; a < num_actions(); ++a)
      for (int p = 0; p < profiles.size(); ++p) {
        if (profiles[p].at(t, a, num_actions()) < 1) continue;
        for (int w = 0; w < num_worlds(); ++w)
          if (!agent_u_set[agent_u_index(t, a, p, w)])
            throw ModelError(Errc::MissingUtility,
                             "agent_utilities: type T" + std::to_string(t + 1) + " action " +
                                 actions[a] + " world " + worlds[w] + " at a reachable profile");
      }

  agent_u_d.resize(agent_u_q.size());
  for (size_t i = 0; i < agent_u_q.size(); ++i) agent_u_d[i] = to_double(agent_u_q[i]);
  principal_u_d.resize(principal_u_q.size());
  for (size_t i = 0; i < principal_u_q.size(); ++i)
    principal_u_d[i] = to_double(principal_u_q[i]);
}

ActionProfile profile_of(const ActionVector& a, const Instance& inst) {
  ActionProfile p;
  p.counts.assign(static_cast<size_t>(inst.num_types()) * inst.num_actions(), 0);
  for (int i = 0; i < inst.num_agents; ++i) p.at(inst.type_of[i], a[i], inst.num_actions())++;
  return p;
}

RepresentativeSet::RepresentativeSet(const Instance& inst) {
  reps_.reserve(inst.profiles.size());
  for (int p = 0; p < inst.profiles.size(); ++p) {
    ActionVector v(inst.num_agents, -1);
    for (int t = 0; t < inst.num_types(); ++t) {
      size_t pos = 0;
      for (int a = 0; a < inst.num_actions(); ++a)
        for (int k = 0; k < inst.profiles[p].at(t, a, inst.num_actions()); ++k)
          v[inst.types[t][pos++]] = a;
    }
    reps_.push_back(std::move(v));
  }
}

}  // namespace persuasion
