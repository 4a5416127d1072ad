#pragma once

#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include "persuasion/common.hpp"

namespace persuasion {

// max c.x  s.t.  rows (<= or =), x >= 0.
template <class S>
struct LinearProgram {
  struct Row {
    std::vector<std::pair<int, S>> coeffs;  // sorted by variable index
    char relation = '<';                    // '<' means <=, '=' equality
    S rhs = S(0);
  };
  int num_vars = 0;
  std::vector<S> objective;
  std::vector<Row> rows;
  std::vector<std::string> var_names;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

template <class S>
struct SolveResult {
  SolveStatus status = SolveStatus::IterationLimit;
  std::vector<S> x;
  S objective = S(0);
  std::uint64_t iterations = 0;
};

struct SolveOptions {
  std::uint64_t max_pivots = 1'000'000;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int degeneracy_threshold = 256;
};

// Two-phase primal simplex on a dense tableau.  Dantzig pricing with a
// permanent switch to Bland's rule once degeneracy persists; exact pivoting
// when S is a rational type.
template <class S>
class DenseSimplex {
 public:
  DenseSimplex(const LinearProgram<S>& lp, const SolveOptions& opts) : lp_(lp), opts_(opts) {}

  SolveResult<S> solve() {
    if constexpr (exact) return solve_once(false);
    // Float path: accept only a clean optimum.  Degenerate drift or cycling
    // escalates to exact rational pivoting, which terminates and certifies
    // the outcome.
    SolveResult<S> res = solve_once(false);
    if (res.status == SolveStatus::Optimal && residual(res.x) <= S(1e-7)) return res;
    return escalate_exact(res.iterations);
  }

 private:
  SolveResult<S> escalate_exact(std::uint64_t spent) const {
    LinearProgram<Rational> qlp;
    qlp.num_vars = lp_.num_vars;
    for (const auto& c : lp_.objective) qlp.objective.push_back(Rational(c));
    for (const auto& row : lp_.rows) {
      typename LinearProgram<Rational>::Row qrow;
      for (const auto& [j, v] : row.coeffs) qrow.coeffs.push_back({j, Rational(v)});
      qrow.relation = row.relation;
      qrow.rhs = Rational(row.rhs);
      qlp.rows.push_back(std::move(qrow));
    }
    DenseSimplex<Rational> exact_solver(qlp, opts_);
    SolveResult<Rational> qres = exact_solver.solve();
    SolveResult<S> out;
    out.status = qres.status;
    out.iterations = qres.iterations + spent;
    if (qres.status == SolveStatus::Optimal) {
      out.objective = to_double(qres.objective);
      out.x.reserve(qres.x.size());
      for (const auto& v : qres.x) out.x.push_back(to_double(v));
    }
    return out;
  }
  SolveResult<S> solve_once(bool bland_from_start) {
    build();
    SolveResult<S> res;
    if (has_artificials_) {
      set_phase1_objective();
      SolveStatus st = iterate(res.iterations, bland_from_start);
      if (st == SolveStatus::IterationLimit) {
        res.status = st;
        return res;
      }
      // Phase-1 objective is -sum(artificials); infeasible iff the residual
      // stays positive.
      if (rhs(m_) > feas_tol()) {
        res.status = SolveStatus::Infeasible;
        return res;
      }
      purge_artificials();
    }
    set_phase2_objective();
    res.status = iterate(res.iterations, bland_from_start);
    if (res.status != SolveStatus::Optimal) return res;
    res.x.assign(lp_.num_vars, S(0));
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < lp_.num_vars) res.x[basis_[i]] = rhs(i);
    res.objective = obj_value();
    return res;
  }

  S residual(const std::vector<S>& x) const {
    S worst(0);
    for (const auto& row : lp_.rows) {
      S lhs(0);
      for (const auto& [j, v] : row.coeffs) lhs += v * x[j];
      S viol = lhs - row.rhs;
      if (row.relation == '=' && viol < S(0)) viol = -viol;
      if (viol > worst) worst = viol;
    }
    for (const auto& v : x)
      if (-v > worst) worst = -v;
    return worst;
  }

 private:
  static constexpr bool exact = !std::is_same_v<S, double>;
  S feas_tol() const { return exact ? S(0) : S(1e-8); }
  S cost_tol() const { return exact ? S(0) : S(1e-9); }
  S pivot_tol() const { return exact ? S(0) : S(1e-10); }

  S& at(int r, int c) { return tab_[static_cast<size_t>(r) * stride_ + c]; }
  S& rhs(int r) { return tab_[static_cast<size_t>(r) * stride_ + cols_]; }
  S& obj(int c) { return at(m_, c); }
  S obj_value() { return -rhs(m_); }

  void build() {
    m_ = static_cast<int>(lp_.rows.size());
    int n = lp_.num_vars;
    // One slack per inequality, one artificial per equality or per
    // inequality whose slack cannot start basic (negative rhs).
    int slacks = 0, arts = 0;
    for (const auto& row : lp_.rows) {
      bool neg = row.rhs < S(0);
      if (row.relation == '<') {
        ++slacks;
        if (neg) ++arts;
      } else {
        ++arts;
      }
    }
    cols_ = n + slacks + arts;
    stride_ = cols_ + 1;
    tab_.assign(static_cast<size_t>(m_ + 1) * stride_, S(0));
    basis_.assign(m_, -1);
    art_start_ = n + slacks;
    has_artificials_ = arts > 0;

    int next_slack = n, next_art = art_start_;
    for (int i = 0; i < m_; ++i) {
      const auto& row = lp_.rows[i];
      bool neg = row.rhs < S(0);
      S sign = neg ? S(-1) : S(1);
      for (const auto& [j, v] : row.coeffs) at(i, j) = sign * v;
      rhs(i) = sign * row.rhs;
      if (row.relation == '<') {
        at(i, next_slack) = sign;  // surplus when the row was negated
        if (!neg) basis_[i] = next_slack;
        ++next_slack;
      }
      if (basis_[i] < 0) {
        at(i, next_art) = S(1);
        basis_[i] = next_art;
        ++next_art;
      }
    }
  }

  void set_phase1_objective() {
    // Maximize -sum(artificials).  Reduced costs: start from c (= -1 on
    // artificial columns) and add back the rows whose basic variable is
    // artificial (their c_b = -1).  rhs(m) then holds sum(artificials).
    for (int c = 0; c <= cols_; ++c) at(m_, c) = S(0);
    for (int c = art_start_; c < cols_; ++c) obj(c) = S(-1);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < art_start_) continue;
      for (int c = 0; c <= cols_; ++c) at(m_, c) += at(i, c);
    }
  }

  void set_phase2_objective() {
    for (int c = 0; c <= cols_; ++c) at(m_, c) = S(0);
    for (int j = 0; j < lp_.num_vars && j < static_cast<int>(lp_.objective.size()); ++j)
      obj(j) = lp_.objective[j];
    // Subtract basic contributions to get reduced costs.
    for (int i = 0; i < m_; ++i) {
      int b = basis_[i];
      if (b >= lp_.num_vars || lp_.objective[b] == S(0)) continue;
      S c = lp_.objective[b];
      for (int col = 0; col <= cols_; ++col) at(m_, col) -= c * at(i, col);
    }
  }

  void purge_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < art_start_) continue;
      int enter = -1;
      for (int c = 0; c < art_start_; ++c)
        if (abs_gt(at(i, c), pivot_tol())) { enter = c; break; }
      if (enter >= 0) {
        pivot(i, enter);
      } else {
        // Redundant row: zero it out; the artificial stays basic at zero.
        for (int c = 0; c < cols_; ++c)
          if (c != basis_[i]) at(i, c) = S(0);
        rhs(i) = S(0);
      }
    }
  }

  static bool abs_gt(const S& v, const S& tol) { return v > tol || v < -tol; }

  SolveStatus iterate(std::uint64_t& iterations, bool bland) {
    int degenerate_run = 0;
    while (true) {
      if (iterations >= opts_.max_pivots) return SolveStatus::IterationLimit;
      int enter = -1;
      if (bland) {
        for (int c = 0; c < cols_; ++c) {
          if (entering_excluded(c)) continue;
          if (obj(c) > cost_tol()) { enter = c; break; }
        }
      } else {
        S best = cost_tol();
        for (int c = 0; c < cols_; ++c) {
          if (entering_excluded(c)) continue;
          if (obj(c) > best) { best = obj(c); enter = c; }
        }
      }
      if (enter < 0) return SolveStatus::Optimal;

      // Ratio test.  Among (near-)minimal ratios pick the largest pivot
      // element for numerical stability, or the smallest basis variable
      // under Bland's rule.
      int leave = -1;
      S best_ratio = S(0);
      for (int i = 0; i < m_; ++i) {
        if (!(at(i, enter) > pivot_tol())) continue;
        S ratio = rhs(i) / at(i, enter);
        if (leave < 0 || ratio < best_ratio) {
          leave = i;
          best_ratio = ratio;
        } else if (ratio == best_ratio ||
                   (!exact && !bland && ratio <= best_ratio + S(1e-9) * (S(1) + best_ratio))) {
          bool take = bland ? basis_[i] < basis_[leave] : at(i, enter) > at(leave, enter);
          if (take) leave = i;
        }
      }
      if (leave < 0) return SolveStatus::Unbounded;

      bool degenerate = !(best_ratio > feas_tol());
      degenerate_run = degenerate ? degenerate_run + 1 : 0;
      if (degenerate_run > opts_.degeneracy_threshold) bland = true;

      pivot(leave, enter);
      ++iterations;
    }
  }

  // Artificial columns start basic and never re-enter.
  bool entering_excluded(int c) const { return c >= art_start_; }

  void pivot(int r, int s) {
    S inv = at(r, s);
    for (int c = 0; c <= cols_; ++c) at(r, c) /= inv;
    for (int i = 0; i <= m_; ++i) {
      if (i == r) continue;
      S f = at(i, s);
      if (f == S(0)) continue;
      for (int c = 0; c <= cols_; ++c) at(i, c) -= f * at(r, c);
      at(i, s) = S(0);  // clean residue
    }
    basis_[r] = s;
  }

  const LinearProgram<S>& lp_;
  SolveOptions opts_;
  std::vector<S> tab_;
  std::vector<int> basis_;
  int m_ = 0, cols_ = 0, stride_ = 0, art_start_ = 0;
  bool has_artificials_ = false;
};

template <class S>
SolveResult<S> solve_lp(const LinearProgram<S>& lp, const SolveOptions& opts = {}) {
  DenseSimplex<S> solver(lp, opts);
  return solver.solve();
}

}  // namespace persuasion
