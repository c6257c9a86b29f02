#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "kdst/errors.hpp"
#include "kdst/lp.hpp"

namespace kdst::simplex {

struct SolverConfig {
  double feasibility_tolerance = 1e-7;
  double optimality_tolerance = 1e-7;
  long max_iterations = 200'000;
  bool anti_cycling = true; // switch to Bland's rule after 10*rows degenerate pivots
  int refactor_interval = 100;
};

namespace detail {

using lp::kInfinity;

// Two-phase primal revised simplex with bounded variables. The basis inverse
// is kept as an eta file (product form) and rebuilt from scratch every
// refactor_interval pivots. Dantzig pricing by default; Bland's rule kicks in
// after a run of degenerate pivots and stays until progress resumes.
class Solver {
public:
  Solver(const lp::LinearProgram& problem, const SolverConfig& config)
      : lp_(problem), cfg_(config), m_(problem.constraint_count()) {
    build();
  }

  lp::LpSolution run() {
    lp::LpSolution sol;
    if (m_ == 0) return solve_unconstrained();

    if (!phase1()) {
      sol.status = lp::SolveStatus::Infeasible;
      sol.stats = stats_;
      return sol;
    }
    const lp::SolveStatus status = phase2();
    sol.status = status;
    sol.stats = stats_;
    if (status != lp::SolveStatus::Optimal) return sol;

    sol.values.assign(lp_.variable_count(), 0.0);
    for (int j = 0; j < lp_.variable_count(); ++j) sol.values[j] = value_of(j);
    sol.objective_value = lp_.objective_value(sol.values);

    const double scale = 1.0 + rhs_scale_;
    if (lp_.max_violation(sol.values) > cfg_.feasibility_tolerance * scale)
      throw SolverError("simplex: claimed optimum violates constraints beyond "
                        "tolerance (numerical failure)");
    return sol;
  }

private:
  enum class State : std::uint8_t { AtLower, AtUpper, Basic };

  struct Eta {
    int pivot_row;
    double pivot_value;
    std::vector<std::pair<int, double>> other; // (row, value), row != pivot_row
  };

  // ---- setup ----

  void build() {
    const int n = lp_.variable_count();
    for (int j = 0; j < n; ++j) {
      if (!(lp_.lower[j] <= lp_.upper[j]))
        throw ValidationError("variable has empty bound interval");
      if (!std::isfinite(lp_.lower[j]))
        throw ValidationError("simplex requires finite lower bounds");
    }
    cols_.assign(n, {});
    for (int i = 0; i < m_; ++i)
      for (const auto& [col, coeff] : lp_.rows[i])
        if (coeff != 0.0) cols_[col].push_back({i, coeff});

    lower_ = lp_.lower;
    upper_ = lp_.upper;
    slack_of_row_.assign(m_, -1);
    for (int i = 0; i < m_; ++i) {
      rhs_scale_ = std::max(rhs_scale_, std::abs(lp_.rhs[i]));
      if (lp_.relations[i] == lp::Relation::Equal) continue;
      const double sigma = lp_.relations[i] == lp::Relation::LessEq ? 1.0 : -1.0;
      const int var = add_internal_column(i, sigma, 0.0, kInfinity);
      slack_of_row_[i] = var;
    }

    // Initial point: every structural/slack variable at its lower bound.
    state_.assign(var_count(), State::AtLower);
    std::vector<double> resid(lp_.rhs);
    for (int j = 0; j < var_count(); ++j)
      if (lower_[j] != 0.0)
        for (const auto& [row, coeff] : column(j)) resid[row] -= coeff * lower_[j];

    basis_.assign(m_, -1);
    x_basic_.assign(m_, 0.0);
    artificial_start_ = var_count();
    for (int i = 0; i < m_; ++i) {
      const int slack = slack_of_row_[i];
      if (slack >= 0) {
        const double sigma = column(slack)[0].second;
        const double val = resid[i] / sigma;
        if (val >= 0.0) {
          basis_[i] = slack;
          x_basic_[i] = val;
          state_[slack] = State::Basic;
          continue;
        }
      }
      const double sign = resid[i] >= 0.0 ? 1.0 : -1.0;
      const int art = add_internal_column(i, sign, 0.0, kInfinity);
      state_.push_back(State::Basic);
      basis_[i] = art;
      x_basic_[i] = std::abs(resid[i]);
    }
    refactor();
  }

  int add_internal_column(int row, double coeff, double lb, double ub) {
    internal_cols_.push_back({{row, coeff}});
    lower_.push_back(lb);
    upper_.push_back(ub);
    return static_cast<int>(lower_.size()) - 1;
  }

  int var_count() const { return static_cast<int>(lower_.size()); }
  int n_structural() const { return lp_.variable_count(); }

  const std::vector<std::pair<int, double>>& column(int j) const {
    return j < n_structural() ? cols_[j]
                              : internal_cols_[j - n_structural()];
  }

  double cost_of(int j) const {
    if (phase_ == 1) return j >= artificial_start_ ? 1.0 : 0.0;
    return j < n_structural() ? lp_.objective[j] : 0.0;
  }

  double value_of(int j) const {
    if (state_[j] == State::AtLower) return lower_[j];
    if (state_[j] == State::AtUpper) return upper_[j];
    for (int i = 0; i < m_; ++i)
      if (basis_[i] == j) return x_basic_[i];
    return 0.0; // unreachable
  }

  bool fixed(int j) const { return upper_[j] - lower_[j] <= 0.0; }

  // ---- factorization ----

  void ftran(std::vector<double>& u) const {
    for (const Eta& e : etas_) {
      double up = u[e.pivot_row];
      if (up == 0.0) continue;
      up /= e.pivot_value;
      u[e.pivot_row] = up;
      for (const auto& [row, val] : e.other) u[row] -= val * up;
    }
  }

  void btran(std::vector<double>& y) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double acc = 0.0;
      for (const auto& [row, val] : it->other) acc += val * y[row];
      y[it->pivot_row] = (y[it->pivot_row] - acc) / it->pivot_value;
    }
  }

  void append_eta(int pivot_row, const std::vector<double>& column_values) {
    Eta eta;
    eta.pivot_row = pivot_row;
    eta.pivot_value = column_values[pivot_row];
    for (int i = 0; i < m_; ++i)
      if (i != pivot_row && std::abs(column_values[i]) > 1e-14)
        eta.other.push_back({i, column_values[i]});
    etas_.push_back(std::move(eta));
  }

  void refactor() {
    etas_.clear();
    stats_.refactorizations += 1;
    // Process sparser columns first; pivot on the largest remaining entry.
    std::vector<int> slots(m_);
    std::iota(slots.begin(), slots.end(), 0);
    std::sort(slots.begin(), slots.end(), [&](int a, int b) {
      const auto sa = column(basis_[a]).size(), sb = column(basis_[b]).size();
      return sa != sb ? sa < sb : a < b;
    });
    std::vector<int> new_basis(m_, -1);
    std::vector<char> row_used(m_, 0);
    std::vector<double> w(m_);
    for (int s : slots) {
      std::fill(w.begin(), w.end(), 0.0);
      for (const auto& [row, val] : column(basis_[s])) w[row] = val;
      ftran(w);
      int pivot = -1;
      double best = 1e-11;
      for (int i = 0; i < m_; ++i)
        if (!row_used[i] && std::abs(w[i]) > best) {
          best = std::abs(w[i]);
          pivot = i;
        }
      if (pivot < 0) throw SolverError("simplex: basis matrix became singular");
      append_eta(pivot, w);
      row_used[pivot] = 1;
      new_basis[pivot] = basis_[s];
    }
    basis_ = std::move(new_basis);
    pivots_since_refactor_ = 0;
    recompute_basic_values();
  }

  void recompute_basic_values() {
    std::vector<double> resid(lp_.rhs);
    for (int j = 0; j < var_count(); ++j) {
      if (state_[j] == State::Basic) continue;
      const double v = state_[j] == State::AtLower ? lower_[j] : upper_[j];
      if (v == 0.0) continue;
      for (const auto& [row, coeff] : column(j)) resid[row] -= coeff * v;
    }
    ftran(resid);
    x_basic_ = std::move(resid);
  }

  // ---- pivoting ----

  struct Pricing {
    int var = -1;
    double reduced_cost = 0.0;
  };

  Pricing price(bool bland) const {
    std::vector<double> y(m_, 0.0);
    for (int i = 0; i < m_; ++i) y[i] = cost_of(basis_[i]);
    btran(y);

    Pricing best;
    double best_score = cfg_.optimality_tolerance;
    for (int j = 0; j < var_count(); ++j) {
      if (state_[j] == State::Basic || fixed(j)) continue;
      double d = cost_of(j);
      for (const auto& [row, coeff] : column(j)) d -= y[row] * coeff;
      const bool eligible = state_[j] == State::AtLower
                                ? d < -cfg_.optimality_tolerance
                                : d > cfg_.optimality_tolerance;
      if (!eligible) continue;
      if (bland) return {j, d};
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        best = {j, d};
      }
    }
    return best;
  }

  enum class StepKind { Pivot, BoundFlip, Unbounded };

  struct Step {
    StepKind kind;
    double delta = 0.0;
    int blocking_row = -1;
  };

  Step ratio_test(int entering, const std::vector<double>& t, bool bland) const {
    const double dir = state_[entering] == State::AtLower ? 1.0 : -1.0;
    constexpr double kPivotTol = 1e-9;
    constexpr double kTieTol = 1e-10;

    double best = upper_[entering] - lower_[entering]; // bound flip distance
    int blocking = -1;
    double blocking_mag = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double delta_i = -dir * t[i]; // movement of x_basic_[i] per unit
      if (std::abs(t[i]) <= kPivotTol) continue;
      double limit;
      if (delta_i < 0.0)
        limit = std::max(0.0, x_basic_[i] - lower_[basis_[i]]) / (-delta_i);
      else if (upper_[basis_[i]] < kInfinity)
        limit = std::max(0.0, upper_[basis_[i]] - x_basic_[i]) / delta_i;
      else
        continue;
      if (limit < best - kTieTol) {
        best = limit;
        blocking = i;
        blocking_mag = std::abs(t[i]);
      } else if (limit <= best + kTieTol && blocking >= 0) {
        const bool take = bland ? basis_[i] < basis_[blocking]
                                : std::abs(t[i]) > blocking_mag;
        if (take) {
          blocking = i;
          blocking_mag = std::abs(t[i]);
          best = std::min(best, limit);
        }
      } else if (limit <= best + kTieTol && blocking < 0 && limit <= best) {
        best = limit;
        blocking = i;
        blocking_mag = std::abs(t[i]);
      }
    }
    if (blocking < 0 && !(best < kInfinity)) return {StepKind::Unbounded};
    if (blocking < 0) return {StepKind::BoundFlip, best, -1};
    return {StepKind::Pivot, std::max(best, 0.0), blocking};
  }

  void apply_step(int entering, const Step& step, const std::vector<double>& t) {
    const double dir = state_[entering] == State::AtLower ? 1.0 : -1.0;
    for (int i = 0; i < m_; ++i) x_basic_[i] -= dir * step.delta * t[i];

    if (step.kind == StepKind::BoundFlip) {
      state_[entering] = state_[entering] == State::AtLower ? State::AtUpper
                                                            : State::AtLower;
      return;
    }
    const int row = step.blocking_row;
    const int leaving = basis_[row];
    const double delta_row = -dir * t[row];
    state_[leaving] = delta_row < 0.0 ? State::AtLower : State::AtUpper;
    const double entering_value =
        (state_[entering] == State::AtLower ? lower_[entering]
                                            : upper_[entering]) +
        dir * step.delta;
    basis_[row] = entering;
    x_basic_[row] = entering_value;
    state_[entering] = State::Basic;
    append_eta(row, t);
    ++pivots_since_refactor_;
  }

  // Runs the simplex loop for the current phase_. Returns false on unbounded.
  bool iterate() {
    long degenerate_run = 0;
    bool bland = false;
    bool repriced_clean = false;
    for (;;) {
      if (stats_.iterations >= cfg_.max_iterations)
        throw SolverError("simplex: iteration limit (" +
                          std::to_string(cfg_.max_iterations) +
                          ") exceeded without convergence");
      if (pivots_since_refactor_ >= cfg_.refactor_interval) refactor();

      const Pricing entering = price(bland);
      if (entering.var < 0) {
        // Confirm optimality on a fresh factorization to rule out drift.
        if (!repriced_clean && pivots_since_refactor_ > 0) {
          refactor();
          repriced_clean = true;
          continue;
        }
        return true;
      }
      repriced_clean = false;

      std::vector<double> t(m_, 0.0);
      for (const auto& [row, coeff] : column(entering.var)) t[row] = coeff;
      ftran(t);

      const Step step = ratio_test(entering.var, t, bland);
      if (step.kind == StepKind::Unbounded) {
        if (phase_ == 1)
          throw SolverError("simplex: phase 1 claims unbounded (numerical failure)");
        return false;
      }
      apply_step(entering.var, step, t);
      stats_.iterations += 1;
      if (phase_ == 1) stats_.phase1_iterations += 1;
      if (phase_ == 2)
        stats_.phase2_objective_trace.push_back(current_objective());

      if (step.kind == StepKind::Pivot && step.delta <= 1e-10) {
        stats_.degenerate_pivots += 1;
        if (cfg_.anti_cycling && ++degenerate_run > 10L * std::max(m_, 1)) {
          bland = true;
          stats_.used_bland = true;
        }
      } else {
        degenerate_run = 0;
        bland = false;
      }
    }
  }

  double current_objective() const {
    double acc = 0.0;
    for (int j = 0; j < var_count(); ++j) {
      if (state_[j] == State::AtLower) acc += cost_of(j) * lower_[j];
      else if (state_[j] == State::AtUpper) acc += cost_of(j) * upper_[j];
    }
    for (int i = 0; i < m_; ++i) acc += cost_of(basis_[i]) * x_basic_[i];
    return acc;
  }

  bool phase1() {
    phase_ = 1;
    if (artificial_start_ == var_count()) return true; // all-slack basis
    if (!iterate())
      throw SolverError("simplex: phase 1 unbounded (numerical failure)");
    const double infeas = current_objective();
    if (infeas > cfg_.feasibility_tolerance * (1.0 + rhs_scale_)) return false;
    // Pin artificials at zero for phase 2.
    for (int j = artificial_start_; j < var_count(); ++j) upper_[j] = 0.0;
    return true;
  }

  lp::SolveStatus phase2() {
    phase_ = 2;
    if (!iterate()) return lp::SolveStatus::Unbounded;
    return lp::SolveStatus::Optimal;
  }

  lp::LpSolution solve_unconstrained() const {
    lp::LpSolution sol;
    sol.values.assign(lp_.variable_count(), 0.0);
    for (int j = 0; j < lp_.variable_count(); ++j) {
      const double c = lp_.objective[j];
      if (c >= 0.0) {
        sol.values[j] = lp_.lower[j];
      } else {
        if (lp_.upper[j] >= kInfinity) {
          sol.status = lp::SolveStatus::Unbounded;
          return sol;
        }
        sol.values[j] = lp_.upper[j];
      }
    }
    sol.status = lp::SolveStatus::Optimal;
    sol.objective_value = lp_.objective_value(sol.values);
    return sol;
  }

  const lp::LinearProgram& lp_;
  SolverConfig cfg_;
  int m_;
  int phase_ = 1;

  std::vector<std::vector<std::pair<int, double>>> cols_;          // structural
  std::vector<std::vector<std::pair<int, double>>> internal_cols_; // slack+artificial
  std::vector<double> lower_, upper_;
  std::vector<int> slack_of_row_;
  int artificial_start_ = 0;
  double rhs_scale_ = 0.0;

  std::vector<State> state_;
  std::vector<int> basis_;
  std::vector<double> x_basic_;
  std::vector<Eta> etas_;
  int pivots_since_refactor_ = 0;
  lp::SolveStats stats_;
};

} // namespace detail

inline lp::LpSolution solve(const lp::LinearProgram& problem,
                            const SolverConfig& config = {}) {
  detail::Solver solver(problem, config);
  return solver.run();
}

} // namespace kdst::simplex
