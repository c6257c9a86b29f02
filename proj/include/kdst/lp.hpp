#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "kdst/errors.hpp"

namespace kdst::lp {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { LessEq, GreaterEq, Equal };

// Semantic label of an LP variable; drives name generation for MPS export
// and lets solutions be projected back onto model objects.
struct VarTag {
  enum class Kind { X, F, Y, XHat, FHat, Other };
  Kind kind = Kind::Other;
  int a = -1; // edge id / terminal index / tree edge id
  int b = -1; // path id (F/FHat)
};

struct LinearProgram {
  std::vector<double> objective; // minimize
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<VarTag> tags;
  std::vector<std::vector<std::pair<int, double>>> rows; // sorted by column
  std::vector<Relation> relations;
  std::vector<double> rhs;

  int variable_count() const { return static_cast<int>(objective.size()); }
  int constraint_count() const { return static_cast<int>(rows.size()); }

  int add_variable(double cost, double lb, double ub, VarTag tag = {}) {
    objective.push_back(cost);
    lower.push_back(lb);
    upper.push_back(ub);
    tags.push_back(tag);
    return variable_count() - 1;
  }

  void add_constraint(std::vector<std::pair<int, double>> row, Relation rel,
                      double right) {
    for (const auto& [col, coeff] : row) {
      if (col < 0 || col >= variable_count())
        throw ValidationError("constraint references unknown variable");
      if (!std::isfinite(coeff))
        throw ValidationError("constraint coefficient must be finite");
    }
    std::sort(row.begin(), row.end());
    rows.push_back(std::move(row));
    relations.push_back(rel);
    rhs.push_back(right);
  }

  std::string variable_name(int j) const {
    const VarTag& t = tags[j];
    switch (t.kind) {
      case VarTag::Kind::X: return "x_" + std::to_string(t.a);
      case VarTag::Kind::F:
        return "f_" + std::to_string(t.a) + "_" + std::to_string(t.b);
      case VarTag::Kind::Y: return "y_" + std::to_string(t.a);
      case VarTag::Kind::XHat: return "xh_" + std::to_string(t.a);
      case VarTag::Kind::FHat:
        return "fh_" + std::to_string(t.a) + "_" + std::to_string(t.b);
      case VarTag::Kind::Other: break;
    }
    return "v" + std::to_string(j);
  }

  double row_activity(int i, const std::vector<double>& x) const {
    double acc = 0.0;
    for (const auto& [col, coeff] : rows[i]) acc += coeff * x[col];
    return acc;
  }

  double objective_value(const std::vector<double>& x) const {
    double acc = 0.0;
    for (int j = 0; j < variable_count(); ++j) acc += objective[j] * x[j];
    return acc;
  }

  // Largest violation over all constraints and variable bounds (0 if x is
  // feasible). The workhorse behind "satisfies every constraint within eps"
  // style checks.
  double max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (int j = 0; j < variable_count(); ++j) {
      worst = std::max(worst, lower[j] - x[j]);
      if (upper[j] < kInfinity) worst = std::max(worst, x[j] - upper[j]);
    }
    for (int i = 0; i < constraint_count(); ++i) {
      const double a = row_activity(i, x);
      switch (relations[i]) {
        case Relation::LessEq: worst = std::max(worst, a - rhs[i]); break;
        case Relation::GreaterEq: worst = std::max(worst, rhs[i] - a); break;
        case Relation::Equal: worst = std::max(worst, std::abs(a - rhs[i])); break;
      }
    }
    return worst;
  }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
  }
  return "?";
}

struct SolveStats {
  long iterations = 0;
  long phase1_iterations = 0;
  int refactorizations = 0;
  long degenerate_pivots = 0;
  bool used_bland = false;
  std::vector<double> phase2_objective_trace;
};

struct LpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> values; // structural variables; empty unless optimal
  double objective_value = std::numeric_limits<double>::quiet_NaN();
  SolveStats stats;
};

} // namespace kdst::lp
