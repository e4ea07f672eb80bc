// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace gridplan {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };

struct LpTerm {
  std::size_t var;
  double coef;
  bool operator==(const LpTerm&) const = default;
};

struct LpRow {
  std::string name;
  std::vector<LpTerm> terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
  bool operator==(const LpRow&) const = default;
};

/// A minimization LP: min c'x  s.t.  rows,  lower <= x <= upper.
///
/// Every variable needs at least one finite bound. Lower bounds default to 0.
class LinearProgram {
 public:
  std::size_t add_variable(std::string name, double cost, double lower = 0.0,
                           double upper = kInfinity);
  std::size_t add_row(std::string name, std::vector<LpTerm> terms,
                      Relation relation, double rhs);

  std::size_t num_variables() const { return names_.size(); }
  std::size_t num_rows() const { return rows_.size(); }

  const std::vector<double>& objective() const { return cost_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<std::string>& variable_names() const { return names_; }
  const std::vector<LpRow>& rows() const { return rows_; }

  void set_cost(std::size_t var, double cost) { cost_.at(var) = cost; }
  void set_bounds(std::size_t var, double lower, double upper);
  void set_rhs(std::size_t row, double rhs) { rows_.at(row).rhs = rhs; }

  /// Throws Error(Structural) on dangling indices, non-finite coefficients or
  /// a variable without any finite bound.
  void check_structure() const;

  bool operator==(const LinearProgram&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<LpRow> rows_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus status);

/// Dual convention: `duals[i]` is the derivative of the optimal objective
/// with respect to `rows[i].rhs`. For a minimization this makes duals of
/// `<=` rows nonpositive and duals of `>=` rows nonnegative. Reduced costs
/// are c_j - sum_i duals[i] * a_ij.
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> primal;
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  double objective = 0.0;
  std::size_t iterations = 0;
};

struct LpOptions {
  /// 0 selects 50 * (rows + columns).
  std::size_t max_iterations = 0;
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  /// Pivots between refactorizations of the basis inverse.
  std::size_t refactor_interval = 100;
};

/// Bounded-variable revised simplex, two phases. Deterministic.
LpSolution solve(const LinearProgram& lp, const LpOptions& options = {});

struct LpResidualReport {
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double complementary_slackness = 0.0;
  double duality_gap = 0.0;  ///< relative: |primal - dual| / max(1, |primal|)
  double dual_objective = 0.0;
};

LpResidualReport check_solution(const LinearProgram& lp, const LpSolution& solution);

/// Fixed-field MPS. Names are replaced by positional codes; a comment block
/// maps codes back to the model names.
void write_mps(std::ostream& out, const LinearProgram& lp, const std::string& name = "GRIDPLAN");

}  // namespace gridplan
