// SPDX-License-Identifier: Apache-2.0
//
// Bounded-variable revised simplex. The basis inverse is kept dense and
// updated with rank-one eta steps between periodic refactorizations, which is
// plenty at the sizes the planning models reach (a few thousand rows).

#include "gridplan/lp.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridplan/error.hpp"

namespace gridplan {

std::size_t LinearProgram::add_variable(std::string name, double cost, double lower,
                                        double upper) {
  names_.push_back(std::move(name));
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return names_.size() - 1;
}

std::size_t LinearProgram::add_row(std::string name, std::vector<LpTerm> terms,
                                   Relation relation, double rhs) {
  rows_.push_back(LpRow{std::move(name), std::move(terms), relation, rhs});
  return rows_.size() - 1;
}

void LinearProgram::set_bounds(std::size_t var, double lower, double upper) {
  lower_.at(var) = lower;
  upper_.at(var) = upper;
}

void LinearProgram::check_structure() const {
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (!std::isfinite(cost_[j]))
      fail(ErrorKind::Structural, "non-finite objective coefficient on " + names_[j]);
    if (std::isnan(lower_[j]) || std::isnan(upper_[j]))
      fail(ErrorKind::Structural, "NaN bound on " + names_[j]);
    if (!std::isfinite(lower_[j]) && !std::isfinite(upper_[j]))
      fail(ErrorKind::Structural, "free variable not supported: " + names_[j]);
    if (lower_[j] > upper_[j])
      fail(ErrorKind::Structural, "empty bound interval on " + names_[j]);
  }
  for (const auto& row : rows_) {
    if (!std::isfinite(row.rhs))
      fail(ErrorKind::Structural, "non-finite right-hand side on row " + row.name);
    for (const auto& t : row.terms) {
      if (t.var >= names_.size())
        fail(ErrorKind::Structural, "row " + row.name + " references undeclared variable");
      if (!std::isfinite(t.coef))
        fail(ErrorKind::Structural, "non-finite coefficient on row " + row.name);
    }
  }
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

enum class VarState : unsigned char { Basic, AtLower, AtUpper };

struct Entry {
  std::size_t row;
  double coef;
};

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const LpOptions& options)
      : lp_(lp), opt_(options), m_(lp.num_rows()), n_(lp.num_variables()) {
    max_iter_ = opt_.max_iterations ? opt_.max_iterations : 50 * (m_ + n_);
    build_columns();
  }

  LpSolution run() {
    LpSolution out;
    crash_basis();

    // Phase 1 only when artificials were needed.
    if (num_columns() > n_ + m_) {
      std::vector<double> phase1(num_columns(), 0.0);
      for (std::size_t j = n_ + m_; j < num_columns(); ++j) phase1[j] = 1.0;
      const auto status = iterate(phase1);
      if (status == LpStatus::IterationLimit) return finish(out, status);
      double infeasibility = 0.0;
      for (std::size_t j = n_ + m_; j < num_columns(); ++j) infeasibility += x_[j];
      double scale = 1.0;
      for (const auto& row : lp_.rows()) scale = std::max(scale, std::abs(row.rhs));
      if (infeasibility > 1e-6 * scale) return finish(out, LpStatus::Infeasible);
      retire_artificials();
    }

    std::vector<double> phase2(num_columns(), 0.0);
    std::copy(lp_.objective().begin(), lp_.objective().end(), phase2.begin());
    const auto status = iterate(phase2);
    return finish(out, status, &phase2);
  }

 private:
  std::size_t num_columns() const { return cols_.size(); }

  void build_columns() {
    cols_.assign(n_ + m_, {});
    lo_.assign(n_ + m_, 0.0);
    up_.assign(n_ + m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = lp_.rows()[i];
      for (const auto& t : row.terms)
        if (t.coef != 0.0) cols_[t.var].push_back({i, t.coef});
      b_.push_back(row.rhs);
      // Logical s_i with a_i x + s_i = b_i.
      cols_[n_ + i].push_back({i, 1.0});
      switch (row.relation) {
        case Relation::LessEqual: lo_[n_ + i] = 0.0; up_[n_ + i] = kInfinity; break;
        case Relation::GreaterEqual: lo_[n_ + i] = -kInfinity; up_[n_ + i] = 0.0; break;
        case Relation::Equal: lo_[n_ + i] = 0.0; up_[n_ + i] = 0.0; break;
      }
    }
    for (std::size_t j = 0; j < n_; ++j) {
      std::sort(cols_[j].begin(), cols_[j].end(),
                [](const Entry& a, const Entry& b) { return a.row < b.row; });
      // merge duplicate row references
      std::vector<Entry> merged;
      for (const auto& e : cols_[j]) {
        if (!merged.empty() && merged.back().row == e.row) merged.back().coef += e.coef;
        else merged.push_back(e);
      }
      cols_[j] = std::move(merged);
      lo_[j] = lp_.lower()[j];
      up_[j] = lp_.upper()[j];
    }
  }

  static double finite_bound(double lo, double up) { return std::isfinite(lo) ? lo : up; }

  void crash_basis() {
    const std::size_t total = n_ + m_;
    state_.assign(total, VarState::AtLower);
    x_.assign(total, 0.0);
    for (std::size_t j = 0; j < total; ++j) {
      x_[j] = finite_bound(lo_[j], up_[j]);
      state_[j] = std::isfinite(lo_[j]) ? VarState::AtLower : VarState::AtUpper;
    }
    std::vector<double> residual = b_;
    for (std::size_t j = 0; j < n_; ++j)
      for (const auto& e : cols_[j]) residual[e.row] -= e.coef * x_[j];

    head_.assign(m_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t s = n_ + i;
      const double r = residual[i];
      if (r >= lo_[s] && r <= up_[s]) {
        head_[i] = s;
        state_[s] = VarState::Basic;
        x_[s] = r;
        continue;
      }
      // Logical stays at its finite bound (0); an artificial carries |r|.
      const std::size_t a = cols_.size();
      cols_.push_back({{i, r >= 0.0 ? 1.0 : -1.0}});
      lo_.push_back(0.0);
      up_.push_back(kInfinity);
      state_.push_back(VarState::Basic);
      x_.push_back(std::abs(r));
      head_[i] = a;
    }
    refactor();
  }

  void refactor() {
    if (m_ == 0) return;
    // Bases here are very sparse (mostly unit logical columns), so a sparse
    // LU followed by m triangular solves beats a dense inversion by far.
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t i = 0; i < m_; ++i)
      for (const auto& e : cols_[head_[i]])
        triplets.emplace_back(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(i), e.coef);
    const auto m = static_cast<Eigen::Index>(m_);
    Eigen::SparseMatrix<double> basis(m, m);
    basis.setFromTriplets(triplets.begin(), triplets.end());
    basis.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(basis);
    if (lu.info() == Eigen::Success) {
      binv_ = lu.solve(Eigen::MatrixXd::Identity(m, m));
    } else {
      binv_ = Eigen::MatrixXd(basis).partialPivLu().inverse();
    }
    since_refactor_ = 0;
    recompute_basic_values();
  }

  void recompute_basic_values() {
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b_.data(),
                                                            static_cast<Eigen::Index>(m_));
    for (std::size_t j = 0; j < num_columns(); ++j) {
      if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
      for (const auto& e : cols_[j]) rhs[static_cast<Eigen::Index>(e.row)] -= e.coef * x_[j];
    }
    const Eigen::VectorXd xb = binv_ * rhs;
    for (std::size_t i = 0; i < m_; ++i) x_[head_[i]] = xb[static_cast<Eigen::Index>(i)];
  }

  Eigen::VectorXd compute_duals(const std::vector<double>& cost) const {
    Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
    for (std::size_t i = 0; i < m_; ++i) cb[static_cast<Eigen::Index>(i)] = cost[head_[i]];
    return binv_.transpose() * cb;
  }

  double reduced_cost(std::size_t j, const std::vector<double>& cost,
                      const Eigen::VectorXd& y) const {
    double d = cost[j];
    for (const auto& e : cols_[j]) d -= y[static_cast<Eigen::Index>(e.row)] * e.coef;
    return d;
  }

  // Returns the entering column or npos.
  std::size_t price(const std::vector<double>& cost, const Eigen::VectorXd& y,
                    bool bland) const {
    std::size_t best = npos;
    double best_score = 0.0;
    for (std::size_t j = 0; j < num_columns(); ++j) {
      if (state_[j] == VarState::Basic || lo_[j] == up_[j]) continue;
      const double d = reduced_cost(j, cost, y);
      double score = 0.0;
      if (state_[j] == VarState::AtLower && d < -opt_.optimality_tol) score = -d;
      else if (state_[j] == VarState::AtUpper && d > opt_.optimality_tol) score = d;
      else continue;
      if (bland) return j;
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  LpStatus iterate(const std::vector<double>& cost) {
    std::size_t degenerate_streak = 0;
    const std::size_t bland_after = std::max<std::size_t>(3 * m_, 3);
    bool fresh = true;
    for (;;) {
      if (since_refactor_ >= opt_.refactor_interval) refactor(), fresh = true;
      const Eigen::VectorXd y = compute_duals(cost);
      const bool bland = degenerate_streak >= bland_after;
      const std::size_t q = price(cost, y, bland);
      if (q == npos) {
        if (!fresh) {
          // Confirm optimality on a fresh factorization.
          refactor();
          fresh = true;
          continue;
        }
        return LpStatus::Optimal;
      }
      if (iterations_ >= max_iter_) return LpStatus::IterationLimit;
      ++iterations_;
      fresh = false;

      Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
      for (const auto& e : cols_[q])
        alpha += e.coef * binv_.col(static_cast<Eigen::Index>(e.row));
      const double dir = state_[q] == VarState::AtLower ? 1.0 : -1.0;

      // Two-pass (Harris) ratio test over the basic variables.
      constexpr double kPivotTol = 1e-9;
      const double harris_tol = 1e-9;
      double relaxed = kInfinity;
      for (std::size_t i = 0; i < m_; ++i) {
        const double delta = -dir * alpha[static_cast<Eigen::Index>(i)];
        const std::size_t k = head_[i];
        if (delta < -kPivotTol && std::isfinite(lo_[k]))
          relaxed = std::min(relaxed, std::max(0.0, (x_[k] - lo_[k] + harris_tol) / -delta));
        else if (delta > kPivotTol && std::isfinite(up_[k]))
          relaxed = std::min(relaxed, std::max(0.0, (up_[k] - x_[k] + harris_tol) / delta));
      }
      const double flip = up_[q] - lo_[q];
      std::size_t leave = npos;
      double step = kInfinity;
      double best_pivot = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double delta = -dir * alpha[static_cast<Eigen::Index>(i)];
        const std::size_t k = head_[i];
        double t = kInfinity;
        if (delta < -kPivotTol && std::isfinite(lo_[k])) t = (x_[k] - lo_[k]) / -delta;
        else if (delta > kPivotTol && std::isfinite(up_[k])) t = (up_[k] - x_[k]) / delta;
        else continue;
        t = std::max(t, 0.0);
        if (t > relaxed) continue;
        const double piv = std::abs(delta);
        bool take = false;
        if (leave == npos) take = true;
        else if (bland) take = t < step - 1e-12 || (t <= step + 1e-12 && k < head_[leave]);
        else take = piv > best_pivot;
        if (take) {
          leave = i;
          step = t;
          best_pivot = piv;
        }
      }

      if (flip <= step || (leave == npos && std::isfinite(flip))) {
        if (!std::isfinite(flip)) return LpStatus::Unbounded;
        // Bound flip: the entering variable crosses to its other bound.
        for (std::size_t i = 0; i < m_; ++i)
          x_[head_[i]] -= dir * alpha[static_cast<Eigen::Index>(i)] * flip;
        state_[q] = state_[q] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
        x_[q] = state_[q] == VarState::AtLower ? lo_[q] : up_[q];
        degenerate_streak = flip > 1e-12 ? 0 : degenerate_streak + 1;
        continue;
      }
      if (leave == npos) return LpStatus::Unbounded;

      for (std::size_t i = 0; i < m_; ++i)
        x_[head_[i]] -= dir * alpha[static_cast<Eigen::Index>(i)] * step;
      x_[q] += dir * step;
      const std::size_t out = head_[leave];
      const double delta_out = -dir * alpha[static_cast<Eigen::Index>(leave)];
      if (delta_out < 0.0) {
        state_[out] = VarState::AtLower;
        x_[out] = lo_[out];
      } else {
        state_[out] = VarState::AtUpper;
        x_[out] = up_[out];
      }
      state_[q] = VarState::Basic;
      head_[leave] = q;
      pivot_inverse(leave, alpha);
      degenerate_streak = step > 1e-12 ? 0 : degenerate_streak + 1;
    }
  }

  void pivot_inverse(std::size_t r, const Eigen::VectorXd& alpha) {
    const auto ri = static_cast<Eigen::Index>(r);
    const Eigen::RowVectorXd pivot_row = binv_.row(ri) / alpha[ri];
    binv_.noalias() -= alpha * pivot_row;
    binv_.row(ri) = pivot_row;
    ++since_refactor_;
  }

  // After phase 1: pivot zero-valued artificials out where possible and pin
  // every artificial to zero.
  void retire_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (head_[i] < n_ + m_) continue;
      const Eigen::RowVectorXd row = binv_.row(static_cast<Eigen::Index>(i));
      std::size_t best = npos;
      double best_abs = 1e-7;
      Eigen::VectorXd best_alpha;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (state_[j] == VarState::Basic) continue;
        double a = 0.0;
        for (const auto& e : cols_[j]) a += row[static_cast<Eigen::Index>(e.row)] * e.coef;
        if (std::abs(a) > best_abs) {
          best_abs = std::abs(a);
          best = j;
        }
      }
      if (best == npos) continue;  // redundant row; artificial stays basic at zero
      Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
      for (const auto& e : cols_[best])
        alpha += e.coef * binv_.col(static_cast<Eigen::Index>(e.row));
      const std::size_t out = head_[i];
      state_[out] = VarState::AtLower;
      x_[out] = 0.0;
      state_[best] = VarState::Basic;
      head_[i] = best;
      pivot_inverse(i, alpha);
    }
    for (std::size_t j = n_ + m_; j < num_columns(); ++j) up_[j] = 0.0;
    refactor();
  }

  LpSolution& finish(LpSolution& out, LpStatus status,
                     const std::vector<double>* cost = nullptr) {
    out.status = status;
    out.iterations = iterations_;
    if (status != LpStatus::Optimal || cost == nullptr) return out;
    if (since_refactor_ > 0) refactor();
    const Eigen::VectorXd y = compute_duals(*cost);
    out.primal.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    out.duals.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) out.duals[i] = y[static_cast<Eigen::Index>(i)];
    out.reduced_costs.resize(n_);
    out.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      out.reduced_costs[j] = reduced_cost(j, *cost, y);
      out.objective += lp_.objective()[j] * out.primal[j];
    }
    return out;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  const LinearProgram& lp_;
  LpOptions opt_;
  std::size_t m_;
  std::size_t n_;
  std::size_t max_iter_ = 0;
  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;

  std::vector<std::vector<Entry>> cols_;
  std::vector<double> lo_, up_, b_, x_;
  std::vector<VarState> state_;
  std::vector<std::size_t> head_;
  Eigen::MatrixXd binv_;
};

}  // namespace

LpSolution solve(const LinearProgram& lp, const LpOptions& options) {
  lp.check_structure();
  return Simplex(lp, options).run();
}

LpResidualReport check_solution(const LinearProgram& lp, const LpSolution& sol) {
  LpResidualReport rep;
  const std::size_t n = lp.num_variables();
  const auto& rows = lp.rows();
  if (sol.primal.size() != n || sol.duals.size() != rows.size())
    fail(ErrorKind::Structural, "solution does not match the LP dimensions");

  std::vector<double> reduced(lp.objective());
  double primal_obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    primal_obj += lp.objective()[j] * sol.primal[j];
    const double x = sol.primal[j];
    rep.primal_residual = std::max({rep.primal_residual, lp.lower()[j] - x, x - lp.upper()[j]});
  }
  const double scale = std::max(1.0, std::abs(primal_obj));

  double dual_obj = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    double activity = 0.0;
    for (const auto& t : row.terms) {
      activity += t.coef * sol.primal[t.var];
      reduced[t.var] -= sol.duals[i] * t.coef;
    }
    const double slack = row.rhs - activity;  // >= 0 for <= rows
    const double rscale = std::max(1.0, std::abs(row.rhs));
    const double y = sol.duals[i];
    double viol = 0.0;
    switch (row.relation) {
      case Relation::LessEqual:
        viol = std::max(0.0, -slack);
        rep.dual_residual = std::max(rep.dual_residual, y);
        break;
      case Relation::GreaterEqual:
        viol = std::max(0.0, slack);
        rep.dual_residual = std::max(rep.dual_residual, -y);
        break;
      case Relation::Equal: viol = std::abs(slack); break;
    }
    rep.primal_residual = std::max(rep.primal_residual, viol / rscale);
    if (row.relation != Relation::Equal)
      rep.complementary_slackness = std::max(rep.complementary_slackness, std::abs(y * slack) / scale);
    dual_obj += y * row.rhs;
  }

  for (std::size_t j = 0; j < n; ++j) {
    const double d = reduced[j];
    const double lo = lp.lower()[j];
    const double up = lp.upper()[j];
    const double x = sol.primal[j];
    if (d >= 0.0) {
      if (std::isfinite(lo)) {
        dual_obj += d * lo;
        rep.complementary_slackness = std::max(rep.complementary_slackness, d * (x - lo) / scale);
      } else {
        rep.dual_residual = std::max(rep.dual_residual, d);
      }
    } else {
      if (std::isfinite(up)) {
        dual_obj += d * up;
        rep.complementary_slackness = std::max(rep.complementary_slackness, -d * (up - x) / scale);
      } else {
        rep.dual_residual = std::max(rep.dual_residual, -d);
      }
    }
  }
  rep.dual_objective = dual_obj;
  rep.duality_gap = std::abs(primal_obj - dual_obj) / scale;
  return rep;
}

}  // namespace gridplan
