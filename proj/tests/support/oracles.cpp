// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace gridplan::testing {

namespace {

struct Halfspace {
  std::vector<double> a;
  double b;  // a x <= b, or a x == b when `equality`
  bool equality;
};

// Calls `visit` with every k-subset of {0..n-1} in lexicographic order.
template <typename F>
void for_each_subset(std::size_t n, std::size_t k, F&& visit) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    visit(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::optional<VertexOptimum> vertex_enumeration(const LinearProgram& lp, double tol) {
  const std::size_t n = lp.num_variables();
  std::vector<Halfspace> eqs, ineqs;
  for (const auto& row : lp.rows()) {
    std::vector<double> a(n, 0.0);
    for (const auto& t : row.terms) a[t.var] += t.coef;
    switch (row.relation) {
      case Relation::Equal: eqs.push_back({a, row.rhs, true}); break;
      case Relation::LessEqual: ineqs.push_back({a, row.rhs, false}); break;
      case Relation::GreaterEqual: {
        for (auto& v : a) v = -v;
        ineqs.push_back({a, -row.rhs, false});
        break;
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    if (std::isfinite(lp.upper()[j])) ineqs.push_back({e, lp.upper()[j], false});
    e[j] = -1.0;
    if (std::isfinite(lp.lower()[j])) ineqs.push_back({e, -lp.lower()[j], false});
  }

  std::optional<VertexOptimum> best;

  auto feasible = [&](const Eigen::VectorXd& x) {
    for (const auto* set : {&eqs, &ineqs}) {
      for (const auto& h : *set) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += h.a[j] * x[Eigen::Index(j)];
        const double viol = h.equality ? std::abs(s - h.b) : s - h.b;
        if (viol > tol * std::max(1.0, std::abs(h.b))) return false;
      }
    }
    return true;
  };

  // Any vertex is the unique solution of n linearly independent active
  // constraints. Equalities go into the candidate pool like everything else
  // (redundant ones would otherwise make the forced choice singular); the
  // feasibility check enforces all of them.
  std::vector<const Halfspace*> pool;
  for (const auto& h : eqs) pool.push_back(&h);
  for (const auto& h : ineqs) pool.push_back(&h);

  for_each_subset(pool.size(), n, [&](const std::vector<std::size_t>& pick) {
    Eigen::MatrixXd A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::VectorXd b(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < n; ++j) A(Eigen::Index(r), Eigen::Index(j)) = pool[pick[r]]->a[j];
      b[Eigen::Index(r)] = pool[pick[r]]->b;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.rank() < Eigen::Index(n)) return;
    const Eigen::VectorXd x = lu.solve(b);
    if (!feasible(x)) return;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp.objective()[j] * x[Eigen::Index(j)];
    if (!best || obj < best->objective) best = VertexOptimum{obj, std::vector<double>(x.data(), x.data() + n)};
  });
  return best;
}

LinearProgram random_boxed_lp(std::uint64_t seed, std::size_t max_vars, std::size_t max_rows) {
  std::mt19937_64 rng(seed);
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const std::size_t n = std::size_t(uniform_int(1, int(max_vars)));
  const std::size_t m = std::size_t(uniform_int(1, int(max_rows)));
  LinearProgram lp;
  std::vector<double> anchor(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = uniform_int(0, 3) == 0 ? -double(uniform_int(1, 4)) : 0.0;
    const double up = lo + double(uniform_int(1, 10));
    lp.add_variable("x" + std::to_string(j), double(uniform_int(-10, 10)), lo, up);
    anchor[j] = lo + (up - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  }
  const bool aim_feasible = uniform_int(0, 4) != 0;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<LpTerm> terms;
    double at_anchor = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (uniform_int(0, 2) == 0) continue;
      const double c = double(uniform_int(-5, 5));
      if (c == 0.0) continue;
      terms.push_back({j, c});
      at_anchor += c * anchor[j];
    }
    const int kind = uniform_int(0, 5);
    const Relation rel = kind == 0 ? Relation::Equal : kind <= 3 ? Relation::LessEqual : Relation::GreaterEqual;
    double rhs;
    if (aim_feasible) {
      const double slack = double(uniform_int(0, 6));
      rhs = rel == Relation::Equal ? at_anchor : rel == Relation::LessEqual ? at_anchor + slack : at_anchor - slack;
    } else {
      rhs = double(uniform_int(-30, 30));
    }
    lp.add_row("r" + std::to_string(i), std::move(terms), rel, rhs);
  }
  return lp;
}

double two_region_recourse(const TwoRegionCase& c, std::size_t s, double plan) {
  const double da = c.demand_a[s], db = c.demand_b[s];
  const double max_flow = std::min(plan, c.link_capacity);
  const double gen_max = std::min(c.rated, c.available);
  double best = std::numeric_limits<double>::infinity();
  auto eval = [&](double a) {
    // With shortage dearer than generation, produce as much of A's need as possible.
    const double need_a = da + a;
    const double prod = std::min(gen_max, need_a);
    const double p = c.gen_cost < c.shortage_cost ? prod : 0.0;
    const double short_a = std::max(0.0, need_a - p);
    const double short_b = std::max(0.0, db - a);
    return c.gen_cost * p + c.shortage_cost * (short_a + short_b) + c.penalty * (plan - a);
  };
  for (double a = 0.0; a < max_flow; a += 0.5) best = std::min(best, eval(a));
  best = std::min(best, eval(max_flow));
  return best;
}

GridOptimum two_region_grid_oracle(const TwoRegionCase& c) {
  GridOptimum best{std::numeric_limits<double>::infinity(), 0.0};
  auto total = [&](double x) {
    double v = c.transfer_cost * x;
    for (std::size_t s = 0; s < c.probability.size(); ++s) v += c.probability[s] * two_region_recourse(c, s, x);
    return v;
  };
  for (double x = 0.0; x <= c.link_capacity + 1e-12; x += 0.5) {
    const double v = total(x);
    if (v < best.objective - 1e-12) best = {v, x};
  }
  return best;
}

}  // namespace gridplan::testing
