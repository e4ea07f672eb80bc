// SPDX-License-Identifier: Apache-2.0
//
// Brute-force reference solvers. They share no code with the library's
// simplex and are only fit for tiny problems.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridplan/lp.hpp"

namespace gridplan::testing {

struct VertexOptimum {
  double objective = 0.0;
  std::vector<double> x;
};

/// Minimum of the objective over all basic feasible points. Assumes the
/// feasible set is bounded (every variable needs finite bounds); returns
/// nullopt when no vertex is feasible.
std::optional<VertexOptimum> vertex_enumeration(const LinearProgram& lp, double tol = 1e-7);

/// Random LP with every variable boxed, so the oracle above applies.
/// Roughly one in five is infeasible.
LinearProgram random_boxed_lp(std::uint64_t seed, std::size_t max_vars = 7, std::size_t max_rows = 6);

/// Two regions A and B, one generator at A and one link A->B; scenarios vary
/// the demand. The parameters of the hand-checkable instance are the defaults.
struct TwoRegionCase {
  double rated = 100, available = 100, gen_cost = 50;
  double link_capacity = 60, transfer_cost = 10, penalty = 5;
  double shortage_cost = 1000;
  std::vector<double> demand_a{40, 40};
  std::vector<double> demand_b{30, 50};
  std::vector<double> probability{0.5, 0.5};
};

/// Scenario cost at a fixed plan by enumerating the actual flow on a 0.5 MWh
/// grid (all breakpoints are integers for integer data).
double two_region_recourse(const TwoRegionCase& c, std::size_t scenario, double plan);

struct GridOptimum {
  double objective = 0.0;
  double plan = 0.0;
};

/// Minimum of transfer_cost * x + expected recourse over x on a 0.5 MWh grid.
GridOptimum two_region_grid_oracle(const TwoRegionCase& c);

}  // namespace gridplan::testing
