#pragma once

#include <vector>

#include "sitesel/types.hpp"

namespace sitesel {

/// Basic cells of a transportation basis (spanning tree), reusable as a warm
/// start when the marginals are unchanged.
using TransportBasis = std::vector<std::pair<int, int>>;

/// Raw solution of a balanced transportation LP.
struct TransportLpSolution {
    double cost = 0.0;               // sum of flow * cost over all cells
    std::vector<PlanTriplet> flows;  // strictly positive flows, row-major order
    std::vector<double> row_duals;   // u_i with u_0 = 0
    std::vector<double> col_duals;   // v_j
    TransportBasis basis;            // all basic cells, including degenerate ones
    long pivots = 0;
};

/// Exact solver for  min sum c_ij x_ij  s.t. row sums = supply, col sums =
/// demand, x >= 0.  Supplies and demands must balance within 1e-9 (demands are
/// rescaled to balance exactly).  Deterministic: fixed pivot and tie rules.
/// A warm basis from a previous solve with the same marginals skips the
/// northwest-corner phase.
TransportLpSolution solve_transport_lp(const Matrix& cost,
                                       const std::vector<double>& supply,
                                       const std::vector<double>& demand,
                                       const TransportBasis* warm = nullptr);

/// Relaxed/partially fixed site-selection LP.
///
/// Minimizes transport cost from `supply` (over all n points) into columns
/// drawn from `fixed_in` plus `free_cols`, where each column used receives
/// mass at most 1/K, columns in `fixed_in` receive exactly 1/K, and the total
/// selected-column mass is 1.  This is the LP relaxation of the selection
/// MILP at a branch-and-bound node (the pi <= s coupling is implied).
struct CapacitatedLpSolution {
    double cost = 0.0;                 // real transport cost, p-power units
    std::vector<double> column_mass;   // mass received per candidate column (size n)
    std::vector<double> cell_flow;     // dense rows x candidates flows (dummy excluded)
    long pivots = 0;
    bool feasible = true;
};

CapacitatedLpSolution solve_selection_relaxation(const Matrix& cost,
                                                 const std::vector<double>& supply,
                                                 const std::vector<int>& fixed_in,
                                                 const std::vector<int>& free_cols,
                                                 int k, TransportBasis* warm = nullptr);

}  // namespace sitesel
