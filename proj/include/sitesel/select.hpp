#pragma once

#include <utility>
#include <vector>

#include "sitesel/types.hpp"

namespace sitesel::select {

/// Shared core: choose K columns minimizing the worst case over scenario row
/// marginals of the exact transport cost into the uniform selected marginal.
/// With a single scenario equal to the population this is the site-selection
/// MILP; with several it is the cutting-plane master problem.
struct MinimaxOptions {
    double tie_tol = 1e-9;  // candidates within this of the incumbent stay alive
    bool force_enumeration = false;  // evaluate every subset, no pruning
    long max_nodes = 200'000'000;
};

struct MinimaxSolution {
    std::vector<int> indices;       // sorted ascending
    double value_power = 0.0;       // max over scenarios, p-power units
    double root_bound_power = 0.0;  // root LP relaxation, p-power units
    std::vector<double> root_scores;  // fractional indicator per candidate
    long nodes = 0;
    long pivots = 0;
    bool optimal = false;
};

MinimaxSolution minimize_worstcase_selection(
    const Matrix& cost_power, const std::vector<std::vector<double>>& scenarios, int k,
    const MinimaxOptions& options = {});

/// Exact transport cost (p-power units) from `weights` into the uniform
/// distribution on `selection` columns of `cost_power`.
double selection_value_power(const Matrix& cost_power, const std::vector<double>& weights,
                             const std::vector<int>& selection);

/// Chooses K sites minimizing W_p between the uniform population distribution
/// and the uniform selected distribution.
std::pair<Selection, SolveReport> select_sites(const SiteTable& table, int k, int p,
                                               SolveMode mode = SolveMode::Auto);

/// Exhaustive subset enumeration; refuses when C(n, K) exceeds 1e6.
Selection enumerate_oracle(const SiteTable& table, int k, int p);

/// Continuous relaxation of the selection MILP: returns per-site fractional
/// scores and the top-K rounding, whose objective is recomputed exactly.
std::pair<std::vector<double>, Selection> lp_relax_and_round(const SiteTable& table,
                                                             int k, int p);

double binomial(int n, int k);

}  // namespace sitesel::select
