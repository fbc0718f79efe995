#pragma once

#include "sitesel/types.hpp"

namespace sitesel::ot {

/// Euclidean distance between rows i of a and j of b.
double point_distance(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j);

/// Cost matrix with entries ||a_i - b_j||^p, p in {1,2}.
CostMatrix pairwise_costs(const Matrix& a, const Matrix& b, int p);

/// Costs between all pairs of sites in a table.
CostMatrix table_costs(const SiteTable& table, int p);

/// Exact optimal coupling between a and b under the given cost matrix.
/// Cost dimensions must be |a.support| x |b.support|; plan triplets are
/// reported in row-major sorted order with strictly positive mass.
TransportPlan solve_transport(const CostMatrix& cost, const DiscreteDistribution& a,
                              const DiscreteDistribution& b);

/// p-Wasserstein distance between two distributions over the same table.
double wasserstein(const DiscreteDistribution& a, const DiscreteDistribution& b,
                   const SiteTable& table, int p);

/// p-Wasserstein distance when a and b live on different tables (same d).
double wasserstein(const DiscreteDistribution& a, const SiteTable& table_a,
                   const DiscreteDistribution& b, const SiteTable& table_b, int p);

/// Minimum transport cost in p-power units (no root).
double transport_cost(const DiscreteDistribution& a, const DiscreteDistribution& b,
                      const SiteTable& table, int p);

/// True when the two weighted supports coincide after canonicalization.
bool same_distribution(const DiscreteDistribution& a, const DiscreteDistribution& b);

}  // namespace sitesel::ot
