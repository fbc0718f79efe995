#include "sitesel/ot.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sitesel/transport_lp.hpp"

namespace sitesel {

void SiteTable::validate() const {
    if (x.rows == 0 || x.cols == 0) throw InputError("site table must be non-empty");
    if (ids.size() != x.rows) throw InputError("site table ids are not aligned with rows");
    for (double v : x.data)
        if (!std::isfinite(v)) throw InputError("site table contains non-finite covariates");
    std::vector<std::string> sorted_ids = ids;
    std::sort(sorted_ids.begin(), sorted_ids.end());
    if (std::adjacent_find(sorted_ids.begin(), sorted_ids.end()) != sorted_ids.end())
        throw InputError("site table ids must be pairwise distinct");
}

SiteTable SiteTable::from_points(Matrix pts) {
    SiteTable t;
    t.ids.reserve(pts.rows);
    for (std::size_t i = 0; i < pts.rows; ++i) t.ids.push_back(std::to_string(i));
    t.x = std::move(pts);
    t.validate();
    return t;
}

void DiscreteDistribution::validate(std::size_t table_size) const {
    if (support.size() != weights.size())
        throw InputError("distribution support and weights differ in length");
    if (support.empty()) throw InputError("distribution must have at least one atom");
    double sum = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] < 0 || static_cast<std::size_t>(support[i]) >= table_size)
            throw InputError("distribution support index out of range");
        if (!(weights[i] >= 0.0)) throw InputError("distribution weights must be nonnegative");
        sum += weights[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InputError("distribution weights must sum to 1");
    std::vector<int> s = support;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
        throw InputError("distribution support indices must be distinct");
}

DiscreteDistribution DiscreteDistribution::canonical() const {
    std::vector<std::size_t> order(support.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
    DiscreteDistribution out;
    for (std::size_t k : order) {
        if (weights[k] <= 0.0) continue;
        out.support.push_back(support[k]);
        out.weights.push_back(weights[k]);
    }
    return out;
}

DiscreteDistribution DiscreteDistribution::uniform(std::size_t n) {
    DiscreteDistribution d;
    d.support.resize(n);
    std::iota(d.support.begin(), d.support.end(), 0);
    d.weights.assign(n, 1.0 / static_cast<double>(n));
    return d;
}

DiscreteDistribution DiscreteDistribution::uniform_on(const std::vector<int>& indices) {
    DiscreteDistribution d;
    d.support = indices;
    std::sort(d.support.begin(), d.support.end());
    d.weights.assign(d.support.size(), 1.0 / static_cast<double>(d.support.size()));
    return d;
}

std::string to_string(SolveMode mode) {
    switch (mode) {
        case SolveMode::Exact: return "exact";
        case SolveMode::Relaxed: return "relaxed+rounded";
        case SolveMode::Enumeration: return "enumeration";
        case SolveMode::Auto: return "auto";
    }
    return "?";
}

}  // namespace sitesel

namespace sitesel::ot {

double point_distance(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.cols; ++k) {
        double d = a(i, k) - b(j, k);
        s += d * d;
    }
    return std::sqrt(s);
}

CostMatrix pairwise_costs(const Matrix& a, const Matrix& b, int p) {
    if (a.rows == 0 || b.rows == 0) throw InputError("pairwise_costs: empty point set");
    if (a.cols != b.cols) throw InputError("pairwise_costs: dimension mismatch");
    if (p != 1 && p != 2) throw InputError("pairwise_costs: p must be 1 or 2");
    for (double v : a.data)
        if (!std::isfinite(v)) throw InputError("pairwise_costs: non-finite coordinate");
    for (double v : b.data)
        if (!std::isfinite(v)) throw InputError("pairwise_costs: non-finite coordinate");
    CostMatrix c;
    c.p = p;
    c.entries = Matrix(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < b.rows; ++j) {
            double d = point_distance(a, i, b, j);
            c.entries(i, j) = p == 1 ? d : d * d;
        }
    }
    return c;
}

CostMatrix table_costs(const SiteTable& table, int p) {
    return pairwise_costs(table.x, table.x, p);
}

bool same_distribution(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    DiscreteDistribution ca = a.canonical(), cb = b.canonical();
    if (ca.support != cb.support) return false;
    for (std::size_t i = 0; i < ca.weights.size(); ++i)
        if (std::abs(ca.weights[i] - cb.weights[i]) > 1e-12) return false;
    return true;
}

TransportPlan solve_transport(const CostMatrix& cost, const DiscreteDistribution& a,
                              const DiscreteDistribution& b) {
    DiscreteDistribution ca = a.canonical(), cb = b.canonical();
    if (ca.support.empty() || cb.support.empty())
        throw InputError("solve_transport: empty distribution");
    double sa = std::accumulate(ca.weights.begin(), ca.weights.end(), 0.0);
    double sb = std::accumulate(cb.weights.begin(), cb.weights.end(), 0.0);
    if (std::abs(sa - sb) > 1e-9)
        throw InputError("solve_transport: marginal totals differ by more than 1e-9");
    if (cost.entries.rows != a.size() || cost.entries.cols != b.size())
        throw InputError("solve_transport: cost dimensions do not match marginals");

    TransportPlan plan;
    plan.row_marginal = ca;
    plan.col_marginal = cb;

    // Map canonical atoms back to positions in the caller's cost matrix.
    auto position = [](const DiscreteDistribution& orig, int site) {
        for (std::size_t k = 0; k < orig.support.size(); ++k)
            if (orig.support[k] == site) return k;
        return orig.support.size();
    };
    Matrix sub(ca.size(), cb.size());
    for (std::size_t i = 0; i < ca.size(); ++i)
        for (std::size_t j = 0; j < cb.size(); ++j)
            sub(i, j) = cost.entries(position(a, ca.support[i]), position(b, cb.support[j]));

    // Self-transport needs no solve: identity coupling, cost zero.
    if (ca.support == cb.support) {
        bool identity = true;
        for (std::size_t i = 0; i < ca.size() && identity; ++i)
            identity = std::abs(ca.weights[i] - cb.weights[i]) <= 1e-12 && sub(i, i) == 0.0;
        if (identity) {
            for (std::size_t i = 0; i < ca.size(); ++i)
                plan.triplets.push_back(
                    {static_cast<int>(i), static_cast<int>(i), ca.weights[i]});
            plan.cost = 0.0;
            return plan;
        }
    }

    TransportLpSolution lp = solve_transport_lp(sub, ca.weights, cb.weights);
    plan.cost = lp.cost;
    plan.triplets = std::move(lp.flows);
    return plan;
}

double transport_cost(const DiscreteDistribution& a, const DiscreteDistribution& b,
                      const SiteTable& table, int p) {
    if (same_distribution(a, b)) return 0.0;
    DiscreteDistribution ca = a.canonical(), cb = b.canonical();
    Matrix pa(ca.size(), table.dim()), pb(cb.size(), table.dim());
    for (std::size_t i = 0; i < ca.size(); ++i)
        for (std::size_t k = 0; k < table.dim(); ++k)
            pa(i, k) = table.x(static_cast<std::size_t>(ca.support[i]), k);
    for (std::size_t j = 0; j < cb.size(); ++j)
        for (std::size_t k = 0; k < table.dim(); ++k)
            pb(j, k) = table.x(static_cast<std::size_t>(cb.support[j]), k);
    CostMatrix c = pairwise_costs(pa, pb, p);
    return solve_transport(c, ca, cb).cost;
}

double wasserstein(const DiscreteDistribution& a, const DiscreteDistribution& b,
                   const SiteTable& table, int p) {
    double cost = transport_cost(a, b, table, p);
    return p == 1 ? cost : std::sqrt(std::max(0.0, cost));
}

double wasserstein(const DiscreteDistribution& a, const SiteTable& table_a,
                   const DiscreteDistribution& b, const SiteTable& table_b, int p) {
    if (table_a.dim() != table_b.dim())
        throw InputError("wasserstein: tables have different covariate dimensions");
    DiscreteDistribution ca = a.canonical(), cb = b.canonical();
    Matrix pa(ca.size(), table_a.dim()), pb(cb.size(), table_b.dim());
    for (std::size_t i = 0; i < ca.size(); ++i)
        for (std::size_t k = 0; k < table_a.dim(); ++k)
            pa(i, k) = table_a.x(static_cast<std::size_t>(ca.support[i]), k);
    for (std::size_t j = 0; j < cb.size(); ++j)
        for (std::size_t k = 0; k < table_b.dim(); ++k)
            pb(j, k) = table_b.x(static_cast<std::size_t>(cb.support[j]), k);
    CostMatrix c = pairwise_costs(pa, pb, p);
    double cost = solve_transport(c, ca, cb).cost;
    return p == 1 ? cost : std::sqrt(std::max(0.0, cost));
}

}  // namespace sitesel::ot
