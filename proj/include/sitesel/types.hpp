#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sitesel {

// Thrown on malformed user input (bad CSV, infeasible budgets, negative radii).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a brute-force routine would exceed its combinatorial guard.
struct GuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles. Small convenience type; no algebra.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::vector<double> row(std::size_t i) const {
        return {data.begin() + static_cast<std::ptrdiff_t>(i * cols),
                data.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols)};
    }
};

/// Per-column affine transform recorded when a table is standardized.
struct ColumnScaling {
    double mean = 0.0;
    double scale = 1.0;  // 1 for constant columns
};

/// Candidate sites: ids aligned with rows of the covariate matrix X.
struct SiteTable {
    std::vector<std::string> ids;
    Matrix x;  // n x d covariates
    std::optional<std::vector<ColumnScaling>> standardization;

    std::size_t size() const { return x.rows; }
    std::size_t dim() const { return x.cols; }

    void validate() const;

    /// Builds a table from raw covariates with ids "0", "1", ...
    static SiteTable from_points(Matrix pts);
};

/// Weighted point mass over site indices of some SiteTable.
struct DiscreteDistribution {
    std::vector<int> support;     // distinct indices into a table
    std::vector<double> weights;  // nonnegative, sum to 1 within 1e-9

    std::size_t size() const { return support.size(); }

    void validate(std::size_t table_size) const;

    /// Drops zero-weight atoms and sorts the support ascending.
    DiscreteDistribution canonical() const;

    static DiscreteDistribution uniform(std::size_t n);
    static DiscreteDistribution uniform_on(const std::vector<int>& indices);
};

/// Entries are ||x_i - y_j||^p for p in {1,2}.
struct CostMatrix {
    Matrix entries;
    int p = 1;
};

struct PlanTriplet {
    int row = 0;
    int col = 0;
    double mass = 0.0;
};

/// Coupling between two discrete distributions, plus its total cost
/// in p-power units (sum of mass * ||.||^p).
struct TransportPlan {
    std::vector<PlanTriplet> triplets;  // row-major sorted, strictly positive mass
    DiscreteDistribution row_marginal;
    DiscreteDistribution col_marginal;
    double cost = 0.0;
};

/// A K-subset of sites with its achieved W_p objective.
struct Selection {
    std::vector<int> indices;  // sorted ascending, |indices| == k
    double objective = 0.0;    // W_p value (rooted), never a relaxation bound
    int p = 1;
    std::string method;
    int k = 0;
};

enum class SolveMode { Exact, Relaxed, Enumeration, Auto };

std::string to_string(SolveMode mode);

/// Diagnostics attached to a site-selection solve.
struct SolveReport {
    std::string mode;  // "exact" | "relaxed+rounded" | "enumeration"
    double wall_time_s = 0.0;
    long nodes = 0;            // branch-and-bound nodes or subsets enumerated
    long lp_iterations = 0;    // simplex pivots across all LP solves
    std::optional<double> relaxation_objective;  // W_p units, lower bound
    bool optimal = false;
};

inline bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
    return a < b;  // both sorted ascending; vector compare is lexicographic
}

}  // namespace sitesel
