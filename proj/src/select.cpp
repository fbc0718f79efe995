#include "sitesel/select.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "sitesel/ot.hpp"
#include "sitesel/transport_lp.hpp"

namespace sitesel::select {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Fixed columns first, then the largest free scores; ties toward smaller index.
std::vector<int> round_scores(const std::vector<double>& scores, int k) {
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[static_cast<std::size_t>(a)] >
                                                scores[static_cast<std::size_t>(b)]; });
    order.resize(static_cast<std::size_t>(k));
    std::sort(order.begin(), order.end());
    return order;
}

}  // namespace

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double selection_value_power(const Matrix& cost_power, const std::vector<double>& weights,
                             const std::vector<int>& selection) {
    const std::size_t n = cost_power.rows;
    Matrix sub(n, selection.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t jj = 0; jj < selection.size(); ++jj)
            sub(i, jj) = cost_power(i, static_cast<std::size_t>(selection[jj]));
    std::vector<double> demand(selection.size(), 1.0 / static_cast<double>(selection.size()));
    return solve_transport_lp(sub, weights, demand).cost;
}

// Exact search over K-subsets.  Depth-first over candidates in a heuristic
// order; a prefix is pruned via the nearest-available-site bound
//     max_q sum_i q_i * min(d_prefix(i), d_suffix(i)),
// which lower-bounds the capacitated transport cost of every completion.
// Surviving leaves are evaluated exactly.  Ties within tie_tol are resolved
// toward the lexicographically smallest index set.
MinimaxSolution minimize_worstcase_selection(
    const Matrix& cost_power, const std::vector<std::vector<double>>& scenarios, int k,
    const MinimaxOptions& options) {
    const int n = static_cast<int>(cost_power.cols);
    const std::size_t n_scen = scenarios.size();
    if (scenarios.empty()) throw InputError("minimax selection: no scenarios given");
    if (k < 1 || k > n) throw InputError("minimax selection: K out of range");

    MinimaxSolution out;

    auto exact_value = [&](const std::vector<int>& sel) {
        double worst = 0.0;
        for (const auto& w : scenarios)
            worst = std::max(worst, selection_value_power(cost_power, w, sel));
        return worst;
    };

    if (k == n) {
        out.indices.resize(static_cast<std::size_t>(n));
        std::iota(out.indices.begin(), out.indices.end(), 0);
        out.value_power = exact_value(out.indices);
        out.root_scores.assign(static_cast<std::size_t>(n), 1.0);
        out.root_bound_power = out.value_power;
        out.optimal = true;
        return out;
    }

    double incumbent = std::numeric_limits<double>::infinity();
    std::vector<int> incumbent_sel;
    auto offer = [&](const std::vector<int>& sel, double v) {
        if (v < incumbent - options.tie_tol) {
            incumbent = v;
            incumbent_sel = sel;
        } else if (v <= incumbent + options.tie_tol && lex_less(sel, incumbent_sel)) {
            incumbent = std::min(incumbent, v);
            incumbent_sel = sel;
        }
    };

    long evals = 0;

    if (options.force_enumeration) {
        // Plain lexicographic sweep, every subset evaluated.
        std::vector<int> cur(static_cast<std::size_t>(k));
        std::iota(cur.begin(), cur.end(), 0);
        while (true) {
            offer(cur, exact_value(cur));
            ++evals;
            int i = k - 1;
            while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - k + i) --i;
            if (i < 0) break;
            ++cur[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j)
                cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
        }
        out.indices = incumbent_sel;
        out.value_power = incumbent;
        out.root_bound_power = incumbent;
        out.nodes = evals;
        out.optimal = true;
        out.root_scores.assign(static_cast<std::size_t>(n), 0.0);
        for (int j : incumbent_sel) out.root_scores[static_cast<std::size_t>(j)] = 1.0;
        return out;
    }

    // Continuous relaxation (reported as the lower bound) and its rounding.
    double root_bound = 0.0;
    {
        std::vector<int> free_cols(static_cast<std::size_t>(n));
        std::iota(free_cols.begin(), free_cols.end(), 0);
        double worst = 0.0;
        std::vector<double> worst_scores(static_cast<std::size_t>(n), 0.0);
        for (std::size_t q = 0; q < n_scen; ++q) {
            CapacitatedLpSolution lp =
                solve_selection_relaxation(cost_power, scenarios[q], {}, free_cols, k);
            out.pivots += lp.pivots;
            if (!lp.feasible)
                throw std::runtime_error("selection relaxation infeasible at root");
            if (lp.cost >= worst) {
                worst = lp.cost;
                for (int j = 0; j < n; ++j)
                    worst_scores[static_cast<std::size_t>(j)] =
                        std::clamp(k * lp.column_mass[static_cast<std::size_t>(j)], 0.0, 1.0);
            }
        }
        root_bound = worst;
        out.root_scores = worst_scores;
        auto sel = round_scores(worst_scores, k);
        offer(sel, exact_value(sel));
        ++evals;
    }
    out.root_bound_power = root_bound;

    // Best-improvement swap local search sharpens the incumbent before the
    // exhaustive phase.
    for (int pass = 0; pass < 6; ++pass) {
        bool improved = false;
        std::vector<int> base = incumbent_sel;
        std::vector<int> best_sel = base;
        double best_v = incumbent;
        for (int out_j : base) {
            for (int in_j = 0; in_j < n; ++in_j) {
                if (std::binary_search(base.begin(), base.end(), in_j)) continue;
                std::vector<int> cand;
                cand.reserve(base.size());
                for (int j : base)
                    if (j != out_j) cand.push_back(j);
                cand.insert(std::upper_bound(cand.begin(), cand.end(), in_j), in_j);
                double v = exact_value(cand);
                ++evals;
                if (v < best_v - 1e-12) {
                    best_v = v;
                    best_sel = cand;
                    improved = true;
                }
            }
        }
        if (!improved) break;
        offer(best_sel, best_v);
    }

    // Candidate order: incumbent members first, then by population-weighted
    // attractiveness.  The tie-break does not depend on this order.
    std::vector<int> cand_order(static_cast<std::size_t>(n));
    std::iota(cand_order.begin(), cand_order.end(), 0);
    {
        std::vector<double> attract(static_cast<std::size_t>(n), 0.0);
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t q = 0; q < n_scen; ++q)
                for (int i = 0; i < n; ++i)
                    s += scenarios[q][static_cast<std::size_t>(i)] *
                         cost_power(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            attract[static_cast<std::size_t>(j)] = s;
        }
        std::stable_sort(cand_order.begin(), cand_order.end(), [&](int a, int b) {
            bool ia = std::binary_search(incumbent_sel.begin(), incumbent_sel.end(), a);
            bool ib = std::binary_search(incumbent_sel.begin(), incumbent_sel.end(), b);
            if (ia != ib) return ia;
            if (attract[static_cast<std::size_t>(a)] != attract[static_cast<std::size_t>(b)])
                return attract[static_cast<std::size_t>(a)] <
                       attract[static_cast<std::size_t>(b)];
            return a < b;
        });
    }

    // Suffix nearest-cost tables: suf[q][s*n + i] = min over positions >= s of
    // the cost from point i to the candidate at that position.
    std::vector<std::vector<double>> suf(n_scen);
    for (std::size_t q = 0; q < n_scen; ++q) {
        suf[q].assign(static_cast<std::size_t>(n + 1) * n,
                      std::numeric_limits<double>::infinity());
        for (int s = n - 1; s >= 0; --s) {
            int j = cand_order[static_cast<std::size_t>(s)];
            for (int i = 0; i < n; ++i) {
                double c = cost_power(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
                suf[q][static_cast<std::size_t>(s) * n + i] =
                    std::min(c, suf[q][static_cast<std::size_t>(s + 1) * n + i]);
            }
        }
    }

    // dmin per depth: nearest prefix cost for every point, one row per level.
    std::vector<std::vector<std::vector<double>>> level_dmin(
        static_cast<std::size_t>(k) + 1,
        std::vector<std::vector<double>>(
            n_scen, std::vector<double>(static_cast<std::size_t>(n),
                                        std::numeric_limits<double>::infinity())));
    std::vector<int> prefix;
    prefix.reserve(static_cast<std::size_t>(k));
    long visited = 0;
    bool aborted = false;

    auto dfs = [&](auto&& self, int pos, int depth) -> void {
        if (aborted) return;
        if (++visited > options.max_nodes) { aborted = true; return; }
        if (depth == k) {
            std::vector<int> sel = prefix;
            std::sort(sel.begin(), sel.end());
            double v = exact_value(sel);
            ++evals;
            offer(sel, v);
            return;
        }
        for (int s = pos; s <= n - (k - depth); ++s) {
            int j = cand_order[static_cast<std::size_t>(s)];
            double bound = 0.0;
            for (std::size_t q = 0; q < n_scen; ++q) {
                const double* parent = level_dmin[static_cast<std::size_t>(depth)][q].data();
                double* child = level_dmin[static_cast<std::size_t>(depth) + 1][q].data();
                const double* col = &cost_power.data[0];
                const double* sq = &suf[q][static_cast<std::size_t>(s + 1) * n];
                const double* wq = scenarios[q].data();
                double b = 0.0;
                for (int i = 0; i < n; ++i) {
                    double d = std::min(parent[i],
                                        col[static_cast<std::size_t>(i) * n + j]);
                    child[i] = d;
                    b += wq[i] * std::min(d, sq[i]);
                }
                bound = std::max(bound, b);
            }
            if (bound <= incumbent + options.tie_tol) {
                prefix.push_back(j);
                self(self, s + 1, depth + 1);
                prefix.pop_back();
            }
            if (aborted) return;
        }
    };
    dfs(dfs, 0, 0);

    out.indices = incumbent_sel;
    out.value_power = incumbent;
    out.nodes = visited;
    out.optimal = !aborted;
    return out;
}

namespace {

MinimaxSolution solve_nonrobust(const SiteTable& table, int k, int p,
                                const MinimaxOptions& options) {
    CostMatrix cost = ot::table_costs(table, p);
    std::vector<std::vector<double>> scenarios{
        std::vector<double>(table.size(), 1.0 / static_cast<double>(table.size()))};
    return minimize_worstcase_selection(cost.entries, scenarios, k, options);
}

double rooted(double power_cost, int p) {
    return p == 1 ? power_cost : std::sqrt(std::max(0.0, power_cost));
}

}  // namespace

std::pair<Selection, SolveReport> select_sites(const SiteTable& table, int k, int p,
                                               SolveMode mode) {
    table.validate();
    const int n = static_cast<int>(table.size());
    if (k < 1 || k > n) throw InputError("select_sites: K must satisfy 1 <= K <= n");
    if (p != 1 && p != 2) throw InputError("select_sites: p must be 1 or 2");
    if (mode == SolveMode::Auto) mode = n <= 100 ? SolveMode::Exact : SolveMode::Relaxed;

    auto t0 = Clock::now();
    Selection sel;
    sel.p = p;
    sel.k = k;
    SolveReport report;

    switch (mode) {
        case SolveMode::Exact: {
            MinimaxOptions opt;
            MinimaxSolution sol = solve_nonrobust(table, k, p, opt);
            sel.indices = sol.indices;
            sel.objective = rooted(sol.value_power, p);
            sel.method = "exact";
            report.mode = "exact";
            report.nodes = sol.nodes;
            report.lp_iterations = sol.pivots;
            report.relaxation_objective = rooted(sol.root_bound_power, p);
            report.optimal = sol.optimal;
            break;
        }
        case SolveMode::Relaxed: {
            auto [scores, rounded] = lp_relax_and_round(table, k, p);
            sel = rounded;
            sel.method = "relaxed+rounded";
            report.mode = "relaxed+rounded";
            report.optimal = false;
            CostMatrix cost = ot::table_costs(table, p);
            std::vector<double> unif(table.size(), 1.0 / static_cast<double>(table.size()));
            std::vector<int> free_cols(table.size());
            std::iota(free_cols.begin(), free_cols.end(), 0);
            CapacitatedLpSolution lp =
                solve_selection_relaxation(cost.entries, unif, {}, free_cols, k);
            report.relaxation_objective = rooted(lp.cost, p);
            report.lp_iterations = lp.pivots;
            report.nodes = 1;
            break;
        }
        case SolveMode::Enumeration: {
            sel = enumerate_oracle(table, k, p);
            report.mode = "enumeration";
            report.nodes = static_cast<long>(binomial(n, k));
            report.optimal = true;
            break;
        }
        case SolveMode::Auto:
            break;  // unreachable
    }
    report.wall_time_s = seconds_since(t0);
    return {sel, report};
}

Selection enumerate_oracle(const SiteTable& table, int k, int p) {
    table.validate();
    const int n = static_cast<int>(table.size());
    if (k < 1 || k > n) throw InputError("enumerate_oracle: K must satisfy 1 <= K <= n");
    if (binomial(n, k) > 1e6)
        throw GuardError("enumerate_oracle: C(n,K) exceeds the 1e6 guard");

    MinimaxOptions opt;
    opt.force_enumeration = true;
    MinimaxSolution sol = solve_nonrobust(table, k, p, opt);
    Selection sel;
    sel.indices = sol.indices;
    sel.objective = rooted(sol.value_power, p);
    sel.p = p;
    sel.k = k;
    sel.method = "enumeration";
    return sel;
}

std::pair<std::vector<double>, Selection> lp_relax_and_round(const SiteTable& table,
                                                             int k, int p) {
    table.validate();
    const int n = static_cast<int>(table.size());
    if (k < 1 || k > n) throw InputError("lp_relax_and_round: K must satisfy 1 <= K <= n");

    CostMatrix cost = ot::table_costs(table, p);
    std::vector<double> unif(table.size(), 1.0 / static_cast<double>(table.size()));
    std::vector<int> free_cols(table.size());
    std::iota(free_cols.begin(), free_cols.end(), 0);
    CapacitatedLpSolution lp = solve_selection_relaxation(cost.entries, unif, {}, free_cols, k);
    if (!lp.feasible) throw std::runtime_error("lp_relax_and_round: relaxation infeasible");

    std::vector<double> scores(table.size());
    for (std::size_t j = 0; j < table.size(); ++j) scores[j] = k * lp.column_mass[j];

    std::vector<int> sel_idx = round_scores(scores, k);
    Selection sel;
    sel.indices = sel_idx;
    sel.p = p;
    sel.k = k;
    sel.method = "relaxed+rounded";
    sel.objective = rooted(selection_value_power(cost.entries, unif, sel_idx), p);
    return {scores, sel};
}

}  // namespace sitesel::select
