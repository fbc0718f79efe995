#include "sitesel/transport_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sitesel {
namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kReducedCostTol = 1e-11;

// Transportation simplex (u-v method) on the dense bipartite graph.
// The basis is a spanning tree with exactly m + n - 1 cells, kept explicitly;
// degenerate (zero-flow) basic cells are allowed.  Scratch arrays are reused
// across pivots; the basis adjacency is maintained incrementally.
class TransportSimplex {
public:
    TransportSimplex(const Matrix& cost, std::vector<double> supply,
                     std::vector<double> demand)
        : c_(cost),
          a_(std::move(supply)),
          b_(std::move(demand)),
          m_(a_.size()),
          n_(b_.size()) {
        double sa = std::accumulate(a_.begin(), a_.end(), 0.0);
        double sb = std::accumulate(b_.begin(), b_.end(), 0.0);
        if (std::abs(sa - sb) > kFeasTol * std::max(1.0, std::abs(sa)))
            throw InputError("transport: supply and demand totals differ by more than 1e-9");
        if (sb != 0.0) {
            double f = sa / sb;
            for (double& d : b_) d *= f;
        }
        basic_.assign(m_ * n_, -1);
    }

    TransportLpSolution solve(const TransportBasis* warm) {
        if (!warm || !adopt_basis(*warm)) {
            basic_.assign(m_ * n_, -1);
            flow_.clear();
            cell_row_.clear();
            cell_col_.clear();
            northwest_corner();
        }
        build_adjacency();
        const long pivot_cap = 2000 + 40 * static_cast<long>(m_ * n_);
        long pivots = 0;
        bool bland = false;
        while (true) {
            compute_duals();
            auto [ei, ej] = find_entering(bland);
            if (ei < 0) break;
            pivot(ei, ej);
            ++pivots;
            if (!bland && pivots > pivot_cap) bland = true;  // anti-cycling fallback
            if (pivots > 4 * pivot_cap)
                throw std::runtime_error("transport simplex failed to terminate");
        }
        return extract(pivots);
    }

private:
    const Matrix& c_;
    std::vector<double> a_, b_;
    std::size_t m_, n_;

    // Basic cells as parallel arrays; basic_[i*n+j] holds the cell id or -1.
    std::vector<int> basic_;
    std::vector<double> flow_;
    std::vector<int> cell_row_, cell_col_;
    // Node adjacency over cell ids (rows: 0..m-1, cols: m..m+n-1).
    std::vector<std::vector<int>> adj_;
    std::vector<double> u_, v_;
    std::vector<char> dual_done_;
    std::vector<int> stack_, parent_cell_, parent_node_;
    std::vector<char> seen_;

    int add_cell(std::size_t i, std::size_t j, double f) {
        int id = static_cast<int>(flow_.size());
        basic_[i * n_ + j] = id;
        flow_.push_back(f);
        cell_row_.push_back(static_cast<int>(i));
        cell_col_.push_back(static_cast<int>(j));
        return id;
    }

    // Re-solves the unique tree flows of a previous basis under the current
    // marginals by leaf peeling; rejects stale bases.
    bool adopt_basis(const TransportBasis& cells) {
        if (cells.size() != m_ + n_ - 1) return false;
        for (auto [i, j] : cells)
            if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= m_ ||
                static_cast<std::size_t>(j) >= n_)
                return false;
        std::vector<double> resid(m_ + n_);
        for (std::size_t i = 0; i < m_; ++i) resid[i] = a_[i];
        for (std::size_t j = 0; j < n_; ++j) resid[m_ + j] = b_[j];
        std::vector<int> deg(m_ + n_, 0);
        std::vector<std::vector<std::pair<int, int>>> nbr(m_ + n_);  // (other, cell idx)
        for (std::size_t id = 0; id < cells.size(); ++id) {
            int i = cells[id].first, j = cells[id].second;
            nbr[static_cast<std::size_t>(i)].emplace_back(static_cast<int>(m_) + j,
                                                          static_cast<int>(id));
            nbr[m_ + static_cast<std::size_t>(j)].emplace_back(i, static_cast<int>(id));
            ++deg[static_cast<std::size_t>(i)];
            ++deg[m_ + static_cast<std::size_t>(j)];
        }
        std::vector<double> f(cells.size(), 0.0);
        std::vector<char> used(cells.size(), 0);
        std::vector<int> peel;
        for (std::size_t v = 0; v < m_ + n_; ++v)
            if (deg[v] == 1) peel.push_back(static_cast<int>(v));
        std::size_t solved = 0;
        while (!peel.empty()) {
            int v = peel.back();
            peel.pop_back();
            if (deg[static_cast<std::size_t>(v)] != 1) continue;
            int other = -1, id = -1;
            for (auto [o, e] : nbr[static_cast<std::size_t>(v)])
                if (!used[static_cast<std::size_t>(e)]) { other = o; id = e; break; }
            if (id < 0) return false;
            double fv = resid[static_cast<std::size_t>(v)];
            if (fv < -1e-12) return false;  // marginals changed
            f[static_cast<std::size_t>(id)] = std::max(0.0, fv);
            resid[static_cast<std::size_t>(other)] -= fv;
            resid[static_cast<std::size_t>(v)] = 0.0;
            used[static_cast<std::size_t>(id)] = 1;
            --deg[static_cast<std::size_t>(v)];
            --deg[static_cast<std::size_t>(other)];
            if (deg[static_cast<std::size_t>(other)] == 1)
                peel.push_back(other);
            ++solved;
        }
        if (solved != cells.size()) return false;  // not a spanning tree
        basic_.assign(m_ * n_, -1);
        flow_.clear();
        cell_row_.clear();
        cell_col_.clear();
        for (std::size_t id = 0; id < cells.size(); ++id) {
            add_cell(static_cast<std::size_t>(cells[id].first),
                     static_cast<std::size_t>(cells[id].second), f[id]);
        }
        return true;
    }

    void northwest_corner() {
        std::vector<double> ra = a_, rb = b_;
        std::size_t i = 0, j = 0;
        while (i < m_ && j < n_) {
            double x = std::min(ra[i], rb[j]);
            add_cell(i, j, x);
            ra[i] -= x;
            rb[j] -= x;
            bool row_done = ra[i] <= rb[j];
            if (row_done && i + 1 < m_) {
                rb[j] -= ra[i];  // absorb representation error
                ra[i] = 0.0;
                ++i;
            } else if (j + 1 < n_) {
                ra[i] -= rb[j];
                rb[j] = 0.0;
                ++j;
            } else {
                break;
            }
        }
    }

    void build_adjacency() {
        adj_.assign(m_ + n_, {});
        for (std::size_t id = 0; id < flow_.size(); ++id) {
            adj_[static_cast<std::size_t>(cell_row_[id])].push_back(static_cast<int>(id));
            adj_[m_ + static_cast<std::size_t>(cell_col_[id])].push_back(static_cast<int>(id));
        }
    }

    void compute_duals() {
        u_.assign(m_, 0.0);
        v_.assign(n_, 0.0);
        dual_done_.assign(m_ + n_, 0);
        stack_.clear();
        stack_.push_back(0);
        dual_done_[0] = 1;
        while (!stack_.empty()) {
            int node = stack_.back();
            stack_.pop_back();
            for (int id : adj_[static_cast<std::size_t>(node)]) {
                int i = cell_row_[id];
                int jn = static_cast<int>(m_) + cell_col_[id];
                int other = node == i ? jn : i;
                if (dual_done_[static_cast<std::size_t>(other)]) continue;
                if (other == jn)
                    v_[static_cast<std::size_t>(cell_col_[id])] =
                        c_(static_cast<std::size_t>(i),
                           static_cast<std::size_t>(cell_col_[id])) -
                        u_[static_cast<std::size_t>(i)];
                else
                    u_[static_cast<std::size_t>(i)] =
                        c_(static_cast<std::size_t>(i),
                           static_cast<std::size_t>(cell_col_[id])) -
                        v_[static_cast<std::size_t>(cell_col_[id])];
                dual_done_[static_cast<std::size_t>(other)] = 1;
                stack_.push_back(other);
            }
        }
    }

    std::pair<int, int> find_entering(bool bland) const {
        int bi = -1, bj = -1;
        double best = -kReducedCostTol;
        for (std::size_t i = 0; i < m_; ++i) {
            const double ui = u_[i];
            const double* crow = &c_.data[i * n_];
            for (std::size_t j = 0; j < n_; ++j) {
                if (basic_[i * n_ + j] >= 0) continue;
                double r = crow[j] - ui - v_[j];
                if (bland) {
                    if (r < -kReducedCostTol) return {static_cast<int>(i), static_cast<int>(j)};
                } else if (r < best) {
                    best = r;
                    bi = static_cast<int>(i);
                    bj = static_cast<int>(j);
                }
            }
        }
        return {bi, bj};
    }

    void drop_from_adj(std::size_t node, int id) {
        auto& v = adj_[node];
        v.erase(std::find(v.begin(), v.end(), id));
    }

    // Finds the unique basis-tree path between the endpoints of the entering
    // cell, then shifts flow around the closed cycle.
    void pivot(int ei, int ej) {
        parent_cell_.assign(m_ + n_, -1);
        parent_node_.assign(m_ + n_, -1);
        seen_.assign(m_ + n_, 0);
        stack_.clear();
        stack_.push_back(ei);
        seen_[static_cast<std::size_t>(ei)] = 1;
        int target = static_cast<int>(m_) + ej;
        while (!stack_.empty() && !seen_[static_cast<std::size_t>(target)]) {
            int node = stack_.back();
            stack_.pop_back();
            for (int id : adj_[static_cast<std::size_t>(node)]) {
                int i = cell_row_[id];
                int jn = static_cast<int>(m_) + cell_col_[id];
                int other = node == i ? jn : i;
                if (seen_[static_cast<std::size_t>(other)]) continue;
                seen_[static_cast<std::size_t>(other)] = 1;
                parent_cell_[static_cast<std::size_t>(other)] = id;
                parent_node_[static_cast<std::size_t>(other)] = node;
                stack_.push_back(other);
            }
        }
        // Path cells from the entering column node back to ei alternate
        // -,+,-,... with the entering cell taking +theta.
        static thread_local std::vector<int> path;
        path.clear();
        for (int node = target; node != ei; node = parent_node_[static_cast<std::size_t>(node)])
            path.push_back(parent_cell_[static_cast<std::size_t>(node)]);
        double theta = std::numeric_limits<double>::infinity();
        int leave = -1;
        for (std::size_t k = 0; k < path.size(); k += 2) {  // minus positions
            int id = path[k];
            if (flow_[static_cast<std::size_t>(id)] < theta - 1e-15 ||
                (leave >= 0 && flow_[static_cast<std::size_t>(id)] <= theta + 1e-15 &&
                 std::make_pair(cell_row_[id], cell_col_[id]) <
                     std::make_pair(cell_row_[leave], cell_col_[leave]))) {
                theta = flow_[static_cast<std::size_t>(id)];
                leave = id;
            }
        }
        for (std::size_t k = 0; k < path.size(); ++k)
            flow_[static_cast<std::size_t>(path[k])] += (k % 2 == 0) ? -theta : theta;
        // Replace the leaving cell with the entering one in place.
        std::size_t li = static_cast<std::size_t>(cell_row_[leave]);
        std::size_t lj = static_cast<std::size_t>(cell_col_[leave]);
        basic_[li * n_ + lj] = -1;
        drop_from_adj(li, leave);
        drop_from_adj(m_ + lj, leave);
        basic_[static_cast<std::size_t>(ei) * n_ + static_cast<std::size_t>(ej)] = leave;
        cell_row_[leave] = ei;
        cell_col_[leave] = ej;
        flow_[static_cast<std::size_t>(leave)] = theta;
        adj_[static_cast<std::size_t>(ei)].push_back(leave);
        adj_[m_ + static_cast<std::size_t>(ej)].push_back(leave);
    }

    TransportLpSolution extract(long pivots) {
        TransportLpSolution out;
        out.pivots = pivots;
        out.row_duals.assign(u_.begin(), u_.end());
        out.col_duals.assign(v_.begin(), v_.end());
        out.basis.reserve(flow_.size());
        double cost = 0.0;
        std::vector<PlanTriplet> flows;
        flows.reserve(flow_.size());
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                int id = basic_[i * n_ + j];
                if (id < 0) continue;
                out.basis.emplace_back(static_cast<int>(i), static_cast<int>(j));
                double f = flow_[static_cast<std::size_t>(id)];
                if (f > 1e-14) {
                    flows.push_back({static_cast<int>(i), static_cast<int>(j), f});
                    cost += f * c_(i, j);
                }
            }
        }
        out.cost = cost;
        out.flows = std::move(flows);
        return out;
    }
};

}  // namespace

TransportLpSolution solve_transport_lp(const Matrix& cost,
                                       const std::vector<double>& supply,
                                       const std::vector<double>& demand,
                                       const TransportBasis* warm) {
    if (cost.rows != supply.size() || cost.cols != demand.size())
        throw InputError("transport: cost matrix does not match marginal sizes");
    if (supply.empty() || demand.empty())
        throw InputError("transport: empty marginals");
    TransportSimplex s(cost, supply, demand);
    return s.solve(warm);
}

CapacitatedLpSolution solve_selection_relaxation(const Matrix& cost,
                                                 const std::vector<double>& supply,
                                                 const std::vector<int>& fixed_in,
                                                 const std::vector<int>& free_cols,
                                                 int k, TransportBasis* warm) {
    const std::size_t n_rows = cost.rows;
    const std::size_t n_cands = cost.cols;
    CapacitatedLpSolution out;
    out.column_mass.assign(n_cands, 0.0);
    if (static_cast<int>(fixed_in.size()) > k ||
        fixed_in.size() + free_cols.size() < static_cast<std::size_t>(k)) {
        out.feasible = false;
        return out;
    }

    const double cap = 1.0 / k;
    std::vector<int> cols;
    cols.reserve(fixed_in.size() + free_cols.size());
    cols.insert(cols.end(), fixed_in.begin(), fixed_in.end());
    cols.insert(cols.end(), free_cols.begin(), free_cols.end());

    double total = std::accumulate(supply.begin(), supply.end(), 0.0);
    double slack = cols.size() * cap - total;  // mass the dummy row absorbs

    double max_c = 0.0;  // adjusted costs may be negative, so bound by magnitude
    for (std::size_t i = 0; i < n_rows; ++i)
        for (int j : cols) max_c = std::max(max_c, std::abs(cost(i, static_cast<std::size_t>(j))));
    const double big = 1e6 * (max_c + 1.0);

    bool with_dummy = slack > 1e-12;
    Matrix sub(n_rows + (with_dummy ? 1 : 0), cols.size());
    for (std::size_t i = 0; i < n_rows; ++i)
        for (std::size_t jj = 0; jj < cols.size(); ++jj)
            sub(i, jj) = cost(i, static_cast<std::size_t>(cols[jj]));
    if (with_dummy) {
        // Dummy mass may fill only free columns; fixed ones demand real mass.
        for (std::size_t jj = 0; jj < cols.size(); ++jj)
            sub(n_rows, jj) = jj < fixed_in.size() ? big : 0.0;
    }

    std::vector<double> sup = supply;
    if (with_dummy) sup.push_back(slack);
    std::vector<double> dem(cols.size(), cap);

    TransportLpSolution lp = solve_transport_lp(sub, sup, dem, warm);
    if (warm) *warm = lp.basis;
    out.pivots = lp.pivots;
    out.cell_flow.assign(n_rows * n_cands, 0.0);
    double real_cost = 0.0;
    for (const auto& t : lp.flows) {
        if (static_cast<std::size_t>(t.row) >= n_rows) continue;  // dummy row
        real_cost += t.mass * sub(static_cast<std::size_t>(t.row),
                                  static_cast<std::size_t>(t.col));
        std::size_t cand = static_cast<std::size_t>(cols[static_cast<std::size_t>(t.col)]);
        out.column_mass[cand] += t.mass;
        out.cell_flow[static_cast<std::size_t>(t.row) * n_cands + cand] = t.mass;
    }
    out.cost = real_cost;
    return out;
}

}  // namespace sitesel
