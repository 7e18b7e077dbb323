#include "qdist/transport_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qdist {
namespace {

constexpr int kNone = -1;
constexpr double kInf = std::numeric_limits<double>::infinity();

class NetworkSimplex {
 public:
  NetworkSimplex(std::span<const double> supply, std::span<const double> demand, std::span<const double> cost)
      : ns_(supply.size()),
        nt_(demand.size()),
        node_count_(static_cast<int>(ns_ + nt_ + 1)),
        root_(static_cast<int>(ns_ + nt_)),
        transport_arcs_(ns_ * nt_),
        arc_count_(ns_ * nt_ + ns_ + nt_),
        cost_(cost) {
    double max_cost = 0.0;
    for (double c : cost_) max_cost = std::max(max_cost, std::abs(c));
    art_cost_ = (max_cost + 1.0) * static_cast<double>(ns_ + nt_);
    eps_ = 1e-14 * art_cost_;

    supply_.assign(node_count_, 0.0);
    for (std::size_t i = 0; i < ns_; ++i) supply_[i] = supply[i];
    for (std::size_t j = 0; j < nt_; ++j) supply_[ns_ + j] = -demand[j];

    block_size_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(arc_count_))));
    init_tree();
  }

  TransportSolution run() {
    const std::size_t max_pivots = 64 * arc_count_ + 1'000'000;
    std::size_t pivots = 0;
    std::size_t in_arc = 0;
    while (find_entering(in_arc)) {
      pivot(in_arc);
      if (++pivots > max_pivots) throw ConvergenceError("network simplex: pivot limit exceeded");
    }
    recompute_flows();

    TransportSolution out;
    out.pivots = pivots;
    const double total = std::accumulate(supply_.begin(), supply_.begin() + static_cast<long>(ns_), 0.0);
    for (int u = 0; u < node_count_; ++u) {
      if (u == root_) continue;
      const std::size_t e = pred_[u];
      const double f = flow_[u];
      if (e >= transport_arcs_) {
        if (f > 1e-9 * total) throw ConvergenceError("network simplex: infeasible (artificial flow remains)");
        continue;
      }
      if (f <= 0.0) continue;
      out.entries.push_back({e / nt_, e % nt_, f});
      out.cost += f * cost_[e];
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const TransportEntry& a, const TransportEntry& b) {
      return a.source != b.source ? a.source < b.source : a.target < b.target;
    });
    return out;
  }

 private:
  int arc_source(std::size_t e) const {
    if (e < transport_arcs_) return static_cast<int>(e / nt_);
    const auto u = static_cast<int>(e - transport_arcs_);
    return u < static_cast<int>(ns_) ? u : root_;
  }
  int arc_target(std::size_t e) const {
    if (e < transport_arcs_) return static_cast<int>(ns_ + e % nt_);
    const auto u = static_cast<int>(e - transport_arcs_);
    return u < static_cast<int>(ns_) ? root_ : u;
  }
  double arc_cost(std::size_t e) const { return e < transport_arcs_ ? cost_[e] : art_cost_; }
  double reduced_cost(std::size_t e) const {
    return arc_cost(e) + pot_[arc_source(e)] - pot_[arc_target(e)];
  }

  void init_tree() {
    const auto n = static_cast<std::size_t>(node_count_);
    parent_.assign(n, kNone);
    pred_.assign(n, 0);
    up_.assign(n, 0);
    flow_.assign(n, 0.0);
    depth_.assign(n, 0);
    pot_.assign(n, 0.0);
    first_child_.assign(n, kNone);
    next_sib_.assign(n, kNone);
    prev_sib_.assign(n, kNone);

    for (int u = 0; u < root_; ++u) {
      attach(u, root_);
      pred_[u] = transport_arcs_ + static_cast<std::size_t>(u);
      depth_[u] = 1;
      if (u < static_cast<int>(ns_)) {
        up_[u] = 1;  // u -> root
        flow_[u] = supply_[u];
        pot_[u] = -art_cost_;
      } else {
        up_[u] = 0;  // root -> u
        flow_[u] = -supply_[u];
        pot_[u] = art_cost_;
      }
    }
  }

  bool find_entering(std::size_t& in_arc) {
    double best = 0.0;
    std::size_t count = block_size_;
    std::size_t e = next_arc_;
    for (std::size_t k = 0; k < arc_count_; ++k) {
      const double c = reduced_cost(e);
      if (c < best) {
        best = c;
        in_arc = e;
      }
      if (++e == arc_count_) e = 0;
      if (--count == 0) {
        if (best < -eps_) {
          next_arc_ = e;
          return true;
        }
        count = block_size_;
      }
    }
    if (best < -eps_) {
      next_arc_ = e;
      return true;
    }
    return false;
  }

  int find_join(int u, int v) const {
    while (depth_[u] > depth_[v]) u = parent_[u];
    while (depth_[v] > depth_[u]) v = parent_[v];
    while (u != v) {
      u = parent_[u];
      v = parent_[v];
    }
    return u;
  }

  void detach(int u) {
    const int p = parent_[u];
    if (prev_sib_[u] != kNone) {
      next_sib_[prev_sib_[u]] = next_sib_[u];
    } else {
      first_child_[p] = next_sib_[u];
    }
    if (next_sib_[u] != kNone) prev_sib_[next_sib_[u]] = prev_sib_[u];
    prev_sib_[u] = next_sib_[u] = kNone;
    parent_[u] = kNone;
  }

  void attach(int u, int p) {
    parent_[u] = p;
    prev_sib_[u] = kNone;
    next_sib_[u] = first_child_[p];
    if (first_child_[p] != kNone) prev_sib_[first_child_[p]] = u;
    first_child_[p] = u;
  }

  void pivot(std::size_t in_arc) {
    const int first = arc_source(in_arc);
    const int second = arc_target(in_arc);
    const double in_reduced = reduced_cost(in_arc);
    const int join = find_join(first, second);

    // Flow travels first -> second on the entering arc, then second -> join
    // -> first through the tree. Ties resolve to the last blocking arc in
    // that orientation, which keeps the tree strongly feasible.
    double delta = kInf;
    int u_out = kNone;
    bool out_on_first = true;
    for (int u = first; u != join; u = parent_[u]) {
      const double residual = up_[u] ? flow_[u] : kInf;
      if (residual < delta) {
        delta = residual;
        u_out = u;
        out_on_first = true;
      }
    }
    for (int u = second; u != join; u = parent_[u]) {
      const double residual = up_[u] ? kInf : flow_[u];
      if (residual <= delta) {
        delta = residual;
        u_out = u;
        out_on_first = false;
      }
    }
    if (u_out == kNone) throw ConvergenceError("network simplex: unbounded cycle");

    if (delta > 0.0) {
      for (int u = first; u != join; u = parent_[u]) flow_[u] += up_[u] ? -delta : delta;
      for (int u = second; u != join; u = parent_[u]) flow_[u] += up_[u] ? delta : -delta;
    }

    // Re-hang the detached subtree from the entering arc.
    const int u_in = out_on_first ? first : second;
    const int v_in = out_on_first ? second : first;
    path_.clear();
    for (int x = u_in;; x = parent_[x]) {
      path_.push_back(x);
      if (x == u_out) break;
    }
    saved_pred_.resize(path_.size());
    saved_up_.resize(path_.size());
    saved_flow_.resize(path_.size());
    for (std::size_t i = 0; i < path_.size(); ++i) {
      saved_pred_[i] = pred_[path_[i]];
      saved_up_[i] = up_[path_[i]];
      saved_flow_[i] = flow_[path_[i]];
    }
    for (auto it = path_.rbegin(); it != path_.rend(); ++it) detach(*it);

    attach(u_in, v_in);
    pred_[u_in] = in_arc;
    up_[u_in] = (u_in == first) ? 1 : 0;
    flow_[u_in] = delta;
    for (std::size_t i = 1; i < path_.size(); ++i) {
      const int x = path_[i];
      attach(x, path_[i - 1]);
      pred_[x] = saved_pred_[i - 1];
      up_[x] = saved_up_[i - 1] ? 0 : 1;
      flow_[x] = saved_flow_[i - 1];
    }

    const double shift = (u_in == first) ? -in_reduced : in_reduced;
    stack_.clear();
    depth_[u_in] = depth_[v_in] + 1;
    stack_.push_back(u_in);
    while (!stack_.empty()) {
      const int u = stack_.back();
      stack_.pop_back();
      pot_[u] += shift;
      for (int c = first_child_[u]; c != kNone; c = next_sib_[c]) {
        depth_[c] = depth_[u] + 1;
        stack_.push_back(c);
      }
    }
  }

  // Tree flows are determined by the supplies alone; recomputing them bottom
  // up removes the drift accumulated over many incremental pivots.
  void recompute_flows() {
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(node_count_));
    stack_.assign(1, root_);
    while (!stack_.empty()) {
      const int u = stack_.back();
      stack_.pop_back();
      order.push_back(u);
      for (int c = first_child_[u]; c != kNone; c = next_sib_[c]) stack_.push_back(c);
    }
    std::vector<double> net(supply_);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int u = *it;
      if (u == root_) continue;
      double f = up_[u] ? net[u] : -net[u];
      if (f < 0.0) f = 0.0;  // rounding residue on degenerate arcs
      flow_[u] = f;
      net[parent_[u]] += net[u];
    }
  }

  std::size_t ns_, nt_;
  int node_count_, root_;
  std::size_t transport_arcs_, arc_count_;
  std::span<const double> cost_;
  double art_cost_ = 0.0;
  double eps_ = 0.0;
  std::size_t block_size_ = 10;
  std::size_t next_arc_ = 0;

  std::vector<double> supply_;
  std::vector<int> parent_;
  std::vector<std::size_t> pred_;
  std::vector<unsigned char> up_;
  std::vector<double> flow_;
  std::vector<int> depth_;
  std::vector<double> pot_;
  std::vector<int> first_child_, next_sib_, prev_sib_;

  std::vector<int> path_, stack_;
  std::vector<std::size_t> saved_pred_;
  std::vector<unsigned char> saved_up_;
  std::vector<double> saved_flow_;
};

}  // namespace

TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  std::span<const double> cost) {
  if (supply.empty() || demand.empty()) throw std::invalid_argument("solve_transport: empty marginal");
  if (cost.size() != supply.size() * demand.size())
    throw std::invalid_argument("solve_transport: cost matrix has wrong size");
  for (double a : supply)
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("solve_transport: supplies must be positive");
  for (double b : demand)
    if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("solve_transport: demands must be positive");
  for (double c : cost)
    if (!std::isfinite(c)) throw std::invalid_argument("solve_transport: non-finite cost");

  const double total_a = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double total_b = std::accumulate(demand.begin(), demand.end(), 0.0);
  const double mismatch = total_a - total_b;
  if (std::abs(mismatch) > 1e-12 * std::max(total_a, total_b))
    throw std::invalid_argument("solve_transport: unbalanced marginals");

  std::vector<double> b(demand.begin(), demand.end());
  if (mismatch != 0.0) {
    auto largest = std::max_element(b.begin(), b.end());
    *largest += mismatch;
  }
  NetworkSimplex solver(supply, b, cost);
  return solver.run();
}

}  // namespace qdist
