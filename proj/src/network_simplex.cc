// Copyright 2026 The DyadicOT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "network_simplex.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dyadicot/error.h"

namespace dyadicot::internal {

TransportNetworkSimplex::TransportNetworkSimplex(const Eigen::MatrixXd& cost,
                                                 const Eigen::VectorXd& a,
                                                 const Eigen::VectorXd& b)
    : cost_(cost),
      m_(static_cast<Node>(a.size())),
      n_(static_cast<Node>(b.size())) {
  root_ = m_ + n_;
  real_arcs_ = static_cast<Arc>(m_) * n_;
  const Node nodes = m_ + n_ + 1;

  const double max_cost = cost.size() > 0 ? cost.cwiseAbs().maxCoeff() : 0.0;
  art_cost_ = (max_cost + 1.0) * static_cast<double>(m_ + n_);
  pricing_tol_ = 64.0 * std::numeric_limits<double>::epsilon() * art_cost_;

  flow_.assign(real_arcs_ + m_ + n_, 0.0);
  in_tree_.assign(real_arcs_, 0);
  parent_.assign(nodes, root_);
  pred_.assign(nodes, -1);
  pred_up_.assign(nodes, 0);
  depth_.assign(nodes, 1);
  pi_.assign(nodes, 0.0);
  tree_arcs_.assign(nodes, {});

  parent_[root_] = -1;
  depth_[root_] = 0;
  tree_arcs_[root_].reserve(m_ + n_);
  for (Node u = 0; u < m_ + n_; ++u) {
    const Arc e = real_arcs_ + u;
    pred_[u] = e;
    tree_arcs_[u].push_back(e);
    tree_arcs_[root_].push_back(e);
    if (IsRow(u)) {
      pred_up_[u] = 1;
      flow_[e] = a(u);
      pi_[u] = 0.0;
    } else {
      pred_up_[u] = 0;
      flow_[e] = b(u - m_);
      pi_[u] = art_cost_;
    }
  }
  block_size_ = std::max<Arc>(
      10, static_cast<Arc>(std::ceil(std::sqrt(static_cast<double>(real_arcs_)))));
}

TransportNetworkSimplex::Node TransportNetworkSimplex::Source(Arc e) const {
  if (e < real_arcs_) return static_cast<Node>(e / n_);
  const Node u = static_cast<Node>(e - real_arcs_);
  return IsRow(u) ? u : root_;
}

TransportNetworkSimplex::Node TransportNetworkSimplex::Target(Arc e) const {
  if (e < real_arcs_) return m_ + static_cast<Node>(e % n_);
  const Node u = static_cast<Node>(e - real_arcs_);
  return IsRow(u) ? root_ : u;
}

double TransportNetworkSimplex::ArcCost(Arc e) const {
  if (e < real_arcs_) return cost_(e / n_, e % n_);
  return IsRow(static_cast<Node>(e - real_arcs_)) ? 0.0 : art_cost_;
}

bool TransportNetworkSimplex::FindEnteringArc() {
  double best_rc = -pricing_tol_;
  Arc best = -1;
  Arc counter = block_size_;
  Arc e = next_arc_;
  for (Arc scanned = 0; scanned < real_arcs_; ++scanned) {
    if (!in_tree_[e]) {
      const double rc = Reduced(e);
      if (rc < best_rc) {
        best_rc = rc;
        best = e;
      }
    }
    e = e + 1 == real_arcs_ ? 0 : e + 1;
    if (--counter == 0) {
      if (best >= 0) break;
      counter = block_size_;
    }
  }
  if (best < 0) return false;
  next_arc_ = e;
  Pivot(best);
  return true;
}

void TransportNetworkSimplex::RemoveTreeArc(Node u, Arc e) {
  auto& arcs = tree_arcs_[u];
  auto it = std::find(arcs.begin(), arcs.end(), e);
  *it = arcs.back();
  arcs.pop_back();
}

void TransportNetworkSimplex::Pivot(Arc in) {
  const Node s = Source(in);
  const Node t = Target(in);

  Node u = s, v = t;
  while (u != v) {
    if (depth_[u] > depth_[v]) {
      u = parent_[u];
    } else if (depth_[v] > depth_[u]) {
      v = parent_[v];
    } else {
      u = parent_[u];
      v = parent_[v];
    }
  }
  const Node join = u;

  // Flow travels join -> ... -> s -> t -> ... -> join. Among the arcs whose
  // flow decreases, take the last blocking one in that traversal order.
  double delta = std::numeric_limits<double>::infinity();
  Node u_out = -1;
  int side = 0;
  for (Node w = s; w != join; w = parent_[w]) {
    if (pred_up_[w]) {
      const double d = flow_[pred_[w]];
      if (d < delta) {
        delta = d;
        u_out = w;
        side = 1;
      }
    }
  }
  for (Node w = t; w != join; w = parent_[w]) {
    if (!pred_up_[w]) {
      const double d = flow_[pred_[w]];
      if (d <= delta) {
        delta = d;
        u_out = w;
        side = 2;
      }
    }
  }
  if (u_out < 0) throw Error("network simplex: unbounded transport problem");

  if (delta > 0) {
    flow_[in] += delta;
    for (Node w = s; w != join; w = parent_[w]) {
      flow_[pred_[w]] += pred_up_[w] ? -delta : delta;
    }
    for (Node w = t; w != join; w = parent_[w]) {
      flow_[pred_[w]] += pred_up_[w] ? delta : -delta;
    }
  }
  const Arc out = pred_[u_out];
  flow_[out] = 0.0;

  const Node u_in = side == 1 ? s : t;
  const Node v_in = side == 1 ? t : s;

  RemoveTreeArc(u_out, out);
  RemoveTreeArc(parent_[u_out], out);
  if (out < real_arcs_) in_tree_[out] = 0;
  in_tree_[in] = 1;
  tree_arcs_[s].push_back(in);
  tree_arcs_[t].push_back(in);

  // Re-hang the detached subtree below v_in, rooted at u_in.
  parent_[u_in] = v_in;
  pred_[u_in] = in;
  pred_up_[u_in] = Source(in) == u_in;
  depth_[u_in] = depth_[v_in] + 1;
  pi_[u_in] = pred_up_[u_in] ? pi_[v_in] - ArcCost(in) : pi_[v_in] + ArcCost(in);
  stack_.clear();
  stack_.push_back(u_in);
  while (!stack_.empty()) {
    const Node x = stack_.back();
    stack_.pop_back();
    for (Arc e : tree_arcs_[x]) {
      if (e == pred_[x]) continue;
      const Node y = Source(e) == x ? Target(e) : Source(e);
      parent_[y] = x;
      pred_[y] = e;
      pred_up_[y] = Source(e) == y;
      depth_[y] = depth_[x] + 1;
      pi_[y] = pred_up_[y] ? pi_[x] - ArcCost(e) : pi_[x] + ArcCost(e);
      stack_.push_back(y);
    }
  }
  ++pivots_;
}

void TransportNetworkSimplex::Solve(std::int64_t max_pivots) {
  if (max_pivots < 0) {
    max_pivots = 1000 + 50 * (static_cast<std::int64_t>(m_) + n_) *
                            (static_cast<std::int64_t>(m_) + n_);
  }
  if (real_arcs_ == 0) return;
  while (FindEnteringArc()) {
    if (pivots_ > max_pivots) {
      throw Error("network simplex: pivot budget exhausted after " +
                  std::to_string(pivots_) + " pivots");
    }
  }
}

Eigen::MatrixXd TransportNetworkSimplex::Flow() const {
  Eigen::MatrixXd out(m_, n_);
  for (Node i = 0; i < m_; ++i) {
    for (Node j = 0; j < n_; ++j) {
      out(i, j) = std::max(0.0, flow_[static_cast<Arc>(i) * n_ + j]);
    }
  }
  return out;
}

double TransportNetworkSimplex::ArtificialFlow() const {
  double worst = 0.0;
  for (Arc e = real_arcs_; e < static_cast<Arc>(flow_.size()); ++e) {
    worst = std::max(worst, std::abs(flow_[e]));
  }
  return worst;
}

}  // namespace dyadicot::internal
