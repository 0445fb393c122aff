#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "plastica/core.hpp"
#include "plastica/errors.hpp"

namespace plastica {

// kd-tree over a fixed point set, for nearest-neighbour squared distances.
class KdTree {
 public:
  explicit KdTree(std::vector<Vec> points) : pts_(std::move(points)) {
    if (pts_.empty()) throw Error("KdTree: empty point set");
    dim_ = pts_[0].size();
    index_.resize(pts_.size());
    for (std::size_t i = 0; i < pts_.size(); ++i) index_[i] = i;
    nodes_.reserve(pts_.size());
    root_ = build(0, pts_.size(), 0);
  }

  // Squared distance from q to the nearest stored point.
  double nearest_dist2(const Vec& q) const {
    double best = std::numeric_limits<double>::infinity();
    search(root_, q, best);
    return best;
  }

  const std::vector<Vec>& points() const { return pts_; }

 private:
  struct Node {
    std::size_t point;
    int left = -1, right = -1;
    std::size_t axis = 0;
  };

  int build(std::size_t lo, std::size_t hi, std::size_t depth) {
    if (lo >= hi) return -1;
    const std::size_t axis = depth % dim_;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(index_.begin() + lo, index_.begin() + mid,
                     index_.begin() + hi,
                     [&](std::size_t a, std::size_t b) {
                       return pts_[a][axis] < pts_[b][axis];
                     });
    Node n;
    n.point = index_[mid];
    n.axis = axis;
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(n);
    nodes_[self].left = build(lo, mid, depth + 1);
    nodes_[self].right = build(mid + 1, hi, depth + 1);
    return self;
  }

  void search(int node, const Vec& q, double& best) const {
    if (node < 0) return;
    const Node& n = nodes_[node];
    const double d2 = dist2(q, pts_[n.point]);
    if (d2 < best) best = d2;
    const double delta = q[n.axis] - pts_[n.point][n.axis];
    const int near = delta < 0.0 ? n.left : n.right;
    const int far = delta < 0.0 ? n.right : n.left;
    search(near, q, best);
    if (delta * delta < best) search(far, q, best);
  }

  std::vector<Vec> pts_;
  std::vector<std::size_t> index_;
  std::vector<Node> nodes_;
  std::size_t dim_ = 0;
  int root_ = -1;
};

}  // namespace plastica
