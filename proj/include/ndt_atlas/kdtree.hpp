/*
 * Copyright 2026 The NDT Atlas Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NDT_ATLAS_KDTREE_HPP_
#define NDT_ATLAS_KDTREE_HPP_

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ndt_atlas/geometry.hpp"

namespace ndt_atlas {

/// Static 3D kd-tree over a point set, built once and queried read-only.
/// Queries are deterministic: traversal order depends only on the point set.
class KdTree {
 public:
  KdTree() = default;

  explicit KdTree(std::vector<Eigen::Vector3d> points)
      : points_(std::move(points)) {
    if (points_.empty()) {
      return;
    }
    std::vector<std::size_t> order(points_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    nodes_.reserve(points_.size());
    root_ = build(order, 0, points_.size(), 0);
  }

  explicit KdTree(const Scan& scan) : KdTree(positions_of(scan)) {}

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Eigen::Vector3d& point(std::size_t index) const {
    return points_[index];
  }

  /// Index and squared distance of the closest point to the query.
  std::pair<std::size_t, double> nearest(const Eigen::Vector3d& query) const {
    if (points_.empty()) {
      throw std::logic_error("KdTree::nearest on empty tree");
    }
    std::size_t best_index = 0;
    double best_sq = std::numeric_limits<double>::infinity();
    nearest_recursive(root_, query, best_index, best_sq);
    return {best_index, best_sq};
  }

  /// Indices of all points within Euclidean distance `radius` of the query,
  /// boundary inclusive. Order follows the fixed tree traversal.
  std::vector<std::size_t> radius_search(const Eigen::Vector3d& query,
                                         double radius) const {
    std::vector<std::size_t> indices;
    if (!points_.empty()) {
      radius_recursive(root_, query, radius * radius, indices);
    }
    return indices;
  }

  static std::vector<Eigen::Vector3d> positions_of(const Scan& scan) {
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(scan.size());
    for (const Point& p : scan.points) {
      pts.push_back(p.position());
    }
    return pts;
  }

 private:
  static constexpr int kLeaf = -1;

  struct Node {
    std::size_t index = 0;
    int axis = 0;
    int left = kLeaf;
    int right = kLeaf;
  };

  int build(std::vector<std::size_t>& order, std::size_t begin,
            std::size_t end, int depth) {
    if (begin >= end) {
      return kLeaf;
    }
    const int axis = depth % 3;
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order.begin() + begin, order.begin() + mid,
                     order.begin() + end,
                     [&](std::size_t a, std::size_t b) {
                       if (points_[a][axis] != points_[b][axis]) {
                         return points_[a][axis] < points_[b][axis];
                       }
                       return a < b;  // stable tie-break for determinism
                     });
    const int node_id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{order[mid], axis, kLeaf, kLeaf});
    nodes_[node_id].left = build(order, begin, mid, depth + 1);
    nodes_[node_id].right = build(order, mid + 1, end, depth + 1);
    return node_id;
  }

  void nearest_recursive(int node_id, const Eigen::Vector3d& query,
                         std::size_t& best_index, double& best_sq) const {
    if (node_id == kLeaf) {
      return;
    }
    const Node& node = nodes_[node_id];
    const Eigen::Vector3d& p = points_[node.index];
    const double d_sq = (p - query).squaredNorm();
    if (d_sq < best_sq) {
      best_sq = d_sq;
      best_index = node.index;
    }
    const double delta = query[node.axis] - p[node.axis];
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    nearest_recursive(near, query, best_index, best_sq);
    if (delta * delta < best_sq) {
      nearest_recursive(far, query, best_index, best_sq);
    }
  }

  void radius_recursive(int node_id, const Eigen::Vector3d& query,
                        double radius_sq,
                        std::vector<std::size_t>& indices) const {
    if (node_id == kLeaf) {
      return;
    }
    const Node& node = nodes_[node_id];
    const Eigen::Vector3d& p = points_[node.index];
    if ((p - query).squaredNorm() <= radius_sq) {
      indices.push_back(node.index);
    }
    const double delta = query[node.axis] - p[node.axis];
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    radius_recursive(near, query, radius_sq, indices);
    if (delta * delta <= radius_sq) {
      radius_recursive(far, query, radius_sq, indices);
    }
  }

  std::vector<Eigen::Vector3d> points_;
  std::vector<Node> nodes_;
  int root_ = kLeaf;
};

}  // namespace ndt_atlas

#endif  // NDT_ATLAS_KDTREE_HPP_
