#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace roves::detail {

inline double squared_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

/// Static 3-d tree over a borrowed point array for exact k-NN queries.
class KdTree3 {
 public:
  explicit KdTree3(std::span<const Eigen::Vector3d> points) : points_(points) {
    order_.resize(points.size());
    for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
    nodes_.reserve(2 * points.size() / kLeafSize + 2);
    if (!points.empty()) build(0, static_cast<std::uint32_t>(points.size()));
  }

  /// Squared distances to the k nearest points other than `self`, ascending.
  std::vector<double> nearest(std::size_t self, std::size_t k) const {
    std::priority_queue<double> heap;  // max-heap of the current best
    search(0, points_[self], self, k, heap);
    std::vector<double> out;
    out.reserve(heap.size());
    while (!heap.empty()) {
      out.push_back(heap.top());
      heap.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr std::uint32_t kLeafSize = 16;

  struct Node {
    std::uint32_t begin, end;
    std::uint32_t left = 0, right = 0;
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= kLeafSize) return id;

    Eigen::Vector3d lo = points_[order_[begin]];
    Eigen::Vector3d hi = lo;
    for (std::uint32_t i = begin; i < end; ++i) {
      lo = lo.cwiseMin(points_[order_[i]]);
      hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       return points_[a][axis] < points_[b][axis];
                     });
    const double split = points_[order_[mid]][axis];
    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search(std::uint32_t id, const Eigen::Vector3d& q, std::size_t self, std::size_t k,
              std::priority_queue<double>& heap) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t idx = order_[i];
        if (idx == self) continue;
        const double d2 = squared_distance(q, points_[idx]);
        if (heap.size() < k) {
          heap.push(d2);
        } else if (d2 < heap.top()) {
          heap.pop();
          heap.push(d2);
        }
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    const std::uint32_t near = diff < 0.0 ? node.left : node.right;
    const std::uint32_t far = diff < 0.0 ? node.right : node.left;
    search(near, q, self, k, heap);
    if (heap.size() < k || diff * diff <= heap.top()) search(far, q, self, k, heap);
  }

  std::span<const Eigen::Vector3d> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace roves::detail
