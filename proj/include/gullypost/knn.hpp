#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gullypost/types.hpp"

namespace gully {

struct Neighbor {
  std::size_t index;
  double distance;
};

/// Exact k-nearest-neighbor index over a fixed point set.
///
/// Results are guaranteed to match a brute-force distance scan, with equal
/// distances ordered by ascending point index. That determinism is load
/// bearing: unit partitions and voxel memberships derived from queries must
/// be reproducible across runs and thread counts.
///
/// `dims` selects the metric: 2 ignores z entirely, 3 is full Euclidean.
/// The index is immutable after construction and safe for concurrent queries.
class NnIndex {
 public:
  std::size_t size() const { return points_.size(); }
  int dims() const { return dims_; }
  const std::vector<Point3>& points() const { return points_; }

 private:
  friend NnIndex build_index(const std::vector<Point3>& points, int dims);
  friend std::vector<Neighbor> knn_query(const NnIndex& index,
                                         const Point3& query, std::size_t k);

  struct Node {
    int axis = -1;        // -1 marks a leaf
    double split = 0.0;   // splitting coordinate for internal nodes
    std::uint32_t lo = 0, hi = 0;  // range into order_ (leaves)
    std::uint32_t left = 0, right = 0;  // child node ids (internal)
  };

  double coord(std::size_t point, int axis) const;
  std::uint32_t build_node(std::uint32_t lo, std::uint32_t hi);
  void search(std::uint32_t node, const Point3& q, std::size_t k,
              std::vector<std::pair<double, std::size_t>>& heap) const;

  int dims_ = 3;
  std::vector<Point3> points_;
  std::vector<std::uint32_t> order_;  // kd layout: permutation of point ids
  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
};

/// Builds an exact spatial index. Throws std::invalid_argument on an empty
/// point set, a non-finite coordinate, or dims outside {2, 3}.
NnIndex build_index(const std::vector<Point3>& points, int dims);

/// The k nearest points to `query`, ascending by distance, equal distances
/// ascending by point index. Throws std::invalid_argument when k is zero
/// or exceeds the index size.
std::vector<Neighbor> knn_query(const NnIndex& index, const Point3& query,
                                std::size_t k);

/// Index of the single nearest point (lowest index on ties).
std::size_t nearest(const NnIndex& index, const Point3& query);

}  // namespace gully
