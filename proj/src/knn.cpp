#include "gullypost/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gully {
namespace {

constexpr std::uint32_t kLeafSize = 12;

// Heap entry ordering: worst element first. "Worse" means farther, or at
// equal distance the higher point index, so the retained set is exactly the
// k best under the (distance, index) total order.
inline bool entry_less(const std::pair<double, std::size_t>& a,
                       const std::pair<double, std::size_t>& b) {
  if (a.first != b.first) return a.first < b.first;
  return a.second < b.second;
}

}  // namespace

double NnIndex::coord(std::size_t point, int axis) const {
  const Point3& p = points_[point];
  return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
}

std::uint32_t NnIndex::build_node(std::uint32_t lo, std::uint32_t hi) {
  const std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  if (hi - lo <= kLeafSize) {
    nodes_[id].axis = -1;
    nodes_[id].lo = lo;
    nodes_[id].hi = hi;
    return id;
  }

  // Split on the axis with the widest spread over this range; ties go to
  // the lower axis so the layout is a pure function of the input.
  double best_spread = -1.0;
  int axis = 0;
  for (int a = 0; a < dims_; ++a) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    for (std::uint32_t i = lo; i < hi; ++i) {
      const double c = coord(order_[i], a);
      mn = std::min(mn, c);
      mx = std::max(mx, c);
    }
    if (mx - mn > best_spread) {
      best_spread = mx - mn;
      axis = a;
    }
  }

  const std::uint32_t mid = lo + (hi - lo) / 2;
  std::nth_element(order_.begin() + lo, order_.begin() + mid,
                   order_.begin() + hi,
                   [this, axis](std::uint32_t a, std::uint32_t b) {
                     const double ca = coord(a, axis), cb = coord(b, axis);
                     if (ca != cb) return ca < cb;
                     return a < b;
                   });

  nodes_[id].axis = axis;
  nodes_[id].split = coord(order_[mid], axis);
  const std::uint32_t left = build_node(lo, mid);
  const std::uint32_t right = build_node(mid, hi);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void NnIndex::search(std::uint32_t node, const Point3& q, std::size_t k,
                     std::vector<std::pair<double, std::size_t>>& heap) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (std::uint32_t i = n.lo; i < n.hi; ++i) {
      const std::size_t idx = order_[i];
      const Point3& p = points_[idx];
      const double dx = p.x - q.x, dy = p.y - q.y;
      double d2 = dx * dx + dy * dy;
      if (dims_ == 3) {
        const double dz = p.z - q.z;
        d2 += dz * dz;
      }
      const std::pair<double, std::size_t> cand{d2, idx};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), entry_less);
      } else if (entry_less(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), entry_less);
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), entry_less);
      }
    }
    return;
  }

  const double qc = n.axis == 0 ? q.x : (n.axis == 1 ? q.y : q.z);
  const double diff = qc - n.split;
  const std::uint32_t near = diff < 0 ? n.left : n.right;
  const std::uint32_t far = diff < 0 ? n.right : n.left;
  search(near, q, k, heap);
  // The far side may still hold an equally distant, lower-index point, so
  // prune only when the plane is strictly farther than the current worst.
  if (heap.size() < k || diff * diff <= heap.front().first) {
    search(far, q, k, heap);
  }
}

NnIndex build_index(const std::vector<Point3>& points, int dims) {
  if (points.empty()) throw std::invalid_argument("empty point set");
  if (dims != 2 && dims != 3) throw std::invalid_argument("dims must be 2 or 3");
  for (const Point3& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw std::invalid_argument("non-finite coordinate in point set");
    }
  }

  NnIndex index;
  index.dims_ = dims;
  index.points_ = points;
  index.order_.resize(points.size());
  for (std::uint32_t i = 0; i < index.order_.size(); ++i) index.order_[i] = i;
  index.nodes_.reserve(2 * points.size() / kLeafSize + 4);
  index.root_ = index.build_node(0, static_cast<std::uint32_t>(points.size()));
  return index;
}

std::vector<Neighbor> knn_query(const NnIndex& index, const Point3& query,
                                std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  if (k > index.size()) throw std::invalid_argument("k exceeds point count");

  std::vector<std::pair<double, std::size_t>> heap;
  heap.reserve(k);
  index.search(index.root_, query, k, heap);
  std::sort(heap.begin(), heap.end(), entry_less);

  std::vector<Neighbor> out;
  out.reserve(heap.size());
  for (const auto& [d2, idx] : heap) out.push_back({idx, std::sqrt(d2)});
  return out;
}

std::size_t nearest(const NnIndex& index, const Point3& query) {
  return knn_query(index, query, 1).front().index;
}

}  // namespace gully
