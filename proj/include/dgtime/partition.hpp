#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgtime {

/// Nodes 0 = t_0 < t_1 < ... < t_N = T. Slab n is the half-open interval (t_n, t_{n+1}].
class TimePartition {
 public:
  TimePartition() = default;

  explicit TimePartition(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw std::invalid_argument("TimePartition: need at least two nodes");
    if (nodes_.front() != 0.0) throw std::invalid_argument("TimePartition: first node must be 0");
    for (std::size_t n = 0; n + 1 < nodes_.size(); ++n) {
      if (!(nodes_[n + 1] > nodes_[n])) {
        throw std::invalid_argument("TimePartition: nodes must be strictly increasing (node " +
                                    std::to_string(n + 1) + ")");
      }
    }
  }

  [[nodiscard]] std::size_t num_slabs() const { return nodes_.size() - 1; }
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
  [[nodiscard]] double node(std::size_t n) const { return nodes_.at(n); }
  [[nodiscard]] double final_time() const { return nodes_.back(); }
  [[nodiscard]] double width(std::size_t n) const { return nodes_.at(n + 1) - nodes_.at(n); }

  /// tau = max_n tau_n
  [[nodiscard]] double max_width() const {
    double tau = 0.0;
    for (std::size_t n = 0; n < num_slabs(); ++n) tau = std::max(tau, width(n));
    return tau;
  }
  [[nodiscard]] double min_width() const {
    double tau = width(0);
    for (std::size_t n = 1; n < num_slabs(); ++n) tau = std::min(tau, width(n));
    return tau;
  }

  /// Index of the slab owning t, i.e. t in (t_n, t_{n+1}]; t_0 belongs to slab 0.
  [[nodiscard]] std::size_t slab_of(double t) const {
    if (t < nodes_.front() || t > nodes_.back()) {
      throw std::out_of_range("TimePartition: t = " + std::to_string(t) + " outside [t_0, t_N]");
    }
    auto it = std::lower_bound(nodes_.begin() + 1, nodes_.end(), t);
    return static_cast<std::size_t>(it - nodes_.begin()) - 1;
  }

  /// Theory assumes tau <= 1; larger partitions are usable but flagged.
  [[nodiscard]] bool exceeds_unit_width() const { return max_width() > 1.0; }

 private:
  std::vector<double> nodes_{0.0, 1.0};
};

/// Partition of (0, T] into N slabs with widths proportional to grading^n.
/// grading = 1 gives the uniform partition.
inline TimePartition make_partition(double T, int N, double grading = 1.0, bool warn = true) {
  if (!(T > 0.0)) throw std::invalid_argument("make_partition: T must be positive");
  if (N < 1) throw std::invalid_argument("make_partition: N must be >= 1");
  if (!(grading > 0.0)) throw std::invalid_argument("make_partition: grading must be positive");
  std::vector<double> nodes(static_cast<std::size_t>(N) + 1, 0.0);
  if (grading == 1.0) {
    for (int n = 1; n <= N; ++n) nodes[n] = T * n / N;
  } else {
    double total = 0.0, w = 1.0;
    std::vector<double> widths(N);
    for (int n = 0; n < N; ++n) {
      widths[n] = w;
      total += w;
      w *= grading;
    }
    double acc = 0.0;
    for (int n = 0; n < N; ++n) {
      acc += widths[n];
      nodes[n + 1] = T * acc / total;
    }
  }
  nodes.back() = T;
  TimePartition part(std::move(nodes));
  if (warn && part.exceeds_unit_width()) {
    std::cerr << "dgtime: warning: partition has max slab width " << part.max_width() << " > 1\n";
  }
  return part;
}

}  // namespace dgtime
