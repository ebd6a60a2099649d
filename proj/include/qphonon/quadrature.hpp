#pragma once

#include <cstddef>
#include <vector>

#include "qphonon/fock.hpp"

namespace qphonon {

/// Throws std::invalid_argument unless the grid is non-empty, strictly
/// ascending and starts at t >= 0.
void require_time_grid(const std::vector<double>& grid);

/// A time grid refined uniformly inside each output interval into an even
/// number of sub-steps, starting at t = 0. Running integrals from 0 are
/// available at every fine node: composite Simpson on even nodes, the
/// matching half-panel rule h/12 (5 f0 + 8 f1 - f2) on odd ones. Both carry
/// O(h^4) global error on smooth integrands, which lets nested integrals
/// reuse the fine nodes without losing order.
class RefinedGrid {
 public:
  RefinedGrid(std::vector<double> output_grid, double max_step);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& output_grid() const { return output_; }
  /// Fine-node index of output node k.
  std::size_t output_node(std::size_t k) const { return output_nodes_[k]; }

  std::vector<Complex> cumulative(const std::vector<Complex>& integrand) const;

  template <class F>
  std::vector<Complex> sample(F&& f) const {
    std::vector<Complex> out;
    out.reserve(nodes_.size());
    for (double t : nodes_) out.push_back(f(t));
    return out;
  }

  /// Picks the output-node values out of a fine-node series.
  std::vector<Complex> at_output(const std::vector<Complex>& fine) const;

 private:
  std::vector<double> output_;
  std::vector<double> nodes_;
  std::vector<std::size_t> output_nodes_;
};

}  // namespace qphonon
