#include "qphonon/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace qphonon {

void require_time_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("time grid is empty");
  if (!(grid.front() >= 0.0)) throw std::invalid_argument("time grid must start at t >= 0");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw std::invalid_argument("time grid must be strictly ascending");
  }
  for (double t : grid) {
    if (!std::isfinite(t)) throw std::invalid_argument("time grid entries must be finite");
  }
}

RefinedGrid::RefinedGrid(std::vector<double> output_grid, double max_step) : output_(std::move(output_grid)) {
  require_time_grid(output_);
  if (!(max_step > 0.0)) throw std::invalid_argument("quadrature max_step must be positive");

  nodes_.push_back(0.0);
  double left = 0.0;
  for (double right : output_) {
    if (right > left) {
      const auto panels = static_cast<std::size_t>(std::ceil((right - left) / (2.0 * max_step)));
      const std::size_t steps = 2 * std::max<std::size_t>(panels, 1);
      const double h = (right - left) / static_cast<double>(steps);
      for (std::size_t j = 1; j < steps; ++j) nodes_.push_back(left + h * static_cast<double>(j));
      nodes_.push_back(right);
    }
    output_nodes_.push_back(nodes_.size() - 1);
    left = right;
  }
}

std::vector<Complex> RefinedGrid::cumulative(const std::vector<Complex>& f) const {
  if (f.size() != nodes_.size()) throw std::invalid_argument("integrand length does not match the grid");
  std::vector<Complex> out(nodes_.size(), Complex(0.0));
  // Walk interval by interval; every interval holds an even number of steps.
  std::size_t start = 0;
  for (std::size_t end : output_nodes_) {
    if (end == start) continue;
    const double h = (nodes_[end] - nodes_[start]) / static_cast<double>(end - start);
    for (std::size_t i = start; i < end; i += 2) {
      out[i + 1] = out[i] + (h / 12.0) * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]);
      out[i + 2] = out[i] + (h / 3.0) * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    }
    start = end;
  }
  return out;
}

std::vector<Complex> RefinedGrid::at_output(const std::vector<Complex>& fine) const {
  std::vector<Complex> out;
  out.reserve(output_nodes_.size());
  for (std::size_t idx : output_nodes_) out.push_back(fine.at(idx));
  return out;
}

}  // namespace qphonon
