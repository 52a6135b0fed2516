#include "pgmrf/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pgmrf/errors.hpp"

namespace pgmrf {

std::string to_string(const GridIndex& idx) {
  return "(" + std::to_string(idx.row) + "," + std::to_string(idx.col) + "," +
         std::to_string(idx.frame) + ")";
}

void require_valid(const Geometry& g) {
  if (g.rows == 0 || g.cols == 0 || g.frames == 0) {
    throw std::invalid_argument("geometry extents must be positive");
  }
}

void require_same_shape(const Geometry& a, const Geometry& b, const char* what) {
  if (!(a == b)) {
    throw ValidationError(std::string(what) + ": shape mismatch (" + std::to_string(a.rows) +
                          "x" + std::to_string(a.cols) + "x" + std::to_string(a.frames) +
                          " vs " + std::to_string(b.rows) + "x" + std::to_string(b.cols) +
                          "x" + std::to_string(b.frames) + ")");
  }
}

Mask::Mask(FrameStack<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (std::size_t k = 0; k < bits_.size(); ++k) {
    if (bits_.data()[k] > 1) {
      throw ValidationError("mask entry at " + to_string(bits_.geometry().index(k)) +
                            " is not 0 or 1");
    }
  }
}

std::size_t Mask::invalid_count() const {
  return static_cast<std::size_t>(
      std::count(bits_.data().begin(), bits_.data().end(), std::uint8_t{0}));
}

double Mask::invalid_fraction() const {
  return bits_.size() == 0 ? 0.0
                           : static_cast<double>(invalid_count()) /
                                 static_cast<double>(bits_.size());
}

EfficiencyMap::EfficiencyMap(std::size_t rows, std::size_t cols, double value)
    : EfficiencyMap(rows, cols, std::vector<double>(rows * cols, value)) {}

EfficiencyMap::EfficiencyMap(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows == 0 || cols == 0 || values_.size() != rows * cols) {
    throw std::invalid_argument("EfficiencyMap: size does not match rows*cols");
  }
  for (double v : values_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError("EfficiencyMap: entries must be finite and > 0");
    }
  }
}

namespace {

std::size_t wrap_dec(std::size_t v, std::size_t n) { return v == 0 ? n - 1 : v - 1; }
std::size_t wrap_inc(std::size_t v, std::size_t n) { return v + 1 == n ? 0 : v + 1; }

void require_in_range(const GridIndex& idx, const Geometry& g) {
  if (!g.contains(idx)) {
    throw std::out_of_range("grid index " + to_string(idx) + " outside geometry");
  }
}

}  // namespace

std::array<GridIndex, 4> neighbors_u_of_x(const GridIndex& idx, const Geometry& g) {
  require_in_range(idx, g);
  const std::size_t up = wrap_dec(idx.row, g.rows);
  const std::size_t left = wrap_dec(idx.col, g.cols);
  return {{{idx.row, idx.col, idx.frame},
           {up, idx.col, idx.frame},
           {idx.row, left, idx.frame},
           {up, left, idx.frame}}};
}

std::array<GridIndex, 4> neighbors_x_of_u(const GridIndex& idx, const Geometry& g) {
  require_in_range(idx, g);
  const std::size_t down = wrap_inc(idx.row, g.rows);
  const std::size_t right = wrap_inc(idx.col, g.cols);
  return {{{idx.row, idx.col, idx.frame},
           {down, idx.col, idx.frame},
           {idx.row, right, idx.frame},
           {down, right, idx.frame}}};
}

std::array<GridIndex, 2> neighbors_w_of_x(const GridIndex& idx, const Geometry& g) {
  require_in_range(idx, g);
  return {{{idx.row, idx.col, idx.frame}, {idx.row, idx.col, idx.frame + 1}}};
}

double temporal_boundary_value(const CountStack& y, const Mask& mask) {
  require_same_shape(y.geometry(), mask.geometry(), "temporal_boundary_value");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (mask.valid(k)) {
      sum += y.data()[k];
      ++n;
    }
  }
  if (n == 0) {
    throw ValidationError("temporal_boundary_value: every site is masked");
  }
  return std::max(sum / static_cast<double>(n), kGammaMin);
}

}  // namespace pgmrf
