#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgmrf {

/// Zero-based site coordinate: row i, column j, frame t.
struct GridIndex {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t frame = 0;

  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

std::string to_string(const GridIndex& idx);

/// Extent of a rows x cols x frames stack. Flat storage is row-major within a
/// frame with frames outermost: offset = (t * rows + i) * cols + j. File I/O
/// uses the same order.
struct Geometry {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t frames = 0;

  std::size_t pixels_per_frame() const { return rows * cols; }
  std::size_t size() const { return rows * cols * frames; }
  bool contains(const GridIndex& idx) const {
    return idx.row < rows && idx.col < cols && idx.frame < frames;
  }
  std::size_t offset(const GridIndex& idx) const {
    return (idx.frame * rows + idx.row) * cols + idx.col;
  }
  GridIndex index(std::size_t offset) const {
    const std::size_t per_frame = rows * cols;
    return {(offset % per_frame) / cols, offset % cols, offset / per_frame};
  }
  /// Same spatial extent with a different number of frames.
  Geometry with_frames(std::size_t n) const { return {rows, cols, n}; }

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Throws std::invalid_argument unless all extents are positive.
void require_valid(const Geometry& g);
/// Throws ValidationError naming `what` when the two geometries differ.
void require_same_shape(const Geometry& a, const Geometry& b, const char* what);

/// Dense rows x cols x frames array. Carries intensities (double), photon
/// counts (uint32) and masks (uint8).
template <class T>
class FrameStack {
 public:
  FrameStack() = default;
  explicit FrameStack(Geometry g, T fill = T{}) : geom_(g), data_(g.size(), fill) {
    require_valid(g);
  }
  FrameStack(Geometry g, std::vector<T> data) : geom_(g), data_(std::move(data)) {
    require_valid(g);
    if (data_.size() != g.size()) {
      throw std::invalid_argument("FrameStack: data length does not match rows*cols*frames");
    }
  }

  const Geometry& geometry() const { return geom_; }
  std::size_t rows() const { return geom_.rows; }
  std::size_t cols() const { return geom_.cols; }
  std::size_t frames() const { return geom_.frames; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t i, std::size_t j, std::size_t t) {
    return data_[(t * geom_.rows + i) * geom_.cols + j];
  }
  const T& operator()(std::size_t i, std::size_t j, std::size_t t) const {
    return data_[(t * geom_.rows + i) * geom_.cols + j];
  }
  T& operator[](const GridIndex& idx) { return data_[geom_.offset(idx)]; }
  const T& operator[](const GridIndex& idx) const { return data_[geom_.offset(idx)]; }

  std::span<T> frame(std::size_t t) {
    return {data_.data() + t * geom_.pixels_per_frame(), geom_.pixels_per_frame()};
  }
  std::span<const T> frame(std::size_t t) const {
    return {data_.data() + t * geom_.pixels_per_frame(), geom_.pixels_per_frame()};
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const FrameStack&, const FrameStack&) = default;

 private:
  Geometry geom_;
  std::vector<T> data_;
};

using IntensityStack = FrameStack<double>;
using CountStack = FrameStack<std::uint32_t>;

/// Validity mask: 1 = working detector, 0 = faulty pixel or missing sample.
/// A default-constructed mask for a geometry marks every site valid.
class Mask {
 public:
  Mask() = default;
  explicit Mask(Geometry g) : bits_(g, std::uint8_t{1}) {}
  /// Throws ValidationError if any entry is not 0 or 1.
  explicit Mask(FrameStack<std::uint8_t> bits);

  const Geometry& geometry() const { return bits_.geometry(); }
  bool valid(const GridIndex& idx) const { return bits_[idx] != 0; }
  bool valid(std::size_t offset) const { return bits_.data()[offset] != 0; }
  void set(const GridIndex& idx, bool ok) { bits_[idx] = ok ? 1 : 0; }

  std::size_t invalid_count() const;
  /// Fraction of faulty sites. The sampler accepts any value, but the prior
  /// only regularizes well when faults are sparse.
  double invalid_fraction() const;

  const FrameStack<std::uint8_t>& bits() const { return bits_; }

 private:
  FrameStack<std::uint8_t> bits_;
};

/// Per-detector efficiency, constant across frames. All entries > 0.
class EfficiencyMap {
 public:
  EfficiencyMap() = default;
  EfficiencyMap(std::size_t rows, std::size_t cols, double value = 1.0);
  EfficiencyMap(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Temporal boundary handling for the W layer. Fixed pins x at ghost frames
/// 0 and T+1 to a constant; Cyclic wraps time so ghost frames alias T and 1.
enum class TimeBoundary { Fixed, Cyclic };

/// The four U sites coupled to X site idx: (i,j), (i-1,j), (i,j-1),
/// (i-1,j-1), wrapped cyclically. U stores one site per pixel per frame: the
/// extra row/column of a (rows+1) x (cols+1) auxiliary grid aliases row/col 0
/// under the cyclic boundary.
std::array<GridIndex, 4> neighbors_u_of_x(const GridIndex& idx, const Geometry& g);

/// The four X sites coupled to U site idx: (i,j), (i+1,j), (i,j+1), (i+1,j+1).
std::array<GridIndex, 4> neighbors_x_of_u(const GridIndex& idx, const Geometry& g);

/// W sites (i,j,t) and (i,j,t+1) of X site (i,j,t). W holds frames + 1 frames.
std::array<GridIndex, 2> neighbors_w_of_x(const GridIndex& idx, const Geometry& g);

/// Lower clamp on the fixed temporal boundary value.
inline constexpr double kGammaMin = 1e-3;

/// Mean of the valid entries of y, clamped below by kGammaMin. Used as the
/// intensity at ghost frames 0 and T+1. Throws ValidationError when every
/// site is masked.
double temporal_boundary_value(const CountStack& y, const Mask& mask);

}  // namespace pgmrf
