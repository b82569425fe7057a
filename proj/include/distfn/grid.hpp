#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace distfn {

struct Node {
  int x = 0;  // column
  int y = 0;  // row, increasing downwards
  friend bool operator==(const Node&, const Node&) = default;
};

// Inside/outside flags on a width x height node grid, row-major.
// Construction does not validate; see validate_mask.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, std::vector<std::uint8_t> inside,
             double spacing = 1.0);
  BinaryMask(int width, int height, double spacing = 1.0);

  int width() const { return width_; }
  int height() const { return height_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return inside_.size(); }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }
  bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool inside(int x, int y) const { return inside_[index(x, y)] != 0; }
  bool inside(std::size_t i) const { return inside_[i] != 0; }
  void set(int x, int y, bool value) { inside_[index(x, y)] = value ? 1 : 0; }

  std::span<const std::uint8_t> data() const { return inside_; }
  std::size_t count_inside() const;

  friend bool operator==(const BinaryMask& a, const BinaryMask& b) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> inside_;
  double spacing_ = 1.0;
};

enum class NodeKind : std::uint8_t { kOutside, kBoundary, kInside };

// Per-node value; NaN marks nodes outside the field's domain.
class ScalarField {
 public:
  static constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

  ScalarField() = default;
  ScalarField(int width, int height, double fill = kUndefined);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  double& operator()(int x, int y) { return values_[index(x, y)]; }
  double operator()(int x, int y) const { return values_[index(x, y)]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  bool defined(std::size_t i) const { return values_[i] == values_[i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool same_shape(const ScalarField& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }
  bool same_shape(const BinaryMask& mask) const {
    return width_ == mask.width() && height_ == mask.height();
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

// Node-centred vector field. Components are zero away from inside nodes.
struct VectorField {
  int width = 0;
  int height = 0;
  std::vector<double> x;
  std::vector<double> y;

  VectorField() = default;
  VectorField(int w, int h)
      : width(w), height(h),
        x(static_cast<std::size_t>(w) * h, 0.0),
        y(static_cast<std::size_t>(w) * h, 0.0) {}
};

// Staggered field on grid edges. x[ey*(width-1)+ex] lives on the edge
// (ex,ey)-(ex+1,ey); y[ey*width+ex] on (ex,ey)-(ex,ey+1). Edges not touching
// an inside node hold 0.
struct EdgeField {
  int width = 0;
  int height = 0;
  std::vector<double> x;
  std::vector<double> y;

  EdgeField() = default;
  EdgeField(int w, int h)
      : width(w), height(h),
        x(static_cast<std::size_t>(w - 1) * h, 0.0),
        y(static_cast<std::size_t>(w) * (h - 1), 0.0) {}

  std::size_t xi(int ex, int ey) const {
    return static_cast<std::size_t>(ey) * (width - 1) + ex;
  }
  std::size_t yi(int ex, int ey) const {
    return static_cast<std::size_t>(ey) * width + ex;
  }
};

// Discrete boundary samples with quadrature weights.
struct BoundarySet {
  std::vector<Node> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// Throws Error(kTooSmall | kMaskTouchesBorder | kEmptyMask).
void validate_mask(const BinaryMask& mask);

// Background nodes 4-adjacent to an inside node, row-major, weight h each.
BoundarySet extract_boundary(const BinaryMask& mask);

std::vector<NodeKind> classify_nodes(const BinaryMask& mask);

// Row-major grid indices of the inside nodes.
std::vector<std::size_t> inside_indices(const BinaryMask& mask);

// Central differences at inside nodes; boundary neighbours read
// `boundary_value` (0 for distances, 1 for v), or the field's own stored
// values when it is nullopt.
VectorField gradient(const ScalarField& w, const BinaryMask& mask,
                     std::optional<double> boundary_value = 0.0);

// Central-difference divergence at inside nodes, components taken as 0 off
// the inside set. This is the negative adjoint of `gradient`.
ScalarField divergence(const VectorField& g, const BinaryMask& mask);

// 5-point Laplacian at inside nodes with boundary neighbours at
// `boundary_value`.
ScalarField laplacian(const ScalarField& w, const BinaryMask& mask,
                      double boundary_value = 0.0);

// Forward differences on every edge that touches an inside node.
EdgeField edge_gradient(const ScalarField& w, const BinaryMask& mask,
                        double boundary_value = 0.0);

// Negative adjoint of edge_gradient; edge_divergence(edge_gradient(w)) is
// exactly the 5-point Laplacian.
ScalarField edge_divergence(const EdgeField& g, const BinaryMask& mask);

}  // namespace distfn
