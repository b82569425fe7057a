#include "distfn/grid.hpp"

#include <algorithm>
#include <string>

#include "distfn/error.hpp"

namespace distfn {

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> inside,
                       double spacing)
    : width_(width), height_(height), inside_(std::move(inside)),
      spacing_(spacing) {
  if (width < 0 || height < 0 ||
      inside_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kBadConfig, "mask data does not match dimensions");
  }
  if (!(spacing > 0.0)) {
    throw Error(ErrorCode::kBadConfig, "grid spacing must be positive");
  }
}

BinaryMask::BinaryMask(int width, int height, double spacing)
    : BinaryMask(width, height,
                 std::vector<std::uint8_t>(
                     static_cast<std::size_t>(std::max(width, 0)) *
                         std::max(height, 0),
                     0),
                 spacing) {}

std::size_t BinaryMask::count_inside() const {
  return static_cast<std::size_t>(
      std::count_if(inside_.begin(), inside_.end(),
                    [](std::uint8_t v) { return v != 0; }));
}

ScalarField::ScalarField(int width, int height, double fill)
    : width_(width), height_(height),
      values_(static_cast<std::size_t>(width) * height, fill) {}

void validate_mask(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  if (w < 3 || h < 3) {
    throw Error(ErrorCode::kTooSmall, "mask is " + std::to_string(w) + "x" +
                                          std::to_string(h) +
                                          ", need at least 3x3");
  }
  bool any = false;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.inside(x, y)) continue;
      any = true;
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) {
        throw Error(ErrorCode::kMaskTouchesBorder,
                    "inside node at (" + std::to_string(x) + "," +
                        std::to_string(y) + ") lies on the image border");
      }
    }
  }
  if (!any) throw Error(ErrorCode::kEmptyMask, "mask has no inside node");
}

namespace {

constexpr int kDx[4] = {1, -1, 0, 0};
constexpr int kDy[4] = {0, 0, 1, -1};

bool touches_inside(const BinaryMask& mask, int x, int y) {
  for (int k = 0; k < 4; ++k) {
    const int nx = x + kDx[k];
    const int ny = y + kDy[k];
    if (mask.contains(nx, ny) && mask.inside(nx, ny)) return true;
  }
  return false;
}

void require_shape(const ScalarField& f, const BinaryMask& mask) {
  if (!f.same_shape(mask)) {
    throw Error(ErrorCode::kMaskMismatch, "field and mask dimensions differ");
  }
}

}  // namespace

std::vector<NodeKind> classify_nodes(const BinaryMask& mask) {
  std::vector<NodeKind> kinds(mask.size(), NodeKind::kOutside);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const auto i = mask.index(x, y);
      if (mask.inside(i)) {
        kinds[i] = NodeKind::kInside;
      } else if (touches_inside(mask, x, y)) {
        kinds[i] = NodeKind::kBoundary;
      }
    }
  }
  return kinds;
}

BoundarySet extract_boundary(const BinaryMask& mask) {
  validate_mask(mask);
  BoundarySet out;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.inside(x, y) && touches_inside(mask, x, y)) {
        out.points.push_back({x, y});
        out.weights.push_back(mask.spacing());
      }
    }
  }
  return out;
}

std::vector<std::size_t> inside_indices(const BinaryMask& mask) {
  std::vector<std::size_t> out;
  out.reserve(mask.count_inside());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask.inside(i)) out.push_back(i);
  }
  return out;
}

VectorField gradient(const ScalarField& w, const BinaryMask& mask,
                     std::optional<double> boundary_value) {
  require_shape(w, mask);
  const double inv2h = 0.5 / mask.spacing();
  VectorField g(mask.width(), mask.height());
  auto value = [&](int x, int y) {
    if (mask.inside(x, y) || !boundary_value) return w(x, y);
    return *boundary_value;
  };
  for (int y = 1; y + 1 < mask.height(); ++y) {
    for (int x = 1; x + 1 < mask.width(); ++x) {
      if (!mask.inside(x, y)) continue;
      const auto i = mask.index(x, y);
      g.x[i] = (value(x + 1, y) - value(x - 1, y)) * inv2h;
      g.y[i] = (value(x, y + 1) - value(x, y - 1)) * inv2h;
    }
  }
  return g;
}

ScalarField divergence(const VectorField& g, const BinaryMask& mask) {
  if (g.width != mask.width() || g.height != mask.height()) {
    throw Error(ErrorCode::kMaskMismatch, "vector field and mask differ");
  }
  const double inv2h = 0.5 / mask.spacing();
  ScalarField out(mask.width(), mask.height());
  auto gx = [&](int x, int y) {
    return mask.inside(x, y) ? g.x[mask.index(x, y)] : 0.0;
  };
  auto gy = [&](int x, int y) {
    return mask.inside(x, y) ? g.y[mask.index(x, y)] : 0.0;
  };
  for (int y = 1; y + 1 < mask.height(); ++y) {
    for (int x = 1; x + 1 < mask.width(); ++x) {
      if (!mask.inside(x, y)) continue;
      out(x, y) = (gx(x + 1, y) - gx(x - 1, y)) * inv2h +
                  (gy(x, y + 1) - gy(x, y - 1)) * inv2h;
    }
  }
  return out;
}

ScalarField laplacian(const ScalarField& w, const BinaryMask& mask,
                      double boundary_value) {
  require_shape(w, mask);
  const double inv_h2 = 1.0 / (mask.spacing() * mask.spacing());
  ScalarField out(mask.width(), mask.height());
  auto value = [&](int x, int y) {
    return mask.inside(x, y) ? w(x, y) : boundary_value;
  };
  for (int y = 1; y + 1 < mask.height(); ++y) {
    for (int x = 1; x + 1 < mask.width(); ++x) {
      if (!mask.inside(x, y)) continue;
      out(x, y) = (value(x + 1, y) + value(x - 1, y) + value(x, y + 1) +
                   value(x, y - 1) - 4.0 * w(x, y)) *
                  inv_h2;
    }
  }
  return out;
}

EdgeField edge_gradient(const ScalarField& w, const BinaryMask& mask,
                        double boundary_value) {
  require_shape(w, mask);
  const double inv_h = 1.0 / mask.spacing();
  EdgeField g(mask.width(), mask.height());
  auto value = [&](int x, int y) {
    return mask.inside(x, y) ? w(x, y) : boundary_value;
  };
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x + 1 < mask.width(); ++x) {
      if (mask.inside(x, y) || mask.inside(x + 1, y)) {
        g.x[g.xi(x, y)] = (value(x + 1, y) - value(x, y)) * inv_h;
      }
    }
  }
  for (int y = 0; y + 1 < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.inside(x, y) || mask.inside(x, y + 1)) {
        g.y[g.yi(x, y)] = (value(x, y + 1) - value(x, y)) * inv_h;
      }
    }
  }
  return g;
}

ScalarField edge_divergence(const EdgeField& g, const BinaryMask& mask) {
  if (g.width != mask.width() || g.height != mask.height()) {
    throw Error(ErrorCode::kMaskMismatch, "edge field and mask differ");
  }
  const double inv_h = 1.0 / mask.spacing();
  ScalarField out(mask.width(), mask.height());
  for (int y = 1; y + 1 < mask.height(); ++y) {
    for (int x = 1; x + 1 < mask.width(); ++x) {
      if (!mask.inside(x, y)) continue;
      out(x, y) = (g.x[g.xi(x, y)] - g.x[g.xi(x - 1, y)] + g.y[g.yi(x, y)] -
                   g.y[g.yi(x, y - 1)]) *
                  inv_h;
    }
  }
  return out;
}

}  // namespace distfn
