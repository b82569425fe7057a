#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "distfn/edt.hpp"
#include "distfn/error.hpp"
#include "distfn/grid.hpp"
#include "test_support.hpp"

namespace distfn {
namespace {

using testing::block_mask;
using testing::random_mask;
using testing::shape;

TEST(ValidateMask, MinimalMaskIsLegal) {
  BinaryMask m(3, 3);
  m.set(1, 1, true);
  EXPECT_NO_THROW(validate_mask(m));
}

TEST(ValidateMask, CornerNodeTouchesBorder) {
  BinaryMask m(3, 3);
  m.set(0, 0, true);
  EXPECT_THROW_CODE(validate_mask(m), ErrorCode::kMaskTouchesBorder);
}

TEST(ValidateMask, AllBackgroundIsEmpty) {
  EXPECT_THROW_CODE(validate_mask(BinaryMask(5, 5)), ErrorCode::kEmptyMask);
}

TEST(ValidateMask, TooSmall) {
  EXPECT_THROW_CODE(validate_mask(BinaryMask(2, 5)), ErrorCode::kTooSmall);
  EXPECT_THROW_CODE(validate_mask(BinaryMask(5, 2)), ErrorCode::kTooSmall);
}

TEST(BinaryMask, RejectsMismatchedDataAndSpacing) {
  EXPECT_THROW_CODE(BinaryMask(3, 3, std::vector<std::uint8_t>(8)),
                    ErrorCode::kBadConfig);
  EXPECT_THROW_CODE(BinaryMask(3, 3, 0.0), ErrorCode::kBadConfig);
}

TEST(ExtractBoundary, SingleNodeHasFourNeighbours) {
  BinaryMask m(3, 3, 0.5);
  m.set(1, 1, true);
  const BoundarySet b = extract_boundary(m);
  const std::vector<Node> want = {{1, 0}, {0, 1}, {2, 1}, {1, 2}};
  EXPECT_EQ(b.points, want);
  EXPECT_EQ(b.weights, std::vector<double>(4, 0.5));
}

TEST(ExtractBoundary, BlockRingExcludesCorners) {
  const BinaryMask m = block_mask(5, 5, 1, 1, 3, 3);
  const BoundarySet b = extract_boundary(m);
  EXPECT_EQ(b.size(), 12u);
  for (const Node& p : b.points) {
    const bool corner = (p.x == 0 || p.x == 4) && (p.y == 0 || p.y == 4);
    EXPECT_FALSE(corner);
  }
}

TEST(ExtractBoundary, DiskBoundaryNodesAreAdjacentBackground) {
  const BinaryMask m = shape("disk:r=20,canvas=64");
  const BoundarySet b = extract_boundary(m);
  ASSERT_FALSE(b.empty());
  for (const Node& p : b.points) {
    EXPECT_FALSE(m.inside(p.x, p.y));
    const bool adjacent = m.inside(p.x + 1, p.y) || m.inside(p.x - 1, p.y) ||
                          m.inside(p.x, p.y + 1) || m.inside(p.x, p.y - 1);
    EXPECT_TRUE(adjacent);
  }
}

TEST(ExtractBoundary, DeterministicRowMajorAndDisjoint) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const BinaryMask m = random_mask(rng, 12, 9);
    const BoundarySet a = extract_boundary(m);
    const BoundarySet b = extract_boundary(BinaryMask(m));
    EXPECT_EQ(a.points, b.points);
    EXPECT_TRUE(std::is_sorted(a.points.begin(), a.points.end(),
                               [](const Node& p, const Node& q) {
                                 return p.y != q.y ? p.y < q.y : p.x < q.x;
                               }));
    const auto kinds = classify_nodes(m);
    std::size_t boundary_kinds = 0;
    for (const Node& p : a.points) {
      EXPECT_FALSE(m.inside(p.x, p.y));
      EXPECT_EQ(kinds[m.index(p.x, p.y)], NodeKind::kBoundary);
    }
    for (NodeKind kind : kinds) boundary_kinds += kind == NodeKind::kBoundary;
    EXPECT_EQ(boundary_kinds, a.size());
  }
}

TEST(ExtractBoundary, ValidatesMask) {
  EXPECT_THROW_CODE(extract_boundary(BinaryMask(5, 5)), ErrorCode::kEmptyMask);
}

TEST(InsideIndices, RowMajor) {
  const BinaryMask m = block_mask(5, 4, 1, 1, 2, 2);
  const std::vector<std::size_t> want = {6, 7, 11, 12};
  EXPECT_EQ(inside_indices(m), want);
}

ScalarField field_from(const BinaryMask& m, auto f) {
  ScalarField w(m.width(), m.height(), 0.0);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) w(x, y) = f(x, y);
  }
  return w;
}

TEST(Gradient, ConstantFieldIsFlatAwayFromRing) {
  const BinaryMask m = block_mask(11, 11, 1, 1, 9, 9);
  const ScalarField w = field_from(m, [](int, int) { return 3.5; });
  const VectorField g = gradient(w, m);
  for (int y = 2; y <= 8; ++y) {
    for (int x = 2; x <= 8; ++x) {
      EXPECT_EQ(g.x[m.index(x, y)], 0.0);
      EXPECT_EQ(g.y[m.index(x, y)], 0.0);
    }
  }
}

TEST(Gradient, LinearFieldIsExact) {
  const double h = 0.25;
  const BinaryMask m = block_mask(20, 20, 1, 1, 18, 18, h);
  const ScalarField w = field_from(m, [&](int x, int) { return x * h; });
  const VectorField g = gradient(w, m);
  for (int y = 2; y <= 17; ++y) {
    for (int x = 2; x <= 17; ++x) {
      EXPECT_NEAR(g.x[m.index(x, y)], 1.0, 1e-12);
      EXPECT_EQ(g.y[m.index(x, y)], 0.0);
    }
  }
  // With the stored values, the linear slope holds on the ring too.
  const VectorField stored = gradient(w, m, std::nullopt);
  EXPECT_NEAR(stored.x[m.index(1, 5)], 1.0, 1e-12);
}

TEST(Gradient, StripEdtHasUnitSlopeAwayFromMidline) {
  const BinaryMask m = shape("strip:width=31,canvas=80x40");
  const ScalarField d = exact_edt(m);
  const VectorField g = gradient(d, m);
  const int mid = 19;
  for (int y = 4; y <= 34; ++y) {
    if (std::abs(y - mid) < 2) continue;
    for (int x = 20; x < 60; ++x) {
      const auto i = m.index(x, y);
      EXPECT_NEAR(std::hypot(g.x[i], g.y[i]), 1.0, 1e-12) << x << "," << y;
    }
  }
}

TEST(Gradient, ZeroOutsideInsideSet) {
  std::mt19937_64 rng(3);
  const BinaryMask m = random_mask(rng, 10, 10);
  std::uniform_real_distribution<double> u(-1, 1);
  const ScalarField w = field_from(m, [&](int, int) { return u(rng); });
  const VectorField g = gradient(w, m);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m.inside(i)) {
      EXPECT_EQ(g.x[i], 0.0);
      EXPECT_EQ(g.y[i], 0.0);
    }
  }
}

TEST(Gradient, ShapeMismatchThrows) {
  const BinaryMask m = block_mask(5, 5, 1, 1, 3, 3);
  EXPECT_THROW_CODE(gradient(ScalarField(4, 5), m), ErrorCode::kMaskMismatch);
}

TEST(Divergence, ZeroFieldAndLinearField) {
  const double h = 0.5;
  const BinaryMask m = block_mask(16, 16, 1, 1, 14, 14, h);
  const VectorField zero(16, 16);
  const ScalarField d0 = divergence(zero, m);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.inside(i)) EXPECT_EQ(d0[i], 0.0);
  }
  VectorField g(16, 16);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.inside(i)) g.x[i] = static_cast<double>(i % 16) * h;
  }
  const ScalarField d1 = divergence(g, m);
  for (int y = 2; y <= 13; ++y) {
    for (int x = 2; x <= 13; ++x) EXPECT_NEAR(d1(x, y), 1.0, 1e-12);
  }
}

class RandomFields : public ::testing::Test {
 protected:
  std::mt19937_64 rng{2024};
  std::uniform_real_distribution<double> u{-1.0, 1.0};

  ScalarField random_field(const BinaryMask& m) {
    ScalarField w(m.width(), m.height());
    for (std::size_t i = 0; i < m.size(); ++i) w[i] = m.inside(i) ? u(rng) : 0.0;
    return w;
  }
};

TEST_F(RandomFields, DivergenceIsNegativeAdjointOfGradient) {
  for (int k = 0; k < 10; ++k) {
    const BinaryMask m = random_mask(rng, 16, 16, 0.7, 0.5);
    const ScalarField w = random_field(m);
    VectorField g(16, 16);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m.inside(i)) {
        g.x[i] = u(rng);
        g.y[i] = u(rng);
      }
    }
    const ScalarField div = divergence(g, m);
    const VectorField grad = gradient(w, m);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m.inside(i)) continue;
      lhs += div[i] * w[i];
      rhs -= g.x[i] * grad.x[i] + g.y[i] * grad.y[i];
    }
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST_F(RandomFields, CentralDivGradIsWideLaplacian) {
  const double h = 1.0;
  for (int k = 0; k < 10; ++k) {
    const BinaryMask m = random_mask(rng, 16, 16, 0.7);
    const ScalarField w = random_field(m);
    const ScalarField dg = divergence(gradient(w, m), m);
    // Independent oracle: zero-extended central differences composed by hand.
    auto W = [&](int x, int y) { return m.inside(x, y) ? w(x, y) : 0.0; };
    auto Gx = [&](int x, int y) {
      return m.inside(x, y) ? (W(x + 1, y) - W(x - 1, y)) / (2 * h) : 0.0;
    };
    auto Gy = [&](int x, int y) {
      return m.inside(x, y) ? (W(x, y + 1) - W(x, y - 1)) / (2 * h) : 0.0;
    };
    for (int y = 1; y < 15; ++y) {
      for (int x = 1; x < 15; ++x) {
        if (!m.inside(x, y)) continue;
        const double want = (Gx(x + 1, y) - Gx(x - 1, y)) / (2 * h) +
                            (Gy(x, y + 1) - Gy(x, y - 1)) / (2 * h);
        EXPECT_NEAR(dg(x, y), want, 1e-12);
      }
    }
  }
}

TEST_F(RandomFields, EdgeDivGradIsFivePointLaplacian) {
  for (double h : {1.0, 0.5}) {
    for (int k = 0; k < 10; ++k) {
      const BinaryMask m = random_mask(rng, 16, 16, 0.7, h);
      const ScalarField w = random_field(m);
      const ScalarField dg = edge_divergence(edge_gradient(w, m), m);
      const ScalarField lap = laplacian(w, m);
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m.inside(i)) continue;
        // Hand-written 5-point stencil with zero boundary values.
        const int x = static_cast<int>(i % 16), y = static_cast<int>(i / 16);
        auto W = [&](int a, int b) { return m.inside(a, b) ? w(a, b) : 0.0; };
        const double want =
            (W(x + 1, y) + W(x - 1, y) + W(x, y + 1) + W(x, y - 1) - 4 * W(x, y)) /
            (h * h);
        EXPECT_NEAR(lap[i], want, 1e-12);
        EXPECT_NEAR(dg[i], want, 1e-12 * std::max(1.0, std::abs(want)));
      }
    }
  }
}

TEST_F(RandomFields, EdgeDivergenceIsNegativeAdjoint) {
  const BinaryMask m = random_mask(rng, 14, 12, 0.6);
  const ScalarField w = random_field(m);
  const EdgeField gw = edge_gradient(w, m);
  EdgeField g(14, 12);
  // Random values on edges touching an inside node; zero elsewhere.
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x + 1 < 14; ++x) {
      if (m.inside(x, y) || m.inside(x + 1, y)) g.x[g.xi(x, y)] = u(rng);
    }
  }
  for (int y = 0; y + 1 < 12; ++y) {
    for (int x = 0; x < 14; ++x) {
      if (m.inside(x, y) || m.inside(x, y + 1)) g.y[g.yi(x, y)] = u(rng);
    }
  }
  const ScalarField div = edge_divergence(g, m);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.inside(i)) lhs += div[i] * w[i];
  }
  for (std::size_t e = 0; e < g.x.size(); ++e) rhs -= g.x[e] * gw.x[e];
  for (std::size_t e = 0; e < g.y.size(); ++e) rhs -= g.y[e] * gw.y[e];
  EXPECT_NEAR(lhs, rhs, 1e-12);
}

TEST(Laplacian, BoundaryValueEntersStencil) {
  BinaryMask m(3, 3);
  m.set(1, 1, true);
  ScalarField w(3, 3, 0.0);
  w(1, 1) = 0.25;
  EXPECT_DOUBLE_EQ(laplacian(w, m, 1.0)(1, 1), 4.0 - 1.0);
  EXPECT_DOUBLE_EQ(laplacian(w, m, 0.0)(1, 1), -1.0);
}

TEST(ClassifyNodes, KindsPartitionGrid) {
  BinaryMask m(5, 5);
  m.set(2, 2, true);
  const auto kinds = classify_nodes(m);
  EXPECT_EQ(kinds[m.index(2, 2)], NodeKind::kInside);
  EXPECT_EQ(kinds[m.index(2, 1)], NodeKind::kBoundary);
  EXPECT_EQ(kinds[m.index(1, 1)], NodeKind::kOutside);
  EXPECT_EQ(std::count(kinds.begin(), kinds.end(), NodeKind::kBoundary), 4);
}

}  // namespace
}  // namespace distfn
