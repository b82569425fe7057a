#include <gtest/gtest.h>

#include <cmath>

#include "distfn/edt.hpp"
#include "distfn/error.hpp"
#include "distfn/estimators.hpp"
#include "distfn/metrics.hpp"
#include "test_support.hpp"

namespace distfn {
namespace {

using testing::shape;

// Bundle with v = e^{-λd}, v' = -d v, v'' = d² v for the given d field.
PdeBundle synthesized(const BinaryMask& m, const ScalarField& d, double lambda) {
  PdeBundle b;
  b.mask = m;
  b.lambda = lambda;
  b.v = ScalarField(m.width(), m.height());
  b.v_prime = b.v;
  b.v_second = b.v;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (std::isnan(d[i])) continue;
    const double v = std::exp(-lambda * d[i]);
    b.v[i] = v;
    b.v_prime[i] = -d[i] * v;
    b.v_second[i] = d[i] * d[i] * v;
  }
  return b;
}

BinaryMask single_node() {
  BinaryMask m(3, 3);
  m.set(1, 1, true);
  return m;
}

TEST(Estimators, PointValues) {
  const BinaryMask m = single_node();
  ScalarField d(3, 3);
  d(1, 1) = 5.0;
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) {
      if (x == 1 || y == 1) d(x, y) = (x == 1 && y == 1) ? 5.0 : 0.0;
    }
  }
  const PdeBundle b = synthesized(m, d, 0.7);
  EXPECT_NEAR(heat_log(b).field(1, 1), 5.0, 1e-12);
  EXPECT_EQ(heat_log(b).field(1, 0), 0.0);

  PdeBundle flat = b;
  flat.v_prime(1, 1) = 0.0;
  EXPECT_EQ(taylor1(flat).field(1, 1), 0.0);
}

TEST(Estimators, SingleNodeHandValues) {
  const BinaryMask m = single_node();
  SolverConfig c = SolverConfig::from_lambda(1.0);
  c.screening = Screening::kContinuum;
  const PdeBundle b = solve_bundle(m, c);
  // v = 0.8, v' = -0.32, v'' = -0.064
  EXPECT_NEAR(heat_log(b).field(1, 1), -std::log(0.8), 1e-13);
  EXPECT_NEAR(taylor1(b).field(1, 1), 0.4, 1e-13);
  EXPECT_NEAR(taylor2(b).field(1, 1), 0.4 - 0.5 * (-0.08 - 0.16), 1e-13);
}

TEST(Estimators, ExactBundleGivesExactDistance) {
  for (const char* spec : {"disk:r=20,canvas=64", "lshape:size=30,thickness=9,canvas=40"}) {
    const BinaryMask m = shape(spec);
    const ScalarField d = exact_edt(m);
    const PdeBundle b = synthesized(m, d, 0.45);
    for (auto variant : {EstimatorVariant::kHeatLog, EstimatorVariant::kTaylor1,
                         EstimatorVariant::kTaylor2}) {
      const Estimate e = evaluate(b, variant);
      EXPECT_TRUE(e.flags.empty());
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (std::isnan(d[i])) {
          EXPECT_TRUE(std::isnan(e.field[i]));
        } else {
          EXPECT_NEAR(e.field[i], d[i], 1e-12) << to_string(variant);
        }
      }
    }
  }
}

TEST(Estimators, ClampIsFlagged) {
  const BinaryMask m = single_node();
  PdeBundle b = solve_bundle(m, SolverConfig::from_lambda(1.0));
  b.v(1, 1) = -1e-20;
  const Estimate e = heat_log(b);
  EXPECT_TRUE(e.flags.has(Diagnostic::kClamped));
  EXPECT_NEAR(e.field(1, 1), -std::log(kMinV), 1e-9);
  EXPECT_TRUE(taylor1(b).flags.has(Diagnostic::kClamped));
  EXPECT_TRUE(taylor2(b).flags.has(Diagnostic::kClamped));
  EXPECT_TRUE(std::isfinite(taylor2(b).field(1, 1)));
}

class StripOracle : public ::testing::TestWithParam<double> {};

TEST_P(StripOracle, TaylorBeatsHeatAtCentre) {
  const double lambda = GetParam();
  const BinaryMask m = shape("strip:width=31,canvas=200x40");
  const PdeBundle b = solve_bundle(m, SolverConfig::from_lambda(lambda));
  const std::size_t c = m.index(100, 19);
  const double heat = heat_log(b).field[c];
  const double t1 = taylor1(b).field[c];
  EXPECT_LT(std::abs(t1 - 16.0), std::abs(heat - 16.0));
  if (lambda == 0.5) {
    EXPECT_NEAR(heat, 2.0 * std::log(std::cosh(8.0)), 0.02 * 14.613706);
    EXPECT_NEAR(t1, 16.0 * std::tanh(8.0), 0.02 * 16.0);
    const double t2 = taylor2(b).field[c];
    const double sech = 1.0 / std::cosh(8.0);
    EXPECT_NEAR(t2, 16.0 * std::tanh(8.0) + 0.25 * 256.0 * sech * sech, 0.02 * 16.0);
  }
}

INSTANTIATE_TEST_SUITE_P(Lambdas, StripOracle, ::testing::Values(0.25, 0.5, 1.0));

TEST(Estimators, SignsAndBoundaryZeros) {
  const BinaryMask m = shape("annulus:rin=8,rout=25,canvas=64");
  const PdeBundle b = solve_bundle(m, SolverConfig::from_t(3.0));
  const auto kinds = classify_nodes(m);
  for (EstimatorVariant variant : {EstimatorVariant::kHeatLog, EstimatorVariant::kTaylor1,
                                   EstimatorVariant::kTaylor2}) {
    for (bool normalized : {false, true}) {
      const Estimate e = estimate(b, {variant, normalized});
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (kinds[i] == NodeKind::kBoundary) EXPECT_EQ(e.field[i], 0.0);
        if (kinds[i] == NodeKind::kOutside) EXPECT_TRUE(std::isnan(e.field[i]));
      }
    }
  }
  const ScalarField heat = heat_log(b).field;
  const ScalarField t1 = taylor1(b).field;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (kinds[i] != NodeKind::kInside) continue;
    EXPECT_GE(heat[i], 0.0);
    EXPECT_GE(t1[i], -1e-8);
  }
}

TEST(Normalize, ZeroFieldStaysZero) {
  const BinaryMask m = shape("disk:r=10,canvas=32");
  const ScalarField zero(32, 32, 0.0);
  const Estimate e = normalize_gradient(zero, m);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.inside(i)) EXPECT_EQ(e.field[i], 0.0);
  }
}

TEST(Normalize, ScaleInvariant) {
  const BinaryMask m = shape("disk:r=20,canvas=64");
  const ScalarField d = exact_edt(m);
  const SolveOptions opts{1e-12, 0};
  const ScalarField base = normalize_gradient(d, m, opts).field;
  for (double alpha : {0.5, 2.0, 10.0}) {
    ScalarField scaled = d;
    for (double& v : scaled.values()) v *= alpha;
    const ScalarField n = normalize_gradient(scaled, m, opts).field;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m.inside(i)) EXPECT_NEAR(n[i], base[i], 1e-9);
    }
  }
}

TEST(Normalize, StripEdtIsNearIdentityOffMedialRow) {
  const BinaryMask m = shape("strip:width=31,canvas=200x40");
  const ScalarField d = exact_edt(m);
  const ScalarField n = normalize_gradient(d, m).field;
  for (int y = 0; y < 40; ++y) {
    if (y == 19) continue;
    for (int x = 0; x < 200; ++x) {
      if (m.inside(x, y)) EXPECT_LE(std::abs(n(x, y) - d(x, y)), 0.5) << x << "," << y;
    }
  }
}

TEST(Normalize, RejectsMismatchedField) {
  const BinaryMask m = shape("disk:r=10,canvas=32");
  EXPECT_THROW_CODE(normalize_gradient(ScalarField(31, 32, 0.0), m),
                    ErrorCode::kMaskMismatch);
}

TEST(Estimators, SecondOrderBeatsHeatOnSmallDisk) {
  const BinaryMask m = shape("disk:r=20,canvas=64");
  const ScalarField d = exact_edt(m);
  const Estimate t2 = estimate(solve_bundle(m, SolverConfig::from_t(5.0)),
                               {EstimatorVariant::kTaylor2, true});
  const Estimate heat = estimate(solve_bundle(m, SolverConfig::from_t(1.0)),
                                 {EstimatorVariant::kHeatLog, true});
  EXPECT_LE(error_l2(t2.field, d, m), error_l2(heat.field, d, m));
}

TEST(Estimators, Names) {
  EXPECT_EQ(to_string(EstimatorVariant::kHeatLog), "heat");
  EXPECT_EQ(to_string(EstimatorVariant::kTaylor1), "taylor1");
  EXPECT_EQ(to_string(EstimatorVariant::kTaylor2), "taylor2");
}

}  // namespace
}  // namespace distfn
