#include "distfn/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace distfn {
namespace {

template <typename Formula>
Estimate node_map(const PdeBundle& bundle, Formula&& formula) {
  const BinaryMask& mask = bundle.mask;
  if (!bundle.v.same_shape(mask) || !bundle.v_prime.same_shape(mask) ||
      !bundle.v_second.same_shape(mask)) {
    throw Error(ErrorCode::kMaskMismatch, "bundle fields do not match mask");
  }
  const auto kinds = classify_nodes(mask);
  Estimate out{ScalarField(mask.width(), mask.height()), {}};
  bool clamped = false;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (kinds[i] == NodeKind::kBoundary) {
      out.field[i] = 0.0;
    } else if (kinds[i] == NodeKind::kInside) {
      double v = bundle.v[i];
      if (!(v >= kMinV)) {
        v = kMinV;
        clamped = true;
      }
      double value = formula(v, bundle.v_prime[i], bundle.v_second[i]);
      // Ratios against a clamped v can overflow; keep the field finite.
      if (!std::isfinite(value)) value = -std::log(v) / bundle.lambda;
      out.field[i] = value;
    }
  }
  if (clamped) out.flags |= Diagnostic::kClamped;
  return out;
}

}  // namespace

std::string_view to_string(EstimatorVariant variant) {
  switch (variant) {
    case EstimatorVariant::kHeatLog: return "heat";
    case EstimatorVariant::kTaylor1: return "taylor1";
    case EstimatorVariant::kTaylor2: return "taylor2";
  }
  return "unknown";
}

Estimate heat_log(const PdeBundle& bundle) {
  const double lambda = bundle.lambda;
  return node_map(bundle, [lambda](double v, double, double) {
    return -std::log(v) / lambda;
  });
}

Estimate taylor1(const PdeBundle& bundle) {
  return node_map(bundle, [](double v, double vp, double) { return -vp / v; });
}

Estimate taylor2(const PdeBundle& bundle) {
  const double lambda = bundle.lambda;
  return node_map(bundle, [lambda](double v, double vp, double vpp) {
    const double r = vp / v;
    return -r - 0.5 * lambda * (vpp / v - r * r);
  });
}

Estimate evaluate(const PdeBundle& bundle, EstimatorVariant variant) {
  switch (variant) {
    case EstimatorVariant::kHeatLog: return heat_log(bundle);
    case EstimatorVariant::kTaylor1: return taylor1(bundle);
    case EstimatorVariant::kTaylor2: return taylor2(bundle);
  }
  throw Error(ErrorCode::kBadConfig, "unknown estimator");
}

Estimate normalize_gradient(const ScalarField& w, const BinaryMask& mask,
                            const SolveOptions& options) {
  validate_mask(mask);
  const EdgeField diff = edge_gradient(w, mask);
  const int width = mask.width();
  const int height = mask.height();

  auto x_valid = [&](int x, int y) {
    return x >= 0 && y >= 0 && x + 1 < width && y < height &&
           (mask.inside(x, y) || mask.inside(x + 1, y));
  };
  auto y_valid = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < width && y + 1 < height &&
           (mask.inside(x, y) || mask.inside(x, y + 1));
  };
  auto unit = [](double along, double across) {
    const double len = std::hypot(along, across);
    return len < kGradientEpsilon ? 0.0 : along / len;
  };

  EdgeField g(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x + 1 < width; ++x) {
      if (!x_valid(x, y)) continue;
      double sum = 0.0;
      int count = 0;
      for (const auto& [ex, ey] : {std::pair{x, y - 1}, std::pair{x, y},
                                   std::pair{x + 1, y - 1}, std::pair{x + 1, y}}) {
        if (y_valid(ex, ey)) {
          sum += diff.y[diff.yi(ex, ey)];
          ++count;
        }
      }
      const double across = count ? sum / count : 0.0;
      g.x[g.xi(x, y)] = unit(diff.x[diff.xi(x, y)], across);
    }
  }
  for (int y = 0; y + 1 < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!y_valid(x, y)) continue;
      double sum = 0.0;
      int count = 0;
      for (const auto& [ex, ey] : {std::pair{x - 1, y}, std::pair{x, y},
                                   std::pair{x - 1, y + 1}, std::pair{x, y + 1}}) {
        if (x_valid(ex, ey)) {
          sum += diff.x[diff.xi(ex, ey)];
          ++count;
        }
      }
      const double across = count ? sum / count : 0.0;
      g.y[g.yi(x, y)] = unit(diff.y[diff.yi(x, y)], across);
    }
  }

  ScalarField rhs = edge_divergence(g, mask);
  for (double& r : rhs.values()) r = -r;
  FieldSolve solved = solve_poisson(mask, rhs, options);
  return {std::move(solved.field), solved.flags};
}

Estimate estimate(const PdeBundle& bundle, EstimatorKind kind,
                  const SolveOptions& options) {
  Estimate raw = evaluate(bundle, kind.variant);
  if (!kind.normalized) return raw;
  Estimate normalized = normalize_gradient(raw.field, bundle.mask, options);
  normalized.flags |= raw.flags;
  return normalized;
}

}  // namespace distfn
