#pragma once

#include <string_view>

#include "distfn/error.hpp"
#include "distfn/grid.hpp"
#include "distfn/poisson.hpp"

namespace distfn {

enum class EstimatorVariant { kHeatLog, kTaylor1, kTaylor2 };

struct EstimatorKind {
  EstimatorVariant variant = EstimatorVariant::kTaylor2;
  bool normalized = true;
};

std::string_view to_string(EstimatorVariant variant);

// Floor applied to v before logs and divisions.
inline constexpr double kMinV = 1e-300;

// Gradients shorter than this are treated as critical points (g = 0).
inline constexpr double kGradientEpsilon = 1e-12;

// All three return 0 on boundary nodes and NaN outside. A node whose formula
// is not finite after clamping gets -(1/λ) log v instead.
struct Estimate {
  ScalarField field;
  Diagnostics flags;  // kClamped when some node hit kMinV
};

// -(1/λ) log v.
Estimate heat_log(const PdeBundle& bundle);

// -v'/v.
Estimate taylor1(const PdeBundle& bundle);

// -v'/v - (λ/2) [v''/v - (v'/v)^2].
Estimate taylor2(const PdeBundle& bundle);

Estimate evaluate(const PdeBundle& bundle, EstimatorVariant variant);

// Least-squares fit of a field whose gradient is ∇w/|∇w|: solves
// -Δ_h w_n = -div_h g with w_n = 0 on ∂Ω. Gradients and divergence are taken
// on grid edges so that div_h ∘ grad_h is the same 5-point Laplacian as the
// solve. On each edge |∇w| combines the edge difference with the mean of the
// adjacent perpendicular edges.
Estimate normalize_gradient(const ScalarField& w, const BinaryMask& mask,
                            const SolveOptions& options = {});

// The selected estimator, normalized when kind.normalized is set.
Estimate estimate(const PdeBundle& bundle, EstimatorKind kind,
                  const SolveOptions& options = {});

}  // namespace distfn
