#include "distfn/conv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "distfn/error.hpp"

namespace distfn {
namespace {

double skip_threshold(std::optional<double> eps) {
  return eps ? -std::log(*eps) : std::numeric_limits<double>::infinity();
}

void check_sizes(std::span<const double> phi, std::span<const double> w) {
  if (phi.empty() || phi.size() != w.size()) {
    throw Error(ErrorCode::kBadConfig,
                "sample and weight lists must be equal-length and non-empty");
  }
}

// Shifted kernel sums around phi_min.
struct KernelSums {
  double phi_min = 0.0;
  double denom = 0.0;     // sum w e^{-lambda (phi - phi_min)}
  double weighted = 0.0;  // sum w (phi - phi_min) e^{-lambda (phi - phi_min)}
};

KernelSums kernel_sums(std::span<const double> phi, std::span<const double> w,
                       double lambda, double threshold) {
  KernelSums s;
  s.phi_min = *std::min_element(phi.begin(), phi.end());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double shifted = phi[k] - s.phi_min;
    const double arg = lambda * shifted;
    if (arg > threshold) continue;
    const double e = w[k] * std::exp(-arg);
    s.denom += e;
    s.weighted += shifted * e;
  }
  return s;
}

template <typename Eval>
ScalarField conv_field(const BinaryMask& mask, const BoundarySet& boundary,
                       Eval&& eval) {
  validate_mask(mask);
  if (boundary.empty()) {
    throw Error(ErrorCode::kEmptyMask, "boundary set is empty");
  }
  ScalarField out(mask.width(), mask.height());
  for (const Node& p : boundary.points) out(p.x, p.y) = 0.0;

  const double h = mask.spacing();
  std::vector<double> phi(boundary.size());
  for (std::size_t i : inside_indices(mask)) {
    const int x = static_cast<int>(i % mask.width());
    const int y = static_cast<int>(i / mask.width());
    for (std::size_t k = 0; k < boundary.size(); ++k) {
      const double dx = x - boundary.points[k].x;
      const double dy = y - boundary.points[k].y;
      phi[k] = std::sqrt(dx * dx + dy * dy) * h;
    }
    out[i] = eval(std::span<const double>(phi),
                  std::span<const double>(boundary.weights));
  }
  return out;
}

}  // namespace

void ConvOptions::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kBadConfig, "lambda must be positive");
  }
  if (cutoff_epsilon && !(*cutoff_epsilon > 0.0 && *cutoff_epsilon < 1.0)) {
    throw Error(ErrorCode::kBadConfig, "cutoff epsilon must lie in (0,1)");
  }
  if (boundary_dim != 1 && boundary_dim != 2) {
    throw Error(ErrorCode::kBadConfig, "boundary dimension must be 1 or 2");
  }
}

BlendConfig BlendConfig::make(double lambda, double K, int d) {
  return BlendConfig{K, blend_weights(lambda, K, d)};
}

double softmin(std::span<const double> phi, std::span<const double> weights,
               double lambda, std::optional<double> cutoff_epsilon) {
  check_sizes(phi, weights);
  const KernelSums s =
      kernel_sums(phi, weights, lambda, skip_threshold(cutoff_epsilon));
  // The minimising sample always contributes w e^0, so this only trips on
  // zero or negative weights.
  if (!(s.denom > 0.0)) {
    throw Error(ErrorCode::kDegenerateSum, "soft-min denominator vanished");
  }
  return s.phi_min + s.weighted / s.denom;
}

double logconv(std::span<const double> phi, std::span<const double> weights,
               double lambda, double prefactor,
               std::optional<double> cutoff_epsilon) {
  check_sizes(phi, weights);
  const KernelSums s =
      kernel_sums(phi, weights, lambda, skip_threshold(cutoff_epsilon));
  if (!(s.denom > 0.0)) {
    throw Error(ErrorCode::kDegenerateSum, "log-conv sum vanished");
  }
  return s.phi_min - (std::log(prefactor) + std::log(s.denom)) / lambda;
}

ScalarField softmin_field(const BinaryMask& mask, const BoundarySet& boundary,
                          const ConvOptions& opts) {
  opts.validate();
  return conv_field(mask, boundary,
                    [&](std::span<const double> phi, std::span<const double> w) {
                      return softmin(phi, w, opts.lambda, opts.cutoff_epsilon);
                    });
}

ScalarField logconv_field(const BinaryMask& mask, const BoundarySet& boundary,
                          const ConvOptions& opts) {
  opts.validate();
  const double prefactor =
      opts.include_prefactor ? std::pow(opts.lambda, opts.boundary_dim) : 1.0;
  return conv_field(mask, boundary,
                    [&](std::span<const double> phi, std::span<const double> w) {
                      return logconv(phi, w, opts.lambda, prefactor,
                                     opts.cutoff_epsilon);
                    });
}

BlendWeights blend_weights(double lambda, double K, int d) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kBadLambda,
                "blend weights need lambda > 1 (log lambda > 0)");
  }
  if (!(K > 0.0) || !std::isfinite(K)) {
    throw Error(ErrorCode::kBadConfig, "blend constant K must be positive");
  }
  if (d != 1 && d != 2) {
    throw Error(ErrorCode::kBadConfig, "boundary dimension must be 1 or 2");
  }
  const double dl = d * std::log(lambda);
  const double denom = 2.0 * K + dl;
  return {dl / denom, 2.0 * K / denom};
}

ScalarField blend_field(const ScalarField& soft, const ScalarField& logc,
                        const BlendConfig& cfg) {
  if (!soft.same_shape(logc)) {
    throw Error(ErrorCode::kMaskMismatch, "blend inputs differ in shape");
  }
  ScalarField out(soft.width(), soft.height());
  for (std::size_t i = 0; i < soft.size(); ++i) {
    if (soft.defined(i) != logc.defined(i)) {
      throw Error(ErrorCode::kMaskMismatch, "blend inputs differ in domain");
    }
    if (!soft.defined(i)) continue;
    out[i] = cfg.weights.alpha * soft[i] + cfg.weights.beta * logc[i];
  }
  return out;
}

}  // namespace distfn
