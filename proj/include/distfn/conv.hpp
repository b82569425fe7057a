#pragma once

#include <optional>
#include <span>

#include "distfn/grid.hpp"

namespace distfn {

struct ConvOptions {
  double lambda = 1.0;            // inverse length
  bool include_prefactor = true;  // multiply the kernel sum by lambda^d
  // Samples with lambda*(phi - phi_min) > -ln(eps) are skipped;
  // nullopt sums every sample.
  std::optional<double> cutoff_epsilon = 1e-12;
  int boundary_dim = 1;

  // Throws Error(kBadConfig) on lambda <= 0, eps outside (0,1), d not in {1,2}.
  void validate() const;
};

struct BlendWeights {
  double alpha = 1.0;  // SoftMin weight
  double beta = 0.0;   // LogConv weight
};

struct BlendConfig {
  double K = 0.1;
  BlendWeights weights;

  // Weights for the given lambda and boundary dimension.
  static BlendConfig make(double lambda, double K = 0.1, int d = 1);
};

// Self-normalised soft minimum sum w phi e^{-lambda phi} / sum w e^{-lambda phi}.
double softmin(std::span<const double> phi, std::span<const double> weights,
               double lambda, std::optional<double> cutoff_epsilon = 1e-12);

// -(1/lambda) log[prefactor * sum w e^{-lambda phi}] in shifted form.
double logconv(std::span<const double> phi, std::span<const double> weights,
               double lambda, double prefactor = 1.0,
               std::optional<double> cutoff_epsilon = 1e-12);

ScalarField softmin_field(const BinaryMask& mask, const BoundarySet& boundary,
                          const ConvOptions& opts);
ScalarField logconv_field(const BinaryMask& mask, const BoundarySet& boundary,
                          const ConvOptions& opts);

// alpha = d log(lambda) / (2K + d log(lambda)), beta = 1 - alpha.
// Throws kBadLambda for lambda <= 1, kBadConfig for K <= 0 or d not in {1,2}.
BlendWeights blend_weights(double lambda, double K, int d);

// alpha * soft + beta * logc node-wise; kMaskMismatch when the two fields
// differ in shape or domain.
ScalarField blend_field(const ScalarField& soft, const ScalarField& logc,
                        const BlendConfig& cfg);

}  // namespace distfn
