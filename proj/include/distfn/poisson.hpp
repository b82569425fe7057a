#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "distfn/error.hpp"
#include "distfn/grid.hpp"

namespace distfn {

// How the screening term of -Δ_h v + κ² v = 0 depends on λ.
//
// kContinuum uses κ² = λ². kDispersionMatched uses κ² = 2(cosh λh - 1)/h²,
// for which the 5-point discrete solution in a straight strip is exactly
// cosh(λ(y - c)) / cosh(λc), i.e. decays like e^{-λ·dist} at grid nodes.
// Both agree as h -> 0.
enum class Screening { kDispersionMatched, kContinuum };

// κ² and its first two λ-derivatives.
struct ScreeningCoefficients {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

ScreeningCoefficients screening_coefficients(double lambda, double h,
                                             Screening screening);

struct SolveOptions {
  double rel_tol = 1e-10;
  std::size_t max_iters = 0;  // 0: 10 x number of unknowns
};

struct SolverConfig {
  double lambda = 1.0;
  double t = 1.0;  // 1 / lambda^2
  double rel_tol = 1e-10;
  std::size_t max_iters = 0;
  Screening screening = Screening::kDispersionMatched;

  static SolverConfig from_t(double t);
  static SolverConfig from_lambda(double lambda);

  SolveOptions solve_options() const { return {rel_tol, max_iters}; }

  // Throws Error(kBadConfig) unless lambda > 0, lambda = 1/sqrt(t) and
  // rel_tol in (0, 1e-4].
  void validate() const;
};

// A = -Δ_h + shift·I on the inside nodes, Dirichlet neighbours eliminated.
// Matrix-free; symmetric positive definite for shift >= 0 on a valid mask.
class ScreenedOperator {
 public:
  ScreenedOperator(const BinaryMask& mask, double shift);

  std::size_t size() const { return unknowns_.size(); }
  double shift() const { return shift_; }
  double spacing() const { return h_; }
  int width() const { return width_; }
  int height() const { return height_; }

  void apply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> x) const;
  double diagonal() const { return 4.0 * inv_h2_ + shift_; }

  // Right-hand side contributed by Dirichlet data `boundary_value`.
  std::vector<double> dirichlet_rhs(double boundary_value) const;

  // Grid index of each unknown, row-major order.
  std::span<const std::size_t> unknowns() const { return unknowns_; }

  std::vector<double> gather(const ScalarField& field) const;
  // Unknowns into a field; boundary nodes get `boundary_value`, others NaN.
  ScalarField scatter(std::span<const double> x, double boundary_value) const;

 private:
  int width_;
  int height_;
  double h_;
  double inv_h2_;
  double shift_;
  std::vector<std::size_t> unknowns_;
  std::vector<std::array<std::int32_t, 4>> neighbours_;  // -1: Dirichlet
  std::vector<std::uint8_t> dirichlet_count_;
  std::vector<std::size_t> boundary_nodes_;
};

ScreenedOperator assemble_operator(
    const BinaryMask& mask, double lambda,
    Screening screening = Screening::kDispersionMatched);

struct SolveResult {
  std::vector<double> x;
  double residual = 0.0;  // ||Ax - b|| / ||b|| recomputed at exit
  std::size_t iterations = 0;
  bool converged = true;
};

// Jacobi-preconditioned conjugate gradient from a zero initial guess.
// On hitting max_iters returns the iterate with converged = false.
SolveResult solve_spd(const ScreenedOperator& op, std::span<const double> rhs,
                      const SolveOptions& options);

// solve_spd followed by iterative refinement until every unknown meets
// |b - Ax|_i <= rel_tol (|b| + |A||x|)_i. Solutions of the screened problem
// span many orders of magnitude; the norm-wise criterion alone leaves the
// smallest values unresolved. The v, v', v'' and Poisson solves use this.
SolveResult solve_spd_refined(const ScreenedOperator& op,
                              std::span<const double> rhs,
                              const SolveOptions& options);

struct FieldSolve {
  ScalarField field;
  double residual = 0.0;
  Diagnostics flags;
};

// -Δv + κ²v = 0 in Ω, v = 1 on ∂Ω.
FieldSolve solve_v(const BinaryMask& mask, const SolverConfig& config);
FieldSolve solve_v(const ScreenedOperator& op, const SolverConfig& config);

// -Δv' + κ²v' = -(κ²)' v, v' = 0 on ∂Ω.
FieldSolve solve_vprime(const BinaryMask& mask, const SolverConfig& config,
                        const ScalarField& v);
FieldSolve solve_vprime(const ScreenedOperator& op, const SolverConfig& config,
                        const ScalarField& v);

// -Δv'' + κ²v'' = -(κ²)'' v - 2(κ²)' v', v'' = 0 on ∂Ω.
FieldSolve solve_vsecond(const BinaryMask& mask, const SolverConfig& config,
                         const ScalarField& v, const ScalarField& v_prime);
FieldSolve solve_vsecond(const ScreenedOperator& op, const SolverConfig& config,
                         const ScalarField& v, const ScalarField& v_prime);

struct PdeBundle {
  BinaryMask mask;
  ScalarField v;
  ScalarField v_prime;
  ScalarField v_second;
  double lambda = 0.0;
  std::array<double, 3> residuals{};
  Diagnostics flags;
};

// The three chained solves sharing one operator.
PdeBundle solve_bundle(const BinaryMask& mask, const SolverConfig& config);

// -Δ_h w = rhs in Ω, w = 0 on ∂Ω.
FieldSolve solve_poisson(const BinaryMask& mask, const ScalarField& rhs,
                         const SolveOptions& options);

}  // namespace distfn
