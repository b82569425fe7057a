#include "distfn/poisson.hpp"

#include <cmath>
#include <string>

namespace distfn {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double true_residual(const ScreenedOperator& op, std::span<const double> x,
                     std::span<const double> b, std::vector<double>& scratch) {
  op.apply(x, scratch);
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double r = b[i] - scratch[i];
    s += r * r;
  }
  return std::sqrt(s);
}

FieldSolve finish(const ScreenedOperator& op, SolveResult result,
                  double boundary_value) {
  FieldSolve out;
  out.field = op.scatter(result.x, boundary_value);
  out.residual = result.residual;
  if (!result.converged) out.flags |= Diagnostic::kNoConvergence;
  return out;
}

constexpr int kMaxRestarts = 8;
constexpr int kMaxRefinements = 40;
// Unknowns whose row scale falls below this are left to the estimators'
// clamp; their relative accuracy is limited by gradual underflow.
constexpr double kTinyScale = 1e-280;

}  // namespace

ScreeningCoefficients screening_coefficients(double lambda, double h,
                                             Screening screening) {
  if (screening == Screening::kContinuum) {
    return {lambda * lambda, 2.0 * lambda, 2.0};
  }
  const double lh = lambda * h;
  const double inv_h2 = 1.0 / (h * h);
  // cosh(x) - 1 = 2 sinh^2(x/2) avoids cancellation for small λh.
  const double half = std::sinh(0.5 * lh);
  return {4.0 * half * half * inv_h2, 2.0 * std::sinh(lh) / h,
          2.0 * std::cosh(lh)};
}

SolverConfig SolverConfig::from_t(double t) {
  SolverConfig c;
  c.t = t;
  c.lambda = 1.0 / std::sqrt(t);
  return c;
}

SolverConfig SolverConfig::from_lambda(double lambda) {
  SolverConfig c;
  c.lambda = lambda;
  c.t = 1.0 / (lambda * lambda);
  return c;
}

void SolverConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kBadConfig, "lambda must be positive and finite");
  }
  if (!(t > 0.0) || std::abs(lambda - 1.0 / std::sqrt(t)) > 1e-14 * lambda) {
    throw Error(ErrorCode::kBadConfig, "lambda and t = 1/lambda^2 disagree");
  }
  if (!(rel_tol > 0.0 && rel_tol <= 1e-4)) {
    throw Error(ErrorCode::kBadConfig, "rel_tol must lie in (0, 1e-4]");
  }
}

ScreenedOperator::ScreenedOperator(const BinaryMask& mask, double shift)
    : width_(mask.width()), height_(mask.height()), h_(mask.spacing()),
      inv_h2_(1.0 / (mask.spacing() * mask.spacing())), shift_(shift) {
  validate_mask(mask);
  if (!(shift >= 0.0)) {
    throw Error(ErrorCode::kBadConfig, "screening shift must be >= 0");
  }
  std::vector<std::int32_t> slot(mask.size(), -1);
  unknowns_ = inside_indices(mask);
  for (std::size_t k = 0; k < unknowns_.size(); ++k) {
    slot[unknowns_[k]] = static_cast<std::int32_t>(k);
  }
  neighbours_.resize(unknowns_.size());
  dirichlet_count_.resize(unknowns_.size());
  const auto w = static_cast<std::size_t>(width_);
  for (std::size_t k = 0; k < unknowns_.size(); ++k) {
    const std::size_t i = unknowns_[k];
    const std::size_t nb[4] = {i + 1, i - 1, i + w, i - w};
    std::uint8_t count = 0;
    for (int j = 0; j < 4; ++j) {
      neighbours_[k][j] = slot[nb[j]];
      if (slot[nb[j]] < 0) ++count;
    }
    dirichlet_count_[k] = count;
  }
  const auto kinds = classify_nodes(mask);
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (kinds[i] == NodeKind::kBoundary) boundary_nodes_.push_back(i);
  }
}

void ScreenedOperator::apply(std::span<const double> x,
                             std::span<double> out) const {
  const double diag = diagonal();
  for (std::size_t k = 0; k < unknowns_.size(); ++k) {
    double off = 0.0;
    for (std::int32_t j : neighbours_[k]) {
      if (j >= 0) off += x[static_cast<std::size_t>(j)];
    }
    out[k] = diag * x[k] - inv_h2_ * off;
  }
}

std::vector<double> ScreenedOperator::apply(std::span<const double> x) const {
  std::vector<double> out(size());
  apply(x, out);
  return out;
}

std::vector<double> ScreenedOperator::dirichlet_rhs(double boundary_value) const {
  std::vector<double> b(size());
  for (std::size_t k = 0; k < size(); ++k) {
    b[k] = inv_h2_ * dirichlet_count_[k] * boundary_value;
  }
  return b;
}

std::vector<double> ScreenedOperator::gather(const ScalarField& field) const {
  if (field.width() != width_ || field.height() != height_) {
    throw Error(ErrorCode::kMaskMismatch, "field does not match operator grid");
  }
  std::vector<double> x(size());
  for (std::size_t k = 0; k < size(); ++k) x[k] = field[unknowns_[k]];
  return x;
}

ScalarField ScreenedOperator::scatter(std::span<const double> x,
                                      double boundary_value) const {
  ScalarField out(width_, height_);
  for (std::size_t k = 0; k < size(); ++k) out[unknowns_[k]] = x[k];
  for (std::size_t i : boundary_nodes_) out[i] = boundary_value;
  return out;
}

ScreenedOperator assemble_operator(const BinaryMask& mask, double lambda,
                                   Screening screening) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::kBadConfig, "lambda must be positive");
  }
  return ScreenedOperator(
      mask, screening_coefficients(lambda, mask.spacing(), screening).value);
}

SolveResult solve_spd(const ScreenedOperator& op, std::span<const double> rhs,
                      const SolveOptions& options) {
  const std::size_t n = op.size();
  if (rhs.size() != n) {
    throw Error(ErrorCode::kMaskMismatch, "rhs length differs from unknowns");
  }
  SolveResult result;
  result.x.assign(n, 0.0);
  const double bnorm = norm(rhs);
  if (bnorm == 0.0) return result;

  const std::size_t max_iters = options.max_iters ? options.max_iters : 10 * n;
  const double inv_diag = 1.0 / op.diagonal();
  std::vector<double> r(rhs.begin(), rhs.end());
  std::vector<double> z(n), p(n), ap(n);

  std::size_t it = 0;
  // The recursive residual can drift below the true one; restart from the
  // true residual until both agree or the budget runs out.
  for (int restarts = 0;; ++restarts) {
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag * r[i];
    p = z;
    double rz = dot(r, z);
    double rnorm = norm(r);
    while (rnorm > options.rel_tol * bnorm && it < max_iters) {
      op.apply(p, ap);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) break;
      const double alpha = rz / pap;
      for (std::size_t i = 0; i < n; ++i) {
        result.x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      ++it;
      rnorm = norm(r);
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag * r[i];
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    const double true_norm = true_residual(op, result.x, rhs, ap);
    result.residual = true_norm / bnorm;
    if (result.residual <= options.rel_tol || it >= max_iters ||
        rnorm > options.rel_tol * bnorm || restarts >= kMaxRestarts) {
      break;
    }
    op.apply(result.x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
  }
  result.iterations = it;
  result.converged = result.residual <= options.rel_tol;
  return result;
}

SolveResult solve_spd_refined(const ScreenedOperator& op,
                              std::span<const double> rhs,
                              const SolveOptions& options) {
  SolveResult result = solve_spd(op, rhs, options);
  const std::size_t n = op.size();
  const double target = options.rel_tol;
  std::vector<double> ax(n), abs_x(n), abs_ax(n), r(n);
  bool satisfied = false;
  for (int round = 0; round <= kMaxRefinements; ++round) {
    op.apply(result.x, ax);
    for (std::size_t i = 0; i < n; ++i) abs_x[i] = std::abs(result.x[i]);
    // |A||x| with |A| = diag + |off-diagonal|: apply() of |x| with the sign
    // of the coupling flipped, i.e. 2 diag |x| - A|x|.
    op.apply(abs_x, abs_ax);
    const double diag = op.diagonal();
    satisfied = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double scale = std::abs(rhs[i]) + 2.0 * diag * abs_x[i] - abs_ax[i];
      r[i] = rhs[i] - ax[i];
      if (scale < kTinyScale || std::abs(r[i]) <= target * scale) {
        r[i] = 0.0;
      } else {
        satisfied = false;
      }
    }
    if (satisfied || round == kMaxRefinements) break;
    const SolveResult correction = solve_spd(op, r, options);
    for (std::size_t i = 0; i < n; ++i) result.x[i] += correction.x[i];
    result.iterations += correction.iterations;
  }
  const double bnorm = norm(rhs);
  if (bnorm > 0.0) {
    result.residual = true_residual(op, result.x, rhs, ax) / bnorm;
  }
  result.converged = satisfied && result.residual <= options.rel_tol;
  return result;
}

FieldSolve solve_v(const BinaryMask& mask, const SolverConfig& config) {
  config.validate();
  return solve_v(assemble_operator(mask, config.lambda, config.screening),
                 config);
}

FieldSolve solve_v(const ScreenedOperator& op, const SolverConfig& config) {
  const auto b = op.dirichlet_rhs(1.0);
  return finish(op, solve_spd_refined(op, b, config.solve_options()), 1.0);
}

FieldSolve solve_vprime(const BinaryMask& mask, const SolverConfig& config,
                        const ScalarField& v) {
  config.validate();
  return solve_vprime(assemble_operator(mask, config.lambda, config.screening),
                      config, v);
}

FieldSolve solve_vprime(const ScreenedOperator& op, const SolverConfig& config,
                        const ScalarField& v) {
  const auto kappa =
      screening_coefficients(config.lambda, op.spacing(), config.screening);
  auto b = op.gather(v);
  for (double& bi : b) bi *= -kappa.d1;
  return finish(op, solve_spd_refined(op, b, config.solve_options()), 0.0);
}

FieldSolve solve_vsecond(const BinaryMask& mask, const SolverConfig& config,
                         const ScalarField& v, const ScalarField& v_prime) {
  config.validate();
  return solve_vsecond(assemble_operator(mask, config.lambda, config.screening),
                       config, v, v_prime);
}

FieldSolve solve_vsecond(const ScreenedOperator& op, const SolverConfig& config,
                         const ScalarField& v, const ScalarField& v_prime) {
  const auto kappa =
      screening_coefficients(config.lambda, op.spacing(), config.screening);
  auto b = op.gather(v);
  const auto vp = op.gather(v_prime);
  for (std::size_t k = 0; k < b.size(); ++k) {
    b[k] = -kappa.d2 * b[k] - 2.0 * kappa.d1 * vp[k];
  }
  return finish(op, solve_spd_refined(op, b, config.solve_options()), 0.0);
}

PdeBundle solve_bundle(const BinaryMask& mask, const SolverConfig& config) {
  config.validate();
  const ScreenedOperator op =
      assemble_operator(mask, config.lambda, config.screening);
  FieldSolve v = solve_v(op, config);
  FieldSolve vp = solve_vprime(op, config, v.field);
  FieldSolve vpp = solve_vsecond(op, config, v.field, vp.field);

  PdeBundle bundle;
  bundle.mask = mask;
  bundle.lambda = config.lambda;
  bundle.residuals = {v.residual, vp.residual, vpp.residual};
  bundle.flags = v.flags | vp.flags | vpp.flags;
  bundle.v = std::move(v.field);
  bundle.v_prime = std::move(vp.field);
  bundle.v_second = std::move(vpp.field);
  return bundle;
}

FieldSolve solve_poisson(const BinaryMask& mask, const ScalarField& rhs,
                         const SolveOptions& options) {
  const ScreenedOperator op(mask, 0.0);
  const auto b = op.gather(rhs);
  return finish(op, solve_spd_refined(op, b, options), 0.0);
}

}  // namespace distfn
