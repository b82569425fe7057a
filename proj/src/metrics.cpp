#include "distfn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace distfn {
namespace {

void require_match(const ScalarField& a, const ScalarField& b,
                   const BinaryMask& mask) {
  if (!a.same_shape(mask) || !b.same_shape(mask)) {
    throw Error(ErrorCode::kMaskMismatch, "field and mask dimensions differ");
  }
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask.inside(i) && (!a.defined(i) || !b.defined(i))) {
      throw Error(ErrorCode::kMaskMismatch,
                  "field undefined at an inside node");
    }
  }
}

}  // namespace

double error_l2(const ScalarField& approx, const ScalarField& exact,
                const BinaryMask& mask) {
  require_match(approx, exact, mask);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask.inside(i)) continue;
    const double d = approx[i] - exact[i];
    sum += d * d;
    ++n;
  }
  return n ? std::sqrt(sum / static_cast<double>(n)) : 0.0;
}

double error_linf(const ScalarField& approx, const ScalarField& exact,
                  const BinaryMask& mask) {
  require_match(approx, exact, mask);
  double worst = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask.inside(i)) worst = std::max(worst, std::abs(approx[i] - exact[i]));
  }
  return worst;
}

ScalarField error_map(const ScalarField& approx, const ScalarField& exact,
                      const BinaryMask& mask) {
  require_match(approx, exact, mask);
  ScalarField out(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask.inside(i)) out[i] = std::abs(approx[i] - exact[i]);
  }
  return out;
}

ErrorReport make_report(std::string method, double t,
                        const ScalarField& approx, const ScalarField& exact,
                        const BinaryMask& mask, Diagnostics flags) {
  ErrorReport r;
  r.method = std::move(method);
  r.t = t;
  r.l2 = error_l2(approx, exact, mask);
  r.linf = error_linf(approx, exact, mask);
  r.n_nodes = mask.count_inside();
  r.flags = flags;
  return r;
}

std::vector<SamplePoint> slice_extract(const ScalarField& field,
                                       const BinaryMask& mask, int row) {
  if (!field.same_shape(mask)) {
    throw Error(ErrorCode::kMaskMismatch, "field and mask dimensions differ");
  }
  std::vector<SamplePoint> out;
  if (row >= 0 && row < mask.height()) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.inside(x, row)) out.push_back({x, field(x, row)});
    }
  }
  if (out.empty()) {
    throw Error(ErrorCode::kEmptySlice,
                "row " + std::to_string(row) + " does not intersect the shape");
  }
  return out;
}

std::vector<SamplePoint> slice_extract(const ScalarField& field, int row) {
  std::vector<SamplePoint> out;
  if (row >= 0 && row < field.height()) {
    for (int x = 0; x < field.width(); ++x) {
      if (field.defined(field.index(x, row))) out.push_back({x, field(x, row)});
    }
  }
  if (out.empty()) {
    throw Error(ErrorCode::kEmptySlice,
                "row " + std::to_string(row) + " has no defined values");
  }
  return out;
}

ScalarField gradient_magnitude_map(const ScalarField& field,
                                   const BinaryMask& mask) {
  // Boundary nodes keep whatever the field stores there.
  const VectorField g = gradient(field, mask, std::nullopt);
  ScalarField out(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask.inside(i)) out[i] = std::hypot(g.x[i], g.y[i]);
  }
  return out;
}

}  // namespace distfn
