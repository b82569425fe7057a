#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "distfn/error.hpp"
#include "distfn/grid.hpp"

namespace distfn {

// One (method, parameter, shape) evaluation against the exact distance.
struct ErrorReport {
  std::string method;
  double t = 0.0;
  double l2 = 0.0;    // RMS over inside nodes
  double linf = 0.0;
  std::size_t n_nodes = 0;
  Diagnostics flags;
};

// RMS of approx - exact over inside nodes (boundary nodes excluded).
double error_l2(const ScalarField& approx, const ScalarField& exact,
                const BinaryMask& mask);
double error_linf(const ScalarField& approx, const ScalarField& exact,
                  const BinaryMask& mask);

// |approx - exact| on inside nodes, undefined elsewhere.
ScalarField error_map(const ScalarField& approx, const ScalarField& exact,
                      const BinaryMask& mask);

ErrorReport make_report(std::string method, double t,
                        const ScalarField& approx, const ScalarField& exact,
                        const BinaryMask& mask, Diagnostics flags = {});

struct SamplePoint {
  int column = 0;
  double value = 0.0;
};

// Inside nodes of `row`, left to right. Throws kEmptySlice when the row
// misses Ω.
std::vector<SamplePoint> slice_extract(const ScalarField& field,
                                       const BinaryMask& mask, int row);

// Same, restricted to the defined nodes of `field` (no mask available).
std::vector<SamplePoint> slice_extract(const ScalarField& field, int row);

// |∇field| with central differences at inside nodes.
ScalarField gradient_magnitude_map(const ScalarField& field,
                                   const BinaryMask& mask);

}  // namespace distfn
