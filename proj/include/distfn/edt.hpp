#pragma once

#include <cstdint>
#include <vector>

#include "distfn/grid.hpp"

namespace distfn {

enum class EdtMethod { kBruteForce, kTwoPass };

// Squared distances in grid units from every node to the nearest point of
// `sites`, exact integer arithmetic. Empty `sites` gives all -1.
std::vector<std::int64_t> squared_edt_bruteforce(const BinaryMask& mask,
                                                 const BoundarySet& sites);

// Same values as squared_edt_bruteforce via separable lower envelopes of
// parabolas (column pass, then row pass).
std::vector<std::int64_t> squared_edt_fast(const BinaryMask& mask,
                                           const BoundarySet& sites);

// Distance (times h) at inside nodes, 0 on boundary nodes, undefined
// elsewhere.
ScalarField edt_bruteforce(const BinaryMask& mask, const BoundarySet& boundary);
ScalarField edt_fast(const BinaryMask& mask, const BoundarySet& boundary);

// Convenience: extracts the boundary and runs the chosen variant.
ScalarField exact_edt(const BinaryMask& mask,
                      EdtMethod method = EdtMethod::kTwoPass);

}  // namespace distfn
