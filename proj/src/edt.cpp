#include "distfn/edt.hpp"

#include <cmath>
#include <limits>

#include "distfn/error.hpp"

namespace distfn {
namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// Rational breakpoint num/den with den > 0, plus the two infinities.
struct Breakpoint {
  std::int64_t num = 0;
  std::int64_t den = 1;
  int inf = 0;  // -1, 0, +1

  static Breakpoint neg_inf() { return {0, 1, -1}; }
  static Breakpoint pos_inf() { return {0, 1, 1}; }
};

bool less_equal(const Breakpoint& a, const Breakpoint& b) {
  if (a.inf != 0 || b.inf != 0) {
    if (a.inf == b.inf) return true;
    return a.inf < b.inf;
  }
  return a.num * b.den <= b.num * a.den;
}

bool less_than_int(const Breakpoint& a, std::int64_t x) {
  if (a.inf != 0) return a.inf < 0;
  return a.num < x * a.den;
}

// Lower envelope of parabolas f[q] + (x - q)^2 over the finite entries of f.
void envelope_1d(const std::vector<std::int64_t>& f,
                 std::vector<std::int64_t>& out, std::vector<int>& sites,
                 std::vector<Breakpoint>& z) {
  const int n = static_cast<int>(f.size());
  sites.clear();
  z.clear();
  auto intersect = [&f](int q, int v) {
    const std::int64_t qq = static_cast<std::int64_t>(q);
    const std::int64_t vv = static_cast<std::int64_t>(v);
    return Breakpoint{(f[q] + qq * qq) - (f[v] + vv * vv), 2 * (qq - vv), 0};
  };
  for (int q = 0; q < n; ++q) {
    if (f[q] >= kInf) continue;
    if (sites.empty()) {
      sites.push_back(q);
      z.push_back(Breakpoint::neg_inf());
      z.push_back(Breakpoint::pos_inf());
      continue;
    }
    Breakpoint s = intersect(q, sites.back());
    while (less_equal(s, z[sites.size() - 1])) {
      sites.pop_back();
      z.pop_back();
      if (sites.empty()) break;
      s = intersect(q, sites.back());
    }
    if (sites.empty()) {
      sites.push_back(q);
      z.back() = Breakpoint::neg_inf();
      z.push_back(Breakpoint::pos_inf());
      continue;
    }
    sites.push_back(q);
    z.back() = s;
    z.push_back(Breakpoint::pos_inf());
  }
  if (sites.empty()) {
    std::fill(out.begin(), out.end(), kInf);
    return;
  }
  std::size_t k = 0;
  for (int x = 0; x < n; ++x) {
    while (less_than_int(z[k + 1], x)) ++k;
    const std::int64_t d = x - sites[k];
    out[x] = d * d + f[sites[k]];
  }
}

ScalarField to_distance(const BinaryMask& mask,
                        const std::vector<std::int64_t>& sq) {
  const auto kinds = classify_nodes(mask);
  ScalarField out(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (kinds[i] == NodeKind::kInside) {
      out[i] = std::sqrt(static_cast<double>(sq[i])) * mask.spacing();
    } else if (kinds[i] == NodeKind::kBoundary) {
      out[i] = 0.0;
    }
  }
  return out;
}

}  // namespace

std::vector<std::int64_t> squared_edt_bruteforce(const BinaryMask& mask,
                                                 const BoundarySet& sites) {
  std::vector<std::int64_t> out(mask.size(), -1);
  if (sites.empty()) return out;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      std::int64_t best = kInf;
      for (const Node& p : sites.points) {
        const std::int64_t dx = x - p.x;
        const std::int64_t dy = y - p.y;
        best = std::min(best, dx * dx + dy * dy);
      }
      out[mask.index(x, y)] = best;
    }
  }
  return out;
}

std::vector<std::int64_t> squared_edt_fast(const BinaryMask& mask,
                                           const BoundarySet& sites) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::int64_t> out(mask.size(), -1);
  if (sites.empty()) return out;

  // Column pass: squared vertical distance to the nearest site in-column.
  std::vector<std::uint8_t> is_site(mask.size(), 0);
  for (const Node& p : sites.points) {
    if (!mask.contains(p.x, p.y)) {
      throw Error(ErrorCode::kBadConfig, "site outside the grid");
    }
    is_site[mask.index(p.x, p.y)] = 1;
  }
  std::vector<std::int64_t> col(mask.size(), kInf);
  for (int x = 0; x < w; ++x) {
    std::int64_t last = -1;
    for (int y = 0; y < h; ++y) {
      if (is_site[mask.index(x, y)]) last = y;
      if (last >= 0) col[mask.index(x, y)] = y - last;
    }
    last = -1;
    for (int y = h - 1; y >= 0; --y) {
      if (is_site[mask.index(x, y)]) last = y;
      auto& c = col[mask.index(x, y)];
      if (last >= 0) c = std::min(c, last - y);
    }
    for (int y = 0; y < h; ++y) {
      auto& c = col[mask.index(x, y)];
      if (c < kInf) c = c * c;
    }
  }

  // Row pass.
  std::vector<std::int64_t> f(w);
  std::vector<std::int64_t> row(w);
  std::vector<int> env_sites;
  std::vector<Breakpoint> z;
  env_sites.reserve(w);
  z.reserve(w + 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = col[mask.index(x, y)];
    envelope_1d(f, row, env_sites, z);
    for (int x = 0; x < w; ++x) out[mask.index(x, y)] = row[x];
  }
  return out;
}

ScalarField edt_bruteforce(const BinaryMask& mask, const BoundarySet& boundary) {
  return to_distance(mask, squared_edt_bruteforce(mask, boundary));
}

ScalarField edt_fast(const BinaryMask& mask, const BoundarySet& boundary) {
  return to_distance(mask, squared_edt_fast(mask, boundary));
}

ScalarField exact_edt(const BinaryMask& mask, EdtMethod method) {
  const BoundarySet boundary = extract_boundary(mask);
  return method == EdtMethod::kBruteForce ? edt_bruteforce(mask, boundary)
                                          : edt_fast(mask, boundary);
}

}  // namespace distfn
