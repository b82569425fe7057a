#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "distfn/grid.hpp"
#include "distfn/metrics.hpp"
#include "distfn/poisson.hpp"

namespace distfn {

enum class Method { kExact, kLogConv, kSoftMin, kBlend, kHeat, kTaylor1, kTaylor2 };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);  // throws kBadConfig
bool is_differential(Method method);

enum class SweepVariants { kDefault, kNormalized, kRaw, kBoth };

struct RunManifest {
  std::optional<std::filesystem::path> input;  // PGM mask
  std::optional<std::string> shape;            // built-in shape spec
  double spacing = 1.0;                        // h for PGM input
  std::vector<Method> methods;
  std::vector<double> t_values;
  double K = 0.1;
  int d = 1;
  std::optional<bool> normalize;  // unset: on for differential methods only
  SweepVariants variants = SweepVariants::kBoth;
  bool prefactor = true;
  Screening screening = Screening::kDispersionMatched;
  double rel_tol = 1e-10;
  std::optional<int> row;
  std::filesystem::path out_dir;

  // Throws kBadConfig when the grid is empty, a t is not positive, or the
  // source is missing.
  void validate() const;
};

BinaryMask load_mask(const RunManifest& manifest);

struct MethodRun {
  ScalarField distance;
  ErrorReport report;
};

// One method at one t on an already-loaded mask; `exact` is its EDT.
MethodRun run_method(const BinaryMask& mask, const ScalarField& exact,
                     Method method, double t, bool normalized,
                     const RunManifest& manifest);

struct SweepRow {
  Method method = Method::kHeat;
  bool normalized = false;
  double t = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  std::string flags;  // "ok", diagnostics, or "error=<code>"
};

// Rows ordered by method (manifest order), then normalized before raw, then
// ascending t. One PDE bundle per t is shared by the differential methods.
std::vector<SweepRow> run_sweep(const BinaryMask& mask,
                                const RunManifest& manifest);
std::string format_sweep_csv(const std::vector<SweepRow>& rows);

struct ConvComparison {
  double lambda = 0.0;
  ScalarField exact;
  ScalarField logconv;
  ScalarField softmin;
  ScalarField blend;
  ErrorReport logconv_report;
  ErrorReport softmin_report;
  ErrorReport blend_report;
};

ConvComparison compare_conv(const BinaryMask& mask, double lambda,
                            const RunManifest& manifest);

std::vector<double> make_t_grid(double t_min, double t_max, int steps,
                                bool log_grid);

// Each returns the process exit code: 0 clean, 1 flagged cells, 2 fatal.
int cmd_compute(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_compare_conv(const RunManifest& manifest, std::ostream& out,
                     std::ostream& err);
int cmd_slice(const std::filesystem::path& field_path, int row,
              const RunManifest& mask_source,
              const std::optional<std::filesystem::path>& out_path,
              std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace distfn
