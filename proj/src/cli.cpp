#include "distfn/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "distfn/conv.hpp"
#include "distfn/edt.hpp"
#include "distfn/error.hpp"
#include "distfn/estimators.hpp"
#include "distfn/shape_io.hpp"

namespace distfn {
namespace {

// Carries the name of the pipeline stage that failed.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::exception& cause)
      : std::runtime_error(cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e);
  }
}

int report_fatal(std::ostream& err, const StageError& e) {
  err << "distfn: " << e.stage() << " failed: " << e.what() << "\n";
  return 2;
}

std::string fmt9(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string report_line(const ErrorReport& r) {
  return r.method + "," + fmt9(r.t) + "," + fmt9(r.l2) + "," + fmt9(r.linf) +
         "," + r.flags.str() + "\n";
}

bool default_normalize(const RunManifest& m, Method method) {
  return m.normalize.value_or(is_differential(method));
}

SolverConfig solver_config(const RunManifest& m, double t) {
  SolverConfig c = SolverConfig::from_t(t);
  c.screening = m.screening;
  c.rel_tol = m.rel_tol;
  return c;
}

EstimatorVariant variant_of(Method method) {
  switch (method) {
    case Method::kHeat: return EstimatorVariant::kHeatLog;
    case Method::kTaylor1: return EstimatorVariant::kTaylor1;
    case Method::kTaylor2: return EstimatorVariant::kTaylor2;
    default: break;
  }
  throw Error(ErrorCode::kBadConfig, "not a differential method");
}

ConvOptions conv_options(const RunManifest& m, double lambda) {
  ConvOptions o;
  o.lambda = lambda;
  o.include_prefactor = m.prefactor;
  o.boundary_dim = m.d;
  return o;
}

Estimate conv_estimate(const BinaryMask& mask, Method method, double lambda,
                       const RunManifest& m) {
  const BoundarySet boundary = extract_boundary(mask);
  const ConvOptions opts = conv_options(m, lambda);
  switch (method) {
    case Method::kSoftMin: return {softmin_field(mask, boundary, opts), {}};
    case Method::kLogConv: return {logconv_field(mask, boundary, opts), {}};
    case Method::kBlend: {
      const BlendConfig cfg = BlendConfig::make(lambda, m.K, m.d);
      return {blend_field(softmin_field(mask, boundary, opts),
                          logconv_field(mask, boundary, opts), cfg),
              {}};
    }
    default: break;
  }
  throw Error(ErrorCode::kBadConfig, "not a convolutional method");
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kExact: return "exact";
    case Method::kLogConv: return "logconv";
    case Method::kSoftMin: return "softmin";
    case Method::kBlend: return "blend";
    case Method::kHeat: return "heat";
    case Method::kTaylor1: return "taylor1";
    case Method::kTaylor2: return "taylor2";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kExact, Method::kLogConv, Method::kSoftMin,
                   Method::kBlend, Method::kHeat, Method::kTaylor1,
                   Method::kTaylor2}) {
    if (to_string(m) == name) return m;
  }
  if (name == "heat_log") return Method::kHeat;
  throw Error(ErrorCode::kBadConfig, "unknown method '" + std::string(name) + "'");
}

bool is_differential(Method method) {
  return method == Method::kHeat || method == Method::kTaylor1 ||
         method == Method::kTaylor2;
}

void RunManifest::validate() const {
  if (input.has_value() == shape.has_value()) {
    throw Error(ErrorCode::kBadConfig, "give exactly one of --input or --shape");
  }
  if (methods.empty()) throw Error(ErrorCode::kBadConfig, "no method requested");
  if (t_values.empty()) throw Error(ErrorCode::kBadConfig, "parameter grid is empty");
  for (double t : t_values) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw Error(ErrorCode::kBadConfig, "t values must be positive");
    }
  }
  if (!(K > 0.0)) throw Error(ErrorCode::kBadConfig, "K must be positive");
  if (d != 1 && d != 2) throw Error(ErrorCode::kBadConfig, "d must be 1 or 2");
}

BinaryMask load_mask(const RunManifest& m) {
  if (m.input) return read_mask_pgm(read_file(*m.input), m.spacing);
  if (m.shape) {
    const ShapeRequest req = parse_shape_spec(*m.shape);
    return make_shape(req.shape, req.canvas);
  }
  throw Error(ErrorCode::kBadConfig, "no mask source");
}

MethodRun run_method(const BinaryMask& mask, const ScalarField& exact,
                     Method method, double t, bool normalized,
                     const RunManifest& m) {
  Estimate est;
  if (method == Method::kExact) {
    est.field = exact;
  } else if (is_differential(method)) {
    const PdeBundle bundle = solve_bundle(mask, solver_config(m, t));
    est = estimate(bundle, {variant_of(method), normalized},
                   {m.rel_tol, 0});
    est.flags |= bundle.flags;
  } else {
    est = conv_estimate(mask, method, 1.0 / std::sqrt(t), m);
    if (normalized) {
      est = normalize_gradient(est.field, mask, {m.rel_tol, 0});
    }
  }
  MethodRun run;
  run.report = make_report(std::string(to_string(method)), t, est.field, exact,
                           mask, est.flags);
  run.distance = std::move(est.field);
  return run;
}

std::vector<double> make_t_grid(double t_min, double t_max, int steps,
                                bool log_grid) {
  if (steps < 1 || !(t_min > 0.0) || !(t_max >= t_min)) {
    throw Error(ErrorCode::kBadConfig, "need 0 < t-min <= t-max and t-steps >= 1");
  }
  std::vector<double> ts;
  if (steps == 1) return {t_min};
  for (int i = 0; i < steps; ++i) {
    const double f = static_cast<double>(i) / (steps - 1);
    ts.push_back(log_grid ? t_min * std::pow(t_max / t_min, f)
                          : t_min + f * (t_max - t_min));
  }
  ts.back() = t_max;
  return ts;
}

std::vector<SweepRow> run_sweep(const BinaryMask& mask, const RunManifest& m) {
  const ScalarField exact = exact_edt(mask);
  const std::size_t nt = m.t_values.size();

  std::vector<std::vector<bool>> variants;
  for (Method method : m.methods) {
    switch (m.variants) {
      case SweepVariants::kDefault: variants.push_back({default_normalize(m, method)}); break;
      case SweepVariants::kNormalized: variants.push_back({true}); break;
      case SweepVariants::kRaw: variants.push_back({false}); break;
      case SweepVariants::kBoth: variants.push_back({true, false}); break;
    }
  }

  // cells[method][variant][t]
  std::vector<std::vector<std::vector<SweepRow>>> cells(m.methods.size());
  for (std::size_t k = 0; k < m.methods.size(); ++k) {
    cells[k].assign(variants[k].size(), std::vector<SweepRow>(nt));
  }
  auto fill = [&](std::size_t k, std::size_t v, std::size_t j,
                  const Estimate* est, const std::string& failure) {
    SweepRow& row = cells[k][v][j];
    row.method = m.methods[k];
    row.normalized = variants[k][v];
    row.t = m.t_values[j];
    if (est == nullptr) {
      row.l2 = row.linf = std::nan("");
      row.flags = "error=" + failure;
      return;
    }
    row.l2 = error_l2(est->field, exact, mask);
    row.linf = error_linf(est->field, exact, mask);
    row.flags = est->flags.str();
  };
  auto failure_name = [](const std::exception& e) {
    if (const auto* de = dynamic_cast<const Error*>(&e)) {
      return std::string(to_string(de->code()));
    }
    return std::string("exception");
  };

  for (std::size_t j = 0; j < nt; ++j) {
    const double t = m.t_values[j];
    std::optional<PdeBundle> bundle;
    std::string bundle_failure;
    for (std::size_t k = 0; k < m.methods.size(); ++k) {
      const Method method = m.methods[k];
      for (std::size_t v = 0; v < variants[k].size(); ++v) {
        const bool normalized = variants[k][v];
        try {
          Estimate est;
          if (method == Method::kExact) {
            est.field = exact;
            if (normalized) est = normalize_gradient(exact, mask, {m.rel_tol, 0});
          } else if (is_differential(method)) {
            if (!bundle && bundle_failure.empty()) {
              try {
                bundle = solve_bundle(mask, solver_config(m, t));
              } catch (const std::exception& e) {
                bundle_failure = failure_name(e);
              }
            }
            if (!bundle) {
              fill(k, v, j, nullptr, bundle_failure);
              continue;
            }
            est = estimate(*bundle, {variant_of(method), normalized}, {m.rel_tol, 0});
            est.flags |= bundle->flags;
          } else {
            est = conv_estimate(mask, method, 1.0 / std::sqrt(t), m);
            if (normalized) est = normalize_gradient(est.field, mask, {m.rel_tol, 0});
          }
          fill(k, v, j, &est, {});
        } catch (const std::exception& e) {
          fill(k, v, j, nullptr, failure_name(e));
        }
      }
    }
  }

  std::vector<SweepRow> rows;
  for (auto& per_method : cells) {
    for (auto& per_variant : per_method) {
      for (auto& row : per_variant) rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "method,normalized,t,l2,linf,flags\n";
  for (const SweepRow& r : rows) {
    out += std::string(to_string(r.method)) + "," + (r.normalized ? "1" : "0") +
           "," + fmt9(r.t) + "," + fmt9(r.l2) + "," + fmt9(r.linf) + "," +
           r.flags + "\n";
  }
  return out;
}

ConvComparison compare_conv(const BinaryMask& mask, double lambda,
                            const RunManifest& m) {
  ConvComparison c;
  c.lambda = lambda;
  const BlendConfig cfg = BlendConfig::make(lambda, m.K, m.d);
  const BoundarySet boundary = extract_boundary(mask);
  const ConvOptions opts = conv_options(m, lambda);
  c.exact = edt_fast(mask, boundary);
  c.softmin = softmin_field(mask, boundary, opts);
  c.logconv = logconv_field(mask, boundary, opts);
  c.blend = blend_field(c.softmin, c.logconv, cfg);
  const double t = 1.0 / (lambda * lambda);
  c.logconv_report = make_report("logconv", t, c.logconv, c.exact, mask);
  c.softmin_report = make_report("softmin", t, c.softmin, c.exact, mask);
  c.blend_report = make_report("blend", t, c.blend, c.exact, mask);
  return c;
}

int cmd_compute(const RunManifest& m, std::ostream& out, std::ostream& err) {
  try {
    stage("config", [&] {
      m.validate();
      if (m.methods.size() != 1 || m.t_values.size() != 1) {
        throw Error(ErrorCode::kBadConfig, "compute takes one method and one t");
      }
    });
    const BinaryMask mask = stage("load-mask", [&] { return load_mask(m); });
    const ScalarField exact = stage("exact-edt", [&] { return exact_edt(mask); });
    const Method method = m.methods.front();
    const MethodRun run = stage(to_string(method).data(), [&] {
      return run_method(mask, exact, method, m.t_values.front(),
                        default_normalize(m, method), m);
    });
    stage("write-output", [&] {
      ensure_dir(m.out_dir);
      const ScalarField errors = error_map(run.distance, exact, mask);
      write_file(m.out_dir / "distance.csv", write_field_csv(run.distance));
      write_file(m.out_dir / "error.csv", write_field_csv(errors));
      write_file(m.out_dir / "error.ppm", write_heatmap_ppm(errors));
      write_file(m.out_dir / "report.csv", report_line(run.report));
    });
    out << report_line(run.report);
    return run.report.flags.empty() ? 0 : 1;
  } catch (const StageError& e) {
    return report_fatal(err, e);
  }
}

int cmd_sweep(const RunManifest& m, std::ostream& out, std::ostream& err) {
  try {
    stage("config", [&] { m.validate(); });
    const BinaryMask mask = stage("load-mask", [&] { return load_mask(m); });
    const auto rows = stage("sweep", [&] { return run_sweep(mask, m); });
    const std::string csv = format_sweep_csv(rows);
    stage("write-output", [&] {
      ensure_dir(m.out_dir);
      write_file(m.out_dir / "sweep.csv", csv);
    });
    out << csv;
    for (const SweepRow& r : rows) {
      if (r.flags != "ok") return 1;
    }
    return 0;
  } catch (const StageError& e) {
    return report_fatal(err, e);
  }
}

int cmd_compare_conv(const RunManifest& m, std::ostream& out, std::ostream& err) {
  try {
    stage("config", [&] {
      m.validate();
      if (m.t_values.size() != 1) {
        throw Error(ErrorCode::kBadConfig, "compare-conv takes one lambda");
      }
    });
    const BinaryMask mask = stage("load-mask", [&] { return load_mask(m); });
    const double lambda = 1.0 / std::sqrt(m.t_values.front());
    const ConvComparison c =
        stage("convolution", [&] { return compare_conv(mask, lambda, m); });
    const int row = m.row.value_or((mask.height() - 1) / 2);

    std::string slice_csv = "column,exact,logconv,softmin,blend\n";
    std::string error_csv = "column,logconv,softmin,blend\n";
    stage("slice", [&] {
      const auto exact = slice_extract(c.exact, mask, row);
      const auto logc = slice_extract(c.logconv, mask, row);
      const auto soft = slice_extract(c.softmin, mask, row);
      const auto blend = slice_extract(c.blend, mask, row);
      for (std::size_t i = 0; i < exact.size(); ++i) {
        const std::string col = std::to_string(exact[i].column);
        slice_csv += col + "," + fmt9(exact[i].value) + "," + fmt9(logc[i].value) +
                     "," + fmt9(soft[i].value) + "," + fmt9(blend[i].value) + "\n";
        error_csv += col + "," + fmt9(std::abs(logc[i].value - exact[i].value)) +
                     "," + fmt9(std::abs(soft[i].value - exact[i].value)) + "," +
                     fmt9(std::abs(blend[i].value - exact[i].value)) + "\n";
      }
    });
    const std::string report = "method,t,l2,linf,flags\n" +
                               report_line(c.logconv_report) +
                               report_line(c.softmin_report) +
                               report_line(c.blend_report);
    stage("write-output", [&] {
      ensure_dir(m.out_dir);
      const ScalarField soft_err = error_map(c.softmin, c.exact, mask);
      const ScalarField blend_err = error_map(c.blend, c.exact, mask);
      // Shared colour scale so the two maps are comparable.
      double scale = 0.0;
      for (std::size_t i = 0; i < soft_err.size(); ++i) {
        if (soft_err.defined(i)) scale = std::max({scale, soft_err[i], blend_err[i]});
      }
      const std::optional<double> s =
          scale > 0.0 ? std::optional<double>(scale) : std::nullopt;
      write_file(m.out_dir / "slice.csv", slice_csv);
      write_file(m.out_dir / "errors.csv", error_csv);
      write_file(m.out_dir / "softmin_error.ppm", write_heatmap_ppm(soft_err, s));
      write_file(m.out_dir / "blend_error.ppm", write_heatmap_ppm(blend_err, s));
      write_file(m.out_dir / "report.csv", report);
    });
    out << report;
    return 0;
  } catch (const StageError& e) {
    return report_fatal(err, e);
  }
}

int cmd_slice(const std::filesystem::path& field_path, int row,
              const RunManifest& mask_source,
              const std::optional<std::filesystem::path>& out_path,
              std::ostream& out, std::ostream& err) {
  try {
    const ScalarField field =
        stage("read-field", [&] { return read_field_csv(read_file(field_path)); });
    std::optional<BinaryMask> mask;
    if (mask_source.input || mask_source.shape) {
      mask = stage("load-mask", [&] { return load_mask(mask_source); });
    }
    const auto series = stage("slice", [&] {
      return mask ? slice_extract(field, *mask, row) : slice_extract(field, row);
    });
    std::string csv = "column,value\n";
    for (const SamplePoint& p : series) {
      csv += std::to_string(p.column) + "," + fmt9(p.value) + "\n";
    }
    if (out_path) {
      stage("write-output", [&] { write_file(*out_path, csv); });
    }
    out << csv;
    return 0;
  } catch (const StageError& e) {
    return report_fatal(err, e);
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Distance-to-boundary estimation on binary images"};
  app.require_subcommand(1);

  RunManifest m;
  std::string input;
  std::string method_name;
  std::string methods_list = "heat,taylor1,taylor2";
  std::string variants_name = "both";
  std::string screening_name = "matched";
  std::string out_dir;
  double t = 0.0;
  double lambda = 0.0;
  bool no_normalize = false;
  bool force_normalize = false;
  bool no_prefactor = false;
  double t_min = 0.2;
  double t_max = 10.0;
  int t_steps = 25;
  bool log_grid = false;
  int row = 0;
  std::string field_path;
  std::string slice_out;

  auto add_source = [&](CLI::App* sub, bool required) {
    auto* in = sub->add_option("--input", input, "PGM mask (P2/P5)");
    auto* sh = sub->add_option("--shape", m.shape,
                               "built-in shape, e.g. disk:r=20,canvas=64");
    in->excludes(sh);
    sh->excludes(in);
    if (required) {
      // Exactly one source; checked in RunManifest::validate as well.
      sub->callback([&, in, sh] {
        if (in->count() + sh->count() == 0) {
          throw CLI::RequiredError("--input or --shape");
        }
      });
    }
    sub->add_option("--spacing", m.spacing, "grid spacing for PGM input")
        ->check(CLI::PositiveNumber);
  };
  auto add_param = [&](CLI::App* sub) {
    auto* t_opt = sub->add_option("--t", t, "t = 1/lambda^2")->check(CLI::PositiveNumber);
    auto* l_opt = sub->add_option("--lambda", lambda, "lambda = 1/sqrt(t)")
                      ->check(CLI::PositiveNumber);
    t_opt->excludes(l_opt);
    l_opt->excludes(t_opt);
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--K", m.K, "blend constant K")->capture_default_str();
    sub->add_option("--d", m.d, "boundary dimension")->check(CLI::IsMember({1, 2}));
    sub->add_flag("--no-prefactor", no_prefactor, "LogConv without lambda^d");
    sub->add_option("--screening", screening_name,
                    "screening coefficient: matched | continuum")
        ->check(CLI::IsMember({"matched", "continuum"}));
    sub->add_option("--rel-tol", m.rel_tol, "CG relative tolerance");
    sub->add_option("--out", out_dir, "output directory")->required();
  };

  auto* compute = app.add_subcommand("compute", "one method at one t");
  add_source(compute, true);
  add_param(compute);
  add_common(compute);
  compute->add_option("--method", method_name,
                      "exact|logconv|softmin|blend|heat|taylor1|taylor2")
      ->required();
  compute->add_flag("--no-normalize", no_normalize, "skip gradient normalization");
  compute->add_flag("--normalize", force_normalize,
                    "normalize convolutional estimates too");

  auto* sweep = app.add_subcommand("sweep", "L2/Linf errors over a t grid");
  add_source(sweep, true);
  add_common(sweep);
  sweep->add_option("--methods", methods_list, "comma-separated methods")
      ->capture_default_str();
  sweep->add_option("--t-min", t_min)->capture_default_str();
  sweep->add_option("--t-max", t_max)->capture_default_str();
  sweep->add_option("--t-steps", t_steps)->capture_default_str();
  sweep->add_flag("--log-grid", log_grid, "logarithmic t spacing");
  sweep->add_option("--variants", variants_name, "both | normalized | raw | default")
      ->check(CLI::IsMember({"both", "normalized", "raw", "default"}))
      ->capture_default_str();

  auto* conv = app.add_subcommand("compare-conv", "LogConv/SoftMin/blend comparison");
  add_source(conv, true);
  add_param(conv);
  add_common(conv);
  conv->add_option("--row", m.row, "slice row (default: middle row)");

  auto* slice = app.add_subcommand("slice", "one row of a field CSV");
  slice->add_option("--field", field_path, "field CSV")->required();
  slice->add_option("--row", row, "row index")->required();
  slice->add_option("--out", slice_out, "write the slice CSV here");
  add_source(slice, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  if (!input.empty()) m.input = input;
  m.screening = screening_name == "continuum" ? Screening::kContinuum
                                              : Screening::kDispersionMatched;
  m.prefactor = !no_prefactor;
  m.out_dir = out_dir;

  try {
    if (compute->parsed() || conv->parsed()) {
      if (lambda > 0.0) {
        m.t_values = {1.0 / (lambda * lambda)};
      } else if (t > 0.0) {
        m.t_values = {t};
      }
    }
    if (compute->parsed()) {
      m.methods = {stage("config", [&] { return parse_method(method_name); })};
      if (no_normalize) m.normalize = false;
      if (force_normalize) m.normalize = true;
      if (m.t_values.empty() && m.methods.front() == Method::kExact) {
        m.t_values = {1.0};
      }
      return cmd_compute(m, out, err);
    }
    if (sweep->parsed()) {
      stage("config", [&] {
        std::stringstream ss(methods_list);
        std::string name;
        while (std::getline(ss, name, ',')) m.methods.push_back(parse_method(name));
        m.t_values = make_t_grid(t_min, t_max, t_steps, log_grid);
      });
      m.variants = variants_name == "normalized" ? SweepVariants::kNormalized
                   : variants_name == "raw"      ? SweepVariants::kRaw
                   : variants_name == "default"  ? SweepVariants::kDefault
                                                 : SweepVariants::kBoth;
      return cmd_sweep(m, out, err);
    }
    if (conv->parsed()) {
      m.methods = {Method::kBlend};
      return cmd_compare_conv(m, out, err);
    }
    std::optional<std::filesystem::path> slice_path;
    if (!slice_out.empty()) slice_path = slice_out;
    return cmd_slice(field_path, row, m, slice_path, out, err);
  } catch (const StageError& e) {
    return report_fatal(err, e);
  }
}

}  // namespace distfn
