// gpival: GPI-model workflow for measurement-system validation.
// Subcommands cover the three steps (sample+fit, confirm, search) plus
// space export, follow-up verification, and the analytic benchmark.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "gpival/normal.hpp"

#include "gpival/config_space.hpp"
#include "gpival/confirmation.hpp"
#include "gpival/critical_search.hpp"
#include "gpival/csv.hpp"
#include "gpival/kriging.hpp"
#include "gpival/model_build.hpp"
#include "gpival/oracle_fields.hpp"
#include "gpival/pipeline.hpp"
#include "gpival/sampling.hpp"

using namespace gpival;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitValidationFail = 1;
constexpr int kExitUsage = 2;

std::shared_ptr<const ConfigSpace> load_space(const std::string& builtin,
                                              const std::string& file) {
  if (!file.empty())
    return std::make_shared<const ConfigSpace>(
        ConfigSpace::from_json(nlohmann::json::parse(read_file(file))));
  return std::make_shared<const ConfigSpace>(builtin_space(builtin));
}

FitWeighting weighting_from(const std::string& s) {
  if (s == "counts") return FitWeighting::counts;
  if (s == "uniform") return FitWeighting::uniform;
  if (s == "cressie") return FitWeighting::cressie;
  throw CLI::ValidationError("--weights must be counts, uniform or cressie");
}

struct CommonSpaceOpts {
  std::string builtin = "sar-array";
  std::string file;
};

void add_space_opts(CLI::App* cmd, CommonSpaceOpts& o) {
  cmd->add_option("--space-name", o.builtin, "Built-in space (sar-array, sar-scanning)");
  cmd->add_option("--space", o.file, "Custom space JSON file");
}

int cmd_space(const CommonSpaceOpts& so, const std::string& out) {
  auto space = load_space(so.builtin, so.file);
  RunManifest man;
  man.command = "space";
  man.parameters = {{"space", space->name()}};
  std::string payload = space->to_json().dump(2) + "\n";
  write_file_atomic(out, payload);
  man.record_output(out, payload);
  man.write(out + ".manifest.json");
  std::cout << "wrote " << out << " (" << space->dimension_count() << " dimensions)\n";
  return kExitPass;
}

int cmd_sample(const CommonSpaceOpts& so, std::size_t size, std::uint64_t seed,
               const std::string& mode, const std::string& existing, const std::string& out) {
  auto space = load_space(so.builtin, so.file);
  LhsPlan plan;
  plan.size = size;
  plan.seed = seed;
  plan.space = space.get();

  RunManifest man;
  man.command = "sample";
  man.parameters = {{"size", size}, {"seed", seed}, {"mode", mode}, {"space", space->name()}};

  std::vector<ConfigPoint> points;
  if (mode == "initial") {
    plan.mode = SampleMode::initial;
    points = generate_initial_sample(plan);
  } else if (mode == "test") {
    plan.mode = SampleMode::test;
    std::vector<ConfigPoint> avoid;
    if (!existing.empty()) {
      man.add_input(existing);
      avoid = sample_from_csv(read_file(existing), *space).points;
    }
    points = generate_test_sample(plan, avoid);
  } else {
    throw CLI::ValidationError("--mode must be initial or test");
  }

  std::string payload = sample_to_csv(points, nullptr, *space);
  write_file_atomic(out, payload);
  man.record_output(out, payload);
  man.write(out + ".manifest.json");
  std::cout << "wrote " << out << " (" << points.size() << " configurations to measure)\n";
  return kExitPass;
}

int cmd_fit(const CommonSpaceOpts& so, const std::string& sample_path, const std::string& shape,
            const std::string& nugget_mode, const std::string& weights, bool isotropic,
            double angular_tol, std::size_t bins, const std::string& out,
            const std::string& plot_out) {
  auto space = load_space(so.builtin, so.file);
  std::string csv = read_file(sample_path);
  ParsedSample parsed = sample_from_csv(csv, *space);
  if (!parsed.has_values)
    throw std::runtime_error("fit: sample file has no measured values in " +
                             std::string(kValueColumn));

  ValuedSample vs{parsed.points, parsed.values, parsed.ids};
  ModelBuildOptions opt;
  opt.shape = shape_from_string(shape);
  if (nugget_mode == "zero") {
    opt.fixed_nugget = 0.0;
  } else if (nugget_mode != "free") {
    try {
      opt.fixed_nugget = std::stod(nugget_mode);  // known noise variance
    } catch (...) {
      throw CLI::ValidationError("--nugget must be free, zero, or a number");
    }
  }
  opt.weighting = weighting_from(weights);
  opt.isotropic = isotropic;
  opt.angular_tolerance_deg = angular_tol;
  opt.isotropic_bins = bins;

  BuiltModel built = build_gpi_model(vs, space, opt);

  RunManifest man;
  man.command = "fit";
  man.parameters = {{"shape", shape},         {"nugget", nugget_mode},
                    {"weights", weights},     {"isotropic", isotropic},
                    {"angular_tolerance", angular_tol}, {"bins", bins}};
  man.add_input(sample_path);

  nlohmann::json j = built.model.to_json();
  j["diagnostics"] = {{"outliers", built.diagnostics.outliers},
                      {"bins_with_40_lags_fraction", built.diagnostics.bins_with_min_lags_fraction},
                      {"sanity", built.diagnostics.sanity.message}};
  std::string payload = j.dump(2) + "\n";
  write_file_atomic(out, payload);
  man.record_output(out, payload);

  if (!plot_out.empty()) {
    // variogram plot data for external tools
    const EmpiricalVariogram* emp = built.model.empirical();
    CsvTable t;
    t.header = {"lag", "gamma_hat", "count", "gamma_fit"};
    for (std::size_t b = 0; b < emp->bins(); ++b) {
      if (emp->bin_counts[b] == 0) continue;
      double lag = emp->lag_center(b);
      t.rows.push_back({format_double(lag), format_double(emp->bin_means[b]),
                        std::to_string(emp->bin_counts[b]),
                        format_double(eval_model(built.model.variogram(), lag))});
    }
    std::string plot = t.to_string();
    write_file_atomic(plot_out, plot);
    man.record_output(plot_out, plot);
  }
  man.write(out + ".manifest.json");

  const auto& v = built.model.variogram();
  std::cout << "fitted " << to_string(v.shape) << " variogram: nugget=" << v.nugget
            << " sill=" << v.sill << " range=" << v.range << " nrmse=" << built.model.fit_nrmse()
            << "\n";
  if (!built.diagnostics.sanity.message.empty())
    std::cout << "anisotropy sanity: " << built.diagnostics.sanity.message << "\n";
  return kExitPass;
}

int cmd_confirm(const std::string& model_path, const std::string& test_path, double alpha,
                const std::string& out, const std::string& qq_out) {
  GpiModel model = GpiModel::from_json(nlohmann::json::parse(read_file(model_path)));
  if (!model.space()) throw std::runtime_error("confirm: model file carries no space");
  ParsedSample parsed = sample_from_csv(read_file(test_path), *model.space());
  if (!parsed.has_values) throw std::runtime_error("confirm: test file has no measured values");

  ConfirmationThresholds th;
  th.nrmse_alpha = alpha;
  ConfirmationReport rep = confirm(model, ValuedSample{parsed.points, parsed.values, parsed.ids}, th);

  RunManifest man;
  man.command = "confirm";
  man.parameters = {{"alpha", alpha}};
  man.add_input(model_path);
  man.add_input(test_path);
  std::string payload = rep.to_json().dump(2) + "\n";
  write_file_atomic(out, payload);
  man.record_output(out, payload);

  if (!qq_out.empty()) {
    std::vector<double> sorted = rep.residuals;
    std::sort(sorted.begin(), sorted.end());
    CsvTable t;
    t.header = {"theoretical_quantile", "sample_quantile"};
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      double q = normal_quantile((static_cast<double>(i) + 0.5) / sorted.size());
      t.rows.push_back({format_double(q), format_double(sorted[i])});
    }
    std::string qq = t.to_string();
    write_file_atomic(qq_out, qq);
    man.record_output(qq_out, qq);
  }
  man.write(out + ".manifest.json");

  auto line = [](const char* name, const StageResult& s) {
    std::printf("  %-12s %-5s (%.4f)\n", name, s.pass ? "pass" : "FAIL", s.value);
  };
  std::printf("confirmation stages:\n");
  line("fit", rep.fit);
  line("shapiro-wilk", rep.shapiro);
  line("qq-location", rep.qq_location);
  line("qq-scale", rep.qq_scale);
  std::printf("overall: %s\n", rep.overall ? "pass" : "FAIL");
  return rep.overall ? kExitPass : kExitValidationFail;
}

int cmd_search(const std::string& model_path, double t_lower, double t_upper, double u_system,
               double u_source, double sensitivity, double repulsion, std::size_t iterations,
               std::size_t cap_min, std::size_t cap_max, double floor_prob, std::uint64_t seed,
               const std::string& out, const std::string& out_json) {
  GpiModel model = GpiModel::from_json(nlohmann::json::parse(read_file(model_path)));
  if (!model.space()) throw std::runtime_error("search: model file carries no space");

  SearchParams params;
  if (t_upper > t_lower) {
    params.t_lower = t_lower;
    params.t_upper = t_upper;
  } else {
    double m = mpe(u_system, u_source);
    params.t_lower = -m;
    params.t_upper = m;
  }
  params.sensitivity = sensitivity;
  params.repulsion = repulsion;
  params.iterations = iterations;
  params.cap_min = cap_min;
  params.cap_max = cap_max;
  params.report_floor = floor_prob;

  CriticalReport rep = run_critical_search(model, params, seed);

  RunManifest man;
  man.command = "search";
  man.parameters = {{"t_lower", params.t_lower}, {"t_upper", params.t_upper},
                    {"sensitivity", sensitivity}, {"repulsion", repulsion},
                    {"iterations", iterations},   {"cap_min", cap_min},
                    {"cap_max", cap_max},         {"floor", floor_prob},
                    {"seed", seed}};
  man.add_input(model_path);
  std::string payload = report_to_csv(rep, *model.space());
  write_file_atomic(out, payload);
  man.record_output(out, payload);
  if (!out_json.empty()) {
    std::string jp = rep.to_json().dump(2) + "\n";
    write_file_atomic(out_json, jp);
    man.record_output(out_json, jp);
  }
  man.write(out + ".manifest.json");
  std::cout << "critical configurations above floor: " << rep.rows.size() << "\n";
  return kExitPass;
}

int cmd_verify(const std::string& report_path, double mpe_db, double u_system, double u_source) {
  double limit = mpe_db > 0.0 ? mpe_db : mpe(u_system, u_source);
  VerifyResult res = verify_measurements(read_file(report_path), limit);
  std::printf("MPE limit: %.4f dB\n", limit);
  std::printf("%-6s %-12s %-8s\n", "row", "measured_dB", "result");
  for (const auto& r : res.rows)
    std::printf("%-6zu %-12.4f %-8s\n", r.row_index, r.measured_db, r.pass ? "pass" : "FAIL");
  std::printf("overall: %s (%zu rows)\n", res.overall ? "pass" : "FAIL", res.rows.size());
  return res.overall ? kExitPass : kExitValidationFail;
}

// Analytic benchmark: model the sine-wave surface from a seeded LHS and run
// the full create/confirm/search loop against the known ground truth.
int cmd_benchmark(std::uint64_t seed, const std::string& outdir) {
  OracleField field = sine_wave_field(seed);
  auto space = field.space();

  auto unit = lhs_unit(50, 2, seed);
  std::vector<ConfigPoint> pts = unit;
  std::vector<double> vals;
  vals.reserve(pts.size());
  for (const auto& p : pts) vals.push_back(field(p));

  BuiltModel built =
      build_gpi_model(ValuedSample{pts, vals, {}}, space, benchmark_fit_options(field.noise_std()));
  const auto& v = built.model.variogram();
  std::printf("variogram: nugget=%.2e sill=%.4f range=%.4f nrmse=%.4f\n", v.nugget, v.sill, v.range,
              built.model.fit_nrmse());

  // test sample + confirmation
  auto test_unit = lhs_unit(50, 2, seed + 1000);
  std::vector<double> test_vals;
  for (const auto& p : test_unit) test_vals.push_back(field(p));
  ConfirmationReport conf = confirm(built.model, ValuedSample{test_unit, test_vals, {}});
  std::printf("confirmation: fit=%s sw=%s qq=%s overall=%s\n", conf.fit.pass ? "pass" : "fail",
              conf.shapiro.pass ? "pass" : "fail",
              (conf.qq_location.pass && conf.qq_scale.pass) ? "pass" : "fail",
              conf.overall ? "pass" : "fail");

  SearchParams params;
  params.t_lower = -0.75;
  params.t_upper = 0.75;
  params.sensitivity = 0.1;
  params.repulsion = 0.1;
  params.iterations = 8;
  CriticalReport rep = run_critical_search(built.model, params, seed + 99);
  std::printf("critical report rows: %zu\n", rep.rows.size());
  for (std::size_t i = 0; i < std::min<std::size_t>(rep.rows.size(), 10); ++i)
    std::printf("  (%.3f, %.3f)  pred=%.3f  e=%.3f  P=%.3f\n", rep.rows[i].point[0],
                rep.rows[i].point[1], rep.rows[i].predicted_deviation, rep.rows[i].model_error,
                rep.rows[i].probability);

  if (!outdir.empty()) {
    write_file_atomic(outdir + "/benchmark_space.json", space->to_json().dump(2) + "\n");
    write_file_atomic(outdir + "/benchmark_sample.csv", sample_to_csv(pts, &vals, *space));
    write_file_atomic(outdir + "/benchmark_test.csv", sample_to_csv(test_unit, &test_vals, *space));
    write_file_atomic(outdir + "/benchmark_model.json", built.model.to_json().dump(2) + "\n");
    write_file_atomic(outdir + "/benchmark_report.csv", report_to_csv(rep, *space));
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GPI-model validation workflow (kriging, confirmation, critical search)"};
  app.require_subcommand(1);

  CommonSpaceOpts space_opts;
  std::string out = "out";
  std::string out_json;

  auto* sp = app.add_subcommand("space", "Export a configuration space as JSON");
  add_space_opts(sp, space_opts);
  sp->add_option("--out", out, "Output JSON path")->required();

  auto* sa = app.add_subcommand("sample", "Generate a measurement-request CSV via LHS");
  add_space_opts(sa, space_opts);
  std::size_t size = 400;
  std::uint64_t seed = 1;
  std::string mode = "initial", existing;
  sa->add_option("--size", size, "Sample size (default 400 initial / 50 test)");
  sa->add_option("--seed", seed, "RNG seed");
  sa->add_option("--mode", mode, "initial or test");
  sa->add_option("--existing", existing, "Existing sample CSV the test sample must avoid");
  sa->add_option("--out", out, "Output CSV path")->required();

  auto* fi = app.add_subcommand("fit", "Build a GPI model from a measured sample CSV");
  add_space_opts(fi, space_opts);
  std::string sample_path, shape = "gaussian", nugget_mode = "free", weights = "counts";
  bool isotropic = false;
  double angular_tol = 22.5;
  std::size_t bins = kIsotropicBins;
  fi->add_option("--sample", sample_path, "Measured sample CSV")->required();
  fi->add_option("--shape", shape, "exponential, gaussian or spherical");
  fi->add_option("--nugget", nugget_mode, "free, zero, or a fixed value (known noise variance)");
  fi->add_option("--weights", weights, "Fit weights: counts, uniform or cressie");
  fi->add_flag("--isotropic", isotropic, "Skip anisotropy construction");
  fi->add_option("--angular-tolerance", angular_tol, "Directional pair tolerance (degrees)");
  fi->add_option("--bins", bins, "Isotropic variogram bins");
  fi->add_option("--out", out, "Output model JSON path")->required();
  std::string plot_out;
  fi->add_option("--plot", plot_out, "Variogram plot data CSV (lag, gamma_hat, count, gamma_fit)");

  auto* co = app.add_subcommand("confirm", "Confirm a model against an independent test CSV");
  std::string model_path, test_path, qq_out;
  double alpha = 0.25;
  co->add_option("--model", model_path, "Model JSON")->required();
  co->add_option("--test", test_path, "Measured test CSV")->required();
  co->add_option("--alpha", alpha, "NRMSE acceptance threshold");
  co->add_option("--out", out, "Output report JSON path")->required();
  co->add_option("--qq-out", qq_out, "QQ plot data CSV (theoretical, sample quantiles)");

  auto* se = app.add_subcommand("search", "Search for configurations likely to exceed the MPE");
  double t_lower = 0.0, t_upper = 0.0, u_system = 0.30, u_source = 0.15;
  double sensitivity = 0.1, repulsion = 0.1, floor_prob = 0.05;
  std::size_t iterations = 8, cap_min = 10, cap_max = 1000;
  se->add_option("--model", model_path, "Model JSON")->required();
  se->add_option("--tlower", t_lower, "Lower threshold (dB); default -MPE");
  se->add_option("--tupper", t_upper, "Upper threshold (dB); default +MPE");
  se->add_option("--mpe-system", u_system, "System uncertainty for the MPE default");
  se->add_option("--mpe-source", u_source, "Source uncertainty for the MPE default");
  se->add_option("--sensitivity", sensitivity, "Delta-measure sensitivity p in (0, 0.5)");
  se->add_option("--repulsion", repulsion, "Repulsion q in [0, 1]");
  se->add_option("--iterations", iterations, "Search iterations m");
  se->add_option("--caps", cap_min, "Population minimum cap")->expected(1);
  se->add_option("--caps-max", cap_max, "Population maximum cap");
  se->add_option("--floor", floor_prob, "Report probability floor");
  se->add_option("--seed", seed, "RNG seed");
  se->add_option("--out", out, "Output report CSV path")->required();
  se->add_option("--out-json", out_json, "Optional report JSON path");

  auto* ve = app.add_subcommand("verify", "Check measured follow-up values against the MPE");
  std::string report_path;
  double mpe_db = 0.0;
  ve->add_option("--report", report_path, "Report CSV with a measured_dB column")->required();
  ve->add_option("--mpe", mpe_db, "MPE limit in dB (overrides the uncertainty pair)");
  ve->add_option("--mpe-system", u_system, "System uncertainty");
  ve->add_option("--mpe-source", u_source, "Source uncertainty");

  auto* be = app.add_subcommand("benchmark", "Run the analytic sine-wave benchmark end to end");
  std::string outdir;
  be->add_option("--seed", seed, "RNG seed");
  be->add_option("--outdir", outdir, "Directory for benchmark artifacts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sp->parsed()) return cmd_space(space_opts, out);
    if (sa->parsed()) {
      if (mode == "test" && size == 400 && sa->count("--size") == 0) size = 50;
      return cmd_sample(space_opts, size, seed, mode, existing, out);
    }
    if (fi->parsed())
      return cmd_fit(space_opts, sample_path, shape, nugget_mode, weights, isotropic, angular_tol,
                     bins, out, plot_out);
    if (co->parsed()) return cmd_confirm(model_path, test_path, alpha, out, qq_out);
    if (se->parsed())
      return cmd_search(model_path, t_lower, t_upper, u_system, u_source, sensitivity, repulsion,
                        iterations, cap_min, cap_max, floor_prob, seed, out, out_json);
    if (ve->parsed()) return cmd_verify(report_path, mpe_db, u_system, u_source);
    if (be->parsed()) return cmd_benchmark(seed, outdir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
