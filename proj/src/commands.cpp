// SPDX-License-Identifier: Apache-2.0

#include "emloc/commands.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "emloc/fidelity.hpp"
#include "emloc/fista.hpp"
#include "emloc/parallel.hpp"
#include "emloc/scenario.hpp"
#include "emloc/validation.hpp"

namespace emloc
{

using nlohmann::json;

namespace
{

fs::path output_dir(const CommandOptions &opt, const Scenario &s)
{
  return opt.out ? *opt.out : fs::path(s.output_dir);
}

// Runs body, mapping exceptions to exit codes.
int guarded(const char *name, std::ostream &err, const std::function<int()> &body)
{
  try
  {
    return body();
  }
  catch (const GeometryError &e)
  {
    err << name << ": geometry error: " << e.what() << '\n';
  }
  catch (const IoError &e)
  {
    err << name << ": " << e.what() << '\n';
  }
  catch (const nlohmann::json::exception &e)
  {
    err << name << ": malformed JSON: " << e.what() << '\n';
  }
  catch (const std::invalid_argument &e)
  {
    err << name << ": invalid input: " << e.what() << '\n';
  }
  catch (const fs::filesystem_error &e)
  {
    err << name << ": " << e.what() << '\n';
  }
  catch (const std::exception &e)
  {
    err << name << ": " << e.what() << '\n';
  }
  return exit_error;
}

bool same_frequencies(const FrequencySet &a, const FrequencySet &b)
{
  if (a.size() != b.size())
    return false;
  for (std::size_t n = 0; n < a.size(); ++n)
    if (std::abs(a[n] - b[n]) > 1e-12 * std::abs(b[n]))
      return false;
  return true;
}

json voxel_json(const VoxelGrid &g, std::size_t idx, double value)
{
  const auto [i, j, k] = g.unravel(idx);
  const RVec3 c = g.center(idx);
  return {{"index", json::array({i, j, k})}, {"center", json::array({c[0], c[1], c[2]})}, {"value", value}};
}

std::string printf_string(const char *fmt, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

} // namespace

int cmd_forward(const CommandOptions &opt, std::ostream &log, std::ostream &err)
{
  return guarded("forward", err, [&]() -> int {
    const Scenario sc = load_scenario(opt.scenario);
    const fs::path out = output_dir(opt, sc);
    const unsigned threads = resolve_threads(opt.threads);

    const VoxelGrid fine = sc.forward_grid();
    const SurfaceMesh mesh = sc.mesh();
    const FrequencySet freqs = sc.freqs();
    const BoundaryData clean = simulate_boundary_data(sc.source_on(fine), mesh, freqs, sc.medium(), threads);
    const BoundaryData data = add_noise(clean, sc.noise.level, noise_seed(sc));

    write_boundary_data(out, "data", data, opt.format);
    write_field(out, "source", sc.source_on(sc.voxel_grid()), opt.format,
                {{"role", "ground truth rasterized on the inversion grid"}});

    log << "forward: " << data.n_points() << " points x " << data.n_freqs() << " frequencies = "
        << data.n_points() * data.n_freqs() << " rows -> " << (out / "data.json").string() << '\n';
    log << "forward: source rasterized on " << fine.dims()[0] << 'x' << fine.dims()[1] << 'x' << fine.dims()[2]
        << " voxels (refinement " << sc.forward_refinement << ")\n";
    for (std::size_t n = 0; n < data.n_freqs(); ++n)
    {
      double s = 0.0;
      for (std::size_t i = 0; i < data.n_points(); ++i)
        s += std::norm(data(i, n)[0]) + std::norm(data(i, n)[1]) + std::norm(data(i, n)[2]);
      log << "  omega = " << printf_string("%.6g", freqs[n])
          << "  RMS |E| = " << printf_string("%.6e", std::sqrt(s / static_cast<double>(data.n_points()))) << '\n';
    }
    log << "  RMS component magnitude = " << printf_string("%.6e", data.rms())
        << ", noise level = " << printf_string("%.3g", sc.noise.level) << '\n';
    return exit_ok;
  });
}

int cmd_image(const CommandOptions &opt, std::ostream &log, std::ostream &err)
{
  return guarded("image", err, [&]() -> int {
    const Scenario sc = load_scenario(opt.scenario);
    const fs::path out = output_dir(opt, sc);
    const unsigned threads = resolve_threads(opt.threads);
    const fs::path data_path = opt.data ? *opt.data : out / "data.json";

    const BoundaryData data = read_boundary_data(data_path);
    if (!same_frequencies(data.freqs(), sc.freqs()))
      throw IoError("dimension mismatch: data frequencies differ from the scenario");
    if (data.n_points() != sc.surface.n_points)
      throw IoError("dimension mismatch: data has " + std::to_string(data.n_points()) +
                    " mesh points, scenario expects " + std::to_string(sc.surface.n_points));

    const VoxelGrid grid = sc.voxel_grid();
    ImageStack stack = phase_conj_stack(data, grid, sc.medium(), threads);
    if (sc.imaging.broadband)
      stack.broadband = broadband_image(stack);
    write_image_stack(out, stack, opt.format);

    const int axis = sc.imaging.slice_axis;
    const long slice = sc.imaging.slice_index;
    const std::vector<double> sum = stack.magnitude_sum();
    write_pgm_slice(out / "slice_sum.pgm", grid, sum, axis, slice);
    char name[32];
    json per_freq = json::array();
    for (std::size_t n = 0; n < stack.per_freq.size(); ++n)
    {
      const std::vector<double> mag = magnitude(stack.per_freq[n]);
      std::snprintf(name, sizeof name, "slice_%03zu.pgm", n);
      write_pgm_slice(out / name, grid, mag, axis, slice);
      const auto peak = find_peaks(grid, mag, 1);
      per_freq.push_back({{"omega", stack.freqs[n]}, {"peak", peak.empty() ? json() : voxel_json(grid, peak[0], mag[peak[0]])}});
    }

    json report;
    report["schema"] = "emloc.image_report/1";
    json peaks = json::array();
    for (std::size_t idx : find_peaks(grid, sum, 8))
      peaks.push_back(voxel_json(grid, idx, sum[idx]));
    report["magnitude_sum_peaks"] = peaks;
    report["per_frequency"] = per_freq;
    if (stack.broadband)
    {
      const std::vector<double> mag = magnitude(*stack.broadband);
      write_pgm_slice(out / "slice_broadband.pgm", grid, mag, axis, slice);
      const auto peak = find_peaks(grid, mag, 1);
      report["broadband_peak"] = peak.empty() ? json() : voxel_json(grid, peak[0], mag[peak[0]]);
    }
    write_json(out / "image_report.json", report);

    log << "image: " << stack.per_freq.size() << " frequency images on " << grid.dims()[0] << 'x' << grid.dims()[1]
        << 'x' << grid.dims()[2] << " voxels" << (stack.broadband ? " + broadband" : "") << " -> "
        << (out / "images.json").string() << '\n';
    if (!peaks.empty())
    {
      const auto &c = peaks[0]["center"];
      log << "image: strongest |I_n|-sum peak at (" << c[0].get<double>() << ", " << c[1].get<double>() << ", "
          << c[2].get<double>() << ")\n";
    }
    return exit_ok;
  });
}

int cmd_invert(const CommandOptions &opt, std::ostream &log, std::ostream &err)
{
  return guarded("invert", err, [&]() -> int {
    const Scenario sc = load_scenario(opt.scenario);
    const fs::path out = output_dir(opt, sc);
    const fs::path images_path = opt.images ? *opt.images : out / "images.json";

    ImageStack stack = read_image_stack(images_path);
    const VoxelGrid grid = sc.voxel_grid();
    if (!(stack.grid == grid))
      throw IoError("dimension mismatch: image grid differs from the scenario grid");
    if (!same_frequencies(stack.freqs, sc.freqs()))
      throw IoError("dimension mismatch: image frequencies differ from the scenario");

    FidelityProblem problem(grid, stack.freqs, sc.medium(), fidelity_targets(stack), sc.inversion.kernel);
    const RealField x0 = initial_guess(problem, sc.inversion.initial_guess);
    const FistaConfig &cfg = sc.inversion.fista;
    const double lam_max = lambda_max(problem);

    json summary;
    summary["schema"] = "emloc.inversion_summary/1";
    summary["lambda"] = cfg.lambda;
    summary["lambda_max"] = lam_max;

    FistaResult result{RealField(grid), {}, false};
    try
    {
      result = fista_backtracking(problem, cfg, x0);
    }
    catch (const DivergenceError &e)
    {
      write_trace_csv(out / "trace.csv", e.trace());
      summary["diverged"] = true;
      summary["message"] = e.what();
      summary["iterations"] = e.trace().records.size();
      write_json(out / "summary.json", summary);
      err << "invert: " << e.what() << " (trace written)\n";
      return static_cast<int>(exit_failed);
    }

    const RealField &x = result.solution;
    write_field(out, "j_lambda", x, opt.format, {{"lambda", cfg.lambda}});
    write_trace_csv(out / "trace.csv", result.trace);
    write_pgm_slice(out / "j_lambda.pgm", grid, magnitude(x), sc.imaging.slice_axis, sc.imaging.slice_index);

    const double m = problem.fidelity(x);
    const double r = regularizer(x, cfg.lambda, cfg.sparsity);
    const double g0 = l2_norm(problem.gradient(x0));
    const double g = l2_norm(problem.gradient(x));
    const RealField truth = sc.source_on(grid);
    const double tn = l2_norm(truth);

    summary["diverged"] = false;
    summary["iterations"] = result.trace.records.size();
    summary["converged"] = result.converged;
    summary["L"] = m + r;
    summary["M"] = m;
    summary["R"] = r;
    summary["l0_components"] = count_nonzero_components(x);
    summary["l0_voxels"] = count_nonzero_voxels(x);
    summary["gradient_norm"] = g;
    summary["gradient_norm_relative"] = g0 > 0.0 ? g / g0 : 0.0;
    summary["gamma_final"] = result.trace.records.empty() ? cfg.gamma0 : result.trace.records.back().gamma;
    summary["relative_error_vs_source"] = tn > 0.0 ? json(l2_norm(x - truth) / tn) : json();
    write_json(out / "summary.json", summary);

    log << "invert: lambda = " << printf_string("%.6g", cfg.lambda) << " (lambda_max = "
        << printf_string("%.6g", lam_max) << "), " << result.trace.records.size() << " iterations"
        << (result.converged ? ", converged" : ", iteration limit reached") << '\n';
    log << "invert: L = " << printf_string("%.10e", m + r) << ", M = " << printf_string("%.10e", m)
        << ", R = " << printf_string("%.10e", r) << ", l0 = " << count_nonzero_components(x) << '\n';
    return exit_ok;
  });
}

int cmd_validate(const CommandOptions &opt, std::ostream &log, std::ostream &err)
{
  return guarded("validate", err, [&]() -> int {
    const Scenario sc = load_scenario(opt.scenario);
    const fs::path out = output_dir(opt, sc);
    ValidationOptions vopt;
    vopt.include_rates = !opt.skip_rates;
    vopt.threads = resolve_threads(opt.threads);
    const ValidationReport rep = run_validation(sc, vopt);
    json j = rep.to_json();
    j["scenario"] = scenario_to_json(sc);
    write_json(out / "report.json", j);
    const std::string text = rep.to_text();
    write_text(out / "report.txt", text);
    log << text;
    return rep.all_pass() ? static_cast<int>(exit_ok) : static_cast<int>(exit_failed);
  });
}

} // namespace emloc
