#include "gpe_peaks/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include "gpe_peaks/asymptotics.hpp"
#include "gpe_peaks/diagnostics.hpp"
#include "gpe_peaks/solver.hpp"
#include "json.hpp"

namespace gpe {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RowDiagnostics {
  double pohozaev_defect = kNaN;
  double symmetry_dev = kNaN;
  json pohozaev = nullptr;
  json decay = nullptr;
};

json vec_json(const Point<double>& p) {
  return std::vector<double>(p.data(), p.data() + p.size());
}

RowDiagnostics diagnose(const Problem<double>& base, const SolveReport<double>& rep,
                        const ExperimentConfig& cfg) {
  RowDiagnostics d;
  if (rep.peak_value <= 0) return d;
  const Problem<double> problem = base.with(rep.eps, rep.frame);
  const double width = problem.peak_width();
  const double radius = cfg.pohozaev_radius > 0 ? cfg.pohozaev_radius : 3 * width;
  try {
    const auto ph = pohozaev_residual(problem, rep.state, rep.peak_grid, radius, 0);
    d.pohozaev_defect = ph.defect;
    d.pohozaev = {{"direction", ph.axis + 1},
                  {"volume_term", ph.volume_term},
                  {"boundary_term", ph.boundary_term},
                  {"defect", ph.defect},
                  {"ball_center", vec_json(ph.ball_center)},
                  {"ball_radius", ph.ball_radius}};
  } catch (const Error& e) {
    d.pohozaev = {{"error", e.what()}};
  }
  if (problem.dim() >= 2 && problem.v1().is_radial() && problem.v2().is_radial()) {
    try {
      const Point<double> origin = problem.to_grid(Point<double>::Zero(problem.dim()));
      d.symmetry_dev = symmetry_deviation(rep.state, rep.peak_grid, origin);
    } catch (const Error&) {
    }
  }
  try {
    const auto fit = decay_rate_fit(rep.state, rep.peak_grid, width);
    d.decay = {{"rate_per_width", fit.rate},
               {"rms_residual", fit.rms_residual},
               {"poor_fit", fit.poor_fit},
               {"points", fit.points}};
  } catch (const Error& e) {
    d.decay = {{"error", e.what()}};
  }
  return d;
}

json report_json(const SolveReport<double>& r, const RowDiagnostics& d, bool with_state) {
  json j = {{"eps", r.eps},
            {"c_eps", r.c_eps},
            {"c_eps_over_epsN", r.c_eps_over_epsN},
            {"energy",
             {{"kinetic", r.energy.kinetic},
              {"potential", r.energy.potential},
              {"quartic", r.energy.quartic},
              {"total_J", r.energy.total_J},
              {"nehari_defect", r.energy.nehari_defect}}},
            {"frame", {{"rescaled", r.frame.rescaled}, {"anchor", vec_json(r.frame.anchor)}}},
            {"peak", vec_json(r.peak)},
            {"peak_value", r.peak_value},
            {"peak_unique", r.peak_unique},
            {"pde_residual", r.pde_residual},
            {"pde_residual_l2", r.pde_residual_l2},
            {"grad_norm", r.grad_norm},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"status", r.status},
            {"pohozaev", d.pohozaev},
            {"symmetry_dev", d.symmetry_dev},
            {"decay", d.decay}};
  if (with_state && r.state.u1.size() > 0) {
    j["state"] = {{"n_per_axis", r.state.grid.n_per_axis()},
                  {"half_width", r.state.grid.half_width()},
                  {"u1", std::vector<double>(r.state.u1.data(), r.state.u1.data() + r.state.u1.size())},
                  {"u2", std::vector<double>(r.state.u2.data(), r.state.u2.data() + r.state.u2.size())}};
  }
  return j;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "run-%Y%m%d-%H%M%S", &tm);
  return buf;
}

fs::path prepare_output(const ExperimentConfig& cfg, const RunOptions& opts) {
  fs::path dir = opts.out_dir ? fs::path(*opts.out_dir) : fs::path(cfg.directory);
  if (!opts.overwrite) {
    const fs::path stem = dir / timestamp();
    dir = stem;
    for (int k = 1; fs::exists(dir); ++k) dir = fs::path(stem.string() + "-" + std::to_string(k));
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "cannot create output directory " + dir.string());
  }
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log) {
  const int dim = cfg.dim;
  const auto profile = solve_radial_profile<double>(dim);
  const auto levels = closed_form_levels(cfg.params, profile);
  const auto grid = build_grid<double>(dim, cfg.half_width, cfg.n_per_axis);

  GpeParams<double> params = cfg.params;
  Frame<double> frame = Frame<double>::original(dim);
  if (cfg.rescaled) {
    frame = Frame<double>::blowup(preferred_minimum(cfg.v1.spec, cfg.v2.spec, params, profile));
  }
  const Problem<double> base(params, cfg.v1.spec, cfg.v2.spec, grid, frame);

  SolverOptions<double> sopts = cfg.solver;
  sopts.seed = cfg.seed;
  sopts.rescaled = cfg.rescaled;

  // Validate the destination before spending time on solves.
  const fs::path out_dir = prepare_output(cfg, opts);

  json doc;
  doc["config"] = json::parse(serialize_config(cfg));
  doc["mode"] = to_string(cfg.mode);
  doc["closed_form_levels"] = {{"c_mu", levels.c_mu}, {"cbar1", levels.cbar1}, {"cbar2", levels.cbar2}};

  std::vector<SolveReport<double>> reports;
  double c_mu_ref = levels.c_mu;

  log << "mode " << to_string(cfg.mode) << ", dim " << dim << ", n " << cfg.n_per_axis << "\n";
  switch (cfg.mode) {
    case RunMode::kSingle: {
      const Problem<double> p = base.with(cfg.eps, frame);
      const auto init = default_init(p, profile, InitMode::kExplicitAtMinimum);
      reports.push_back(solve_ground_state(p, init, sopts));
      break;
    }
    case RunMode::kSweep:
    case RunMode::kAsymptotics: {
      reports = continuation_sweep(base, profile, cfg.eps_list, sopts);
      break;
    }
    case RunMode::kMultistart:
    case RunMode::kSymmetry: {
      const Problem<double> p = base.with(cfg.eps, frame);
      auto ms = multistart(p, profile, cfg.n_starts, sopts, cfg.cluster_tol, opts.threads);
      reports = std::move(ms.reports);
      const auto& s = ms.summary;
      doc["clusters"] = {{"n_clusters", s.n_clusters},
                         {"n_clusters_unaligned", s.n_clusters_unaligned},
                         {"max_intra_distance", s.max_intra_distance},
                         {"failed_starts", s.failed_starts},
                         {"labels", s.labels}};
      break;
    }
  }

  if (cfg.mode == RunMode::kAsymptotics && cfg.discrete_reference && cfg.rescaled) {
    // Same grid, constant potential: cancels the discretisation error of c_mu.
    const auto flat = PotentialSpec<double>::constant(params.mu);
    const Problem<double> ref(params, flat, flat, grid, Frame<double>::blowup(Point<double>::Zero(dim)));
    const auto init = default_init(ref, profile, InitMode::kExplicitAtMinimum);
    const auto rep = solve_ground_state(ref, init, sopts);
    c_mu_ref = rep.c_eps_over_epsN;
    doc["reference_solve"] = {{"c_mu_discrete", rep.c_eps_over_epsN},
                              {"converged", rep.converged},
                              {"iterations", rep.iterations}};
  }
  doc["c_mu_ref"] = c_mu_ref;

  if (cfg.mode == RunMode::kSweep || cfg.mode == RunMode::kAsymptotics) {
    try {
      const auto sites = minimum_sites(cfg.v1.spec, cfg.v2.spec, dim);
      const auto fs_ = flattest_set(sites, params, profile);
      doc["flattest_set"] = {{"p0", fs_.p0},
                             {"gamma", fs_.gamma},
                             {"lambda0", fs_.lambda0},
                             {"z0", fs_.z0},
                             {"z0_radii", fs_.z0_radii},
                             {"lambdas", fs_.lambdas}};
      const auto& site = sites[fs_.z0.front()];
      const auto rates = site.ring ? concentration_rate(reports, site.radius)
                                   : concentration_rate(reports, site.location);
      json arr = json::array();
      for (const auto& [eps, ratio] : rates) arr.push_back({{"eps", eps}, {"drift_over_eps", ratio}});
      doc["concentration"] = arr;
    } catch (const Error& e) {
      doc["flattest_set"] = {{"error", e.what()}};
    }
  }
  if (cfg.mode == RunMode::kAsymptotics) {
    std::vector<std::pair<double, double>> samples;
    for (const auto& r : reports) {
      if (r.converged) samples.emplace_back(r.eps, r.c_eps);
    }
    try {
      const auto fit = fit_energy_expansion(samples, c_mu_ref, dim);
      json pts = json::array();
      for (const auto& [e, c] : fit.points_used) pts.push_back({e, c});
      doc["expansion_fit"] = {{"c_mu_ref", fit.c_mu_ref},
                              {"p0_hat", fit.p0_hat},
                              {"lambda0_hat", fit.lambda0_hat},
                              {"r_squared", fit.r_squared},
                              {"points_used", pts}};
    } catch (const Error& e) {
      doc["expansion_fit"] = {{"error", e.what()}};
    }
  }

  std::string csv = "eps,c_eps,c_eps_over_epsN,excess";
  for (int a = 1; a <= dim; ++a) csv += ",peak_x" + std::to_string(a);
  csv += ",pde_residual,pohozaev_defect,symmetry_dev,iterations,converged\n";
  json arr = json::array();
  bool all_converged = true;
  for (const auto& r : reports) {
    all_converged = all_converged && r.converged;
    const RowDiagnostics d = diagnose(base, r, cfg);
    arr.push_back(report_json(r, d, cfg.include_states));
    csv += format_real(r.eps) + "," + format_real(r.c_eps) + "," + format_real(r.c_eps_over_epsN) +
           "," + format_real(r.c_eps_over_epsN - c_mu_ref);
    for (int a = 0; a < dim; ++a) csv += "," + format_real(r.peak.size() == dim ? r.peak[a] : kNaN);
    csv += "," + format_real(r.pde_residual) + "," + format_real(d.pohozaev_defect) + "," +
           format_real(d.symmetry_dev) + "," + std::to_string(r.iterations) + "," +
           (r.converged ? "true" : "false") + "\n";
    log << "eps " << format_real(r.eps) << ": c_eps/eps^N " << format_real(r.c_eps_over_epsN)
        << ", iterations " << r.iterations << ", " << r.status << "\n";
  }
  doc["reports"] = arr;

  const auto wants = [&](const char* f) {
    return std::find(cfg.formats.begin(), cfg.formats.end(), f) != cfg.formats.end();
  };
  if (wants("csv")) write_file(out_dir / "sweep.csv", csv);
  if (wants("json")) write_file(out_dir / "report.json", doc.dump(2) + "\n");

  RunResult result;
  result.exit_code = all_converged ? 0 : 2;
  result.output_dir = out_dir.string();
  return result;
}

std::string write_profile_csv(int dim, const std::string& dir) {
  const auto prof = solve_radial_profile<double>(dim);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path path = fs::path(dir) / ("profile_" + std::to_string(dim) + ".csv");
  std::string out = "r,w\n";
  for (Eigen::Index k = 0; k < prof.w.size(); ++k) {
    out += format_real(prof.radius(k)) + "," + format_real(prof.w(k)) + "\n";
  }
  write_file(path, out);
  return path.string();
}

}  // namespace gpe
