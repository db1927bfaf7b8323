// Command-line driver for the inverse boundary value laboratory: forward
// solves, DtN assembly, special-solution construction, Fourier-mode recovery,
// the stability sweep, and the spherical-geometry and conductivity reductions.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "calderon/experiment.hpp"

namespace {

using namespace calderon;

ExperimentConfig resolve_config(const std::string& config_path,
                                const std::string& out_dir, int resolution,
                                std::uint64_t seed, const std::string& mode) {
  ExperimentConfig cfg;
  if (!config_path.empty()) cfg = load_config(config_path);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (resolution > 0) cfg.resolution = resolution;
  if (seed != 0) cfg.seed = seed;
  if (!mode.empty()) cfg.mode = mode;
  cfg.validate();
  return cfg;
}

int cmd_forward(const ExperimentConfig& cfg) {
  const PotentialFamily fam = make_family(cfg, cfg.amplitudes.front());
  const BoundaryTrace f = BoundaryTrace::sample(
      fam.box, [](const Vec3& x) { return Complex(x[0], 0.0); });
  const DirichletSolver solver = DirichletSolver::schrodinger(fam.q1);
  const EigenvalueEstimate est = solver.eigenvalue_estimate();
  const GridField u = solver.solve(f);
  std::cout << "forward: lambda_min=" << est.lambda_min
            << " near_singular=" << (est.near_singular ? "yes" : "no")
            << " interior_residual=" << solver.interior_residual(u, f) << "\n";
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    save_grid_field(u, cfg.out_dir + "/u.cgf");
    std::cout << "wrote " << cfg.out_dir << "/u.cgf\n";
  }
  return 0;
}

int cmd_dtn(const ExperimentConfig& cfg) {
  const PotentialFamily fam = make_family(cfg, cfg.amplitudes.front());
  const TraceBasis basis(fam.box, cfg.modes_per_axis);
  const PartialDtN dtn1 = assemble_dtn(fam.q1, basis);
  const PartialDtN dtn2 = assemble_dtn(fam.q2, basis);
  const double delta = operator_norm(dtn1.matrix - dtn2.matrix, basis);
  std::cout << "dtn: basis_size=" << basis.size()
            << " symmetry_defect=" << dtn1.symmetry_defect()
            << " delta=" << delta << "\n";
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    save_dtn(dtn1, cfg.out_dir + "/dtn_q1.dtn");
    save_dtn(dtn2, cfg.out_dir + "/dtn_q2.dtn");
    std::cout << "wrote " << cfg.out_dir << "/dtn_q1.dtn and dtn_q2.dtn\n";
  }
  return 0;
}

int cmd_cgo(const ExperimentConfig& cfg, const std::vector<double>& xi_in,
            double tau) {
  const PotentialFamily fam = make_family(cfg, cfg.amplitudes.front());
  const Vec3 xi = xi_in.size() == 3 ? Vec3(xi_in[0], xi_in[1], xi_in[2])
                                    : Vec3(2.0, 0.0, 1.0);
  const GridField q1e = even_reflect(fam.q1);
  const GridField q2e = even_reflect(fam.q2);
  const CGOPair pair = assemble_pair(q1e, q2e, xi, tau);
  std::cout << "cgo: xi=(" << xi.transpose() << ") tau=" << tau << "\n"
            << "  rho1.rho1=" << bilinear_dot(pair.rho.rho1, pair.rho.rho1)
            << " sum_error=" << (pair.rho.rho1 + pair.rho.rho2 -
                                 pair.rho.xi.cast<Complex>())
                                    .norm()
            << "\n"
            << "  remainder_l2=(" << pair.report1.support_l2 << ", "
            << pair.report2.support_l2 << ")"
            << " iterations=(" << pair.report1.iterations << ", "
            << pair.report2.iterations << ")\n"
            << "  plane_vanishing=(" << pair.plane_vanishing1 << ", "
            << pair.plane_vanishing2 << ")"
            << " interior_residuals=(" << pair.interior_residual1 << ", "
            << pair.interior_residual2 << ")\n";
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    save_grid_field(pair.v1, cfg.out_dir + "/v1.cgf");
    save_grid_field(pair.v2, cfg.out_dir + "/v2.cgf");
    std::cout << "wrote " << cfg.out_dir << "/v1.cgf and v2.cgf\n";
  }
  return 0;
}

int cmd_recover(const ExperimentConfig& cfg) {
  const RecoveryDemoResult demo = run_recovery_demo(cfg);
  std::cout << "recover: R  modes  skipped  rel_error  baseline  blind_coverage\n";
  for (const auto& row : demo.rows) {
    std::cout << "  " << row.freq_radius << "  " << row.modes << "  "
              << row.skipped << "  " << row.rel_error << "  " << row.baseline
              << "  " << row.blind_coverage << "\n";
  }
  write_recovery_outputs(cfg, demo);
  if (!cfg.out_dir.empty())
    std::cout << "wrote " << cfg.out_dir << "/modes.csv and recovery_table.csv\n";
  return 0;
}

int cmd_stability(const ExperimentConfig& cfg) {
  const SweepResult sweep = run_stability_sweep(cfg);
  std::cout << "stability: t  delta  err_inf  err_h1neg\n";
  for (const auto& r : sweep.records) {
    std::cout << "  " << r.amplitude << "  " << r.delta << "  " << r.err_inf
              << "  " << r.err_h1neg << (r.ok ? "" : "  [failed: " + r.error + "]")
              << "\n";
  }
  std::cout << "fit: err_inf ~ " << sweep.fit.c << " |log delta|^-"
            << sweep.fit.sigma << " (residual " << sweep.fit.residual << ")\n"
            << "verdict: " << (sweep.verdict ? "log-law dominates" : "FAILED")
            << "\n";
  write_sweep_outputs(cfg, sweep);
  if (!cfg.out_dir.empty())
    std::cout << "wrote " << cfg.out_dir << "/records.csv\n";
  return sweep.verdict ? 0 : 1;
}

int cmd_kelvin_demo(const ExperimentConfig& cfg) {
  // Plane-side working box under the shifted frame; the inversion carries its
  // top face onto the sphere of radius ball_radius through the origin.
  ExperimentConfig plane = cfg;
  plane.lower = Vec3(-0.5, -0.5, -1.0);
  plane.upper = Vec3(0.5, 0.5, 0.0);
  plane.bump_center = Vec3(0.0, 0.0, -0.5);
  plane.perturb_center = Vec3(-0.05, 0.05, -0.45);
  const PotentialFamily fam = make_family(plane, plane.amplitudes.front());
  const TraceBasis basis(fam.box, plane.modes_per_axis);
  const KelvinMap map{plane.ball_radius};
  const PartialDtN dtn1 = assemble_dtn(fam.q1, basis);
  const PartialDtN dtn2 = assemble_dtn(fam.q2, basis);
  const DtnComparisonReport report =
      compare_dtn_norms(map, dtn1, dtn2, fam.q1, fam.q2, basis, 5, plane.seed);
  std::cout << "kelvin-demo: plane_norm=" << report.plane_operator_norm
            << " sphere_norm=" << report.sphere_operator_norm
            << " ratio=" << report.ratio << "\n  pairing_rel_error:";
  for (double e : report.pairing_rel_error) std::cout << " " << e;
  std::cout << "\n  quotient_ratio:";
  for (double r : report.quotient_ratio) std::cout << " " << r;
  std::cout << "\n";
  return 0;
}

int cmd_conductivity(const ExperimentConfig& cfg) {
  const BoxDomain box = build_box(cfg.lower, cfg.upper, cfg.resolution);
  const TraceBasis basis(box, cfg.modes_per_axis);
  std::cout << "conductivity: t  norm_q_diff  norm_gamma_diff  ratio  "
               "gamma_sup  q_sup\n";
  for (double t : cfg.amplitudes) {
    const Bump bump{cfg.perturb_center, cfg.perturb_radius, t};
    const GridField gamma1 = sample_real(box, [](const Vec3&) { return 1.0; });
    const GridField gamma2 =
        sample_real(box, [&](const Vec3& x) { return 1.0 + bump(x); });
    const ConductivityPair pair = make_conductivity_pair(gamma1, gamma2);
    const NormTransferReport report = norm_transfer_check(pair, basis);
    std::cout << "  " << t << "  " << report.norm_q_diff << "  "
              << report.norm_gamma_diff << "  " << report.ratio << "  "
              << report.gamma_sup_diff << "  " << report.q_sup_diff << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for inverse boundary value problems with "
               "partial Dirichlet-to-Neumann data"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::string config_path, out_dir, mode;
  int resolution = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "Configuration file (key = value lines)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--resolution", resolution, "Lattice intervals per axis");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--mode", mode, "validation or blind");

  auto* forward = app.add_subcommand("forward", "Solve one Dirichlet problem");
  auto* dtn = app.add_subcommand("dtn", "Assemble partial DtN matrices");
  auto* cgo = app.add_subcommand("cgo", "Construct one reflected solution pair");
  std::vector<double> xi;
  double tau = 8.0;
  cgo->add_option("--xi", xi, "Frequency vector (three numbers)")->expected(3);
  cgo->add_option("--tau", tau, "Growth parameter");
  auto* recover = app.add_subcommand("recover", "Truncated Fourier recovery demo");
  auto* stability = app.add_subcommand("stability", "Amplitude-ladder stability sweep");
  auto* kelvin = app.add_subcommand("kelvin-demo", "Spherical-geometry reduction demo");
  auto* conductivity =
      app.add_subcommand("conductivity", "Conductivity-to-potential reduction checks");

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg =
        resolve_config(config_path, out_dir, resolution, seed, mode);
    if (forward->parsed()) return cmd_forward(cfg);
    if (dtn->parsed()) return cmd_dtn(cfg);
    if (cgo->parsed()) return cmd_cgo(cfg, xi, tau);
    if (recover->parsed()) return cmd_recover(cfg);
    if (stability->parsed()) return cmd_stability(cfg);
    if (kelvin->parsed()) return cmd_kelvin_demo(cfg);
    if (conductivity->parsed()) return cmd_conductivity(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
