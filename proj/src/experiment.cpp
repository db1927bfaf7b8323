#include "calderon/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace calderon {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

Vec3 parse_vec3(const std::string& s) {
  const auto v = parse_list(s);
  if (v.size() != 3) throw Error("config: expected three comma-separated numbers");
  return Vec3(v[0], v[1], v[2]);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (geometry != "a" && geometry != "b")
    throw Error("config: geometry must be 'a' or 'b'");
  if (mode != "validation" && mode != "blind")
    throw Error("config: mode must be 'validation' or 'blind'");
  if (amplitudes.size() < 3)
    throw Error("config: the amplitude ladder needs at least three entries");
  for (std::size_t i = 1; i < amplitudes.size(); ++i)
    if (!(amplitudes[i] < amplitudes[i - 1]))
      throw Error("config: the amplitude ladder must be strictly decreasing");
  if (resolution < 8) throw Error("config: resolution must be at least 8");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config: expected 'key = value', got: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "geometry") c.geometry = value;
    else if (key == "ball_radius") c.ball_radius = std::stod(value);
    else if (key == "resolution") c.resolution = std::stoi(value);
    else if (key == "modes_per_axis") c.modes_per_axis = std::stoi(value);
    else if (key == "lower") c.lower = parse_vec3(value);
    else if (key == "upper") c.upper = parse_vec3(value);
    else if (key == "base_amplitude") c.base_amplitude = std::stod(value);
    else if (key == "bump_center") c.bump_center = parse_vec3(value);
    else if (key == "bump_radius") c.bump_radius = std::stod(value);
    else if (key == "perturb_center") c.perturb_center = parse_vec3(value);
    else if (key == "perturb_radius") c.perturb_radius = std::stod(value);
    else if (key == "amplitudes") c.amplitudes = parse_list(value);
    else if (key == "alpha") c.alpha = std::stod(value);
    else if (key == "gamma_exponent") c.gamma_exponent = std::stod(value);
    else if (key == "r0") c.r0 = std::stod(value);
    else if (key == "demo_radii") c.demo_radii = parse_list(value);
    else if (key == "pad_factor") c.pad_factor = std::stoi(value);
    else if (key == "phase_budget") c.phase_budget = std::stod(value);
    else if (key == "mode") c.mode = value;
    else if (key == "seed") c.seed = std::stoull(value);
    else if (key == "out") c.out_dir = value;
    else throw Error("config: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("load_config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

PotentialFamily make_family(const ExperimentConfig& config, double amplitude) {
  PotentialFamily fam;
  fam.box = build_box(config.lower, config.upper, config.resolution);
  const Bump base{config.bump_center, config.bump_radius, config.base_amplitude};
  const Bump perturb{config.perturb_center, config.perturb_radius, amplitude};

  if (config.geometry == "b") {
    // Spherical inaccessible patch: the configured bumps live on the sphere
    // side, at the images of the configured centers; the lattice potentials
    // are their exact weighted pullbacks, after which the flat pipeline runs
    // unchanged.
    if (!(config.ball_radius > 0.0))
      throw Error("config: geometry b needs a positive ball_radius");
    const KelvinMap map{config.ball_radius};
    const PlaneFrame frame{config.ball_radius};
    auto to_sphere = [&](const Vec3& z) { return frame.to_sphere_side(map, z); };
    // Radii are configured in plane-side units; the inversion's local scale
    // at the mapped center keeps the pullback support inside the box.
    auto local_scale = [&](const Vec3& z) {
      return map.weight(frame.to_physical(z), 2.0);
    };
    const Bump base_s{to_sphere(config.bump_center),
                      config.bump_radius * local_scale(config.bump_center),
                      config.base_amplitude};
    const Bump perturb_s{to_sphere(config.perturb_center),
                         config.perturb_radius * local_scale(config.perturb_center),
                         amplitude};
    auto pulled_back = [&](const Bump& bump) {
      return sample_real(fam.box, [&, bump](const Vec3& z) {
        const Vec3 y = frame.to_physical(z);
        return map.weight(y, 4.0) * bump(map.apply(y));
      });
    };
    fam.q1 = pulled_back(base_s);
    const GridField dq = pulled_back(perturb_s);
    fam.q2 = fam.q1;
    for (std::size_t n = 0; n < fam.q2.values().size(); ++n)
      fam.q2.values()[n] += dq.values()[n];
    return fam;
  }

  fam.q1 = sample_bump(fam.box, base);
  fam.q2 = GridField::sample(fam.box, [&](const Vec3& x) {
    return Complex(base(x) + perturb(x), 0.0);
  });
  return fam;
}

LogModelFit fit_log_model(const std::vector<StabilityRecord>& records) {
  std::vector<double> xs, ys;
  for (const auto& r : records) {
    if (!r.ok) continue;
    if (!(r.delta > 0.0 && r.delta < 1.0 && r.err_inf > 0.0)) continue;
    xs.push_back(std::log(std::abs(std::log(r.delta))));
    ys.push_back(std::log(r.err_inf));
  }
  if (xs.size() < 3)
    throw Error("fit_log_model: need at least three usable records");
  bool distinct = false;
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (std::abs(xs[i] - xs[0]) > 1e-12) distinct = true;
  if (!distinct) throw Error("fit_log_model: degenerate spread of delta values");
  const LinearFit lin = fit_linear(xs, ys);
  LogModelFit fit;
  fit.c = std::exp(lin.intercept);
  fit.sigma = -lin.slope;
  fit.residual = lin.residual;
  return fit;
}

namespace {

LogModelFit fit_log_model_h1(const std::vector<StabilityRecord>& records) {
  std::vector<double> xs, ys;
  for (const auto& r : records) {
    if (!r.ok) continue;
    if (!(r.delta > 0.0 && r.delta < 1.0 && r.err_h1neg > 0.0)) continue;
    xs.push_back(std::log(std::abs(std::log(r.delta))));
    ys.push_back(std::log(r.err_h1neg));
  }
  LogModelFit fit;
  if (xs.size() < 3) return fit;
  const LinearFit lin = fit_linear(xs, ys);
  fit.c = std::exp(lin.intercept);
  fit.sigma = -lin.slope;
  fit.residual = lin.residual;
  return fit;
}

}  // namespace

SweepResult run_stability_sweep(const ExperimentConfig& config) {
  config.validate();
  SweepResult result;

  const BoxDomain box = build_box(config.lower, config.upper, config.resolution);
  const TraceBasis basis(box, config.modes_per_axis);

  // The base potential is shared by every rung.
  const GridField q1 = make_family(config, config.amplitudes.front()).q1;
  const EigenvalueEstimate base_check = check_eigenvalue(q1);
  if (base_check.near_singular)
    throw NearSingularOperator("run_stability_sweep: base potential is near-singular");
  const PartialDtN dtn1 = assemble_dtn(q1, basis);

  for (double t : config.amplitudes) {
    StabilityRecord rec;
    rec.amplitude = t;
    const auto start = std::chrono::steady_clock::now();
    try {
      const GridField q2 = make_family(config, t).q2;
      const EigenvalueEstimate check = check_eigenvalue(q2);
      if (check.near_singular)
        throw NearSingularOperator("rung potential is near-singular");
      const PartialDtN dtn2 = assemble_dtn(q2, basis);
      rec.delta = operator_norm(dtn1.matrix - dtn2.matrix, basis);

      GridField q0(box);
      for (std::size_t n = 0; n < q0.values().size(); ++n)
        q0.values()[n] = q2.values()[n] - q1.values()[n];
      rec.err_inf = q0.max_abs();
      rec.err_h1neg = h_minus1_norm(q0);

      if (rec.delta > 0.0) {
        const Schedule s = make_schedule(rec.delta, config.alpha, 3,
                                         config.gamma_exponent, config.r0);
        rec.freq_radius = s.freq_radius;
        rec.tau = s.tau;
        rec.eps = s.eps;
      }
      rec.ok = true;
    } catch (const Error& e) {
      rec.ok = false;
      rec.error = e.what();
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    result.records.push_back(std::move(rec));
  }

  result.fit = fit_log_model(result.records);
  result.fit_h1neg = fit_log_model_h1(result.records);

  double envelope = 0.0;
  bool have_usable = false;
  for (const auto& r : result.records) {
    if (!r.ok || !(r.delta > 0.0 && r.delta < 1.0 && r.err_inf > 0.0)) continue;
    have_usable = true;
    envelope = std::max(
        envelope, r.err_inf * std::pow(std::abs(std::log(r.delta)), result.fit.sigma));
  }
  result.envelope_c = envelope;
  result.verdict = have_usable && result.fit.sigma > 0.0 && std::isfinite(envelope);
  return result;
}

std::string records_csv(const std::vector<StabilityRecord>& records) {
  std::string out = "t,delta,err_inf,err_h1neg,R,tau,eps,wall_ms\n";
  for (const auto& r : records) {
    out += format_double(r.amplitude) + "," + format_double(r.delta) + "," +
           format_double(r.err_inf) + "," + format_double(r.err_h1neg) + "," +
           format_double(r.freq_radius) + "," + format_double(r.tau) + "," +
           format_double(r.eps) + "," + format_double(r.wall_ms) + "\n";
  }
  return out;
}

void write_sweep_outputs(const ExperimentConfig& config, const SweepResult& result) {
  if (config.out_dir.empty()) return;
  std::filesystem::create_directories(config.out_dir);
  std::ofstream os(config.out_dir + "/records.csv");
  os << records_csv(result.records);
  os.close();

  save_grid_field(make_family(config, config.amplitudes.front()).q1,
                  config.out_dir + "/q1.cgf");
  int rung = 0;
  for (double t : config.amplitudes)
    save_grid_field(make_family(config, t).q2,
                    config.out_dir + "/q2_rung" + std::to_string(rung++) + ".cgf");
}

Schedule schedule_for_radius(double freq_radius, double alpha, int n,
                             double gamma_exponent, double r0) {
  Schedule s;
  s.alpha = alpha;
  s.alpha_tilde = std::min(alpha, (n - 1) / 2.0);
  s.gamma_exponent = gamma_exponent > 0.0
                         ? gamma_exponent
                         : s.alpha_tilde / (2.0 * (n + 2 + s.alpha_tilde));
  s.r0 = r0;
  s.delta_tilde = std::exp(-std::pow(r0, 1.0 / s.gamma_exponent));
  s.freq_radius = freq_radius;
  s.tau = std::pow(freq_radius, double(n + 2) / s.alpha_tilde);
  s.eps = eps_of_tau(s.tau);
  return s;
}

RecoveryDemoResult run_recovery_demo(const ExperimentConfig& config) {
  config.validate();
  RecoveryDemoResult result;

  // The gentlest ladder rung: the contraction safeguard scales with the
  // potential amplitude and must stay below the per-mode phase budget.
  const PotentialFamily fam = make_family(config, config.amplitudes.back());
  const TraceBasis basis(fam.box, config.modes_per_axis);
  const PartialDtN dtn1 = assemble_dtn(fam.q1, basis);
  const PartialDtN dtn2 = assemble_dtn(fam.q2, basis);
  const Eigen::MatrixXcd diff = dtn1.matrix - dtn2.matrix;

  GridField q0(fam.box);
  for (std::size_t n = 0; n < q0.values().size(); ++n)
    q0.values()[n] = fam.q1.values()[n] - fam.q2.values()[n];
  const double q0_l2 = q0.norm_l2();

  // A priori translation modulus of the even extension, for blind bounds.
  const GridField q0_even = even_reflect(q0);
  std::vector<Vec3> offsets;
  const double h = fam.box.spacing();
  for (int m = 1; m <= 6; ++m) {
    offsets.push_back(Vec3(m * h, 0, 0));
    offsets.push_back(Vec3(0, m * h, 0));
    offsets.push_back(Vec3(0, 0, m * h));
  }
  const HolderModulus modulus =
      translation_modulus_with_alpha(q0_even, offsets, config.alpha);
  result.apriori_modulus = modulus;

  EstimatorContext ctx;
  ctx.q1 = &fam.q1;
  ctx.q2 = &fam.q2;
  ctx.basis = &basis;
  ctx.dtn_diff = &diff;
  ctx.apriori_l1 = q0_even.norm_l1();
  ctx.apriori_modulus = modulus;

  RecoveryOptions opts;
  opts.pad_factor = config.pad_factor;
  opts.overflow_budget = config.phase_budget;

  for (double radius : config.demo_radii) {
    const Schedule schedule = schedule_for_radius(radius, config.alpha, 3,
                                                  config.gamma_exponent, config.r0);
    RecoveryDemoRow row;
    row.freq_radius = radius;
    row.tau = schedule.tau;
    row.eps = schedule.eps;

    ctx.blind = false;
    const RecoveryResult validation = recover_q0(ctx, schedule, opts);
    row.modes = int(validation.modes.size());
    row.skipped = int(validation.skipped_modes.size());
    row.tau_cap = validation.tau_cap;

    double err2 = 0.0;
    for (std::size_t n = 0; n < q0.values().size(); ++n) {
      const auto idx = q0.box().unpack(std::int64_t(n));
      const double w = q0.box().quad_weight(idx[0], idx[1], idx[2]);
      err2 += w * std::norm(validation.q0_hat.values()[n] - q0.values()[n]);
    }
    err2 *= std::pow(q0.box().spacing(), 3);
    row.rel_error = q0_l2 > 0 ? std::sqrt(err2) / q0_l2 : 0.0;

    std::vector<Vec3> kept;
    for (const auto& m : validation.modes) kept.push_back(m.xi);
    row.baseline = truncation_baseline(q0, kept, config.pad_factor);

    ctx.blind = true;
    const RecoveryResult blind = recover_q0(ctx, schedule, opts);
    int covered = 0, counted = 0;
    for (const auto& m : blind.modes) {
      const Complex oracle = fourier_even_extension(q0, m.xi);
      ++counted;
      if (std::abs(m.estimate - oracle) <= m.sideband_bound) ++covered;
    }
    row.blind_coverage = counted > 0 ? double(covered) / counted : 1.0;

    if (radius == config.demo_radii.back()) {
      result.mode_table = validation.modes;
      for (const auto& m : validation.modes)
        result.mode_oracles.push_back(fourier_even_extension(q0, m.xi));
    }
    result.rows.push_back(row);
  }
  return result;
}

std::string modes_csv(const std::vector<FourierEstimate>& modes,
                      const std::vector<Complex>* oracles) {
  std::string out =
      "xi1,xi2,xi3,tau,eps,re_boundary,im_boundary,re_remainder,im_remainder,"
      "re_estimate,im_estimate,re_oracle,im_oracle\n";
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& m = modes[i];
    out += format_double(m.xi[0]) + "," + format_double(m.xi[1]) + "," +
           format_double(m.xi[2]) + "," + format_double(m.tau) + "," +
           format_double(m.eps) + "," + format_double(m.boundary_term.real()) +
           "," + format_double(m.boundary_term.imag()) + "," +
           format_double(m.remainder_term.real()) + "," +
           format_double(m.remainder_term.imag()) + "," +
           format_double(m.estimate.real()) + "," +
           format_double(m.estimate.imag());
    if (oracles && i < oracles->size()) {
      out += "," + format_double((*oracles)[i].real()) + "," +
             format_double((*oracles)[i].imag());
    } else {
      out += ",,";
    }
    out += "\n";
  }
  return out;
}

void write_recovery_outputs(const ExperimentConfig& config,
                            const RecoveryDemoResult& result) {
  if (config.out_dir.empty()) return;
  std::filesystem::create_directories(config.out_dir);
  std::ofstream os(config.out_dir + "/modes.csv");
  os << modes_csv(result.mode_table, &result.mode_oracles);
  os.close();
  std::ofstream mos(config.out_dir + "/modulus.csv");
  mos << modulus_csv(result.apriori_modulus);
  mos.close();
  std::ofstream tab(config.out_dir + "/recovery_table.csv");
  tab << "R,modes,skipped,rel_error,baseline,blind_coverage,tau,eps,tau_cap\n";
  for (const auto& row : result.rows) {
    tab << format_double(row.freq_radius) << "," << row.modes << ","
        << row.skipped << "," << format_double(row.rel_error) << ","
        << format_double(row.baseline) << ","
        << format_double(row.blind_coverage) << "," << format_double(row.tau)
        << "," << format_double(row.eps) << "," << format_double(row.tau_cap)
        << "\n";
  }
  return;
}

}  // namespace calderon
