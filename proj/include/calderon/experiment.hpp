#pragma once

#include <string>

#include "calderon/conductivity.hpp"
#include "calderon/kelvin.hpp"
#include "calderon/potentials.hpp"
#include "calderon/recovery.hpp"

namespace calderon {

/// Flat configuration for the experiment drivers. Parsed from "key = value"
/// text; every field has a workable default.
struct ExperimentConfig {
  std::string geometry = "a";  // "a" (flat inaccessible face) or "b" (spherical)
  double ball_radius = 0.5;    // case (b) sphere radius
  int resolution = 32;
  int modes_per_axis = 8;
  Vec3 lower = Vec3(0.0, 0.0, -1.0);
  Vec3 upper = Vec3(1.0, 1.0, 0.0);

  // Potential family: a fixed base bump plus a scaled perturbation bump.
  double base_amplitude = 0.30;
  Vec3 bump_center = Vec3(0.5, 0.5, -0.5);
  double bump_radius = 0.30;
  Vec3 perturb_center = Vec3(0.45, 0.55, -0.45);
  double perturb_radius = 0.25;
  std::vector<double> amplitudes = {0.4, 0.2, 0.1, 0.05, 0.025};

  // Schedule knobs.
  double alpha = 0.9;
  double gamma_exponent = 0.0;  // <= 0 selects the default formula
  double r0 = 2.0;
  std::vector<double> demo_radii = {2.0, 3.0, 4.0};
  int pad_factor = 2;
  double phase_budget = 10.0;

  std::string mode = "validation";  // or "blind"
  std::uint64_t seed = 1;
  std::string out_dir;  // empty = no files written

  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// One rung of the stability ladder.
struct StabilityRecord {
  double amplitude = 0.0;
  double delta = 0.0;      // operator norm of the DtN difference
  double err_inf = 0.0;    // sup norm of q1 - q2
  double err_h1neg = 0.0;  // discrete H^{-1} norm of q1 - q2
  double freq_radius = 0.0, tau = 0.0, eps = 0.0;  // schedule metadata
  double wall_ms = 0.0;
  bool ok = false;
  std::string error;
};

struct LogModelFit {
  double c = 0.0;        // multiplicative constant
  double sigma = 0.0;    // decay exponent in |log delta|^{-sigma}
  double residual = 0.0; // RMS residual of the log-log fit
};

/// Least squares of log(err) against log|log(delta)| over usable records.
LogModelFit fit_log_model(const std::vector<StabilityRecord>& records);

struct SweepResult {
  std::vector<StabilityRecord> records;
  LogModelFit fit;           // on err_inf
  LogModelFit fit_h1neg;     // on err_h1neg
  double envelope_c = 0.0;   // max err_inf |log delta|^sigma over records
  bool verdict = false;      // one (C, sigma > 0) dominates all records
};

SweepResult run_stability_sweep(const ExperimentConfig& config);

/// Serializes the sweep to records.csv under config.out_dir (columns
/// t, delta, err_inf, err_h1neg, R, tau, eps, wall_ms) along with the
/// per-rung potential fields.
void write_sweep_outputs(const ExperimentConfig& config, const SweepResult& result);
std::string records_csv(const std::vector<StabilityRecord>& records);

struct RecoveryDemoRow {
  double freq_radius = 0.0;
  int modes = 0;
  int skipped = 0;
  double rel_error = 0.0;       // validation-mode field error, L2 relative
  double baseline = 0.0;        // truncation baseline of the kept modes
  double blind_coverage = 0.0;  // fraction of blind intervals containing the oracle
  double tau = 0.0, eps = 0.0, tau_cap = 0.0;
};

struct RecoveryDemoResult {
  std::vector<RecoveryDemoRow> rows;
  std::vector<FourierEstimate> mode_table;  // validation-mode estimates
  std::vector<Complex> mode_oracles;
  HolderModulus apriori_modulus;  // backs the blind sideband intervals
};

RecoveryDemoResult run_recovery_demo(const ExperimentConfig& config);
void write_recovery_outputs(const ExperimentConfig& config,
                            const RecoveryDemoResult& result);
std::string modes_csv(const std::vector<FourierEstimate>& modes,
                      const std::vector<Complex>* oracles);

/// Schedule pinned at an explicit frequency radius (demo tables sweep R
/// directly instead of deriving it from delta).
Schedule schedule_for_radius(double freq_radius, double alpha, int n,
                             double gamma_exponent, double r0 = 2.0);

/// The potential pair used by the experiment drivers.
struct PotentialFamily {
  BoxDomain box;
  GridField q1;
  GridField q2;  // q1 + t * perturbation
};

PotentialFamily make_family(const ExperimentConfig& config, double amplitude);

}  // namespace calderon
