// Acceptance suite: one check per numbered criterion, each printed as a
// single [PASS]/[FAIL] line with its measured numbers. Scales follow the
// defaults (32^3 lattices unless a refinement pair requires a coarse run).

#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "calderon/experiment.hpp"
#include "calderon/fitting.hpp"

using namespace calderon;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Outcome> g_results;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  g_results.push_back({id, name, pass, detail});
  std::printf("[%s] criterion %2d: %s  --  %s\n", pass ? "PASS" : "FAIL", id,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
}

void guarded(int id, const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

/// Shared potential-pair fixture: base bump plus perturbation bump, DtN
/// matrices, and their difference, at one resolution.
struct Family {
  BoxDomain box;
  GridField q1, q2, q0;
  TraceBasis basis;
  PartialDtN dtn1, dtn2;
  Eigen::MatrixXcd diff;
  double delta;

  explicit Family(int res, double base_amp = 0.12, double perturb_amp = 0.08)
      : box(build_box(Vec3(0, 0, -1), Vec3(1, 1, 0), res)),
        q1(sample_bump(box, Bump{Vec3(0.5, 0.5, -0.5), 0.3, base_amp})),
        q2(GridField::sample(box,
                             [&](const Vec3& x) {
                               const Bump b1{Vec3(0.5, 0.5, -0.5), 0.3, base_amp};
                               const Bump b2{Vec3(0.45, 0.55, -0.45), 0.25,
                                             perturb_amp};
                               return Complex(b1(x) + b2(x), 0.0);
                             })),
        q0(box),
        basis(box, res / 4),
        dtn1(assemble_dtn(q1, basis)),
        dtn2(assemble_dtn(q2, basis)) {
    diff = dtn1.matrix - dtn2.matrix;
    delta = operator_norm(diff, basis);
    for (std::size_t n = 0; n < q0.values().size(); ++n)
      q0.values()[n] = q1.values()[n] - q2.values()[n];
  }
};

Vec3 random_direction(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vec3 v(unit(rng), unit(rng), unit(rng));
  while (v.norm() < 1e-3) v = Vec3(unit(rng), unit(rng), unit(rng));
  return v.normalized();
}

// ---------------------------------------------------------------------------
// 1. Frequency-pair algebra on 1000 random draws.
void criterion_1() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> tau_dist(0.5, 64.0);
  std::uniform_real_distribution<double> mag(0.5, 6.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const Vec3 xi = mag(rng) * random_direction(rng);
    const double tau = tau_dist(rng);
    const RhoPair pair = make_rho(xi, tau);
    const double scale = pair.rho1.squaredNorm();
    worst = std::max(worst, std::abs(bilinear_dot(pair.rho1, pair.rho1)) / scale);
    worst = std::max(worst, std::abs(bilinear_dot(pair.rho2, pair.rho2)) / scale);
    worst = std::max(worst,
                     (pair.rho1 + pair.rho2 - xi.cast<Complex>()).norm() /
                         std::max(1.0, xi.norm()));
    const Vec3 x(unit(rng), unit(rng), unit(rng));
    const double xi_prime = std::hypot(xi[0], xi[1]);
    const double want_p = xi[0] * x[0] + xi[1] * x[1] + 2 * tau * xi_prime * x[2];
    const double want_m = xi[0] * x[0] + xi[1] * x[1] - 2 * tau * xi_prime * x[2];
    const Complex got_p = phase_dot(pair.rho1 + reflect_vector(pair.rho2), x);
    const Complex got_m = phase_dot(reflect_vector(pair.rho1) + pair.rho2, x);
    const double pscale = std::max(1.0, std::abs(want_p));
    worst = std::max(worst, std::abs(got_p - want_p) / pscale);
    worst = std::max(worst, std::abs(got_m - want_m) / pscale);
  }
  report(1, "frequency-pair algebra (1000 draws)", worst <= 1e-12,
         "worst relative defect " + fmt(worst));
}

// ---------------------------------------------------------------------------
// 2. Reflected solutions vanish on the plane for 20 random configurations.
void criterion_2() {
  const BoxDomain box = build_box(Vec3(0, 0, -1), Vec3(1, 1, 0), 32);
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> tau_dist(8.0, 16.0);
  std::uniform_real_distribution<double> amp(0.1, 0.5);
  std::uniform_real_distribution<double> pos(0.35, 0.65);
  std::uniform_real_distribution<double> rad(0.2, 0.3);
  std::uniform_real_distribution<double> mag(0.8, 3.0);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const Bump b1{Vec3(pos(rng), pos(rng), -pos(rng)), rad(rng), amp(rng)};
    const Bump b2{Vec3(pos(rng), pos(rng), -pos(rng)), rad(rng), amp(rng)};
    const GridField q1 = even_reflect(sample_bump(box, b1));
    const GridField q2 = even_reflect(sample_bump(box, b2));
    const CGOPair pair = assemble_pair(q1, q2, mag(rng) * random_direction(rng),
                                       tau_dist(rng));
    worst = std::max({worst, pair.plane_vanishing1, pair.plane_vanishing2});
  }
  report(2, "reflected solutions vanish on the plane (20 draws)", worst <= 1e-8,
         "worst relative trace " + fmt(worst));
}

// ---------------------------------------------------------------------------
// 3. Remainder decay in tau for three bump potentials.
void criterion_3() {
  const BoxDomain box = build_box(Vec3(0, 0, -1), Vec3(1, 1, 0), 32);
  const Vec3 xi(1.0, 0.0, 0.6);
  double worst_slope = 0.0;
  bool first = true;
  for (double amplitude : {0.3, 0.5, 0.75}) {
    const GridField q_even =
        even_reflect(sample_bump(box, Bump{Vec3(0.5, 0.5, -0.5), 0.3, amplitude}));
    std::vector<double> taus, norms;
    for (double tau : {8.0, 16.0, 32.0, 64.0}) {
      const RhoPair rp = make_rho(xi, tau);
      taus.push_back(tau);
      norms.push_back(solve_remainder(q_even, rp.rho1, tau).report.support_l2);
    }
    const double slope = fit_power_law(taus, norms).exponent;
    worst_slope = first ? slope : std::max(worst_slope, slope);
    first = false;
  }
  report(3, "remainder decay slope over tau in {8,16,32,64}", worst_slope <= -0.8,
         "worst log-log slope " + fmt(worst_slope));
}

// ---------------------------------------------------------------------------
// 4. Boundary-pairing identity: refinement order >= 1.5 and <= 2% at 32^3.
void criterion_4(const Family& f16, const Family& f32) {
  const Vec3 xi(1.5, 0.0, 0.75);
  const double tau = 2.0;
  auto residual = [&](const Family& fam) {
    const CGOPair pair =
        assemble_pair(even_reflect(fam.q1), even_reflect(fam.q2), xi, tau);
    const Eigen::VectorXcd fc = fam.basis.project(pair.v1);
    const Eigen::VectorXcd gc = fam.basis.project(pair.v2);
    const Complex lhs = gc.dot(fam.diff * fc);
    Complex rhs(0, 0);
    const double h3 = std::pow(fam.box.spacing(), 3);
    for (int i = 0; i < fam.box.nodes(0); ++i)
      for (int j = 0; j < fam.box.nodes(1); ++j)
        for (int k = 0; k < fam.box.nodes(2); ++k)
          rhs += fam.box.quad_weight(i, j, k) * h3 * fam.q0.at(i, j, k) *
                 pair.v1.at(i, j, k) * std::conj(pair.v2.at(i, j, k));
    return std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
  };
  const double r16 = residual(f16);
  const double r32 = residual(f32);
  const double order = std::log2(r16 / r32);
  report(4, "pairing identity refinement (16 -> 32)", order >= 1.5 && r32 <= 0.02,
         "relative residuals " + fmt(r16) + " -> " + fmt(r32) + ", order " +
             fmt(order));
}

// ---------------------------------------------------------------------------
// 5. Mollified transform bound sweeps plus the Gaussian identity.
void criterion_5() {
  bool sweeps_ok = true;
  std::string note;

  // Indicator of the unit cube (envelope exponent 0.9).
  {
    const BoxDomain box =
        BoxDomain::make(Vec3(-0.5, -0.5, -0.5), Vec3(1.5, 1.5, 1.5), 64);
    const GridField f = sample_real(box, [](const Vec3& x) {
      return (x[0] >= 0 && x[0] <= 1 && x[1] >= 0 && x[1] <= 1 && x[2] >= 0 &&
              x[2] <= 1)
                 ? 1.0
                 : 0.0;
    });
    std::vector<Vec3> offsets;
    for (int m = 1; m <= 12; ++m)
      offsets.push_back(Vec3(m * box.spacing(), 0.5 * m * box.spacing(), 0));
    const HolderModulus mod = translation_modulus_with_alpha(f, offsets, 0.9);
    for (int s = 0; s < 50; ++s) {
      const double magnitude = 1.0 + 99.0 * s / 49.0;
      const Vec3 xi = magnitude * Vec3(0.6, 0.64, 0.48);
      const MollifyBound b = mollify_bound(f, mod, 0.2, xi);
      if (b.lhs > b.rhs) sweeps_ok = false;
    }
  }

  // Two Holder-class functions with pinned envelope exponents.
  for (double alpha : {0.5, 0.3}) {
    const BoxDomain box = BoxDomain::make(Vec3(-1, -1, -1), Vec3(1, 1, 1), 64);
    const GridField f = sample_real(box, [&](const Vec3& x) {
      const double r2 = x.squaredNorm();
      const double cutoff = r2 < 0.64 ? std::exp(1.0 - 1.0 / (1.0 - r2 / 0.64)) : 0.0;
      return std::pow(std::abs(x[0]), alpha) * cutoff;
    });
    std::vector<Vec3> offsets;
    for (int m = 1; m <= 10; ++m) offsets.push_back(Vec3(m * box.spacing(), 0, 0));
    const HolderModulus mod = translation_modulus_with_alpha(f, offsets, alpha);
    for (int s = 0; s < 50; ++s) {
      const double magnitude = 1.0 + 99.0 * s / 49.0;
      const Vec3 xi = magnitude * Vec3(0.48, 0.6, 0.64);
      const MollifyBound b = mollify_bound(f, mod, 0.15, xi);
      if (b.lhs > b.rhs) sweeps_ok = false;
    }
  }

  // Gaussian transform identity to 1e-10.
  double gauss_err = 0.0;
  {
    const BoxDomain box = BoxDomain::make(Vec3(-1, -1, -1), Vec3(1, 1, 1), 32);
    const double eps = 0.25;
    const GridField g_eps = sample_real(box, [&](const Vec3& x) {
      return std::pow(eps, -3.0) * std::exp(-kPi * x.squaredNorm() / (eps * eps));
    });
    for (const Vec3& xi : {Vec3(1, 0, 0), Vec3(3, -2, 1), Vec3(0, 5, 7)}) {
      const Complex got = discrete_fourier(g_eps, xi);
      const double expect = std::exp(-eps * eps * xi.squaredNorm() / (4.0 * kPi));
      gauss_err = std::max(gauss_err, std::abs(got - expect));
    }
  }
  report(5, "mollified bound sweeps + Gaussian identity",
         sweeps_ok && gauss_err <= 1e-10,
         std::string("sweeps ") + (sweeps_ok ? "dominated" : "VIOLATED") +
             ", Gaussian defect " + fmt(gauss_err));
}

// ---------------------------------------------------------------------------
// 6. Translation-modulus exponents. The stated |x1-c|^{1/2} function has an
// L1 modulus of Lipschitz order (its derivative is integrable), so the
// attainable check is one-sided there; exponent recovery within 0.1 is
// demonstrated on the integrable |x1-c|^{-1/2} singularity, whose L1 modulus
// is genuinely of order 1/2.
void criterion_6() {
  const BoxDomain box = BoxDomain::make(Vec3(-2, -2, -2), Vec3(2, 2, 2), 64);
  const double h = box.spacing();
  auto cutoff = [](const Vec3& x) {
    const double r2 = x.squaredNorm();
    return r2 < 2.25 ? std::exp(1.0 - 1.0 / (1.0 - r2 / 2.25)) : 0.0;
  };

  const GridField f_kink = sample_real(
      box, [&](const Vec3& x) { return std::sqrt(std::abs(x[0])) * cutoff(x); });
  std::vector<Vec3> offsets;
  for (int m = 1; m <= 6; ++m) offsets.push_back(Vec3(m * h, 0, 0));
  const HolderModulus kink = translation_modulus(f_kink, offsets);

  const GridField f_singular = sample_real(box, [&](const Vec3& x) {
    return cutoff(x) / std::sqrt(std::abs(x[0] - 0.5 * h));
  });
  std::vector<Vec3> window;
  for (int m : {4, 6, 8, 11, 16}) window.push_back(Vec3(m * h, 0, 0));
  const HolderModulus singular = translation_modulus(f_singular, window);

  const bool pass = kink.alpha >= 0.4 && std::abs(singular.alpha - 0.5) < 0.1;
  report(6, "translation-modulus exponents", pass,
         "sqrt-kink fit " + fmt(kink.alpha) + " (>= 0.4), singular fit " +
             fmt(singular.alpha) + " (1/2 within 0.1)");
}

// ---------------------------------------------------------------------------
// 7. Full inequality chain with one fitted constant, stable across grids.
void criterion_7(const Family& f16, const Family& f32) {
  const double alpha = 0.9;
  const double c0 = 1.0 / (4.0 * kPi);
  auto fitted_constant = [&](const Family& fam) {
    double c = 0.0;
    for (const Vec3& dir :
         {Vec3(1, 0, 0.5).normalized(), Vec3(0.6, 0.8, 0.7).normalized()}) {
      for (double magnitude : {2.0, 4.0, 6.0}) {
        const Vec3 xi = magnitude * dir;
        const double xi_prime = std::hypot(xi[0], xi[1]);
        const double lhs = std::abs(fourier_even_extension(fam.q0, xi));
        for (double tau : {4.0, 8.0, 16.0}) {
          const double eps = eps_of_tau(tau);
          const double bracket =
              std::exp(xi.norm() * tau) * fam.delta +
              std::exp(-c0 * eps * eps * (1 + 4 * tau * tau) * xi_prime * xi_prime) +
              std::pow(eps, alpha) + 1.0 / tau;
          c = std::max(c, lhs / bracket);
        }
      }
    }
    return c;
  };
  const double c16 = fitted_constant(f16);
  const double c32 = fitted_constant(f32);
  const double spread = std::abs(c16 - c32) / std::max(c16, c32);
  report(7, "inequality chain constant stable across grids", spread <= 0.2,
         "fitted C " + fmt(c16) + " vs " + fmt(c32) + ", spread " + fmt(spread));
}

// ---------------------------------------------------------------------------
// 8. Recovery oracle under co-halving of h and 1/tau. The faithful estimator
// subtracts the remainder integral exactly, so no 1/tau error remains; what
// is left is solver dispersion of scale (|xi| tau h)^2, which is invariant
// under the co-halving. The literal halving check is reported as stated,
// alongside the h-only refinement (which converges at second order) and the
// shared envelope constant.
void criterion_8(const Family& f16, const Family& f32) {
  const Vec3 xi(2.0, 0.0, 1.0);
  auto mode_error = [&](const Family& fam, double tau) {
    EstimatorContext ctx;
    ctx.q1 = &fam.q1;
    ctx.q2 = &fam.q2;
    ctx.basis = &fam.basis;
    ctx.dtn_diff = &fam.diff;
    const CGOPair pair =
        assemble_pair(even_reflect(fam.q1), even_reflect(fam.q2), xi, tau);
    const FourierEstimate est = estimate_fourier_mode(ctx, pair, eps_of_tau(tau));
    return std::abs(est.estimate - fourier_even_extension(fam.q0, xi));
  };
  const double coarse = mode_error(f16, 2.0);       // (h, tau)
  const double fine_h = mode_error(f32, 2.0);       // (h/2, tau)
  const double cohalved = mode_error(f32, 4.0);     // (h/2, 2 tau)
  const double h_order = std::log2(coarse / fine_h);
  const bool literal = cohalved <= 0.5 * coarse;
  report(8, "recovery oracle error halves under (h, 1/tau) co-halving", literal,
         "errors: coarse " + fmt(coarse) + ", h-only " + fmt(fine_h) +
             " (order " + fmt(h_order) + "), co-halved " + fmt(cohalved) +
             "; dispersion scale (|xi| tau h)^2 is co-halving invariant");
}

// ---------------------------------------------------------------------------
// 9. Inversion-geometry suite.
void criterion_9() {
  const KelvinMap map{0.5};
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> unit(-2.0, 2.0);

  double roundtrip = 0.0;
  for (int s = 0; s < 1000; ++s) {
    Vec3 p(unit(rng), unit(rng), unit(rng));
    if (p.norm() < 0.1) p += Vec3(0.5, 0.5, 0.5);
    roundtrip = std::max(roundtrip, (map.apply(map.apply(p)) - p).norm() / p.norm());
  }

  double sphere_to_plane = 0.0;
  for (int s = 0; s < 500; ++s) {
    const Vec3 x = map.ball_center() + map.ball_radius * random_direction(rng);
    if (x.norm() < 1e-6) continue;
    sphere_to_plane =
        std::max(sphere_to_plane, std::abs(map.apply(x)[2] - 2 * map.ball_radius));
  }

  auto harmonic_residual = [&](int res) {
    const BoxDomain target =
        BoxDomain::make(Vec3(-0.3, -0.3, 1.0), Vec3(0.3, 0.3, 1.6), res);
    const BoxDomain source =
        BoxDomain::make(Vec3(-0.5, -0.5, 0.3), Vec3(0.5, 0.5, 1.3), res);
    const GridField one = sample_real(source, [](const Vec3&) { return 1.0; });
    const GridField ut = transform_field(map, one, target);
    const double h2 = target.spacing() * target.spacing();
    double num = 0.0, den = 0.0;
    for (int i = 1; i + 1 < target.nodes(0); ++i)
      for (int j = 1; j + 1 < target.nodes(1); ++j)
        for (int k = 1; k + 1 < target.nodes(2); ++k) {
          const Complex lap =
              (ut.at(i + 1, j, k) + ut.at(i - 1, j, k) + ut.at(i, j + 1, k) +
               ut.at(i, j - 1, k) + ut.at(i, j, k + 1) + ut.at(i, j, k - 1) -
               6.0 * ut.at(i, j, k)) /
              h2;
          num += std::norm(lap);
          den += std::norm(ut.at(i, j, k));
        }
    return std::sqrt(num / den);
  };
  const double h_order = std::log2(harmonic_residual(16) / harmonic_residual(32));

  // Case (b) pipeline: transform the spherical-side pair, then reuse the flat
  // pipeline; the direct flat run on the transformed pair must agree bit for
  // bit because it is the same code path.
  const PlaneFrame frame{map.ball_radius};
  const BoxDomain plane_box = build_box(Vec3(-0.5, -0.5, -1), Vec3(0.5, 0.5, 0), 32);
  const BoxDomain sphere_box =
      BoxDomain::make(Vec3(-0.45, -0.45, 0.4), Vec3(0.45, 0.45, 1.3), 32);
  auto to_physical = [&](const Vec3& z) { return frame.to_physical(z); };
  auto identity = [](const Vec3& p) { return p; };
  const GridField qs1 =
      sample_bump(sphere_box, Bump{Vec3(0.0, 0.0, 0.7), 0.2, 0.25});
  const GridField qs2 = GridField::sample(sphere_box, [&](const Vec3& x) {
    const Bump b1{Vec3(0.0, 0.0, 0.7), 0.2, 0.25};
    const Bump b2{Vec3(0.05, -0.05, 0.72), 0.18, 0.15};
    return Complex(b1(x) + b2(x), 0.0);
  });
  auto flat_recovery = [&](const GridField& p1, const GridField& p2) {
    const TraceBasis basis(plane_box, 8);
    const PartialDtN d1 = assemble_dtn(p1, basis);
    const PartialDtN d2 = assemble_dtn(p2, basis);
    const Eigen::MatrixXcd diff = d1.matrix - d2.matrix;
    EstimatorContext ctx;
    ctx.q1 = &p1;
    ctx.q2 = &p2;
    ctx.basis = &basis;
    ctx.dtn_diff = &diff;
    return recover_q0(ctx, schedule_for_radius(2.0, 0.9, 3, 0.0), {});
  };
  auto case_b_recovery = [&]() {
    const GridField t1 = kelvin_transform(map, qs1, plane_box, 4.0, to_physical, identity);
    const GridField t2 = kelvin_transform(map, qs2, plane_box, 4.0, to_physical, identity);
    return flat_recovery(t1, t2);
  };
  const RecoveryResult via_case_b = case_b_recovery();
  const GridField t1 = kelvin_transform(map, qs1, plane_box, 4.0, to_physical, identity);
  const GridField t2 = kelvin_transform(map, qs2, plane_box, 4.0, to_physical, identity);
  const RecoveryResult direct = flat_recovery(t1, t2);
  const bool bit_identical = via_case_b.q0_hat.values() == direct.q0_hat.values();

  const bool pass = roundtrip <= 1e-12 &&
                    sphere_to_plane <= 1e-10 * map.ball_radius && h_order >= 1.5 &&
                    bit_identical;
  report(9, "inversion suite (round trip, sphere->plane, harmonicity, pipeline)",
         pass,
         "roundtrip " + fmt(roundtrip) + ", plane defect " + fmt(sphere_to_plane) +
             ", harmonic order " + fmt(h_order) +
             (bit_identical ? ", pipeline bit-identical" : ", pipeline DIVERGED"));
}

// ---------------------------------------------------------------------------
// 10. Conductivity reduction suite.
void criterion_10() {
  auto q_error = [&](int res) {
    const BoxDomain box = build_box(Vec3(0, 0, -1), Vec3(1, 1, 0), res);
    const GridField gamma =
        sample_real(box, [](const Vec3& x) { return std::exp(x[0]); });
    const GridField q = gamma_to_q(gamma);
    double err = 0.0;
    for (const auto& v : q.values()) err = std::max(err, std::abs(v - 0.25));
    return err;
  };
  const double e16 = q_error(16);
  const double e32 = q_error(32);
  const double q_order = std::log2(e16 / e32);

  auto pipeline_gap = [&](int res) {
    const BoxDomain box = build_box(Vec3(0, 0, -1), Vec3(1, 1, 0), res);
    const TraceBasis basis(box, res / 4);
    const GridField gamma = sample_real(box, [](const Vec3& x) {
      const Bump bump{Vec3(0.5, 0.5, -0.5), 0.3, 0.5};
      return 1.0 + bump(x);
    });
    const PartialDtN via_gamma =
        relate_dtn(assemble_dtn_gamma(gamma, basis), gamma, basis);
    const PartialDtN via_q = assemble_dtn(gamma_to_q(gamma), basis);
    return (via_gamma.matrix - via_q.matrix).norm() / via_q.matrix.norm();
  };
  const double g16 = pipeline_gap(16);
  const double g32 = pipeline_gap(32);
  const double gap_order = std::log2(g16 / g32);

  const BoxDomain box = build_box(Vec3(0, 0, -1), Vec3(1, 1, 0), 32);
  const TraceBasis basis(box, 8);
  std::vector<double> ratios;
  for (double t : {1e-1, 5e-2, 2.5e-2, 1.25e-2}) {
    const GridField g1 = sample_real(box, [](const Vec3&) { return 1.0; });
    const GridField g2 = sample_real(box, [&](const Vec3& x) {
      const Bump b{Vec3(0.5, 0.5, -0.5), 0.3, t};
      return 1.0 + b(x);
    });
    const NormTransferReport rep =
        norm_transfer_check(make_conductivity_pair(g1, g2), basis);
    ratios.push_back(rep.ratio);
  }
  const double rmax = *std::max_element(ratios.begin(), ratios.end());
  const double rmin = *std::min_element(ratios.begin(), ratios.end());

  const bool pass = e32 < 0.25 * 0.02 && q_order >= 1.7 && gap_order >= 1.5 &&
                    rmax / rmin <= 3.0;
  report(10, "conductivity suite (q value, two pipelines, ratio family)", pass,
         "q defect " + fmt(e32) + " order " + fmt(q_order) + ", pipeline order " +
             fmt(gap_order) + ", ratio spread " + fmt(rmax / rmin));
}

// ---------------------------------------------------------------------------
// 11. Stability sweep: monotone deltas, positive exponent, reproducibility.
std::string mask_wall_ms(const std::string& csv) {
  std::stringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto pos = line.rfind(',');
    out += (pos == std::string::npos ? line : line.substr(0, pos)) + "\n";
  }
  return out;
}

void criterion_11() {
  ExperimentConfig cfg;  // 32^3, five-rung ladder, eight modes per axis
  const SweepResult sweep = run_stability_sweep(cfg);
  bool monotone = true;
  for (std::size_t i = 0; i < sweep.records.size(); ++i) {
    if (!sweep.records[i].ok || sweep.records[i].delta <= 0) monotone = false;
    if (i > 0 && !(sweep.records[i].delta < sweep.records[i - 1].delta))
      monotone = false;
  }
  const SweepResult again = run_stability_sweep(cfg);
  const bool reproducible = mask_wall_ms(records_csv(sweep.records)) ==
                            mask_wall_ms(records_csv(again.records));
  const bool pass =
      monotone && sweep.fit.sigma > 0.0 && sweep.verdict && reproducible;
  report(11, "stability sweep (monotone, fitted sigma > 0, reproducible)", pass,
         "sigma " + fmt(sweep.fit.sigma) + ", envelope C " + fmt(sweep.envelope_c) +
             ", residual " + fmt(sweep.fit.residual) +
             (reproducible ? ", records bit-identical (timing masked)"
                           : ", records NOT reproducible"));
}

}  // namespace

int main() {
  std::printf("acceptance suite: flat inaccessible face, 32^3 unless stated\n");
  guarded(1, "frequency-pair algebra", criterion_1);
  guarded(2, "reflected solutions vanish", criterion_2);
  guarded(3, "remainder decay", criterion_3);

  // Shared fixtures for criteria 4, 7, 8.
  try {
    const Family f16(16);
    const Family f32(32);
    guarded(4, "pairing identity", [&] { criterion_4(f16, f32); });
    guarded(7, "inequality chain", [&] { criterion_7(f16, f32); });
    guarded(8, "recovery oracle", [&] { criterion_8(f16, f32); });
  } catch (const std::exception& e) {
    report(4, "pairing identity", false, std::string("fixture: ") + e.what());
    report(7, "inequality chain", false, "fixture failed");
    report(8, "recovery oracle", false, "fixture failed");
  }

  guarded(5, "mollified bound", criterion_5);
  guarded(6, "translation-modulus exponents", criterion_6);
  guarded(9, "inversion suite", criterion_9);
  guarded(10, "conductivity suite", criterion_10);
  guarded(11, "stability sweep", criterion_11);

  int failures = 0;
  for (const auto& r : g_results)
    if (!r.pass) ++failures;
  std::printf("acceptance summary: %zu criteria, %d failed\n", g_results.size(),
              failures);
  return failures == 0 ? 0 : 1;
}
