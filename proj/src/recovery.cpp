#include "calderon/recovery.hpp"

#include <cmath>

#include "calderon/fft3.hpp"

namespace calderon {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kGaussDecay = 1.0 / (4.0 * kPi);  // transform convention factor

Complex weighted_sum(const GridField& f,
                     const std::function<Complex(const Vec3&, const Complex&)>& term) {
  const BoxDomain& box = f.box();
  const double h3 = std::pow(box.spacing(), 3);
  Complex acc(0, 0);
  for (int i = 0; i < box.nodes(0); ++i)
    for (int j = 0; j < box.nodes(1); ++j)
      for (int k = 0; k < box.nodes(2); ++k)
        acc += box.quad_weight(i, j, k) * term(box.node(i, j, k), f.at(i, j, k));
  return acc * h3;
}

}  // namespace

Complex discrete_fourier(const GridField& f, const Vec3& xi) {
  return weighted_sum(f, [&](const Vec3& x, const Complex& v) {
    return v * std::exp(Complex(0, 1) * xi.dot(x));
  });
}

Complex fourier_even_extension(const GridField& q_lower, const Vec3& xi) {
  const Vec3 xis = reflect_vector(xi);
  return weighted_sum(q_lower, [&](const Vec3& x, const Complex& v) {
    return v * (std::exp(Complex(0, 1) * xi.dot(x)) +
                std::exp(Complex(0, 1) * xis.dot(x)));
  });
}

double mollify_rhs(double l1_norm, const HolderModulus& modulus, double eps,
                   double xi_norm) {
  const double eps0 = std::min(modulus.delta, 0.5);
  if (!(eps > 0.0) || eps >= eps0)
    throw DomainError("mollify_rhs: eps must lie in (0, min(delta, 1/2))");
  const double alpha = modulus.alpha;
  // I_G = int |u|^alpha exp(-pi |u|^2) du over R^3.
  const double ig = 2.0 * std::tgamma((3.0 + alpha) / 2.0) /
                    std::pow(kPi, (1.0 + alpha) / 2.0);
  // T(a) = int_{|u| >= a} exp(-pi |u|^2) du = 2 a exp(-pi a^2) + erfc(a sqrt(pi)).
  const double a = modulus.delta / eps;
  const double tail = 2.0 * a * std::exp(-kPi * a * a) + std::erfc(a * std::sqrt(kPi));
  const double gaussian = l1_norm * std::exp(-kGaussDecay * eps * eps * xi_norm * xi_norm);
  const double holder = modulus.c0 * ig * std::pow(eps, alpha);
  return gaussian + holder + 2.0 * l1_norm * tail;
}

MollifyBound mollify_bound(const GridField& f, const HolderModulus& modulus,
                           double eps, const Vec3& xi) {
  MollifyBound out;
  out.eps = eps;
  out.lhs = std::abs(discrete_fourier(f, xi));
  const double l1 = f.norm_l1();
  const double eps0 = std::min(modulus.delta, 0.5);
  if (!(eps > 0.0) || eps >= eps0)
    throw DomainError("mollify_bound: eps must lie in (0, min(delta, 1/2))");
  const double alpha = modulus.alpha;
  const double ig = 2.0 * std::tgamma((3.0 + alpha) / 2.0) /
                    std::pow(kPi, (1.0 + alpha) / 2.0);
  const double a = modulus.delta / eps;
  const double tail = 2.0 * a * std::exp(-kPi * a * a) + std::erfc(a * std::sqrt(kPi));
  out.gaussian_term = l1 * std::exp(-kGaussDecay * eps * eps * xi.squaredNorm());
  out.holder_term = modulus.c0 * ig * std::pow(eps, alpha);
  out.tail_term = 2.0 * l1 * tail;
  out.rhs = out.gaussian_term + out.holder_term + out.tail_term;
  return out;
}

double eps_of_tau(double tau) { return std::pow(1.0 + 4.0 * tau * tau, -0.25); }

Schedule make_schedule(double delta, double alpha, int n, double gamma_exponent,
                       double r0) {
  if (!(delta > 0.0)) throw DomainError("make_schedule: delta must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw DomainError("make_schedule: alpha must lie in (0, 1]");
  Schedule s;
  s.alpha = alpha;
  s.alpha_tilde = std::min(alpha, (n - 1) / 2.0);
  s.gamma_exponent = gamma_exponent > 0.0
                         ? gamma_exponent
                         : s.alpha_tilde / (2.0 * (n + 2 + s.alpha_tilde));
  s.r0 = r0;
  s.delta_tilde = std::exp(-std::pow(r0, 1.0 / s.gamma_exponent));
  if (delta < s.delta_tilde) {
    s.freq_radius = std::pow(std::abs(std::log(delta)), s.gamma_exponent);
  } else {
    s.freq_radius = r0;
    s.clamped = true;
  }
  s.tau = std::pow(s.freq_radius, double(n + 2) / s.alpha_tilde);
  s.eps = eps_of_tau(s.tau);
  return s;
}

FourierEstimate estimate_fourier_mode(const EstimatorContext& ctx,
                                      const CGOPair& pair, double eps) {
  if (!ctx.q1 || !ctx.q2 || !ctx.basis || !ctx.dtn_diff)
    throw Error("estimate_fourier_mode: incomplete context");
  const BoxDomain& omega = pair.v1.box();
  if (!ctx.q1->box().same_lattice(omega))
    throw DomainError("estimate_fourier_mode: potential/solution lattice mismatch");

  FourierEstimate est;
  est.xi = pair.rho.xi;
  est.tau = pair.rho.tau;
  est.eps = eps;
  est.blind = ctx.blind;

  // Boundary pairing in the trace basis; losses reported, not fatal.
  const Eigen::VectorXcd f = ctx.basis->project(pair.v1);
  const Eigen::VectorXcd g = ctx.basis->project(pair.v2);
  est.trace_energy_loss1 = ctx.basis->projection_energy_loss(pair.v1);
  est.trace_energy_loss2 = ctx.basis->projection_energy_loss(pair.v2);
  est.boundary_term = g.dot((*ctx.dtn_diff) * f);

  // Volume pieces live in phase-centered coordinates; all four phase vectors
  // are real, so the integrands stay bounded.
  const Vec3 c = pair.phase_center;
  const CVec3 rho1 = pair.rho.rho1, rho2 = pair.rho.rho2;
  const CVec3 cross_p = rho1 + reflect_vector(rho2);
  const CVec3 cross_m = reflect_vector(rho1) + rho2;
  const Vec3 xi = pair.rho.xi;
  const Vec3 xis = reflect_vector(xi);
  const Vec3 cp(cross_p[0].real(), cross_p[1].real(), cross_p[2].real());
  const Vec3 cm(cross_m[0].real(), cross_m[1].real(), cross_m[2].real());

  GridField q0(omega);
  for (std::size_t n = 0; n < q0.values().size(); ++n)
    q0.values()[n] = ctx.q1->values()[n] - ctx.q2->values()[n];

  const auto off = pair.w1.box().offset_of(omega);
  const double h3 = std::pow(omega.spacing(), 3);
  Complex remainder(0, 0), side_p(0, 0), side_m(0, 0);
  for (int i = 0; i < omega.nodes(0); ++i)
    for (int j = 0; j < omega.nodes(1); ++j)
      for (int k = 0; k < omega.nodes(2); ++k) {
        const Vec3 x = omega.node(i, j, k) - c;
        const Complex w1 = pair.w1.at(i + off[0], j + off[1], k + off[2]);
        const Complex w1s = pair.w1s.at(i + off[0], j + off[1], k + off[2]);
        const Complex w2c = std::conj(pair.w2.at(i + off[0], j + off[1], k + off[2]));
        const Complex w2sc =
            std::conj(pair.w2s.at(i + off[0], j + off[1], k + off[2]));
        const Complex exi = std::exp(Complex(0, 1) * xi.dot(x));
        const Complex exis = std::exp(Complex(0, 1) * xis.dot(x));
        const Complex ecp = std::exp(Complex(0, 1) * cp.dot(x));
        const Complex ecm = std::exp(Complex(0, 1) * cm.dot(x));
        const Complex coupling = exi * (w1 + w2c + w1 * w2c) +
                                 exis * (w1s + w2sc + w1s * w2sc) -
                                 ecm * (w1s + w2c + w1s * w2c) -
                                 ecp * (w1 + w2sc + w1 * w2sc);
        const double wq = omega.quad_weight(i, j, k) * h3;
        const Complex qv = q0.at(i, j, k);
        remainder += wq * qv * coupling;
        side_p += wq * qv * ecp;
        side_m += wq * qv * ecm;
      }
  est.remainder_term = remainder;

  // Phase-centered estimate, then the center factor restores F q0(xi).
  const Complex center_factor = std::exp(Complex(0, 1) * xi.dot(c));
  if (ctx.blind) {
    est.sideband_plus = Complex(0, 0);
    est.sideband_minus = Complex(0, 0);
    const Vec3 xip(xi[0], xi[1], 0.0);
    const Vec3 zeta(xi[0], xi[1], 2.0 * pair.rho.tau * xip.norm());
    est.sideband_bound =
        mollify_rhs(ctx.apriori_l1, ctx.apriori_modulus, eps, zeta.norm());
    est.estimate = center_factor * (est.boundary_term - est.remainder_term);
  } else {
    est.sideband_plus = side_p;
    est.sideband_minus = side_m;
    est.estimate = center_factor * (est.boundary_term - est.remainder_term +
                                    est.sideband_plus + est.sideband_minus);
  }
  return est;
}

namespace {

struct ModeLattice {
  Vec3 dxi;
  double volume = 0.0;  // padded box volume
};

ModeLattice mode_lattice(const BoxDomain& omega, int pad_factor) {
  const Vec3 len = omega.upper() - omega.lower();
  ModeLattice ml;
  // Synthesis box: the doubled box padded per axis.
  const Vec3 padded(len[0] * pad_factor, len[1] * pad_factor,
                    2.0 * len[2] * pad_factor);
  ml.dxi = Vec3(kTwoPi / padded[0], kTwoPi / padded[1], kTwoPi / padded[2]);
  ml.volume = padded[0] * padded[1] * padded[2];
  return ml;
}

}  // namespace

RecoveryResult recover_q0(const EstimatorContext& ctx, const Schedule& schedule,
                          const RecoveryOptions& opts) {
  if (!ctx.q1 || !ctx.q2) throw Error("recover_q0: incomplete context");
  const BoxDomain omega = ctx.q1->box();
  const GridField q1e = even_reflect(*ctx.q1);
  const GridField q2e = even_reflect(*ctx.q2);

  // Contraction safeguard for the scheduled growth parameter.
  Vec3 tlen;
  for (int d = 0; d < 3; ++d)
    tlen[d] = 2.0 * (q1e.box().upper()[d] - q1e.box().lower()[d]);
  const double q_inf = std::max(q1e.max_abs(), q2e.max_abs());
  const double safeguard = 2.0 * q_inf * tlen.norm();
  if (schedule.tau < safeguard) {
    // Invert tau = R^{(n+2)/alpha_tilde} at the safeguard, n = 3.
    const double r_min = std::pow(safeguard, schedule.alpha_tilde / 5.0);
    throw NonconvergentIteration(
        "recover_q0: scheduled tau " + std::to_string(schedule.tau) +
        " is below the contraction safeguard " + std::to_string(safeguard) +
        "; the smallest feasible frequency radius is R = " + std::to_string(r_min));
  }

  const ModeLattice ml = mode_lattice(omega, opts.pad_factor);
  const double r = schedule.freq_radius;

  // Phase center matches assemble_pair's choice.
  Vec3 center = 0.5 * (omega.lower() + omega.upper());
  center[2] = 0.0;
  double r_xy = 0.0;
  for (int ci = 0; ci < 2; ++ci)
    for (int cj = 0; cj < 2; ++cj) {
      const double dx = (ci ? omega.upper()[0] : omega.lower()[0]) - center[0];
      const double dy = (cj ? omega.upper()[1] : omega.lower()[1]) - center[1];
      r_xy = std::max(r_xy, std::hypot(dx, dy));
    }

  RecoveryResult result;
  result.q0_hat = GridField(omega);
  result.tau_used = schedule.tau;

  GridField accum(omega);
  const int mmax1 = int(std::ceil(r / ml.dxi[0]));
  const int mmax2 = int(std::ceil(r / ml.dxi[1]));
  const int mmax3 = int(std::ceil(r / ml.dxi[2]));
  for (int m1 = -mmax1; m1 <= mmax1; ++m1)
    for (int m2 = -mmax2; m2 <= mmax2; ++m2)
      for (int m3 = 0; m3 <= mmax3; ++m3) {
        const Vec3 xi(m1 * ml.dxi[0], m2 * ml.dxi[1], m3 * ml.dxi[2]);
        const double xi_prime = std::hypot(xi[0], xi[1]);
        if (!(xi_prime < r) || !(std::abs(xi[2]) < r)) continue;
        if (xi.norm() == 0.0) {
          // The reflected solutions vanish when xi = 0; the mean is out of
          // reach of this construction.
          result.skipped_modes.push_back(xi);
          continue;
        }
        // Per-mode cap keeping the exponential range inside the phase budget.
        double tau = schedule.tau;
        const double beta_max = opts.overflow_budget / std::max(r_xy, 1e-12);
        const double s = beta_max / xi.norm();
        if (s * s > 0.25) {
          const double tau_cap = std::sqrt(s * s - 0.25);
          if (tau_cap < tau) {
            tau = tau_cap;
            result.tau_cap = std::max(result.tau_cap, tau_cap);
          }
        } else {
          result.skipped_modes.push_back(xi);
          continue;
        }
        if (tau < safeguard) {
          result.skipped_modes.push_back(xi);
          continue;
        }
        try {
          const CGOPair pair = assemble_pair(q1e, q2e, xi, tau);
          const double eps = eps_of_tau(tau);
          FourierEstimate est = estimate_fourier_mode(ctx, pair, eps);
          // Synthesis with the x3-even mirror; imaginary residue kept for the
          // report.
          for (int i = 0; i < omega.nodes(0); ++i)
            for (int j = 0; j < omega.nodes(1); ++j)
              for (int k = 0; k < omega.nodes(2); ++k) {
                const Vec3 x = omega.node(i, j, k);
                Complex basis_term = std::exp(Complex(0, -1) * xi.dot(x));
                if (m3 > 0) {
                  const Vec3 xim = reflect_vector(xi);
                  basis_term += std::exp(Complex(0, -1) * xim.dot(x));
                }
                accum.at(i, j, k) += est.estimate * basis_term / ml.volume;
              }
          result.modes.push_back(std::move(est));
        } catch (const Error&) {
          result.skipped_modes.push_back(xi);
        }
      }

  double max_abs = accum.max_abs();
  double max_imag = accum.max_abs_imag();
  result.imag_residue = max_abs > 0 ? max_imag / max_abs : 0.0;
  for (std::size_t n = 0; n < accum.values().size(); ++n)
    result.q0_hat.values()[n] = Complex(accum.values()[n].real(), 0.0);
  return result;
}

double truncation_baseline(const GridField& q0_lower, const std::vector<Vec3>& kept,
                           int pad_factor) {
  const GridField q0e = even_reflect(q0_lower);
  const BoxDomain& dbox = q0e.box();
  Vec3 lower = dbox.lower(), upper = dbox.upper();
  const Vec3 len = upper - lower;
  // Center the padded box on the doubled box.
  Vec3 plower = lower - 0.5 * (pad_factor - 1) * len;
  Vec3 pupper = upper + 0.5 * (pad_factor - 1) * len;
  const BoxDomain padded =
      BoxDomain::make(plower, pupper, pad_factor * (dbox.nodes(0) - 1));
  const GridField qp = zero_extend(q0e, padded);

  const std::array<int, 3> n = {padded.nodes(0) - 1, padded.nodes(1) - 1,
                                padded.nodes(2) - 1};
  std::vector<Complex> data(std::size_t(n[0]) * n[1] * n[2]);
  std::size_t idx = 0;
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < n[2]; ++k) data[idx++] = qp.at(i, j, k);
  Fft3 fft(n);
  fft.forward(data);

  const Vec3 plen = padded.upper() - padded.lower();
  // Mark kept frequencies (and their x3 mirrors) on the DFT lattice.
  auto index_of = [&](const Vec3& xi) -> std::int64_t {
    std::array<int, 3> m{};
    for (int d = 0; d < 3; ++d) {
      const double md = xi[d] * plen[d] / kTwoPi;
      m[d] = int(std::llround(md));
      if (std::abs(md - m[d]) > 1e-6) return -1;
      m[d] = ((m[d] % n[d]) + n[d]) % n[d];
    }
    // Forward DFT index for frequency +xi under F f(xi) = sum f exp(+i xi x):
    // exp(+i xi . x_j) = exp(-2 pi i j m'/N) with m' = -m.
    std::array<int, 3> mp{};
    for (int d = 0; d < 3; ++d) mp[d] = (n[d] - m[d]) % n[d];
    return (std::int64_t(mp[0]) * n[1] + mp[1]) * n[2] + mp[2];
  };

  std::vector<bool> keep(data.size(), false);
  for (const Vec3& xi : kept) {
    for (int sgn : {+1, -1}) {
      Vec3 x = xi;
      x[2] *= sgn;
      const std::int64_t id = index_of(x);
      if (id >= 0) keep[std::size_t(id)] = true;
      if (xi[2] == 0.0) break;
    }
  }

  double total = 0.0, lost = 0.0;
  for (std::size_t id = 0; id < data.size(); ++id) {
    const double e = std::norm(data[id]);
    total += e;
    if (!keep[id]) lost += e;
  }
  return total > 0 ? std::sqrt(lost / total) : 0.0;
}

}  // namespace calderon
