#include "calderon/cgo.hpp"

#include <cmath>

#include "calderon/fft3.hpp"

namespace calderon {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kSymbolFloor = 1e-8;
constexpr double kPicardTol = 1e-10;
constexpr int kPicardCap = 200;
constexpr double kExpOverflowGuard = 700.0;

}  // namespace

RhoPair make_rho(const Vec3& xi, double tau) {
  const double xi_norm = xi.norm();
  if (xi_norm == 0.0) throw DomainError("make_rho: xi must be nonzero");
  if (!(tau > 0.0)) throw DomainError("make_rho: tau must be positive");

  RhoPair pair;
  pair.xi = xi;
  pair.tau = tau;

  const double r = std::hypot(xi[0], xi[1]);
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  if (r > 0.0) {
    const double c = xi[0] / r, s = xi[1] / r;
    rot << c, s, 0, -s, c, 0, 0, 0, 1;
  }
  pair.rotation = rot;

  const double xt1 = r, xt3 = xi[2];
  const double beta = xi_norm * std::sqrt(0.25 + tau * tau);
  const CVec3 rho1_t(Complex(0.5 * xt1 - tau * xt3, 0.0), Complex(0.0, beta),
                     Complex(0.5 * xt3 + tau * xt1, 0.0));
  const CVec3 rho2_t(Complex(0.5 * xt1 + tau * xt3, 0.0), Complex(0.0, -beta),
                     Complex(0.5 * xt3 - tau * xt1, 0.0));
  const Eigen::Matrix3cd back = rot.transpose().cast<Complex>();
  pair.rho1 = back * rho1_t;
  pair.rho2 = back * rho2_t;
  return pair;
}

double max_imag_phase(const CVec3& rho, const BoxDomain& box) {
  return max_imag_phase_centered(rho, box, Vec3::Zero());
}

double max_imag_phase_centered(const CVec3& rho, const BoxDomain& box,
                               const Vec3& center) {
  double m = 0.0;
  for (int ci = 0; ci < 2; ++ci)
    for (int cj = 0; cj < 2; ++cj)
      for (int ck = 0; ck < 2; ++ck) {
        const Vec3 corner(ci ? box.upper()[0] : box.lower()[0],
                          cj ? box.upper()[1] : box.lower()[1],
                          ck ? box.upper()[2] : box.lower()[2]);
        m = std::max(m, std::abs(phase_dot(rho, corner - center).imag()));
      }
  return m;
}

GridField complex_exponential(const BoxDomain& box, const CVec3& rho) {
  if (max_imag_phase(rho, box) > kExpOverflowGuard)
    throw Error("complex_exponential: exponent exceeds the double range");
  return GridField::sample(
      box, [&](const Vec3& x) { return std::exp(Complex(0, 1) * phase_dot(rho, x)); });
}

BoxDomain lower_half_box(const BoxDomain& doubled) {
  if (!doubled.symmetric_in_x3())
    throw DomainError("lower_half_box: box must be symmetric about {x3=0}");
  Vec3 upper = doubled.upper();
  upper[2] = 0.0;
  return BoxDomain::make(doubled.lower(), upper, doubled.nodes(0) - 1);
}

GridField restrict_field(const GridField& f, const BoxDomain& target) {
  const auto off = f.box().offset_of(target);
  GridField out(target, f.parity());
  for (int i = 0; i < target.nodes(0); ++i)
    for (int j = 0; j < target.nodes(1); ++j)
      for (int k = 0; k < target.nodes(2); ++k)
        out.at(i, j, k) = f.at(i + off[0], j + off[1], k + off[2]);
  return out;
}

FaddeevTorus::FaddeevTorus(const BoxDomain& support, const CVec3& rho)
    : support_(support), rho_(rho) {
  h_ = support.spacing();
  for (int d = 0; d < 3; ++d) {
    const int intervals = support.nodes(d) - 1;
    if (intervals % 2 != 0)
      throw DomainError("FaddeevTorus: support resolution must be even");
    dims_[d] = 2 * intervals;
    offset_[d] = intervals / 2;
    lengths_[d] = 2.0 * (support.upper()[d] - support.lower()[d]);
    lower_[d] = support.lower()[d] - 0.5 * (support.upper()[d] - support.lower()[d]);
  }
  data_size_ = std::size_t(dims_[0]) * dims_[1] * dims_[2];

  const Vec3 dk(kTwoPi / lengths_[0], kTwoPi / lengths_[1], kTwoPi / lengths_[2]);
  const Vec3 b_imag(rho[0].imag(), rho[1].imag(), rho[2].imag());
  if (b_imag.norm() == 0.0)
    throw SymbolBreakdown("FaddeevTorus: Im(rho) vanishes; no shift direction");
  const Vec3 b_hat = b_imag.normalized();
  const double dk_min = dk.minCoeff();

  // The x3-Nyquist plane represents the same lattice mode for either sign of
  // the frequency; averaging the two symbol values makes the operator commute
  // with x3-reflection exactly, which the reflected-solution pairing relies on.
  auto symbol_at = [&](int i, int j, int k, const Vec3& shift) {
    const double k1 = dk[0] * dft_frequency_index(i, dims_[0]) + shift[0];
    const double k2 = dk[1] * dft_frequency_index(j, dims_[1]) + shift[1];
    const int m3 = dft_frequency_index(k, dims_[2]);
    auto symbol_for_k3 = [&](double k3) {
      const Vec3 kv(k1, k2, k3 + shift[2]);
      return Complex(kv.squaredNorm(), 0.0) + 2.0 * phase_dot(rho_, kv);
    };
    if (2 * std::abs(m3) == dims_[2]) {
      const double k3 = dk[2] * std::abs(m3);
      return 0.5 * (symbol_for_k3(k3) + symbol_for_k3(-k3));
    }
    return symbol_for_k3(dk[2] * m3);
  };

  auto min_symbol_for = [&](const Vec3& shift) {
    double min_abs = std::numeric_limits<double>::max();
    for (int i = 0; i < dims_[0]; ++i)
      for (int j = 0; j < dims_[1]; ++j)
        for (int k = 0; k < dims_[2]; ++k)
          min_abs = std::min(min_abs, std::abs(symbol_at(i, j, k, shift)));
    return min_abs;
  };

  // Deterministic shift candidates along Im(rho); keep the one whose symbol
  // stays farthest from zero.
  const std::array<double, 6> fractions = {0.5, 0.293, 0.709, 0.143, 0.857, 0.387};
  double best_min = -1.0, best_fraction = fractions[0];
  for (double frac : fractions) {
    const double m = min_symbol_for(frac * dk_min * b_hat);
    if (m > best_min) {
      best_min = m;
      best_fraction = frac;
    }
  }
  if (best_min < kSymbolFloor)
    throw SymbolBreakdown(
        "FaddeevTorus: shifted lattice still hits the symbol zero set");
  shift_ = best_fraction * dk_min * b_hat;
  shift_fraction_ = best_fraction;
  min_symbol_ = best_min;

  multiplier_.resize(data_size_);
  demod_.resize(data_size_);
  remod_.resize(data_size_);
  std::size_t idx = 0;
  for (int i = 0; i < dims_[0]; ++i)
    for (int j = 0; j < dims_[1]; ++j)
      for (int k = 0; k < dims_[2]; ++k, ++idx) {
        multiplier_[idx] = -1.0 / symbol_at(i, j, k, shift_);
        const double phase = shift_.dot(h_ * Vec3(double(i), double(j), double(k)));
        demod_[idx] = std::exp(Complex(0.0, -phase));
        remod_[idx] = std::exp(Complex(0.0, +phase));
      }
  fft_ = std::make_unique<Fft3>(dims_);
}

FaddeevTorus::~FaddeevTorus() = default;

Vec3 FaddeevTorus::wave_vector(int i, int j, int k) const {
  return Vec3(kTwoPi * dft_frequency_index(i, dims_[0]) / lengths_[0] + shift_[0],
              kTwoPi * dft_frequency_index(j, dims_[1]) / lengths_[1] + shift_[1],
              kTwoPi * dft_frequency_index(k, dims_[2]) / lengths_[2] + shift_[2]);
}

std::vector<Complex> FaddeevTorus::spread(const GridField& f) const {
  if (!f.box().same_lattice(support_))
    throw DomainError("FaddeevTorus::spread: lattice mismatch");
  std::vector<Complex> data(data_size_, Complex(0, 0));
  for (int i = 0; i < support_.nodes(0); ++i)
    for (int j = 0; j < support_.nodes(1); ++j)
      for (int k = 0; k < support_.nodes(2); ++k) {
        const int ti = (i + offset_[0]) % dims_[0];
        const int tj = (j + offset_[1]) % dims_[1];
        const int tk = (k + offset_[2]) % dims_[2];
        data[index(ti, tj, tk)] += f.at(i, j, k);
      }
  return data;
}

GridField FaddeevTorus::gather(const std::vector<Complex>& data) const {
  GridField out(support_);
  for (int i = 0; i < support_.nodes(0); ++i)
    for (int j = 0; j < support_.nodes(1); ++j)
      for (int k = 0; k < support_.nodes(2); ++k) {
        const int ti = (i + offset_[0]) % dims_[0];
        const int tj = (j + offset_[1]) % dims_[1];
        const int tk = (k + offset_[2]) % dims_[2];
        out.at(i, j, k) = data[index(ti, tj, tk)];
      }
  return out;
}

void FaddeevTorus::modulate(std::vector<Complex>& field, bool demodulate) const {
  const auto& phase = demodulate ? demod_ : remod_;
  for (std::size_t i = 0; i < field.size(); ++i) field[i] *= phase[i];
}

void FaddeevTorus::apply_green(std::vector<Complex>& field) const {
  if (field.size() != data_size_) throw Error("apply_green: size mismatch");
  modulate(field, true);
  fft_->forward(field);
  for (std::size_t i = 0; i < field.size(); ++i) field[i] *= multiplier_[i];
  fft_->backward(field);
  modulate(field, false);
}

void FaddeevTorus::apply_operator(std::vector<Complex>& field) const {
  if (field.size() != data_size_) throw Error("apply_operator: size mismatch");
  modulate(field, true);
  fft_->forward(field);
  for (std::size_t i = 0; i < field.size(); ++i) field[i] /= multiplier_[i];
  fft_->backward(field);
  modulate(field, false);
}

double FaddeevTorus::field_l2(const std::vector<Complex>& field) const {
  double acc = 0.0;
  for (const auto& v : field) acc += std::norm(v);
  return std::sqrt(acc * h_ * h_ * h_);
}

RemainderSolution solve_remainder(const GridField& q_even, const CVec3& rho,
                                  double tau) {
  const BoxDomain& support = q_even.box();
  const double q_inf = q_even.max_abs();
  if (q_inf > 0 && !q_even.even_in_x3(1e-10 * std::max(1.0, q_inf)))
    throw DomainError("solve_remainder: potential must be even in x3");

  const FaddeevTorus torus(support, rho);

  Vec3 tlen;
  for (int d = 0; d < 3; ++d)
    tlen[d] = 2.0 * (support.upper()[d] - support.lower()[d]);
  const double diam = tlen.norm();
  if (tau < 2.0 * q_inf * diam)
    throw NonconvergentIteration(
        "solve_remainder: tau below the contraction safeguard 2*||q||_inf*diam; "
        "raise tau or shrink the potential");

  const std::vector<Complex> q = torus.spread(q_even);
  std::vector<Complex> w(torus.size(), Complex(0, 0));
  std::vector<Complex> work(torus.size());

  RemainderReport rep;
  rep.min_symbol = torus.min_symbol();
  rep.shift_fraction = torus.shift_fraction();

  double prev_change = std::numeric_limits<double>::max();
  int growth_streak = 0;
  bool converged = false;
  for (rep.iterations = 1; rep.iterations <= kPicardCap; ++rep.iterations) {
    for (std::size_t idx = 0; idx < work.size(); ++idx)
      work[idx] = q[idx] * (1.0 + w[idx]);
    torus.apply_green(work);
    double change2 = 0.0;
    for (std::size_t idx = 0; idx < w.size(); ++idx)
      change2 += std::norm(work[idx] - w[idx]);
    const double h3 = std::pow(torus.spacing(), 3);
    const double change = std::sqrt(change2 * h3);
    w.swap(work);
    rep.final_change = change;
    if (change < kPicardTol) {
      converged = true;
      break;
    }
    if (change > prev_change) {
      if (++growth_streak >= 3)
        throw NonconvergentIteration("solve_remainder: Picard iteration diverges");
    } else {
      growth_streak = 0;
    }
    prev_change = change;
  }
  if (!converged)
    throw NonconvergentIteration(
        "solve_remainder: iteration cap reached before tolerance");

  rep.torus_l2 = torus.field_l2(w);

  // Relative residual of the fixed point through the forward multiplier.
  {
    std::vector<Complex> lhs = w;
    torus.apply_operator(lhs);
    double num = 0.0, den = 0.0;
    for (std::size_t idx = 0; idx < lhs.size(); ++idx) {
      const Complex rhs = q[idx] * (1.0 + w[idx]);
      num += std::norm(lhs[idx] - rhs);
      den += std::norm(rhs);
    }
    rep.conjugated_residual = den > 0 ? std::sqrt(num / den) : std::sqrt(num);
  }

  RemainderSolution sol{torus.gather(w), rep};
  sol.report.support_l2 = sol.w.norm_l2();
  return sol;
}

double schrodinger_residual(const GridField& v, const GridField& q, double rho_scale) {
  if (!v.box().same_lattice(q.box()))
    throw DomainError("schrodinger_residual: lattice mismatch");
  const auto n = v.box().node_counts();
  const double h2 = v.box().spacing() * v.box().spacing();
  double num = 0.0, den = 0.0;
  for (int i = 1; i < n[0] - 1; ++i)
    for (int j = 1; j < n[1] - 1; ++j)
      for (int k = 1; k < n[2] - 1; ++k) {
        const Complex lap =
            (v.at(i + 1, j, k) + v.at(i - 1, j, k) + v.at(i, j + 1, k) +
             v.at(i, j - 1, k) + v.at(i, j, k + 1) + v.at(i, j, k - 1) -
             6.0 * v.at(i, j, k)) /
            h2;
        num += std::norm(lap - q.at(i, j, k) * v.at(i, j, k));
        den += std::norm(v.at(i, j, k));
      }
  if (den == 0.0) return 0.0;
  return std::sqrt(num / den) / std::max(rho_scale * rho_scale, 1.0);
}

CGOPair assemble_pair(const GridField& q1_even, const GridField& q2_even,
                      const Vec3& xi, double tau) {
  if (!q1_even.box().same_lattice(q2_even.box()))
    throw DomainError("assemble_pair: potentials live on different lattices");

  CGOPair pair;
  pair.rho = make_rho(xi, tau);
  pair.phase1 = pair.rho.rho1;
  pair.phase2 = -pair.rho.rho2.conjugate();  // conj(v2) then carries exp(i rho2 . x)

  RemainderSolution s1 = solve_remainder(q1_even, pair.phase1, tau);
  RemainderSolution s2 = solve_remainder(q2_even, pair.phase2, tau);
  pair.w1 = std::move(s1.w);
  pair.w2 = std::move(s2.w);
  pair.report1 = s1.report;
  pair.report2 = s2.report;
  pair.w1s = reflect_field(pair.w1);
  pair.w2s = reflect_field(pair.w2);

  const BoxDomain omega = lower_half_box(q1_even.box());
  // In-plane phase center: third component zero keeps the reflection pairing.
  pair.phase_center = 0.5 * (omega.lower() + omega.upper());
  pair.phase_center[2] = 0.0;
  const Vec3 center = pair.phase_center;
  const CVec3 phase1s = reflect_vector(pair.phase1);
  const CVec3 phase2s = reflect_vector(pair.phase2);

  auto assemble = [&](const CVec3& ph, const CVec3& phs, const GridField& w,
                      const GridField& ws) {
    if (std::max(max_imag_phase_centered(ph, omega, center),
                 max_imag_phase_centered(phs, omega, center)) > kExpOverflowGuard)
      throw Error("assemble_pair: phase exponent exceeds the double range");
    const auto off = w.box().offset_of(omega);
    GridField v(omega);
    for (int i = 0; i < omega.nodes(0); ++i)
      for (int j = 0; j < omega.nodes(1); ++j)
        for (int k = 0; k < omega.nodes(2); ++k) {
          const Vec3 x = omega.node(i, j, k) - center;
          const Complex e1 = std::exp(Complex(0, 1) * phase_dot(ph, x));
          const Complex e2 = std::exp(Complex(0, 1) * phase_dot(phs, x));
          const Complex wu = w.at(i + off[0], j + off[1], k + off[2]);
          const Complex wr = ws.at(i + off[0], j + off[1], k + off[2]);
          v.at(i, j, k) = e1 * (1.0 + wu) - e2 * (1.0 + wr);
        }
    return v;
  };

  pair.v1 = assemble(pair.phase1, phase1s, pair.w1, pair.w1s);
  pair.v2 = assemble(pair.phase2, phase2s, pair.w2, pair.w2s);

  auto plane_vanishing = [&](const GridField& v) {
    const int kz = v.box().nodes(2) - 1;
    double top = 0.0;
    for (int i = 0; i < v.box().nodes(0); ++i)
      for (int j = 0; j < v.box().nodes(1); ++j)
        top = std::max(top, std::abs(v.at(i, j, kz)));
    const double scale = v.max_abs();
    return scale > 0 ? top / scale : 0.0;
  };
  pair.plane_vanishing1 = plane_vanishing(pair.v1);
  pair.plane_vanishing2 = plane_vanishing(pair.v2);

  const GridField q1_omega = restrict_field(q1_even, omega);
  const GridField q2_omega = restrict_field(q2_even, omega);
  const double rho_scale = pair.rho.rho1.norm();
  pair.interior_residual1 = schrodinger_residual(pair.v1, q1_omega, rho_scale);
  pair.interior_residual2 = schrodinger_residual(pair.v2, q2_omega, rho_scale);
  return pair;
}

}  // namespace calderon
