#include "calderon/norms.hpp"

#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "calderon/fft3.hpp"

namespace calderon {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

double operator_norm_weighted(const Eigen::MatrixXcd& d, const Eigen::VectorXd& w) {
  if (d.rows() != w.size() || d.cols() != w.size())
    throw DomainError("operator_norm: matrix does not match the weights");
  const Eigen::VectorXd wi = w.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXcd scaled = wi.asDiagonal() * d * wi.asDiagonal();
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(scaled);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

double operator_norm(const Eigen::MatrixXcd& d, const TraceBasis& basis) {
  return operator_norm_weighted(d, basis.sobolev_weights(0.5));
}

double operator_norm(const PartialDtN& d, const TraceBasis& basis) {
  return operator_norm(d.matrix, basis);
}

double operator_norm_random_search(const Eigen::MatrixXcd& d, const TraceBasis& basis,
                                   int samples, std::uint64_t seed) {
  const Eigen::VectorXd w = basis.sobolev_weights(0.5);
  const Eigen::VectorXd wi = w.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXcd scaled = wi.asDiagonal() * d * wi.asDiagonal();

  // For a fixed f the optimal g is the image direction, so the quotient to
  // maximize is ||scaled x|| / ||x|| over x = W^{1/2} f.
  auto quotient = [&](const Eigen::VectorXcd& x) {
    const double nx = x.norm();
    return nx > 0 ? (scaled * x).norm() / nx : 0.0;
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd best_x(d.cols());
  double best = -1.0;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXcd x(d.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = Complex(gauss(rng), gauss(rng));
    const double q = quotient(x);
    if (q > best) {
      best = q;
      best_x = x;
    }
  }
  // Greedy ascent from the best sample (still a Rayleigh-quotient climb).
  Eigen::VectorXcd x = best_x.normalized();
  for (int it = 0; it < 50; ++it) {
    x = (scaled.adjoint() * (scaled * x)).normalized();
    best = std::max(best, quotient(x));
  }
  return best;
}

double h_minus1_norm(const GridField& q0) {
  const BoxDomain& box = q0.box();
  const std::array<int, 3> n = {box.nodes(0) - 1, box.nodes(1) - 1, box.nodes(2) - 1};
  const double h = box.spacing();
  const double h3 = h * h * h;
  const Vec3 len = box.upper() - box.lower();

  // Periodic read of the lattice: drop the duplicated far planes.
  std::vector<Complex> data(std::size_t(n[0]) * n[1] * n[2]);
  std::size_t idx = 0;
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < n[2]; ++k) data[idx++] = q0.at(i, j, k);

  Fft3 fft(n);
  fft.forward(data);  // X_m = sum_j f_j exp(-2 pi i j.m/N)

  // F_h f(xi_m) with xi_m = -2 pi m / L matches the forward DFT up to a
  // phase from the box corner; magnitudes are all the norm needs.
  double acc = 0.0;
  idx = 0;
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < n[2]; ++k, ++idx) {
        const double xi0 = kTwoPi * dft_frequency_index(i, n[0]) / len[0];
        const double xi1 = kTwoPi * dft_frequency_index(j, n[1]) / len[1];
        const double xi2 = kTwoPi * dft_frequency_index(k, n[2]) / len[2];
        const double xi2norm = xi0 * xi0 + xi1 * xi1 + xi2 * xi2;
        acc += std::norm(data[idx] * h3) / (1.0 + xi2norm);
      }
  const double dxi = (kTwoPi / len[0]) * (kTwoPi / len[1]) * (kTwoPi / len[2]);
  return std::sqrt(acc * dxi / std::pow(kTwoPi, 3));
}

namespace {

double l1_shift_difference(const GridField& f, const std::array<int, 3>& shift) {
  const BoxDomain& box = f.box();
  const auto n = box.node_counts();
  const double h3 = std::pow(box.spacing(), 3);
  double acc = 0.0;
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < n[2]; ++k) {
        const int is = i - shift[0], js = j - shift[1], ks = k - shift[2];
        Complex shifted(0, 0);
        if (is >= 0 && is < n[0] && js >= 0 && js < n[1] && ks >= 0 && ks < n[2])
          shifted = f.at(is, js, ks);
        acc += std::abs(shifted - f.at(i, j, k));
      }
  return acc * h3;
}

HolderModulus modulus_samples(const GridField& f, const std::vector<Vec3>& offsets) {
  const double h = f.box().spacing();
  HolderModulus mod;
  for (const Vec3& y : offsets) {
    std::array<int, 3> shift{};
    Vec3 snapped;
    for (int d = 0; d < 3; ++d) {
      shift[d] = int(std::llround(y[d] / h));
      snapped[d] = shift[d] * h;
      if (std::abs(shift[d]) >= f.box().nodes(d))
        throw DomainError("translation_modulus: offset exceeds the padding margin");
    }
    mod.offsets.push_back(snapped);
    mod.values.push_back(l1_shift_difference(f, shift));
    mod.delta = std::max(mod.delta, snapped.norm());
  }
  return mod;
}

void fit_envelope(HolderModulus& mod) {
  double c0 = 0.0;
  for (std::size_t i = 0; i < mod.offsets.size(); ++i) {
    const double r = mod.offsets[i].norm();
    if (r > 0)
      c0 = std::max(c0, mod.values[i] / std::pow(r, mod.alpha));
  }
  mod.c0 = c0;
}

}  // namespace

HolderModulus translation_modulus(const GridField& f, const std::vector<Vec3>& offsets) {
  HolderModulus mod = modulus_samples(f, offsets);
  std::vector<double> rs, gs;
  for (std::size_t i = 0; i < mod.offsets.size(); ++i) {
    const double r = mod.offsets[i].norm();
    if (r > 0 && mod.values[i] > 0) {
      rs.push_back(r);
      gs.push_back(mod.values[i]);
    }
  }
  if (rs.size() >= 2) {
    const PowerLawFit fit = fit_power_law(rs, gs);
    mod.alpha = fit.exponent;
    mod.fit_residual = fit.residual;
  }
  fit_envelope(mod);
  return mod;
}

HolderModulus translation_modulus_with_alpha(const GridField& f,
                                             const std::vector<Vec3>& offsets,
                                             double alpha) {
  HolderModulus mod = modulus_samples(f, offsets);
  mod.alpha = alpha;
  fit_envelope(mod);
  return mod;
}

std::string modulus_csv(const HolderModulus& modulus) {
  std::string out = "abs_y,g,c0,alpha\n";
  char buf[128];
  for (std::size_t i = 0; i < modulus.offsets.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n",
                  modulus.offsets[i].norm(), modulus.values[i], modulus.c0,
                  modulus.alpha);
    out += buf;
  }
  return out;
}

}  // namespace calderon
