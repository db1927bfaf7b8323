#pragma once

#include <memory>

#include <Eigen/Core>

#include "calderon/grid_field.hpp"

namespace calderon {

using CVec3 = Eigen::Vector3cd;

/// Complex frequency pair for oscillating solutions with growth parameter tau.
/// Both vectors are isotropic (rho.rho = 0 for the bilinear product) and sum
/// to the real frequency xi; the construction works in coordinates rotated
/// about the x3 axis so that xi has no second tangential component.
struct RhoPair {
  Vec3 xi = Vec3::Zero();
  double tau = 0.0;
  CVec3 rho1 = CVec3::Zero();
  CVec3 rho2 = CVec3::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // standard -> tilde
};

RhoPair make_rho(const Vec3& xi, double tau);

/// x3-reflection of a (complex) vector: flips the third component.
inline CVec3 reflect_vector(const CVec3& v) { return CVec3(v[0], v[1], -v[2]); }
inline Vec3 reflect_vector(const Vec3& v) { return Vec3(v[0], v[1], -v[2]); }

/// Bilinear (non-Hermitian) dot product of complex 3-vectors.
inline Complex bilinear_dot(const CVec3& a, const CVec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Complex phase_dot(const CVec3& rho, const Vec3& x) {
  return rho[0] * x[0] + rho[1] * x[1] + rho[2] * x[2];
}

/// Largest |Im(rho . x)| over a box (attained at a corner).
double max_imag_phase(const CVec3& rho, const BoxDomain& box);

/// Samples exp(i rho . x); throws if the real exponent would overflow.
GridField complex_exponential(const BoxDomain& box, const CVec3& rho);

class Fft3;

/// Periodic torus twice the support box per axis, carrying the Fourier
/// multiplier of Lap + 2i rho.grad on a frequency lattice shifted along
/// Im(rho) so the symbol stays clear of its zero set.
class FaddeevTorus {
 public:
  FaddeevTorus(const BoxDomain& support, const CVec3& rho);
  ~FaddeevTorus();
  FaddeevTorus(const FaddeevTorus&) = delete;
  FaddeevTorus& operator=(const FaddeevTorus&) = delete;

  const std::array<int, 3>& dims() const { return dims_; }
  std::size_t size() const { return data_size_; }
  double spacing() const { return h_; }
  const Vec3& shift() const { return shift_; }
  double shift_fraction() const { return shift_fraction_; }
  double min_symbol() const { return min_symbol_; }

  std::size_t index(int i, int j, int k) const {
    return (std::size_t(i) * dims_[1] + j) * dims_[2] + k;
  }
  Vec3 point(int i, int j, int k) const {
    return lower_ + h_ * Vec3(double(i), double(j), double(k));
  }
  /// Shifted wave vector of lattice node (i,j,k), symmetric indexing.
  Vec3 wave_vector(int i, int j, int k) const;

  /// Spreads a support-box field onto the torus (zeros elsewhere).
  std::vector<Complex> spread(const GridField& f) const;
  /// Reads a torus field back on the support-box lattice.
  GridField gather(const std::vector<Complex>& data) const;

  /// In-place inverse of the conjugated operator via the multiplier
  /// -1/(|k|^2 + 2 rho.k) on the shifted lattice.
  void apply_green(std::vector<Complex>& field) const;
  /// In-place forward operator Lap + 2i rho.grad (spectral).
  void apply_operator(std::vector<Complex>& field) const;

  double field_l2(const std::vector<Complex>& field) const;

 private:
  void modulate(std::vector<Complex>& field, bool demodulate) const;

  BoxDomain support_;
  CVec3 rho_;
  std::array<int, 3> dims_{};
  std::array<int, 3> offset_{};
  std::size_t data_size_ = 0;
  double h_ = 0.0;
  Vec3 lower_, lengths_;
  Vec3 shift_ = Vec3::Zero();
  double shift_fraction_ = 0.0;
  double min_symbol_ = 0.0;
  std::vector<Complex> multiplier_, demod_, remod_;
  std::unique_ptr<Fft3> fft_;
};

struct RemainderReport {
  int iterations = 0;
  double min_symbol = 0.0;      // smallest |symbol| over the shifted lattice
  double shift_fraction = 0.0;  // chosen shift in units of the lattice step
  double final_change = 0.0;    // last Picard increment, torus L2
  double torus_l2 = 0.0;        // ||w||_L2 over the torus
  double support_l2 = 0.0;      // ||w||_L2 over the support box
  double conjugated_residual = 0.0;  // relative residual of the fixed point
};

struct RemainderSolution {
  GridField w;  // on the support (doubled) box
  RemainderReport report;
};

/// Solves the conjugated remainder equation Lap w + 2i rho.grad w = q (1 + w)
/// by Picard iteration on the periodized torus; converged when successive
/// L2 change drops below 1e-10.
RemainderSolution solve_remainder(const GridField& q_even, const CVec3& rho,
                                  double tau);

/// One frequency's worth of reflected special solutions: v1 is built from
/// rho1, v2 from the negative conjugate of rho2, each minus its x3-reflected
/// twin so both vanish identically on the plane {x3 = 0}. Phases are taken
/// relative to an in-plane center (center_3 = 0): this multiplies each v_j by
/// a constant, which halves the dynamic range of the exponentials without
/// changing the solution property or the plane cancellation.
struct CGOPair {
  RhoPair rho;
  CVec3 phase1, phase2;        // v_j leading term is exp(i phase_j . (x - c))
  Vec3 phase_center = Vec3::Zero();
  GridField w1, w1s, w2, w2s;  // remainders on the doubled box
  GridField v1, v2;            // assembled solutions on the lower-half box
  RemainderReport report1, report2;
  double plane_vanishing1 = 0.0, plane_vanishing2 = 0.0;  // relative, on x3=0
  double interior_residual1 = 0.0, interior_residual2 = 0.0;
};

/// Builds the pair for even-extended potentials q1, q2 on the doubled box.
CGOPair assemble_pair(const GridField& q1_even, const GridField& q2_even,
                      const Vec3& xi, double tau);

/// Largest |Im(rho . (x - c))| over a box for a given in-plane center.
double max_imag_phase_centered(const CVec3& rho, const BoxDomain& box,
                               const Vec3& center);

/// Lower-half (x3 <= 0) sub-box of a box symmetric about {x3 = 0}.
BoxDomain lower_half_box(const BoxDomain& doubled);

/// Restriction of a field to an aligned sub-lattice.
GridField restrict_field(const GridField& f, const BoxDomain& target);

/// Relative 7-point residual of (Lap - q)v over the interior of v's box,
/// scaled by |rho|^2 ||v||.
double schrodinger_residual(const GridField& v, const GridField& q, double rho_scale);

}  // namespace calderon
