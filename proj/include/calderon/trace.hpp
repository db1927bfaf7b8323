#pragma once

#include <vector>

#include <Eigen/Core>

#include "calderon/grid_field.hpp"

namespace calderon {

/// Geometry of one box face: normal axis, the two tangential axes, and the
/// lattice index pinned on the face.
struct FaceFrame {
  Face face;
  int normal_axis;
  int fixed_index;
  int axis_a, axis_b;         // tangential axes
  int na, nb;                 // node counts along the tangential axes
  double la, lb;              // side lengths
};

FaceFrame face_frame(const BoxDomain& box, Face face);

/// Tensor sine modes on the five accessible faces, vanishing on all face
/// edges. Modes are orthonormal in the discrete L2(Gamma) inner product, and
/// each carries the Laplace-Beltrami eigenvalue of its continuum counterpart.
class TraceBasis {
 public:
  TraceBasis(const BoxDomain& box, int modes_per_axis);

  struct Mode {
    Face face;
    int p, q;        // sine indices along the tangential axes, starting at 1
    double lambda;   // (p pi / la)^2 + (q pi / lb)^2
  };

  const BoxDomain& box() const { return box_; }
  int modes_per_axis() const { return modes_per_axis_; }
  int size() const { return int(modes_.size()); }
  const Mode& mode(int k) const { return modes_[k]; }

  /// Nodal values of mode k at its face-interior nodes, as (linear index, value).
  const std::vector<std::pair<std::int64_t, double>>& mode_support(int k) const {
    return support_[k];
  }

  /// L2(Gamma)-orthonormal projection of boundary nodal values.
  Eigen::VectorXcd project(const GridField& volume_field) const;
  Eigen::VectorXcd project_nodal(const std::vector<Complex>& nodal) const;

  /// Nodal synthesis of a coefficient vector (zero on gamma0 and face edges).
  std::vector<Complex> synthesize(const Eigen::VectorXcd& coeffs) const;

  /// Discrete L2(Gamma) squared norm of boundary nodal values (per-face
  /// trapezoid quadrature, gamma faces only).
  double boundary_l2_squared(const std::vector<Complex>& nodal) const;
  double boundary_l2_squared(const GridField& volume_field) const;

  /// Fraction of L2(Gamma) energy not captured by the basis.
  double projection_energy_loss(const GridField& volume_field) const;

  /// Weight (1 + lambda_k)^order per mode; order is +1/2, -1/2 (or 0).
  Eigen::VectorXd sobolev_weights(double order) const;

 private:
  BoxDomain box_;
  int modes_per_axis_ = 0;
  std::vector<Mode> modes_;
  std::vector<std::vector<std::pair<std::int64_t, double>>> support_;
};

/// Dirichlet data on the lattice boundary, stored nodally over the full
/// lattice (zero at interior nodes).
class BoundaryTrace {
 public:
  BoundaryTrace() = default;
  explicit BoundaryTrace(const BoxDomain& box)
      : box_(box), nodal_(box.total_nodes(), Complex(0, 0)) {}

  static BoundaryTrace sample(const BoxDomain& box,
                              const std::function<Complex(const Vec3&)>& f);
  static BoundaryTrace from_coefficients(const TraceBasis& basis,
                                         const Eigen::VectorXcd& coeffs);
  /// Boundary restriction of a volume field.
  static BoundaryTrace restrict_field(const GridField& u);

  const BoxDomain& box() const { return box_; }
  const std::vector<Complex>& nodal() const { return nodal_; }
  std::vector<Complex>& nodal() { return nodal_; }

  Complex& at(int i, int j, int k) { return nodal_[box_.linear_index(i, j, k)]; }
  const Complex& at(int i, int j, int k) const {
    return nodal_[box_.linear_index(i, j, k)];
  }

  double max_abs() const;
  /// Largest magnitude on the inaccessible face.
  double gamma0_max_abs() const;
  bool supported_in_gamma(double rel_tol = 1e-12) const;

 private:
  BoxDomain box_;
  std::vector<Complex> nodal_;
};

/// Discrete H^{order}(Gamma) norm through the sine-coefficient weights,
/// order in {+1/2, -1/2}. Throws TraceSupportError if the trace leaks onto
/// the inaccessible face.
double trace_norm(const BoundaryTrace& f, const TraceBasis& basis, double order);
double trace_norm(const Eigen::VectorXcd& coeffs, const TraceBasis& basis,
                  double order);

}  // namespace calderon
