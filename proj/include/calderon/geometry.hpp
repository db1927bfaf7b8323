#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "calderon/errors.hpp"

namespace calderon {

using Vec3 = Eigen::Vector3d;

/// Identifiers for the six faces of an axis-aligned box. ZHigh is the top face
/// {x3 = max}; for domains lying in {x3 < 0} it is the inaccessible part.
enum class Face : int { XLow = 0, XHigh = 1, YLow = 2, YHigh = 3, ZLow = 4, ZHigh = 5 };

inline constexpr std::array<Face, 5> kAccessibleFaces = {
    Face::XLow, Face::XHigh, Face::YLow, Face::YHigh, Face::ZLow};

/// Uniform node-centered lattice on an axis-aligned box. Spacing is identical
/// on all axes; node counts follow from the side lengths.
class BoxDomain {
 public:
  BoxDomain() = default;

  /// General lattice over [lower, upper] with nx intervals along the x axis.
  /// The remaining sides must be integer multiples of the resulting spacing.
  static BoxDomain make(const Vec3& lower, const Vec3& upper, int nx_intervals);

  const Vec3& lower() const { return lower_; }
  const Vec3& upper() const { return upper_; }
  double spacing() const { return h_; }

  /// Node count along axis d (intervals + 1).
  int nodes(int d) const { return n_[d]; }
  const std::array<int, 3>& node_counts() const { return n_; }
  std::int64_t total_nodes() const {
    return std::int64_t(n_[0]) * n_[1] * n_[2];
  }

  std::int64_t linear_index(int i, int j, int k) const {
    return (std::int64_t(i) * n_[1] + j) * n_[2] + k;
  }
  std::array<int, 3> unpack(std::int64_t lin) const {
    const int k = int(lin % n_[2]);
    lin /= n_[2];
    const int j = int(lin % n_[1]);
    const int i = int(lin / n_[1]);
    return {i, j, k};
  }

  Vec3 node(int i, int j, int k) const {
    return lower_ + h_ * Vec3(double(i), double(j), double(k));
  }

  bool on_boundary(int i, int j, int k) const {
    return i == 0 || i == n_[0] - 1 || j == 0 || j == n_[1] - 1 || k == 0 ||
           k == n_[2] - 1;
  }

  /// Trapezoid quadrature weight of a node (product of 1/2 factors at extremes).
  double quad_weight(int i, int j, int k) const {
    auto w = [](int idx, int n) { return (idx == 0 || idx == n - 1) ? 0.5 : 1.0; };
    return w(i, n_[0]) * w(j, n_[1]) * w(k, n_[2]);
  }

  /// True when the top face sits on the plane {x3 = 0} (case (a) position).
  bool top_face_on_plane() const { return std::abs(upper_[2]) < 1e-12; }

  /// True when the box is symmetric about {x3 = 0}.
  bool symmetric_in_x3() const { return std::abs(lower_[2] + upper_[2]) < 1e-12; }

  /// True when `inner` nodes are a subset of this lattice (same spacing, aligned).
  bool contains_lattice(const BoxDomain& inner) const;

  /// Node offset of `inner`'s origin inside this lattice. Throws on mismatch.
  std::array<int, 3> offset_of(const BoxDomain& inner) const;

  bool same_lattice(const BoxDomain& other) const;

 private:
  Vec3 lower_ = Vec3::Zero();
  Vec3 upper_ = Vec3::Zero();
  double h_ = 0.0;
  std::array<int, 3> n_ = {0, 0, 0};
};

/// Constructor for the physical domain of the boundary value problem: a box in
/// {x3 < 0} whose top face lies on the plane {x3 = 0}. Requires resolution >= 8
/// and equal spacing on all axes.
BoxDomain build_box(const Vec3& lower, const Vec3& upper, int resolution);

/// Partition of the boundary nodes into the inaccessible top face (gamma0) and
/// the five accessible faces (gamma). Edge and corner nodes on {x3 = max} are
/// assigned to gamma0 so that admissible traces vanish there.
class BoundaryPartition {
 public:
  explicit BoundaryPartition(const BoxDomain& box);

  const std::vector<std::int64_t>& gamma_nodes() const { return gamma_; }
  const std::vector<std::int64_t>& gamma0_nodes() const { return gamma0_; }
  const std::vector<std::int64_t>& all_boundary_nodes() const { return all_; }

  /// Face owning a boundary node, with the gamma0 tie-break applied first.
  Face face_of(int i, int j, int k) const;

  bool is_gamma0(int i, int j, int k) const {
    (void)i;
    (void)j;
    return k == n_[2] - 1;
  }

 private:
  std::array<int, 3> n_ = {0, 0, 0};
  std::vector<std::int64_t> gamma_, gamma0_, all_;
};

}  // namespace calderon
