#pragma once

#include "calderon/forward.hpp"
#include "calderon/grid_field.hpp"

namespace calderon {

/// Inversion through the sphere of radius 2R about the origin:
/// y = (2R/|x|)^2 x. The map is an involution and carries the sphere
/// |x - (0,0,R)| = R onto the plane {y3 = 2R}.
struct KelvinMap {
  double ball_radius = 0.0;  // R

  Vec3 ball_center() const { return Vec3(0, 0, ball_radius); }

  Vec3 apply(const Vec3& p) const {
    const double n2 = p.squaredNorm();
    if (n2 < 1e-18)
      throw DomainError("KelvinMap: point too close to the inversion center");
    const double f = 4.0 * ball_radius * ball_radius / n2;
    return f * p;
  }

  /// Conformal weight (2R/|p|)^power at a point.
  double weight(const Vec3& p, double power) const {
    return std::pow(2.0 * ball_radius / p.norm(), power);
  }
};

enum class MapDirection { Forward, Inverse };

/// Componentwise inversion of a point set; forward and inverse share the same
/// formula. Throws when a point sits at the origin.
std::vector<Vec3> map_points(const KelvinMap& map, const std::vector<Vec3>& points,
                             MapDirection direction);

/// Shifted frame for the plane-side geometry: the solver works on a box in
/// {z3 < 0} with top face at z3 = 0 while the inversion lives in y-space
/// with the plane at {y3 = 2R}; the frame is y = (z1, z2, 2R - z3).
struct PlaneFrame {
  double ball_radius = 0.0;
  Vec3 to_physical(const Vec3& z) const {
    return Vec3(z[0], z[1], 2.0 * ball_radius - z[2]);
  }
  Vec3 from_physical(const Vec3& y) const {
    return Vec3(y[0], y[1], 2.0 * ball_radius - y[2]);
  }
  /// Composite map from solver coordinates to the sphere-side x space.
  Vec3 to_sphere_side(const KelvinMap& map, const Vec3& z) const {
    return map.apply(to_physical(z));
  }
};

/// Weighted pullback t(p) = (2R/|p|)^power f(map(p)) sampled on the target
/// lattice; tricubic interpolation on the source lattice. `physical` converts
/// target lattice nodes to the physical frame of the inversion when the
/// target is a shifted solver box (identity for plain boxes).
GridField kelvin_transform(const KelvinMap& map, const GridField& source,
                           const BoxDomain& target, double power,
                           const std::function<Vec3(const Vec3&)>& target_to_physical,
                           const std::function<Vec3(const Vec3&)>& source_to_physical);

/// Field transform (power n-2 = 1) and potential transform (power 4) with
/// identity frames.
GridField transform_field(const KelvinMap& map, const GridField& u,
                          const BoxDomain& target);
GridField transform_potential(const KelvinMap& map, const GridField& q,
                              const BoxDomain& target);

/// Tricubic (Lagrange, window-shifted near edges) interpolation of a field.
Complex interpolate_tricubic(const GridField& f, const Vec3& p);

/// Pairing and norm comparison between the plane-side matrices and the
/// sphere-side realization obtained by transporting traces through the
/// inversion with the conformal weight.
struct DtnComparisonReport {
  double plane_operator_norm = 0.0;
  double sphere_operator_norm = 0.0;  // sup over the sampled family
  double ratio = 0.0;                 // sphere / plane
  std::vector<double> pairing_rel_error;  // two-geometry pairing identity
  std::vector<double> quotient_ratio;     // per-pair sphere/plane quotients
};

DtnComparisonReport compare_dtn_norms(const KelvinMap& map,
                                      const PartialDtN& plane_dtn1,
                                      const PartialDtN& plane_dtn2,
                                      const GridField& q1_plane,
                                      const GridField& q2_plane,
                                      const TraceBasis& basis, int pairs,
                                      std::uint64_t seed);

}  // namespace calderon
