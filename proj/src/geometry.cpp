#include "calderon/geometry.hpp"

#include <cmath>

namespace calderon {

namespace {

bool near_integer(double x, double tol = 1e-9) {
  return std::abs(x - std::round(x)) < tol;
}

}  // namespace

BoxDomain BoxDomain::make(const Vec3& lower, const Vec3& upper, int nx_intervals) {
  if (nx_intervals < 1) throw DomainError("BoxDomain: need at least one interval");
  for (int d = 0; d < 3; ++d) {
    if (!(upper[d] > lower[d]))
      throw DomainError("BoxDomain: upper corner must exceed lower corner");
  }
  BoxDomain box;
  box.lower_ = lower;
  box.upper_ = upper;
  box.h_ = (upper[0] - lower[0]) / nx_intervals;
  for (int d = 0; d < 3; ++d) {
    const double intervals = (upper[d] - lower[d]) / box.h_;
    if (!near_integer(intervals))
      throw DomainError("BoxDomain: side length not an integer multiple of spacing");
    box.n_[d] = int(std::llround(intervals)) + 1;
  }
  return box;
}

bool BoxDomain::contains_lattice(const BoxDomain& inner) const {
  if (std::abs(inner.h_ - h_) > 1e-12 * h_) return false;
  for (int d = 0; d < 3; ++d) {
    if (inner.lower_[d] < lower_[d] - 1e-12 || inner.upper_[d] > upper_[d] + 1e-12)
      return false;
    if (!near_integer((inner.lower_[d] - lower_[d]) / h_)) return false;
  }
  return true;
}

std::array<int, 3> BoxDomain::offset_of(const BoxDomain& inner) const {
  if (!contains_lattice(inner))
    throw DomainError("BoxDomain: lattices are not aligned subsets");
  std::array<int, 3> off{};
  for (int d = 0; d < 3; ++d)
    off[d] = int(std::llround((inner.lower_[d] - lower_[d]) / h_));
  return off;
}

bool BoxDomain::same_lattice(const BoxDomain& other) const {
  return contains_lattice(other) && other.contains_lattice(*this);
}

BoxDomain build_box(const Vec3& lower, const Vec3& upper, int resolution) {
  if (resolution < 8) throw DomainError("build_box: resolution must be at least 8");
  if (std::abs(upper[2]) > 1e-12)
    throw DomainError("build_box: domain must lie in {x3<0} with top face on x3=0");
  return BoxDomain::make(lower, upper, resolution);
}

BoundaryPartition::BoundaryPartition(const BoxDomain& box) {
  n_ = box.node_counts();
  for (int i = 0; i < box.nodes(0); ++i)
    for (int j = 0; j < box.nodes(1); ++j)
      for (int k = 0; k < box.nodes(2); ++k) {
        if (!box.on_boundary(i, j, k)) continue;
        const std::int64_t lin = box.linear_index(i, j, k);
        all_.push_back(lin);
        if (is_gamma0(i, j, k))
          gamma0_.push_back(lin);
        else
          gamma_.push_back(lin);
      }
}

Face BoundaryPartition::face_of(int i, int j, int k) const {
  // Top-face tie-break first, then a fixed priority so edge nodes get a
  // deterministic owner.
  if (k == n_[2] - 1) return Face::ZHigh;
  if (i == 0) return Face::XLow;
  if (i == n_[0] - 1) return Face::XHigh;
  if (j == 0) return Face::YLow;
  if (j == n_[1] - 1) return Face::YHigh;
  if (k == 0) return Face::ZLow;
  throw DomainError("face_of: node is not on the boundary");
}

}  // namespace calderon
