#pragma once

#include <cstdint>

#include "calderon/grid_field.hpp"

namespace calderon {

/// Smooth compactly supported bump: amplitude * exp(1 - 1/(1 - (r/radius)^2))
/// inside the ball |x - center| < radius, exactly zero outside.
struct Bump {
  Vec3 center = Vec3::Zero();
  double radius = 0.25;
  double amplitude = 1.0;

  double operator()(const Vec3& x) const;
};

GridField sample_bump(const BoxDomain& box, const Bump& bump);

/// Sum of a few random interior bumps; deterministic in the seed. Amplitudes
/// are scaled so the field's sup norm does not exceed `max_amplitude`.
GridField random_smooth_potential(const BoxDomain& box, std::uint64_t seed,
                                  double max_amplitude, int bumps = 3,
                                  double margin = 0.2);

/// Real-valued sample of an analytic expression.
GridField sample_real(const BoxDomain& box,
                      const std::function<double(const Vec3&)>& f);

}  // namespace calderon
