#include "calderon/potentials.hpp"

#include <cmath>
#include <random>

namespace calderon {

double Bump::operator()(const Vec3& x) const {
  const double r2 = (x - center).squaredNorm() / (radius * radius);
  if (r2 >= 1.0) return 0.0;
  return amplitude * std::exp(1.0 - 1.0 / (1.0 - r2));
}

GridField sample_bump(const BoxDomain& box, const Bump& bump) {
  return GridField::sample(box, [&](const Vec3& x) { return Complex(bump(x), 0.0); });
}

GridField random_smooth_potential(const BoxDomain& box, std::uint64_t seed,
                                  double max_amplitude, int bumps, double margin) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Bump> parts;
  const Vec3 span = box.upper() - box.lower();
  for (int b = 0; b < bumps; ++b) {
    Bump bump;
    for (int d = 0; d < 3; ++d)
      bump.center[d] = box.lower()[d] + span[d] * (margin + (1 - 2 * margin) * unit(rng));
    bump.radius = (0.08 + 0.12 * unit(rng)) * span.minCoeff();
    bump.amplitude = 2.0 * unit(rng) - 1.0;
    parts.push_back(bump);
  }
  GridField out = GridField::sample(box, [&](const Vec3& x) {
    double v = 0.0;
    for (const auto& p : parts) v += p(x);
    return Complex(v, 0.0);
  });
  const double m = out.max_abs();
  if (m > 0) {
    const double scale = max_amplitude / m;
    for (auto& v : out.values()) v *= scale;
  }
  return out;
}

GridField sample_real(const BoxDomain& box,
                      const std::function<double(const Vec3&)>& f) {
  return GridField::sample(box, [&](const Vec3& x) { return Complex(f(x), 0.0); });
}

}  // namespace calderon
