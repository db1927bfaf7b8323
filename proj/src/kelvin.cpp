#include "calderon/kelvin.hpp"

#include <cmath>
#include <random>

#include "calderon/norms.hpp"

namespace calderon {

std::vector<Vec3> map_points(const KelvinMap& map, const std::vector<Vec3>& points,
                             MapDirection) {
  // Forward and inverse share the inversion formula (the map is an involution).
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(map.apply(p));
  return out;
}

namespace {

void lagrange_cubic_weights(double s, double w[4]) {
  // Lagrange basis on nodes {0,1,2,3} evaluated at s.
  w[0] = -(s - 1) * (s - 2) * (s - 3) / 6.0;
  w[1] = s * (s - 2) * (s - 3) / 2.0;
  w[2] = -s * (s - 1) * (s - 3) / 2.0;
  w[3] = s * (s - 1) * (s - 2) / 6.0;
}

}  // namespace

Complex interpolate_tricubic(const GridField& f, const Vec3& p) {
  const BoxDomain& box = f.box();
  const double h = box.spacing();
  int iw[3];
  double w[3][4];
  for (int d = 0; d < 3; ++d) {
    const int n = box.nodes(d);
    if (n < 4) throw InterpolationError("interpolate_tricubic: lattice too small");
    const double t = (p[d] - box.lower()[d]) / h;
    if (t < -1e-9 || t > n - 1 + 1e-9)
      throw InterpolationError("interpolate_tricubic: point outside the lattice hull");
    int base = int(std::floor(t)) - 1;
    base = std::max(0, std::min(base, n - 4));
    iw[d] = base;
    lagrange_cubic_weights(t - base, w[d]);
  }
  Complex acc(0, 0);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        acc += w[0][a] * w[1][b] * w[2][c] *
               f.at(iw[0] + a, iw[1] + b, iw[2] + c);
  return acc;
}

GridField kelvin_transform(const KelvinMap& map, const GridField& source,
                           const BoxDomain& target, double power,
                           const std::function<Vec3(const Vec3&)>& target_to_physical,
                           const std::function<Vec3(const Vec3&)>& source_from_physical) {
  GridField out(target);
  for (int i = 0; i < target.nodes(0); ++i)
    for (int j = 0; j < target.nodes(1); ++j)
      for (int k = 0; k < target.nodes(2); ++k) {
        const Vec3 p_phys = target_to_physical(target.node(i, j, k));
        const Vec3 pre = map.apply(p_phys);
        const Vec3 p_src = source_from_physical(pre);
        out.at(i, j, k) =
            map.weight(p_phys, power) * interpolate_tricubic(source, p_src);
      }
  return out;
}

namespace {
const std::function<Vec3(const Vec3&)> kIdentityFrame = [](const Vec3& p) {
  return p;
};
}

GridField transform_field(const KelvinMap& map, const GridField& u,
                          const BoxDomain& target) {
  return kelvin_transform(map, u, target, 1.0, kIdentityFrame, kIdentityFrame);
}

GridField transform_potential(const KelvinMap& map, const GridField& q,
                              const BoxDomain& target) {
  return kelvin_transform(map, q, target, 4.0, kIdentityFrame, kIdentityFrame);
}

DtnComparisonReport compare_dtn_norms(const KelvinMap& map,
                                      const PartialDtN& plane_dtn1,
                                      const PartialDtN& plane_dtn2,
                                      const GridField& q1_plane,
                                      const GridField& q2_plane,
                                      const TraceBasis& basis, int pairs,
                                      std::uint64_t seed) {
  if (!q1_plane.box().same_lattice(q2_plane.box()))
    throw DomainError("compare_dtn_norms: potential lattice mismatch");
  const BoxDomain& zbox = q1_plane.box();
  const PlaneFrame frame{map.ball_radius};
  const Eigen::MatrixXcd diff = plane_dtn1.matrix - plane_dtn2.matrix;

  DtnComparisonReport report;
  report.plane_operator_norm = operator_norm(diff, basis);

  // Sphere-side quadrature lattice: bounding box of the image domain.
  Vec3 xlo = Vec3::Constant(std::numeric_limits<double>::max());
  Vec3 xhi = Vec3::Constant(std::numeric_limits<double>::lowest());
  for (int i = 0; i < zbox.nodes(0); ++i)
    for (int j = 0; j < zbox.nodes(1); ++j)
      for (int k = 0; k < zbox.nodes(2); ++k) {
        const Vec3 x = frame.to_sphere_side(map, zbox.node(i, j, k));
        xlo = xlo.cwiseMin(x);
        xhi = xhi.cwiseMax(x);
      }
  // Quadrature lattice over the bounding box; spacings differ per axis.
  const int res = zbox.nodes(0) - 1;
  const Vec3 xspan = xhi - xlo;
  const double hx = xspan[0] / res, hy = xspan[1] / res, hz = xspan[2] / res;

  auto physical_to_plane = [&](const Vec3& x) {
    return frame.from_physical(map.apply(x));
  };

  // Conformal pullbacks used by the two-geometry pairing oracle.
  GridField q0_plane(zbox);
  for (std::size_t n = 0; n < q0_plane.values().size(); ++n)
    q0_plane.values()[n] = q1_plane.values()[n] - q2_plane.values()[n];

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::VectorXd lam = basis.sobolev_weights(1.0);

  const DirichletSolver solver1 = DirichletSolver::schrodinger(q1_plane);
  const DirichletSolver solver2 = DirichletSolver::schrodinger(q2_plane);

  const double wpow = 1.0;  // n - 2
  double sphere_sup = 0.0;
  for (int s = 0; s < pairs; ++s) {
    Eigen::VectorXcd fc(basis.size()), gc(basis.size());
    for (int k = 0; k < basis.size(); ++k) {
      fc[k] = Complex(gauss(rng), gauss(rng)) / lam[k];
      gc[k] = Complex(gauss(rng), gauss(rng)) / lam[k];
    }
    const Complex pairing = gc.dot(diff * fc);

    // Independent sphere-side evaluation of the same pairing: solve on the
    // plane side, pull the solutions and the potential difference back, and
    // integrate over the curved image domain. The integrand is compactly
    // supported away from the image boundary for interior-bump potentials.
    const BoundaryTrace ftr = BoundaryTrace::from_coefficients(basis, fc);
    const BoundaryTrace gtr = BoundaryTrace::from_coefficients(basis, gc);
    const GridField u1 = solver1.solve(ftr, true);
    const GridField u2 = solver2.solve(gtr, true);

    Complex sphere_pairing(0, 0);
    for (int i = 0; i <= res; ++i)
      for (int j = 0; j <= res; ++j)
        for (int k = 0; k <= res; ++k) {
          const Vec3 x(xlo[0] + i * hx, xlo[1] + j * hy, xlo[2] + k * hz);
          Vec3 z;
          try {
            z = physical_to_plane(x);
          } catch (const DomainError&) {
            continue;
          }
          bool inside = true;
          for (int d = 0; d < 3; ++d)
            if (z[d] < zbox.lower()[d] || z[d] > zbox.upper()[d]) inside = false;
          if (!inside) continue;
          const double wq = map.weight(x, 4.0);
          const double wu = map.weight(x, wpow);
          const Complex q0x = wq * interpolate_tricubic(q0_plane, z);
          if (std::abs(q0x) == 0.0) continue;
          const Complex u1x = wu * interpolate_tricubic(u1, z);
          const Complex u2x = wu * interpolate_tricubic(u2, z);
          sphere_pairing += q0x * u1x * std::conj(u2x);
        }
    sphere_pairing *= hx * hy * hz;

    const double denom = std::max(std::abs(pairing), 1e-300);
    report.pairing_rel_error.push_back(std::abs(sphere_pairing - pairing) / denom);

    // Sphere-side trace norms: transport the data with the conformal weight
    // and measure in the same sine realization.
    auto weighted_trace = [&](const BoundaryTrace& tr) {
      BoundaryTrace out(zbox);
      for (int i = 0; i < zbox.nodes(0); ++i)
        for (int j = 0; j < zbox.nodes(1); ++j)
          for (int k = 0; k < zbox.nodes(2); ++k) {
            if (!zbox.on_boundary(i, j, k)) continue;
            const Vec3 y = frame.to_physical(zbox.node(i, j, k));
            // f = (|y|/2R)^{n-2} f_tilde on the sphere side.
            out.at(i, j, k) = tr.at(i, j, k) / map.weight(y, wpow);
          }
      return out;
    };
    const double nf_plane = trace_norm(fc, basis, 0.5);
    const double ng_plane = trace_norm(gc, basis, 0.5);
    const double nf_sphere =
        trace_norm(basis.project_nodal(weighted_trace(ftr).nodal()), basis, 0.5);
    const double ng_sphere =
        trace_norm(basis.project_nodal(weighted_trace(gtr).nodal()), basis, 0.5);

    const double q_plane = std::abs(pairing) / (nf_plane * ng_plane);
    const double q_sphere = std::abs(pairing) / (nf_sphere * ng_sphere);
    sphere_sup = std::max(sphere_sup, q_sphere);
    report.quotient_ratio.push_back(q_sphere / std::max(q_plane, 1e-300));
  }
  report.sphere_operator_norm = sphere_sup;
  report.ratio = report.plane_operator_norm > 0
                     ? sphere_sup / report.plane_operator_norm
                     : 0.0;
  return report;
}

}  // namespace calderon
