#include "calderon/trace.hpp"

#include <cmath>

namespace calderon {

namespace {

constexpr double kPi = 3.14159265358979323846;

double trapezoid_2d(int ia, int na, int ib, int nb) {
  auto w = [](int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; };
  return w(ia, na) * w(ib, nb);
}

}  // namespace

FaceFrame face_frame(const BoxDomain& box, Face face) {
  FaceFrame fr;
  fr.face = face;
  switch (face) {
    case Face::XLow:
    case Face::XHigh:
      fr.normal_axis = 0;
      fr.axis_a = 1;
      fr.axis_b = 2;
      break;
    case Face::YLow:
    case Face::YHigh:
      fr.normal_axis = 1;
      fr.axis_a = 0;
      fr.axis_b = 2;
      break;
    default:
      fr.normal_axis = 2;
      fr.axis_a = 0;
      fr.axis_b = 1;
      break;
  }
  const bool high = (face == Face::XHigh || face == Face::YHigh || face == Face::ZHigh);
  fr.fixed_index = high ? box.nodes(fr.normal_axis) - 1 : 0;
  fr.na = box.nodes(fr.axis_a);
  fr.nb = box.nodes(fr.axis_b);
  fr.la = box.upper()[fr.axis_a] - box.lower()[fr.axis_a];
  fr.lb = box.upper()[fr.axis_b] - box.lower()[fr.axis_b];
  return fr;
}

TraceBasis::TraceBasis(const BoxDomain& box, int modes_per_axis)
    : box_(box), modes_per_axis_(modes_per_axis) {
  if (modes_per_axis < 1) throw DomainError("TraceBasis: need at least one mode");
  for (Face face : kAccessibleFaces) {
    const FaceFrame fr = face_frame(box, face);
    const int ma = std::min(modes_per_axis, fr.na - 2);
    const int mb = std::min(modes_per_axis, fr.nb - 2);
    // 1D sine tables, normalized to discrete orthonormality with weight h.
    auto sine_table = [](int m, int n, double length) {
      std::vector<std::vector<double>> t(m + 1);
      for (int p = 1; p <= m; ++p) {
        t[p].resize(n);
        const double norm = std::sqrt(2.0 / length);
        for (int i = 0; i < n; ++i)
          t[p][i] = norm * std::sin(double(p) * kPi * double(i) / double(n - 1));
      }
      return t;
    };
    const auto ta = sine_table(ma, fr.na, fr.la);
    const auto tb = sine_table(mb, fr.nb, fr.lb);
    for (int p = 1; p <= ma; ++p)
      for (int q = 1; q <= mb; ++q) {
        Mode mode;
        mode.face = face;
        mode.p = p;
        mode.q = q;
        mode.lambda = std::pow(p * kPi / fr.la, 2) + std::pow(q * kPi / fr.lb, 2);
        modes_.push_back(mode);
        std::vector<std::pair<std::int64_t, double>> nodes;
        nodes.reserve(std::size_t(fr.na - 2) * (fr.nb - 2));
        std::array<int, 3> idx{};
        idx[fr.normal_axis] = fr.fixed_index;
        for (int ia = 1; ia < fr.na - 1; ++ia)
          for (int ib = 1; ib < fr.nb - 1; ++ib) {
            idx[fr.axis_a] = ia;
            idx[fr.axis_b] = ib;
            nodes.emplace_back(box.linear_index(idx[0], idx[1], idx[2]),
                               ta[p][ia] * tb[q][ib]);
          }
        support_.push_back(std::move(nodes));
      }
  }
}

Eigen::VectorXcd TraceBasis::project_nodal(const std::vector<Complex>& nodal) const {
  Eigen::VectorXcd c(size());
  const double h2 = box_.spacing() * box_.spacing();
  for (int k = 0; k < size(); ++k) {
    Complex acc(0, 0);
    for (const auto& [lin, psi] : support_[k]) acc += nodal[lin] * psi;
    c[k] = acc * h2;
  }
  return c;
}

Eigen::VectorXcd TraceBasis::project(const GridField& volume_field) const {
  if (!volume_field.box().same_lattice(box_))
    throw DomainError("TraceBasis::project: lattice mismatch");
  return project_nodal(volume_field.values());
}

std::vector<Complex> TraceBasis::synthesize(const Eigen::VectorXcd& coeffs) const {
  if (coeffs.size() != size())
    throw DomainError("TraceBasis::synthesize: coefficient count mismatch");
  std::vector<Complex> nodal(box_.total_nodes(), Complex(0, 0));
  for (int k = 0; k < size(); ++k)
    for (const auto& [lin, psi] : support_[k]) nodal[lin] += coeffs[k] * psi;
  return nodal;
}

double TraceBasis::boundary_l2_squared(const std::vector<Complex>& nodal) const {
  const double h2 = box_.spacing() * box_.spacing();
  double total = 0.0;
  for (Face face : kAccessibleFaces) {
    const FaceFrame fr = face_frame(box_, face);
    std::array<int, 3> idx{};
    idx[fr.normal_axis] = fr.fixed_index;
    for (int ia = 0; ia < fr.na; ++ia)
      for (int ib = 0; ib < fr.nb; ++ib) {
        idx[fr.axis_a] = ia;
        idx[fr.axis_b] = ib;
        const std::int64_t lin = box_.linear_index(idx[0], idx[1], idx[2]);
        total += trapezoid_2d(ia, fr.na, ib, fr.nb) * std::norm(nodal[lin]);
      }
  }
  return total * h2;
}

double TraceBasis::boundary_l2_squared(const GridField& volume_field) const {
  return boundary_l2_squared(volume_field.values());
}

double TraceBasis::projection_energy_loss(const GridField& volume_field) const {
  const double full = boundary_l2_squared(volume_field);
  if (full == 0.0) return 0.0;
  const Eigen::VectorXcd c = project(volume_field);
  const double captured = c.squaredNorm();
  return std::max(0.0, 1.0 - captured / full);
}

Eigen::VectorXd TraceBasis::sobolev_weights(double order) const {
  Eigen::VectorXd w(size());
  for (int k = 0; k < size(); ++k) w[k] = std::pow(1.0 + modes_[k].lambda, order);
  return w;
}

BoundaryTrace BoundaryTrace::sample(const BoxDomain& box,
                                    const std::function<Complex(const Vec3&)>& f) {
  BoundaryTrace out(box);
  for (int i = 0; i < box.nodes(0); ++i)
    for (int j = 0; j < box.nodes(1); ++j)
      for (int k = 0; k < box.nodes(2); ++k)
        if (box.on_boundary(i, j, k)) out.at(i, j, k) = f(box.node(i, j, k));
  return out;
}

BoundaryTrace BoundaryTrace::from_coefficients(const TraceBasis& basis,
                                               const Eigen::VectorXcd& coeffs) {
  BoundaryTrace out(basis.box());
  out.nodal_ = basis.synthesize(coeffs);
  return out;
}

BoundaryTrace BoundaryTrace::restrict_field(const GridField& u) {
  BoundaryTrace out(u.box());
  const auto& box = u.box();
  for (int i = 0; i < box.nodes(0); ++i)
    for (int j = 0; j < box.nodes(1); ++j)
      for (int k = 0; k < box.nodes(2); ++k)
        if (box.on_boundary(i, j, k)) out.at(i, j, k) = u.at(i, j, k);
  return out;
}

double BoundaryTrace::max_abs() const {
  double m = 0.0;
  for (const auto& v : nodal_) m = std::max(m, std::abs(v));
  return m;
}

double BoundaryTrace::gamma0_max_abs() const {
  double m = 0.0;
  const int kz = box_.nodes(2) - 1;
  for (int i = 0; i < box_.nodes(0); ++i)
    for (int j = 0; j < box_.nodes(1); ++j)
      m = std::max(m, std::abs(at(i, j, kz)));
  return m;
}

bool BoundaryTrace::supported_in_gamma(double rel_tol) const {
  const double scale = max_abs();
  return gamma0_max_abs() <= rel_tol * std::max(scale, 1e-300);
}

double trace_norm(const Eigen::VectorXcd& coeffs, const TraceBasis& basis,
                  double order) {
  const Eigen::VectorXd w = basis.sobolev_weights(order);
  double s = 0.0;
  for (int k = 0; k < coeffs.size(); ++k) s += w[k] * std::norm(coeffs[k]);
  return std::sqrt(s);
}

double trace_norm(const BoundaryTrace& f, const TraceBasis& basis, double order) {
  if (!f.supported_in_gamma())
    throw TraceSupportError("trace_norm: data leaks onto the inaccessible face");
  return trace_norm(basis.project_nodal(f.nodal()), basis, order);
}

}  // namespace calderon
