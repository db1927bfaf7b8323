#include "calderon/conductivity.hpp"

#include <cmath>

namespace calderon {

namespace {

/// Second-order second derivative along one axis, one-sided at the ends.
double second_derivative(const std::function<double(int)>& f, int i, int n,
                         double h) {
  const double h2 = h * h;
  if (i == 0) return (2 * f(0) - 5 * f(1) + 4 * f(2) - f(3)) / h2;
  if (i == n - 1)
    return (2 * f(n - 1) - 5 * f(n - 2) + 4 * f(n - 3) - f(n - 4)) / h2;
  return (f(i + 1) - 2 * f(i) + f(i - 1)) / h2;
}

/// Second-order first derivative, one-sided at the ends.
double first_derivative(const std::function<double(int)>& f, int i, int n, double h) {
  if (i == 0) return (-3 * f(0) + 4 * f(1) - f(2)) / (2 * h);
  if (i == n - 1) return (3 * f(n - 1) - 4 * f(n - 2) + f(n - 3)) / (2 * h);
  return (f(i + 1) - f(i - 1)) / (2 * h);
}

}  // namespace

GridField gamma_to_q(const GridField& gamma) {
  double min_g = std::numeric_limits<double>::max();
  for (const auto& v : gamma.values()) min_g = std::min(min_g, v.real());
  if (!(min_g > 0.0))
    throw NonpositiveConductivity("gamma_to_q: gamma must be strictly positive");

  const BoxDomain& box = gamma.box();
  const auto n = box.node_counts();
  const double h = box.spacing();

  GridField root(box);
  for (std::size_t idx = 0; idx < root.values().size(); ++idx)
    root.values()[idx] = std::sqrt(gamma.values()[idx].real());

  GridField q(box);
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < n[2]; ++k) {
        const double lap =
            second_derivative([&](int t) { return root.at(t, j, k).real(); }, i,
                              n[0], h) +
            second_derivative([&](int t) { return root.at(i, t, k).real(); }, j,
                              n[1], h) +
            second_derivative([&](int t) { return root.at(i, j, t).real(); }, k,
                              n[2], h);
        q.at(i, j, k) = lap / root.at(i, j, k).real();
      }
  return q;
}

BoundaryCoefficientTraces extract_boundary_traces(const GridField& gamma) {
  const BoxDomain& box = gamma.box();
  const auto n = box.node_counts();
  const double h = box.spacing();
  BoundaryCoefficientTraces out;
  out.value.assign(box.total_nodes(), Complex(0, 0));
  out.normal_derivative.assign(box.total_nodes(), Complex(0, 0));
  const BoundaryPartition part(box);
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < n[2]; ++k) {
        if (!box.on_boundary(i, j, k)) continue;
        const std::int64_t lin = box.linear_index(i, j, k);
        out.value[lin] = gamma.at(i, j, k);
        const Face face = part.face_of(i, j, k);
        double d = 0.0;
        switch (face) {
          case Face::XLow:
            d = -first_derivative([&](int t) { return gamma.at(t, j, k).real(); },
                                  0, n[0], h);
            break;
          case Face::XHigh:
            d = first_derivative([&](int t) { return gamma.at(t, j, k).real(); },
                                 n[0] - 1, n[0], h);
            break;
          case Face::YLow:
            d = -first_derivative([&](int t) { return gamma.at(i, t, k).real(); },
                                  0, n[1], h);
            break;
          case Face::YHigh:
            d = first_derivative([&](int t) { return gamma.at(i, t, k).real(); },
                                 n[1] - 1, n[1], h);
            break;
          case Face::ZLow:
            d = -first_derivative([&](int t) { return gamma.at(i, j, t).real(); },
                                  0, n[2], h);
            break;
          case Face::ZHigh:
            d = first_derivative([&](int t) { return gamma.at(i, j, t).real(); },
                                 n[2] - 1, n[2], h);
            break;
        }
        out.normal_derivative[lin] = d;
      }
  return out;
}

Eigen::MatrixXcd multiplication_matrix(const TraceBasis& basis,
                                       const std::vector<Complex>& nodal) {
  const double h2 = basis.box().spacing() * basis.box().spacing();
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
  for (int a = 0; a < basis.size(); ++a) {
    const auto& sa = basis.mode_support(a);
    for (int b = a; b < basis.size(); ++b) {
      if (basis.mode(a).face != basis.mode(b).face) continue;
      const auto& sb = basis.mode_support(b);
      // Face-interior node lists of one face share ordering.
      Complex acc(0, 0);
      for (std::size_t t = 0; t < sa.size(); ++t)
        acc += nodal[sa[t].first] * sa[t].second * sb[t].second;
      g(a, b) = acc * h2;
      g(b, a) = g(a, b);
    }
  }
  return g;
}

PartialDtN relate_dtn(const PartialDtN& l_gamma, const GridField& gamma,
                      const TraceBasis& basis) {
  if (l_gamma.matrix.rows() != basis.size())
    throw DomainError("relate_dtn: matrix does not match the basis");
  const BoundaryCoefficientTraces traces = extract_boundary_traces(gamma);
  std::vector<Complex> inv_sqrt(traces.value.size(), Complex(0, 0));
  std::vector<Complex> shift(traces.value.size(), Complex(0, 0));
  for (std::size_t idx = 0; idx < traces.value.size(); ++idx) {
    const double v = traces.value[idx].real();
    if (v > 0.0) {
      inv_sqrt[idx] = 1.0 / std::sqrt(v);
      shift[idx] = 0.5 * traces.normal_derivative[idx].real() / v;
    }
  }
  const Eigen::MatrixXcd g_inv_sqrt = multiplication_matrix(basis, inv_sqrt);
  const Eigen::MatrixXcd g_shift = multiplication_matrix(basis, shift);

  PartialDtN out;
  out.matrix = g_inv_sqrt * l_gamma.matrix * g_inv_sqrt + g_shift;
  out.h = l_gamma.h;
  out.potential_fingerprint = l_gamma.potential_fingerprint;
  out.modes_per_axis = l_gamma.modes_per_axis;
  return out;
}

ConductivityPair make_conductivity_pair(const GridField& gamma1,
                                        const GridField& gamma2) {
  if (!gamma1.box().same_lattice(gamma2.box()))
    throw DomainError("make_conductivity_pair: lattice mismatch");
  ConductivityPair pair;
  pair.gamma1 = gamma1;
  pair.gamma2 = gamma2;
  pair.q1 = gamma_to_q(gamma1);
  pair.q2 = gamma_to_q(gamma2);

  const BoundaryCoefficientTraces t1 = extract_boundary_traces(gamma1);
  const BoundaryCoefficientTraces t2 = extract_boundary_traces(gamma2);
  const BoxDomain& box = gamma1.box();
  const int kz = box.nodes(2) - 1;
  double value_mismatch = 0.0, derivative_mismatch = 0.0;
  for (int i = 0; i < box.nodes(0); ++i)
    for (int j = 0; j < box.nodes(1); ++j)
      for (int k = 0; k < box.nodes(2); ++k) {
        if (!box.on_boundary(i, j, k)) continue;
        if (k == kz) continue;  // agreement is required on the accessible part
        const std::int64_t lin = box.linear_index(i, j, k);
        value_mismatch =
            std::max(value_mismatch, std::abs(t1.value[lin] - t2.value[lin]));
        derivative_mismatch =
            std::max(derivative_mismatch,
                     std::abs(t1.normal_derivative[lin] - t2.normal_derivative[lin]));
      }
  pair.boundary_value_mismatch = value_mismatch;
  pair.boundary_derivative_mismatch = derivative_mismatch;
  return pair;
}

NormTransferReport norm_transfer_check(const ConductivityPair& pair,
                                       const TraceBasis& basis) {
  if (!pair.boundary_agreement())
    throw DomainError(
        "norm_transfer_check: boundary traces of the conductivities disagree; "
        "the reduction's cancellation requires matching data on the accessible part");

  NormTransferReport report;
  const PartialDtN lq1 = assemble_dtn(pair.q1, basis);
  const PartialDtN lq2 = assemble_dtn(pair.q2, basis);
  const PartialDtN lg1 = assemble_dtn_gamma(pair.gamma1, basis);
  const PartialDtN lg2 = assemble_dtn_gamma(pair.gamma2, basis);
  report.norm_q_diff = operator_norm(lq1.matrix - lq2.matrix, basis);
  report.norm_gamma_diff = operator_norm(lg1.matrix - lg2.matrix, basis);
  report.ratio = report.norm_gamma_diff > 0
                     ? report.norm_q_diff / report.norm_gamma_diff
                     : 0.0;

  double gsup = 0.0, qsup = 0.0;
  for (std::size_t idx = 0; idx < pair.gamma1.values().size(); ++idx) {
    gsup = std::max(gsup,
                    std::abs(pair.gamma1.values()[idx] - pair.gamma2.values()[idx]));
    qsup = std::max(qsup, std::abs(pair.q1.values()[idx] - pair.q2.values()[idx]));
  }
  report.gamma_sup_diff = gsup;
  report.q_sup_diff = qsup;
  return report;
}

}  // namespace calderon
