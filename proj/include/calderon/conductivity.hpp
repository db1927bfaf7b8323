#pragma once

#include "calderon/forward.hpp"
#include "calderon/norms.hpp"

namespace calderon {

/// Schrodinger potential induced by a conductivity: q = Lap(sqrt(gamma)) / sqrt(gamma),
/// with second-order one-sided Laplacian stencils on the boundary.
GridField gamma_to_q(const GridField& gamma);

/// Boundary data of a conductivity on the accessible faces.
struct BoundaryCoefficientTraces {
  std::vector<Complex> value;             // gamma at boundary nodes (full lattice)
  std::vector<Complex> normal_derivative; // outward d(gamma)/dnu, one-sided 2nd order
};

BoundaryCoefficientTraces extract_boundary_traces(const GridField& gamma);

/// Matrix of multiplication by a boundary function in the trace basis
/// (block diagonal over faces).
Eigen::MatrixXcd multiplication_matrix(const TraceBasis& basis,
                                       const std::vector<Complex>& nodal);

/// DtN transfer between the conductivity and Schrodinger forms:
/// L_q = G[gamma^{-1/2}] L_gamma G[gamma^{-1/2}] + G[(1/2) gamma^{-1} d_nu gamma].
PartialDtN relate_dtn(const PartialDtN& l_gamma, const GridField& gamma,
                      const TraceBasis& basis);

/// A matched conductivity pair with the derived potentials and the record of
/// boundary agreement (values and normal derivatives on the accessible faces).
struct ConductivityPair {
  GridField gamma1, gamma2;
  GridField q1, q2;
  double boundary_value_mismatch = 0.0;
  double boundary_derivative_mismatch = 0.0;

  bool boundary_agreement(double tol = 1e-10) const {
    return boundary_value_mismatch <= tol && boundary_derivative_mismatch <= tol;
  }
};

ConductivityPair make_conductivity_pair(const GridField& gamma1,
                                        const GridField& gamma2);

/// Operator norms of the two DtN differences plus the endpoint sup-norm data
/// used for the empirical power-law comparison.
struct NormTransferReport {
  double norm_q_diff = 0.0;      // ||L_{q1} - L_{q2}||_*
  double norm_gamma_diff = 0.0;  // ||L_{gamma1} - L_{gamma2}||_*
  double ratio = 0.0;            // q / gamma
  double gamma_sup_diff = 0.0;   // ||gamma1 - gamma2||_inf
  double q_sup_diff = 0.0;       // ||q1 - q2||_inf
};

/// Refuses (throws DomainError) when the boundary agreement needed by the
/// reduction's cancellation does not hold.
NormTransferReport norm_transfer_check(const ConductivityPair& pair,
                                       const TraceBasis& basis);

}  // namespace calderon
