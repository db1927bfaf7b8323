#pragma once

#include <memory>
#include <optional>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "calderon/trace.hpp"

namespace calderon {

/// Matrix realization of the partial Dirichlet-to-Neumann map in the
/// accessible-face sine basis: trace coefficients -> flux coefficients.
struct PartialDtN {
  Eigen::MatrixXcd matrix;
  double h = 0.0;
  std::uint64_t potential_fingerprint = 0;
  int modes_per_axis = 0;

  double symmetry_defect() const;
};

/// Binary serialization: magic "DTN1", uint64 basis size, double h,
/// uint64 fingerprint, then row-major little-endian complex doubles.
void save_dtn(const PartialDtN& dtn, const std::string& path);
PartialDtN load_dtn(const std::string& path);

struct EigenvalueEstimate {
  double lambda_min = 0.0;  // smallest-magnitude eigenvalue of -Lap + q
  bool near_singular = false;
  int iterations = 0;
};

/// Symmetric second-order discretization of -div(c grad u) + q u on the box
/// lattice, assembled in energy form: edge differences with transverse
/// trapezoid weights plus a diagonal q mass. Interior rows reproduce the
/// 7-point stencil exactly; boundary rows carry the discrete weak flux.
class DirichletSolver {
 public:
  enum class Kind { Schrodinger, Conductivity };

  /// Schrodinger form (Lap - q)u = 0. q must be real-valued.
  static DirichletSolver schrodinger(const GridField& q);
  /// Conservative form div(gamma grad u) = 0 with gamma >= positivity floor.
  static DirichletSolver conductivity(const GridField& gamma);

  const BoxDomain& box() const { return box_; }
  std::uint64_t coefficient_fingerprint() const { return fingerprint_; }

  /// Smallest-magnitude eigenvalue of the operator by shift-invert power
  /// iteration (200 iteration cap).
  EigenvalueEstimate eigenvalue_estimate() const;

  /// Solves the Dirichlet problem with the given nodal boundary data. When
  /// homogeneous_on_gamma0 is set the data must vanish on the top face.
  GridField solve(const BoundaryTrace& f, bool homogeneous_on_gamma0 = false) const;

  /// Relative residual of the interior equations for a solved field.
  double interior_residual(const GridField& u, const BoundaryTrace& f) const;

  /// Weak-form flux functional: coefficients of the conormal derivative on
  /// the accessible faces against the trace basis, for a solution field.
  Eigen::VectorXcd flux_coefficients(const GridField& u, const TraceBasis& basis) const;

  /// Pointwise conormal flux density at a boundary node (for diagnostics).
  double flux_density(const GridField& u, int i, int j, int k) const;

  /// Energy bilinear form a(u,v) = sum over edges + q mass, conjugating v.
  Complex energy_form(const GridField& u, const GridField& v) const;

  /// DtN matrix assembly: one column per trace basis mode.
  PartialDtN assemble_dtn(const TraceBasis& basis) const;

 private:
  DirichletSolver() = default;
  void assemble(const GridField& coeff, Kind kind);
  void factorize() const;
  Eigen::VectorXd solve_real(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd solve_real_block(const Eigen::MatrixXd& rhs) const;

  BoxDomain box_;
  Kind kind_ = Kind::Schrodinger;
  std::uint64_t fingerprint_ = 0;
  double coeff_inf_ = 0.0;
  Eigen::SparseMatrix<double> full_;    // energy matrix over all nodes
  Eigen::SparseMatrix<double> a_ii_, a_ib_, a_bi_, a_bb_;
  std::vector<std::int64_t> interior_, boundary_;
  std::vector<std::int64_t> node_to_interior_, node_to_boundary_;
  bool use_direct_ = true;
  using Pcg = Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                                       Eigen::Lower | Eigen::Upper,
                                       Eigen::IncompleteCholesky<double>>;
  mutable std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
  mutable std::shared_ptr<Pcg> pcg_;
  mutable bool factored_ = false;
};

/// Convenience wrappers mirroring the operation names used elsewhere.
GridField solve_dirichlet(const GridField& q, const BoundaryTrace& f,
                          bool homogeneous_on_gamma0 = false);
EigenvalueEstimate check_eigenvalue(const GridField& q);
PartialDtN assemble_dtn(const GridField& q, const TraceBasis& basis);
GridField solve_conductivity(const GridField& gamma, const BoundaryTrace& f);
PartialDtN assemble_dtn_gamma(const GridField& gamma, const TraceBasis& basis);

}  // namespace calderon
