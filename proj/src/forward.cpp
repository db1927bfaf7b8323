#include "calderon/forward.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <Eigen/IterativeLinearSolvers>

namespace calderon {

namespace {

// Direct factorization is affordable up to this many lattice intervals per
// axis; beyond it the preconditioned CG path keeps memory bounded.
constexpr int kDirectResolutionCap = 48;

double trapezoid_1d(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

Eigen::VectorXcd sparse_times_complex(const Eigen::SparseMatrix<double>& a,
                                      const Eigen::VectorXcd& x) {
  const Eigen::VectorXd re = a * x.real();
  const Eigen::VectorXd im = a * x.imag();
  return re + Complex(0, 1) * im;
}

}  // namespace

double PartialDtN::symmetry_defect() const {
  const double scale = matrix.norm();
  if (scale == 0.0) return 0.0;
  return (matrix - matrix.transpose()).norm() / scale;
}

void save_dtn(const PartialDtN& dtn, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("save_dtn: cannot open " + path);
  os.write("DTN1", 4);
  const std::uint64_t n = std::uint64_t(dtn.matrix.rows());
  os.write(reinterpret_cast<const char*>(&n), 8);
  os.write(reinterpret_cast<const char*>(&dtn.h), 8);
  os.write(reinterpret_cast<const char*>(&dtn.potential_fingerprint), 8);
  for (Eigen::Index r = 0; r < dtn.matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < dtn.matrix.cols(); ++c) {
      const Complex v = dtn.matrix(r, c);
      os.write(reinterpret_cast<const char*>(&v), sizeof(Complex));
    }
  if (!os) throw Error("save_dtn: write failed for " + path);
}

PartialDtN load_dtn(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("load_dtn: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "DTN1", 4) != 0)
    throw Error("load_dtn: bad magic in " + path);
  std::uint64_t n = 0;
  PartialDtN dtn;
  is.read(reinterpret_cast<char*>(&n), 8);
  is.read(reinterpret_cast<char*>(&dtn.h), 8);
  is.read(reinterpret_cast<char*>(&dtn.potential_fingerprint), 8);
  dtn.matrix.resize(Eigen::Index(n), Eigen::Index(n));
  for (Eigen::Index r = 0; r < dtn.matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < dtn.matrix.cols(); ++c) {
      Complex v;
      is.read(reinterpret_cast<char*>(&v), sizeof(Complex));
      dtn.matrix(r, c) = v;
    }
  if (!is) throw Error("load_dtn: truncated payload in " + path);
  return dtn;
}

DirichletSolver DirichletSolver::schrodinger(const GridField& q) {
  if (!q.is_real(1e-14 * std::max(1.0, q.max_abs())))
    throw DomainError("DirichletSolver: potential must be real-valued");
  DirichletSolver s;
  s.assemble(q, Kind::Schrodinger);
  return s;
}

DirichletSolver DirichletSolver::conductivity(const GridField& gamma) {
  double min_g = std::numeric_limits<double>::max();
  for (const auto& v : gamma.values()) min_g = std::min(min_g, v.real());
  if (!(min_g > 0.0))
    throw NonpositiveConductivity("DirichletSolver: gamma must be strictly positive");
  DirichletSolver s;
  s.assemble(gamma, Kind::Conductivity);
  return s;
}

void DirichletSolver::assemble(const GridField& coeff, Kind kind) {
  box_ = coeff.box();
  kind_ = kind;
  fingerprint_ = fingerprint(coeff);
  coeff_inf_ = coeff.max_abs();
  const auto n = box_.node_counts();
  const double h = box_.spacing();
  const double h3 = h * h * h;
  const std::int64_t total = box_.total_nodes();

  node_to_interior_.assign(total, -1);
  node_to_boundary_.assign(total, -1);
  for (int i = 0; i < n[0]; ++i)
    for (int j = 0; j < n[1]; ++j)
      for (int k = 0; k < n[2]; ++k) {
        const std::int64_t lin = box_.linear_index(i, j, k);
        if (box_.on_boundary(i, j, k)) {
          node_to_boundary_[lin] = std::int64_t(boundary_.size());
          boundary_.push_back(lin);
        } else {
          node_to_interior_[lin] = std::int64_t(interior_.size());
          interior_.push_back(lin);
        }
      }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(total) * 8);

  auto edge_coeff = [&](std::int64_t a, std::int64_t b) {
    if (kind_ == Kind::Schrodinger) return 1.0;
    return 0.5 * (coeff[a].real() + coeff[b].real());
  };

  // Edge terms: for each lattice edge along axis d, weight
  // c_edge * (transverse trapezoid weights) * h.
  for (int d = 0; d < 3; ++d) {
    const int ta = (d + 1) % 3, tb = (d + 2) % 3;
    std::array<int, 3> idx{};
    for (idx[0] = 0; idx[0] < n[0]; ++idx[0])
      for (idx[1] = 0; idx[1] < n[1]; ++idx[1])
        for (idx[2] = 0; idx[2] < n[2]; ++idx[2]) {
          if (idx[d] + 1 >= n[d]) continue;
          auto jdx = idx;
          ++jdx[d];
          const std::int64_t a = box_.linear_index(idx[0], idx[1], idx[2]);
          const std::int64_t b = box_.linear_index(jdx[0], jdx[1], jdx[2]);
          const double tw =
              trapezoid_1d(idx[ta], n[ta]) * trapezoid_1d(idx[tb], n[tb]);
          const double w = edge_coeff(a, b) * tw * h;
          trip.emplace_back(int(a), int(a), w);
          trip.emplace_back(int(b), int(b), w);
          trip.emplace_back(int(a), int(b), -w);
          trip.emplace_back(int(b), int(a), -w);
        }
  }

  if (kind_ == Kind::Schrodinger) {
    for (int i = 0; i < n[0]; ++i)
      for (int j = 0; j < n[1]; ++j)
        for (int k = 0; k < n[2]; ++k) {
          const std::int64_t a = box_.linear_index(i, j, k);
          const double w = coeff[a].real() * box_.quad_weight(i, j, k) * h3;
          if (w != 0.0) trip.emplace_back(int(a), int(a), w);
        }
  }

  full_.resize(int(total), int(total));
  full_.setFromTriplets(trip.begin(), trip.end());

  // Split blocks for the eliminated Dirichlet system.
  const std::int64_t ni = std::int64_t(interior_.size());
  const std::int64_t nb = std::int64_t(boundary_.size());
  std::vector<Eigen::Triplet<double>> tii, tib, tbi, tbb;
  for (int col = 0; col < full_.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(full_, col); it; ++it) {
      const std::int64_t r = it.row(), c = it.col();
      const bool rb = node_to_boundary_[r] >= 0, cb = node_to_boundary_[c] >= 0;
      if (!rb && !cb)
        tii.emplace_back(int(node_to_interior_[r]), int(node_to_interior_[c]),
                         it.value());
      else if (!rb && cb)
        tib.emplace_back(int(node_to_interior_[r]), int(node_to_boundary_[c]),
                         it.value());
      else if (rb && !cb)
        tbi.emplace_back(int(node_to_boundary_[r]), int(node_to_interior_[c]),
                         it.value());
      else
        tbb.emplace_back(int(node_to_boundary_[r]), int(node_to_boundary_[c]),
                         it.value());
    }
  a_ii_.resize(int(ni), int(ni));
  a_ii_.setFromTriplets(tii.begin(), tii.end());
  a_ib_.resize(int(ni), int(nb));
  a_ib_.setFromTriplets(tib.begin(), tib.end());
  a_bi_.resize(int(nb), int(ni));
  a_bi_.setFromTriplets(tbi.begin(), tbi.end());
  a_bb_.resize(int(nb), int(nb));
  a_bb_.setFromTriplets(tbb.begin(), tbb.end());

  use_direct_ = (*std::max_element(n.begin(), n.end()) - 1) <= kDirectResolutionCap;
}

void DirichletSolver::factorize() const {
  if (factored_) return;
  if (use_direct_) {
    ldlt_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    ldlt_->compute(a_ii_);
    if (ldlt_->info() != Eigen::Success)
      throw NearSingularOperator("DirichletSolver: factorization failed");
  } else {
    pcg_ = std::make_shared<Pcg>();
    pcg_->setTolerance(1e-12);
    pcg_->setMaxIterations(20000);
    pcg_->compute(a_ii_);
    if (pcg_->info() != Eigen::Success)
      throw NearSingularOperator("DirichletSolver: preconditioner setup failed");
  }
  factored_ = true;
}

Eigen::VectorXd DirichletSolver::solve_real(const Eigen::VectorXd& rhs) const {
  factorize();
  if (use_direct_) {
    Eigen::VectorXd x = ldlt_->solve(rhs);
    if (ldlt_->info() != Eigen::Success)
      throw NonconvergentSolve("DirichletSolver: direct solve failed");
    return x;
  }
  Eigen::VectorXd x = pcg_->solve(rhs);
  if (pcg_->info() != Eigen::Success)
    throw NonconvergentSolve("DirichletSolver: CG did not reach tolerance");
  return x;
}

Eigen::MatrixXd DirichletSolver::solve_real_block(const Eigen::MatrixXd& rhs) const {
  factorize();
  if (use_direct_) {
    Eigen::MatrixXd x = ldlt_->solve(rhs);
    if (ldlt_->info() != Eigen::Success)
      throw NonconvergentSolve("DirichletSolver: direct solve failed");
    return x;
  }
  Eigen::MatrixXd x(rhs.rows(), rhs.cols());
  for (Eigen::Index c = 0; c < rhs.cols(); ++c) x.col(c) = solve_real(rhs.col(c));
  return x;
}

EigenvalueEstimate DirichletSolver::eigenvalue_estimate() const {
  // Shift-invert power iteration at shift zero: dominant eigenvector of
  // A^{-1} gives the smallest-magnitude eigenvalue of the operator. The
  // energy matrix carries an h^3 volume factor; interior mass weights are 1.
  EigenvalueEstimate est;
  const double h3 = std::pow(box_.spacing(), 3);
  const std::int64_t ni = std::int64_t(interior_.size());
  const double coeff_scale = (kind_ == Kind::Schrodinger) ? coeff_inf_ : 0.0;
  try {
    factorize();
  } catch (const NearSingularOperator&) {
    est.near_singular = true;
    est.lambda_min = 0.0;
    return est;
  }
  Eigen::VectorXd v(ni);
  // Fixed deterministic start vector with no special symmetry.
  for (std::int64_t i = 0; i < ni; ++i)
    v[i] = std::sin(0.7 * double(i) + 0.3) + 0.25 * std::cos(1.3 * double(i));
  v.normalize();
  double lambda = 0.0, lambda_prev = std::numeric_limits<double>::max();
  for (est.iterations = 1; est.iterations <= 200; ++est.iterations) {
    Eigen::VectorXd y = solve_real(v);
    const double ynorm = y.norm();
    if (!std::isfinite(ynorm) || ynorm == 0.0) {
      est.near_singular = true;
      est.lambda_min = 0.0;
      return est;
    }
    y /= ynorm;
    // Rayleigh quotient on the energy matrix, mass-normalized by h^3.
    lambda = y.dot(a_ii_ * y) / h3;
    if (std::abs(lambda - lambda_prev) <= 1e-10 * std::abs(lambda)) break;
    lambda_prev = lambda;
    v = y;
  }
  est.lambda_min = lambda;
  est.near_singular = std::abs(lambda) < 1e-8 * coeff_scale + 1e-8;
  return est;
}

GridField DirichletSolver::solve(const BoundaryTrace& f,
                                 bool homogeneous_on_gamma0) const {
  if (!f.box().same_lattice(box_))
    throw DomainError("DirichletSolver::solve: trace lattice mismatch");
  if (homogeneous_on_gamma0 && !f.supported_in_gamma())
    throw TraceSupportError("solve: data must vanish on the inaccessible face");

  const std::int64_t nb = std::int64_t(boundary_.size());
  Eigen::VectorXcd fb(nb);
  for (std::int64_t b = 0; b < nb; ++b) fb[b] = f.nodal()[boundary_[b]];

  const Eigen::VectorXcd rhs = -sparse_times_complex(a_ib_, fb);
  Eigen::VectorXd ui_re = solve_real(rhs.real());
  Eigen::VectorXd ui_im;
  const bool complex_data = rhs.imag().cwiseAbs().maxCoeff() > 0.0;
  if (complex_data) ui_im = solve_real(rhs.imag());

  GridField u(box_);
  for (std::size_t idx = 0; idx < interior_.size(); ++idx)
    u[interior_[idx]] =
        Complex(ui_re[Eigen::Index(idx)], complex_data ? ui_im[Eigen::Index(idx)] : 0.0);
  for (std::int64_t b = 0; b < nb; ++b) u[boundary_[b]] = fb[b];
  return u;
}

double DirichletSolver::interior_residual(const GridField& u,
                                          const BoundaryTrace& f) const {
  const std::int64_t ni = std::int64_t(interior_.size());
  const std::int64_t nb = std::int64_t(boundary_.size());
  Eigen::VectorXcd ui(ni), fb(nb);
  for (std::int64_t i = 0; i < ni; ++i) ui[i] = u[interior_[i]];
  for (std::int64_t b = 0; b < nb; ++b) fb[b] = f.nodal()[boundary_[b]];
  const Eigen::VectorXcd aii_ui = sparse_times_complex(a_ii_, ui);
  const Eigen::VectorXcd aib_fb = sparse_times_complex(a_ib_, fb);
  const Eigen::VectorXcd r = aii_ui + aib_fb;
  const double scale = aii_ui.norm() + aib_fb.norm();
  return scale == 0.0 ? r.norm() : r.norm() / scale;
}

Eigen::VectorXcd DirichletSolver::flux_coefficients(const GridField& u,
                                                    const TraceBasis& basis) const {
  const std::int64_t ni = std::int64_t(interior_.size());
  const std::int64_t nb = std::int64_t(boundary_.size());
  Eigen::VectorXcd ui(ni), ub(nb);
  for (std::int64_t i = 0; i < ni; ++i) ui[i] = u[interior_[i]];
  for (std::int64_t b = 0; b < nb; ++b) ub[b] = u[boundary_[b]];
  const Eigen::VectorXcd flux =
      sparse_times_complex(a_bi_, ui) + sparse_times_complex(a_bb_, ub);
  Eigen::VectorXcd c(basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    Complex acc(0, 0);
    for (const auto& [lin, psi] : basis.mode_support(k))
      acc += flux[node_to_boundary_[lin]] * psi;
    c[k] = acc;
  }
  return c;
}

double DirichletSolver::flux_density(const GridField& u, int i, int j, int k) const {
  const std::int64_t lin = box_.linear_index(i, j, k);
  if (node_to_boundary_[lin] < 0)
    throw DomainError("flux_density: node is not on the boundary");
  const auto n = box_.node_counts();
  double w2d = 1.0;
  // Surface trapezoid weight: product over the tangential axes of the face.
  int extremes = 0;
  const std::array<int, 3> idx = {i, j, k};
  for (int d = 0; d < 3; ++d)
    if (idx[d] == 0 || idx[d] == n[d] - 1) ++extremes;
  // One extreme index is the face itself; further extremes are edges/corners.
  for (int e = 1; e < extremes; ++e) w2d *= 0.5;
  Complex acc(0, 0);
  for (Eigen::SparseMatrix<double>::InnerIterator it(full_, int(lin)); it; ++it)
    acc += it.value() * u[it.row()];
  // Column iteration works because the matrix is symmetric.
  const double h2 = box_.spacing() * box_.spacing();
  return (acc / (h2 * w2d)).real();
}

Complex DirichletSolver::energy_form(const GridField& u, const GridField& v) const {
  Eigen::Map<const Eigen::VectorXcd> uv(u.values().data(),
                                        Eigen::Index(u.values().size()));
  Eigen::Map<const Eigen::VectorXcd> vv(v.values().data(),
                                        Eigen::Index(v.values().size()));
  const Eigen::VectorXcd au = sparse_times_complex(full_, uv);
  return vv.dot(au);  // Eigen's dot conjugates the first argument
}

PartialDtN DirichletSolver::assemble_dtn(const TraceBasis& basis) const {
  const EigenvalueEstimate est = eigenvalue_estimate();
  if (kind_ == Kind::Schrodinger && est.near_singular)
    throw NearSingularOperator("assemble_dtn: operator is numerically singular");

  const std::int64_t nb = std::int64_t(boundary_.size());
  const int nmodes = basis.size();

  // Nodal values of every basis mode on the boundary node list.
  Eigen::SparseMatrix<double> psi(int(nb), nmodes);
  {
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < nmodes; ++k)
      for (const auto& [lin, val] : basis.mode_support(k))
        t.emplace_back(int(node_to_boundary_[lin]), k, val);
    psi.setFromTriplets(t.begin(), t.end());
  }

  PartialDtN dtn;
  dtn.matrix.resize(nmodes, nmodes);
  dtn.h = box_.spacing();
  dtn.potential_fingerprint = fingerprint_;
  dtn.modes_per_axis = basis.modes_per_axis();

  const int chunk = 64;
  for (int start = 0; start < nmodes; start += chunk) {
    const int cols = std::min(chunk, nmodes - start);
    const Eigen::MatrixXd b = Eigen::MatrixXd(psi.middleCols(start, cols));
    const Eigen::MatrixXd rhs = -(a_ib_ * b);
    const Eigen::MatrixXd ui = solve_real_block(rhs);
    const Eigen::MatrixXd flux = a_bi_ * ui + a_bb_ * b;
    dtn.matrix.middleCols(start, cols) = (psi.transpose() * flux).cast<Complex>();
  }
  return dtn;
}

GridField solve_dirichlet(const GridField& q, const BoundaryTrace& f,
                          bool homogeneous_on_gamma0) {
  return DirichletSolver::schrodinger(q).solve(f, homogeneous_on_gamma0);
}

EigenvalueEstimate check_eigenvalue(const GridField& q) {
  return DirichletSolver::schrodinger(q).eigenvalue_estimate();
}

PartialDtN assemble_dtn(const GridField& q, const TraceBasis& basis) {
  return DirichletSolver::schrodinger(q).assemble_dtn(basis);
}

GridField solve_conductivity(const GridField& gamma, const BoundaryTrace& f) {
  return DirichletSolver::conductivity(gamma).solve(f);
}

PartialDtN assemble_dtn_gamma(const GridField& gamma, const TraceBasis& basis) {
  return DirichletSolver::conductivity(gamma).assemble_dtn(basis);
}

}  // namespace calderon
