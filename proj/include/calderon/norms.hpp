#pragma once

#include <Eigen/Core>

#include "calderon/fitting.hpp"
#include "calderon/forward.hpp"
#include "calderon/grid_field.hpp"
#include "calderon/trace.hpp"

namespace calderon {

/// Operator norm of a DtN difference as a map H^{1/2}_0(Gamma) -> H^{-1/2}(Gamma):
/// the largest singular value of W^{-1/2} D W^{-1/2} with W the diagonal
/// (1+lambda)^{1/2} weight matrix of the trace basis.
double operator_norm(const Eigen::MatrixXcd& d, const TraceBasis& basis);
double operator_norm(const PartialDtN& d, const TraceBasis& basis);
/// Core routine with explicit diagonal H^{1/2} weights.
double operator_norm_weighted(const Eigen::MatrixXcd& d, const Eigen::VectorXd& w);

/// Lower bound of the same supremum by direct maximization of the Rayleigh
/// quotient: random trace pairs followed by greedy ascent from the best one.
/// Independent of the singular-value route it cross-checks.
double operator_norm_random_search(const Eigen::MatrixXcd& d, const TraceBasis& basis,
                                   int samples, std::uint64_t seed);

/// Discrete H^{-1} norm of a zero-extended field through the lattice DFT of
/// its own box:  ( (2pi)^{-3} * sum_xi |F_h f(xi)|^2 (1+|xi|^2)^{-1} dxi )^{1/2},
/// with F_h f(xi) = h^3 sum f(x) exp(i xi . x). The Plancherel factor makes
/// the norm dominated by the lattice L2 norm.
double h_minus1_norm(const GridField& q0);

/// L1 translation modulus g(y) = ||f(.-y) - f||_L1 with a least-squares
/// power-law fit g ~ C0 |y|^alpha. C0 is reported as the envelope constant
/// max g(y)/|y|^alpha so that the fitted law dominates every sample.
struct HolderModulus {
  std::vector<Vec3> offsets;   // snapped to lattice multiples
  std::vector<double> values;  // g at each offset
  double c0 = 0.0;             // envelope constant
  double alpha = 0.0;          // fitted exponent
  double delta = 0.0;          // largest sampled |y|
  double fit_residual = 0.0;
};

/// Evaluates g on lattice-snapped offsets; offsets must stay within half the
/// zero-padding margin of the field.
HolderModulus translation_modulus(const GridField& f, const std::vector<Vec3>& offsets);

/// Same record with the exponent pinned externally (e.g. a priori smoothness);
/// only the envelope constant is computed.
HolderModulus translation_modulus_with_alpha(const GridField& f,
                                             const std::vector<Vec3>& offsets,
                                             double alpha);

/// Fit report rows: |y|, g, fitted C0, fitted alpha.
std::string modulus_csv(const HolderModulus& modulus);

}  // namespace calderon
