#pragma once

#include "calderon/cgo.hpp"
#include "calderon/norms.hpp"

namespace calderon {

/// Lattice-quadrature Fourier transform F_h f(xi) = h^3 sum w f exp(i xi.x)
/// over the field's own box (trapezoid weights).
Complex discrete_fourier(const GridField& f, const Vec3& xi);

/// Transform of the even x3-extension of a field given on the lower-half box:
/// h^3 sum w q (exp(i xi.x) + exp(i xi*.x)).
Complex fourier_even_extension(const GridField& q_lower, const Vec3& xi);

/// Two-sided data of the mollified Riemann-Lebesgue bound at one frequency:
/// lhs = |F_h f(xi)|, rhs = ||f||_1 exp(-eps^2 |xi|^2 / 4pi)
///       + C0 I_G eps^alpha + 2 ||f||_1 tail(delta/eps),
/// assembled from the translation-modulus record. Under the transform
/// convention F f(xi) = int f exp(i xi.x) dx the Gaussian decay constant is
/// 1/(4 pi).
struct MollifyBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double gaussian_term = 0.0;
  double holder_term = 0.0;
  double tail_term = 0.0;
  double eps = 0.0;
};

MollifyBound mollify_bound(const GridField& f, const HolderModulus& modulus,
                           double eps, const Vec3& xi);

/// Bound value only, from a priori constants (no field access); xi enters
/// through its norm.
double mollify_rhs(double l1_norm, const HolderModulus& modulus, double eps,
                   double xi_norm);

/// Parameter schedule tying the mollification width, the growth parameter and
/// the trusted frequency radius to the boundary-data distance delta.
struct Schedule {
  double alpha = 0.0;
  double alpha_tilde = 0.0;   // min(alpha, (n-1)/2)
  double gamma_exponent = 0.0;
  double freq_radius = 0.0;   // R
  double tau = 0.0;           // R^{(n+2)/alpha_tilde}
  double eps = 0.0;           // (1 + 4 tau^2)^{-1/4}
  double r0 = 2.0;
  double delta_tilde = 0.0;   // exp(-r0^{1/gamma})
  bool clamped = false;       // R fell back to r0 because delta >= delta_tilde
};

double eps_of_tau(double tau);

/// gamma_exponent <= 0 selects the default alpha_tilde / (2 (n+2+alpha_tilde)).
Schedule make_schedule(double delta, double alpha, int n, double gamma_exponent,
                       double r0 = 2.0);

/// One estimated Fourier mode of q0 = q1 - q2 via the boundary pairing.
struct FourierEstimate {
  Vec3 xi = Vec3::Zero();
  double tau = 0.0, eps = 0.0;
  Complex boundary_term{0, 0};    // <(L1-L2) v1, v2> in the trace basis
  Complex remainder_term{0, 0};   // volume integral of q0 times the w-coupling
  Complex sideband_plus{0, 0};    // int_Omega q0 exp(i (rho1+rho2*).x)
  Complex sideband_minus{0, 0};   // int_Omega q0 exp(i (rho1*+rho2).x)
  Complex estimate{0, 0};         // boundary - remainder + sidebands
  double sideband_bound = 0.0;    // blind-mode bound on |S+ + S-|
  double trace_energy_loss1 = 0.0, trace_energy_loss2 = 0.0;
  bool blind = false;
};

/// Everything the per-mode estimator needs besides the frequency itself.
struct EstimatorContext {
  const GridField* q1 = nullptr;  // on the lower-half box
  const GridField* q2 = nullptr;
  const TraceBasis* basis = nullptr;
  const Eigen::MatrixXcd* dtn_diff = nullptr;
  bool blind = false;
  // A priori data backing the blind sideband bound.
  double apriori_l1 = 0.0;
  HolderModulus apriori_modulus;
};

FourierEstimate estimate_fourier_mode(const EstimatorContext& ctx,
                                      const CGOPair& pair, double eps);

/// Frequency-cube truncated inversion: estimates F q0 on the dual lattice of
/// the padded doubled box inside {|xi'| < R, |xi3| < R}, mirrors the x3-even
/// symmetry, and synthesizes a field on the lower-half box. The zero mode is
/// outside the construction's reach (the reflected solutions cannot probe it)
/// and is skipped.
struct RecoveryResult {
  GridField q0_hat;  // real field on the lower-half box
  double imag_residue = 0.0;
  std::vector<FourierEstimate> modes;
  std::vector<Vec3> skipped_modes;
  double tau_used = 0.0;
  double tau_cap = 0.0;  // per-run overflow cap on tau (0 = uncapped)
};

struct RecoveryOptions {
  int pad_factor = 2;          // synthesis lattice density
  double overflow_budget = 120.0;  // max |Im rho . x| allowed over the box
};

RecoveryResult recover_q0(const EstimatorContext& ctx, const Schedule& schedule,
                          const RecoveryOptions& opts = {});

/// L2-relative truncation baseline of keeping only the given modes (and their
/// x3 mirrors) from the spectrum of the known q0.
double truncation_baseline(const GridField& q0_lower, const std::vector<Vec3>& kept,
                           int pad_factor);

}  // namespace calderon
