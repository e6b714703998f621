#ifndef SIGMALAB_BETAFLOW_HPP
#define SIGMALAB_BETAFLOW_HPP

#include <vector>

#include "sigmalab/geometry.hpp"

namespace sigmalab::betaflow {

/// -2 pi i (p1 + p2).
cplx closed_period_exact(const curve::ModelParams& p);
/// 2 (p2 - p1) + (P1 / 2 pi i) Log(p2 / p1), principal branch.
cplx open_period_closed_form(const curve::ModelParams& p);
/// p1 p2 / (p1 - p2)^2.
cplx flow_constant(const curve::ModelParams& p);

struct Periods {
  cplx P1;
  cplx P2;
};

/// P1 by trapezoid on |z| = min(|p1|, |p2|)/2, P2 by composite Gauss-Legendre
/// along a path from p1 to p2 kept away from z = 0 (straight when possible).
Periods periods(const curve::ModelParams& p, int quad_nodes = 64);

/// |a - b - n P| <= tol for the nearest integer n (plain |a - b| if P = 0).
bool equal_mod(cplx a, cplx b, cplx period, double tol);

struct FlowState {
  curve::ModelParams params;
  double epsilon = 0.0;
  cplx c_flow;
  cplx P1;
  cplx P2;
  double c_tilde = 3.0;
};

FlowState make_state(const curve::ModelParams& p, int quad_nodes = 64);
/// p1 += d c, p2 -= d c with c = p1 p2/(p1 - p2)^2; eps is kept if still
/// admissible, otherwise ConfigError.
FlowState flow_step(const FlowState& s, double d_eps, int quad_nodes = 64);
/// Central difference of P2 along the flow.
cplx dP2_deps(const curve::ModelParams& p, double step = 1e-4, int quad_nodes = 64);

struct BetaReport {
  double contraction_residual = 0.0;  ///< max |C + kappa| in the Killing normalization
  Eigen::MatrixXcd beta;              ///< from H = 3 Omega with the closed-form Omega
  Eigen::MatrixXcd beta_quadrature;   ///< from H = c Omega_quadrature, c fitted
  Eigen::MatrixXcd g;                 ///< Killing-normalized metric
  double beta_vs_metric_residual = 0.0;
  double beta_quadrature_residual = 0.0;
  double c_tilde = 3.0;
  double c_tilde_quadrature = 0.0;
  cplx rescale_factor;        ///< beta_ab / g_ab
  cplx flow_rescale_factor;   ///< (g(eps)/g - 1)/eps from the quadrature metric
  cplx expected_rescale;      ///< (alpha'/2 pi i) p1 p2/(p1 - p2)^3
  cplx alpha_prime_fitted;    ///< alpha' for which beta/g equals the flow rescaling
  std::vector<double> wzw_sequence;  ///< 1 - (c^2/9)(p1+p2)^2/(p1-p2)^2 as p1 -> 0, p2 = 1
  double wzw_limit = 1.0;            ///< 1 - c^2/9
  bool abelian = false;
};

BetaReport beta_check(const curve::ModelParams& p, const lie::AlgebraData& alg, int nodes = 256);

}  // namespace sigmalab::betaflow

#endif
