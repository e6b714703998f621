#ifndef SIGMALAB_LAX_HPP
#define SIGMALAB_LAX_HPP

#include <string>
#include <vector>

#include "sigmalab/dynamics.hpp"

namespace sigmalab::lax {

enum class Region { Inside, Outside };
std::string to_string(Region r);

/// Connection data at a spectral point z, at the basepoint.
struct LaxSample {
  cplx z;
  Region region = Region::Inside;
  std::vector<lie::AlgElement> alpha;  ///< alpha_a(z)
  std::vector<lie::AlgElement> beta;   ///< beta_a(z)
  /// dalpha[a][b] = d alpha_a / d lambda^b, dbeta[a][b] = d beta_a / d lambda^b.
  std::vector<std::vector<lie::AlgElement>> dalpha, dbeta;

  /// alpha = p_alpha dlambda + q_alpha [lambda, dlambda] + ..., likewise beta.
  cplx p_alpha = 0.0, p_beta = 0.0, q_alpha = 0.0, q_beta = 0.0;
  /// Largest deviation of the sampled tensors from the scalar forms above.
  double profile_residual = 0.0;

  /// Gauge-fixed global form A = c1 j1 dt1 + c2 j2 dt2 in right currents.
  cplx c1 = 0.0, c2 = 0.0, s = 0.0;
  /// Residual of the overdetermined first-order gauge match.
  double gauge_match_residual = 0.0;
};

/// Samples alpha, beta and their basepoint derivatives at z by the Szego
/// transforms. z must avoid 0, p1, p2 and keep eps/8 from the contour.
LaxSample lax_sample(const curve::Contour& contour, const lie::AlgebraData& alg, cplx z);

/// c2 (1 + r)/2 - c1 (r - 1)/2 + c1 c2 with r = gamma/rho: flatness of the
/// gauge-fixed form on solutions.
cplx flatness_condition(const LaxSample& s, cplx ratio);

/// (beta_a - alpha_a) d12^a + (dbeta_b/dlambda^a - dalpha_a/dlambda^b + [alpha_a, beta_b]) d1^a d2^b.
lie::AlgElement flatness_residual(const lie::AlgebraData& alg, const LaxSample& sample,
                                  const dynamics::Jet& jet);

/// Largest |flatness_residual| over all stencil sites of a trajectory and all samples.
double max_flatness_residual(const lie::AlgebraData& alg, const dynamics::Trajectory& traj,
                             const std::vector<LaxSample>& samples);

/// d1, d2 kept, d12 = (r/2)[d1, d2] so that the group equation holds exactly.
dynamics::Jet on_shell_jet(const lie::AlgebraData& alg, const dynamics::Jet& jet, cplx ratio);

/// Worst flatness residual over on-shell versions of sampled trajectory
/// jets, each shifted by delta times a fixed random unit direction (one per
/// site and component, drawn from the seed). One entry per delta.
std::vector<double> perturbed_flatness(const lie::AlgebraData& alg, const dynamics::Trajectory& traj,
                                       const std::vector<LaxSample>& samples, cplx ratio,
                                       const std::vector<double>& deltas, std::uint64_t seed, int sites = 64);

struct BlockReport {
  std::string name;
  double worst_relative = 0.0;
  int a = -1, b = -1, c = -1;
  bool pass = false;
};

struct IdentityReport {
  std::vector<BlockReport> blocks;
  double tolerance = 1e-6;
  bool pass() const;
};

/// Pairs the three coefficient groups of the flatness equation with A_c by
/// contour quadrature and compares with -1/2 times the matching EOM
/// coefficients: -g_ac, -(1/2) Chr_{c,ab}, +(1/4) Omega_abc.
IdentityReport verify_main_theorem_identities(const curve::Contour& contour, const lie::AlgebraData& alg,
                                              const geometry::GeometryTensors& geo, double tol = 1e-6);

struct HolonomyRecord {
  cplx z;
  int level = 0;
  lie::GroupElement hol;
  std::vector<cplx> charges;  ///< tr(hol^k), k = 1..K
};

/// Ordered transport of d + c1 j1 dt1 + c2 j2 dt2 once around the periodic
/// slice, starting at P_0.
lie::GroupElement holonomy_matrix(const lie::AlgebraData& alg, const dynamics::LatticeRow& row, double h,
                                  cplx c1, cplx c2);
HolonomyRecord holonomy(const lie::AlgebraData& alg, const dynamics::LatticeRow& row, double h,
                        const LaxSample& sample, int level, int K);

struct ChargeRow {
  cplx z;
  int k = 0;
  int level = 0;
  cplx value;
  double drift = 0.0;  ///< |value - value at level 0| / |value at level 0|
};

std::vector<ChargeRow> charge_scan(const lie::AlgebraData& alg, const dynamics::Trajectory& traj,
                                   const std::vector<LaxSample>& samples, int K);
/// Largest drift per (z, k) for k = 1 only.
double max_trace_drift(const std::vector<ChargeRow>& table);

/// Default number of trace powers: rank of su(n), i.e. n - 1, at least 1.
int default_trace_powers(const lie::AlgebraData& alg);

}  // namespace sigmalab::lax

#endif
