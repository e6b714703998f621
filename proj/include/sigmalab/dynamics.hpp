#ifndef SIGMALAB_DYNAMICS_HPP
#define SIGMALAB_DYNAMICS_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "sigmalab/geometry.hpp"

namespace sigmalab::dynamics {

/// rho (d1 j2 + d2 j1) = gamma [j1, j2] for right currents j = (d sigma) sigma^{-1}.
struct EomCoefficients {
  cplx rho = 1.0;
  cplx gamma = 0.0;
  cplx ratio() const { return gamma / rho; }
};

/// Second-order jet in exponential coordinates centred at the point.
struct Jet {
  Eigen::VectorXcd d1, d2, d12;
  static Jet zero(int dim) {
    return {Eigen::VectorXcd::Zero(dim), Eigen::VectorXcd::Zero(dim), Eigen::VectorXcd::Zero(dim)};
  }
};

/// 2 g_ac d12^a + Chr_{c,ab} (d1^a d2^b + d2^a d1^b) - Omega_abc d1^a d2^b.
Eigen::VectorXcd coordinate_eom_residual(const geometry::GeometryTensors& geo, const Jet& jet);

/// <t_c, R> with R = rho (d1 j2 + d2 j1) - gamma [j1, j2] evaluated on the jet.
Eigen::VectorXcd group_eom_residual(const lie::AlgebraData& alg, const EomCoefficients& coeffs,
                                    const Jet& jet);

/// Reads rho and gamma off two jets and validates on random ones. Throws
/// CheckFailure when the coordinate residual is not of group form.
EomCoefficients derive_eom_coefficients(const lie::AlgebraData& alg, const geometry::GeometryTensors& geo,
                                        std::uint64_t seed = 1, double tol = 1e-6);

/// One zig-zag Cauchy slice of the light-cone lattice. Level n holds the
/// sites P_k = (k, n - k) h and Q_k = P_k + (h, 0) = P_{k+1} + (0, h), with
/// the identification (t1, t2) ~ (t1 + n1 h, t2 - n1 h). e1 column k is
/// the current on the t1 edge P_k -> Q_k, e2 column k on the t2 edge
/// P_{k+1} -> Q_k; sigma[k] is the field at P_k.
struct LatticeRow {
  Eigen::MatrixXcd e1;
  Eigen::MatrixXcd e2;
  std::vector<Eigen::MatrixXcd> sigma;
};

struct Trajectory {
  int n1 = 0;
  double h = 0.0;
  std::vector<LatticeRow> rows;
  int levels() const { return static_cast<int>(rows.size()); }
};

struct SolveOptions {
  double blowup_bound = 1e6;
  bool reproject = true;
  int max_iterations = 60;
};

/// Field on the initial slice from sigma(t1, t2); currents are exact edge logarithms.
LatticeRow initial_from_function(const lie::AlgebraData& alg, int n1, double h,
                                 const std::function<lie::GroupElement(double, double)>& sigma);
/// sigma = g0 everywhere.
LatticeRow initial_constant(const lie::AlgebraData& alg, int n1, const lie::GroupElement& g0);
/// sigma(t, x) = exp(X(x) + t V(x)), with X, V real band-limited Fourier
/// series (modes 1..modes) of the given amplitude, drawn from the seed.
LatticeRow initial_random_fourier(const lie::AlgebraData& alg, int n1, double h, std::uint64_t seed,
                                  int modes = 3, double amplitude = 0.5);
/// Currents given as CSV rows "k,which,component,re,im" (which = 1 or 2);
/// sigma(P_0) = identity. Throws ConfigError if the row does not close.
LatticeRow initial_from_csv(const lie::AlgebraData& alg, int n1, double h, std::istream& in);
/// Rebuilds sigma on the slice from the currents, starting from sigma0 at P_0.
void reconstruct_sites(const lie::AlgebraData& alg, LatticeRow& row, double h, const Eigen::MatrixXcd& sigma0);

LatticeRow step(const lie::AlgebraData& alg, const LatticeRow& row, double h, const EomCoefficients& coeffs,
                const SolveOptions& opts = {});

Trajectory solve(const lie::AlgebraData& alg, const LatticeRow& initial, double h, int levels,
                 const EomCoefficients& coeffs, const SolveOptions& opts = {});

/// Currents and derivatives at the lattice site (i, j), level T = i + j,
/// from a site-centred stencil over levels T-2 .. T+1.
struct SiteCurrents {
  Eigen::VectorXcd j1, j2, d1j2, d2j1;
  Jet jet() const { return {j1, j2, 0.5 * (d1j2 + d2j1)}; }
};
SiteCurrents site_currents(const Trajectory& traj, int level, int k);
/// Smallest and largest level at which site_currents is defined.
int first_stencil_level();
int last_stencil_level(const Trajectory& traj);

struct ResidualStats {
  double eom = 0.0;          ///< max |rho (d1j2 + d2j1) - gamma [j1, j2]| / |rho|
  double maurer_cartan = 0.0;  ///< max |d1j2 - d2j1 - [j1, j2]|
  double coordinate_gap = 0.0;  ///< max relative gap between coordinate and group residuals
};
ResidualStats residuals(const lie::AlgebraData& alg, const Trajectory& traj, const EomCoefficients& coeffs,
                        const geometry::GeometryTensors* geo = nullptr);

/// h sum_k <e1, e1> and h sum_k <e2, e2> on one slice; both are conserved
/// by the continuum equations for any gamma.
std::pair<cplx, cplx> chiral_energies(const lie::AlgebraData& alg, const LatticeRow& row, double h);

/// Largest deviation of sigma from unitarity on a slice.
double unitarity_defect(const LatticeRow& row);

/// Site-centred j1 (which = 1) or j2 (which = 2) as "i1,i2,component,re,im"
/// rows, (i1, i2) the site index in units of h.
void write_currents_csv(std::ostream& out, const Trajectory& traj, int which);

}  // namespace sigmalab::dynamics

#endif
