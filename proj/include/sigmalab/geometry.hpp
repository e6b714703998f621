#ifndef SIGMALAB_GEOMETRY_HPP
#define SIGMALAB_GEOMETRY_HPP

#include <functional>
#include <utility>
#include <vector>

#include "sigmalab/curve.hpp"
#include "sigmalab/error.hpp"

namespace sigmalab::geometry {

/// Metric, 3-form and metric derivative at the basepoint, in the
/// concentrated basis.
struct GeometryTensors {
  int dim = 0;
  Eigen::MatrixXcd g;
  /// g / (2 pi i).
  Eigen::MatrixXcd g_real;
  std::vector<cplx> omega3;
  /// dg[(a, b, c)] = d g_ab / d lambda^c.
  std::vector<cplx> dg;

  cplx Omega(int a, int b, int c) const { return omega3[(a * dim + b) * dim + c]; }
  cplx dG(int a, int b, int c) const {
    if (dg.empty()) throw NumericalError("metric derivative was not computed");
    return dg[(a * dim + b) * dim + c];
  }
};

cplx metric(const curve::Contour& contour, const lie::AlgebraData& alg, int a, int b);
/// Sum over S_3 with signs of the contour integral of <[A, dbar1^{-1} A], dbar2^{-1} A>.
cplx threeform(const curve::Contour& contour, const lie::AlgebraData& alg, int a, int b, int c);
cplx metric_derivative(const curve::Contour& contour, const lie::AlgebraData& alg, int a, int b, int c);

/// dg is left empty when with_derivative is false.
GeometryTensors compute_geometry(const curve::ModelParams& params, const lie::AlgebraData& alg, int nodes,
                                 bool with_derivative = true);

/// 2 pi i (p1 - p2) kappa_ab.
cplx metric_closed_form(const curve::ModelParams& params, const lie::AlgebraData& alg, int a, int b);
/// -(2 pi i / 3) kappa_cd f_ab^d (p1 + p2).
cplx threeform_closed_form(const curve::ModelParams& params, const lie::AlgebraData& alg, int a, int b,
                           int c);

/// g(A_b, dbar phi) for phi = Phi(z) u with u the mollified step inside the
/// contour and Phi holomorphic near it. Vanishes by gauge invariance.
cplx gauge_invariance_residual(const curve::Contour& contour, const lie::AlgebraData& alg,
                               const std::function<lie::AlgElement(cplx)>& Phi, int b);

struct Signature {
  int pos = 0;
  int neg = 0;
  bool operator==(const Signature&) const = default;
};

/// Block signatures lambda_i * Sigma(kappa); a sign flip swaps the pair.
std::vector<Signature> signature(const std::vector<int>& lambdas, Signature sigma_kappa);

/// Signature of a real symmetric matrix (zero eigenvalues rejected).
Signature matrix_signature(const Eigen::MatrixXd& m, double tol = 1e-10);

/// Largest deviation from total antisymmetry of Omega, and from symmetry of g.
double antisymmetry_defect(const GeometryTensors& t);
double symmetry_defect(const GeometryTensors& t);

}  // namespace sigmalab::geometry

#endif
