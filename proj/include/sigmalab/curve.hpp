#ifndef SIGMALAB_CURVE_HPP
#define SIGMALAB_CURVE_HPP

#include <Eigen/Dense>
#include <functional>
#include <numbers>
#include <vector>

#include "sigmalab/lie.hpp"

namespace sigmalab::curve {

/// Marked points of omega = (z - p1)(z - p2)/z^2 dz and the contour radius.
struct ModelParams {
  cplx p1{1.0, 0.0};
  cplx p2{-1.0, 0.0};
  double eps = 0.1;
  cplx alpha_prime{0.0, 4.0 * std::numbers::pi};
};

/// Throws ConfigError naming the violated side condition.
void validate(const ModelParams& params);

/// Largest admissible contour radius (exclusive).
double max_eps(const cplx& p1, const cplx& p2);

/// omega / dz.
cplx omega_coeff(const ModelParams& params, cplx z);

/// (p1 - p2) z / ((z - p1)(z - p2)), the profile of the concentrated basis.
cplx basis_profile(const ModelParams& params, cplx z);

/// Scalar part of S(z, z') = z z' / ((z - z')(z - p1)(z' - p2)) c.
cplx szego_coeff(const ModelParams& params, cplx z, cplx zp);
/// S(z, z') as a dim x dim tensor (coefficient times the Casimir).
Eigen::MatrixXcd szego(const ModelParams& params, const lie::AlgebraData& alg, cplx z, cplx zp);
/// Residue of S(z, z') at z = z', measured in the omega(z') trivialisation,
/// by trapezoid quadrature on a small circle around z'.
Eigen::MatrixXcd szego_diagonal_residue(const ModelParams& params, const lie::AlgebraData& alg,
                                        cplx zp, int nodes = 256);

/// g-valued data on |z - p1| = eps sampled at theta_k = 2 pi k / N, split in
/// layers by powers of the mollified inner step u (1 inside, 0 outside).
/// Layer k of a density stands for F_k(z) (-dbar u) u^k; layer k of a field
/// for G_k(z) u^k.
template <class Tag>
struct LayeredSamples {
  int N = 0;
  std::vector<Eigen::MatrixXcd> layers;  // each dim x N

  LayeredSamples() = default;
  LayeredSamples(int dim, int n, int n_layers = 1)
      : N(n), layers(static_cast<size_t>(n_layers), Eigen::MatrixXcd::Zero(dim, n)) {}

  int n_layers() const { return static_cast<int>(layers.size()); }
  int dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().rows()); }
  double theta(int k) const { return 2.0 * std::numbers::pi * k / N; }
  /// Layer-0 value at node k.
  lie::AlgElement sample(int k) const { return lie::AlgElement(layers.front().col(k)); }

  void ensure_layers(int n) {
    while (n_layers() < n) layers.emplace_back(Eigen::MatrixXcd::Zero(dim(), N));
  }
  LayeredSamples& operator+=(const LayeredSamples& o) {
    ensure_layers(o.n_layers());
    for (int k = 0; k < o.n_layers(); ++k) layers[k] += o.layers[k];
    return *this;
  }
  LayeredSamples& operator-=(const LayeredSamples& o) {
    ensure_layers(o.n_layers());
    for (int k = 0; k < o.n_layers(); ++k) layers[k] -= o.layers[k];
    return *this;
  }
  friend LayeredSamples operator+(LayeredSamples a, const LayeredSamples& b) { return a += b; }
  friend LayeredSamples operator-(LayeredSamples a, const LayeredSamples& b) { return a -= b; }
  friend LayeredSamples operator*(cplx s, LayeredSamples a) {
    for (auto& l : a.layers) l *= s;
    return a;
  }
};

struct DensityTag {};
struct FieldTag {};
using ContourDensity = LayeredSamples<DensityTag>;
using SteppedField = LayeredSamples<FieldTag>;

/// The contour |z - p1| = eps with trapezoid weights, plus the transforms
/// that act on layered samples.
class Contour {
 public:
  Contour(const ModelParams& params, int nodes);

  const ModelParams& params() const { return params_; }
  int nodes() const { return n_; }
  cplx node(int k) const { return z_(k); }
  const Eigen::VectorXcd& z() const { return z_; }
  /// Trapezoid weights for the contour integral of dz.
  const Eigen::VectorXcd& dz() const { return dz_; }
  const Eigen::VectorXcd& omega() const { return omega_; }

  /// Distance of w from the contour.
  double contour_distance(cplx w) const;
  bool inside(cplx w) const { return std::abs(w - params_.p1) < params_.eps; }

  ContourDensity basis_density(const lie::AlgebraData& alg, int a) const;
  ContourDensity density_from(const lie::AlgebraData& alg,
                              const std::function<lie::AlgElement(cplx)>& profile) const;

  /// Contour trapezoid of sum_j h(z_j) dz_j.
  cplx integrate_scalar(const Eigen::VectorXcd& values) const;

  /// Principal part at p1 of the function sampled in each row.
  Eigen::MatrixXcd principal_part(const Eigen::MatrixXcd& samples) const;

  SteppedField dbar1_inv_field(const ContourDensity& rho) const;
  SteppedField dbar2_inv_field(const ContourDensity& rho) const;

 private:
  ModelParams params_;
  int n_;
  Eigen::VectorXcd z_;
  Eigen::VectorXcd dz_;
  Eigen::VectorXcd omega_;
};

/// dbar_1^{-1} rho evaluated at w off the contour: Szego transform with a
/// simple pole at p1, zeros at 0 and infinity.
lie::AlgElement dbar1_inv(const Contour& contour, const lie::AlgebraData& alg,
                          const ContourDensity& rho, cplx w);
/// dbar_2^{-1} rho at w off the contour: the adjoint transform, pole at p2.
lie::AlgElement dbar2_inv(const Contour& contour, const lie::AlgebraData& alg,
                          const ContourDensity& rho, cplx w);

/// [rho, phi] and [phi, psi] layer by layer.
ContourDensity bracket(const lie::AlgebraData& alg, const ContourDensity& rho, const SteppedField& phi);
SteppedField bracket(const lie::AlgebraData& alg, const SteppedField& phi, const SteppedField& psi);

/// Integral of omega ^ <phi, rho> over the curve.
cplx integrate(const Contour& contour, const lie::AlgebraData& alg, const SteppedField& phi,
               const ContourDensity& rho);

}  // namespace sigmalab::curve

#endif
