#ifndef SIGMALAB_LIE_HPP
#define SIGMALAB_LIE_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace sigmalab {

using cplx = std::complex<double>;

namespace lie {

/// Normalization of the invariant pairing <x,y>.
enum class Pairing {
  Trace,    ///< tr(xy) in the defining representation
  Killing,  ///< tr(ad_x ad_y)
};

/// Coefficients of an algebra element in the basis {t_a}.
struct AlgElement {
  Eigen::VectorXcd coeffs;

  AlgElement() = default;
  explicit AlgElement(Eigen::VectorXcd c) : coeffs(std::move(c)) {}

  Eigen::Index dim() const { return coeffs.size(); }

  AlgElement& operator+=(const AlgElement& o) {
    coeffs += o.coeffs;
    return *this;
  }
  AlgElement& operator-=(const AlgElement& o) {
    coeffs -= o.coeffs;
    return *this;
  }
  friend AlgElement operator+(AlgElement a, const AlgElement& b) { return a += b; }
  friend AlgElement operator-(AlgElement a, const AlgElement& b) { return a -= b; }
  friend AlgElement operator*(cplx s, const AlgElement& a) { return AlgElement(s * a.coeffs); }
  double norm() const { return coeffs.norm(); }
};

/// A group element in the defining representation.
struct GroupElement {
  Eigen::MatrixXcd mat;
};

/// A finite-dimensional matrix Lie algebra with its structure constants and
/// an invariant pairing. Immutable after construction.
class AlgebraData {
 public:
  AlgebraData(std::string name, std::vector<Eigen::MatrixXcd> basis, Pairing pairing);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  /// Size of the defining representation matrices.
  int rep_dim() const { return rep_dim_; }
  Pairing pairing_kind() const { return pairing_; }

  const Eigen::MatrixXcd& basis(int a) const { return basis_[a]; }
  const std::vector<Eigen::MatrixXcd>& basis() const { return basis_; }

  /// f_ab^c with [t_a, t_b] = f_ab^c t_c.
  cplx f(int a, int b, int c) const { return f_[(a * dim_ + b) * dim_ + c]; }

  /// kappa_ab = <t_a, t_b>.
  const Eigen::MatrixXcd& kappa() const { return kappa_; }
  const Eigen::MatrixXcd& kappa_inv() const { return kappa_inv_; }
  /// Coefficients of the quadratic Casimir c = kappa^{ab} t_a (x) t_b.
  const Eigen::MatrixXcd& casimir() const { return kappa_inv_; }
  /// tr(ad_a ad_b), independent of the pairing normalization.
  const Eigen::MatrixXcd& killing() const { return killing_; }
  bool is_abelian() const { return abelian_; }

  AlgElement zero() const { return AlgElement(Eigen::VectorXcd::Zero(dim_)); }
  AlgElement unit(int a) const;

  Eigen::MatrixXcd to_matrix(const AlgElement& x) const;
  /// Projects a matrix onto the span of the basis using the pairing.
  AlgElement from_matrix(const Eigen::MatrixXcd& m) const;

  /// Column-wise bracket of two dim x N coefficient blocks.
  Eigen::MatrixXcd bracket_columns(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) const;
  /// Column-wise pairing of two dim x N coefficient blocks.
  Eigen::VectorXcd pairing_columns(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) const;

 private:
  std::string name_;
  int dim_ = 0;
  int rep_dim_ = 0;
  Pairing pairing_;
  std::vector<Eigen::MatrixXcd> basis_;
  std::vector<cplx> f_;
  Eigen::MatrixXcd kappa_;
  Eigen::MatrixXcd kappa_inv_;
  Eigen::MatrixXcd killing_;
  Eigen::MatrixXcd trace_gram_inv_;
  bool abelian_ = false;
};

/// Builds "su2", "su(n)" or the abelian stub "abelian" (n commuting
/// diagonal generators i E_aa). Throws ConfigError for unknown ids.
AlgebraData make_algebra(const std::string& name, int n = 2, Pairing pairing = Pairing::Trace);

/// Same basis, pairing re-normalized.
AlgebraData with_pairing(const AlgebraData& alg, Pairing pairing);

AlgElement bracket(const AlgebraData& alg, const AlgElement& x, const AlgElement& y);
cplx pairing(const AlgebraData& alg, const AlgElement& x, const AlgElement& y);
GroupElement group_exp(const AlgebraData& alg, const AlgElement& x);
/// Principal logarithm, projected onto the algebra.
AlgElement group_log(const AlgebraData& alg, const GroupElement& g);
/// Ad_g x = g x g^{-1}.
AlgElement adjoint(const AlgebraData& alg, const GroupElement& g, const AlgElement& x);

GroupElement identity(const AlgebraData& alg);

// Structural residuals, used by tests and the geometry-check report.
double jacobi_residual(const AlgebraData& alg);
double antisymmetry_residual(const AlgebraData& alg);
double kappa_inverse_residual(const AlgebraData& alg);

/// kappa^{ce} kappa^{df} kappa_dg f_ac^g kappa_fh f_be^h. Equals minus the
/// Killing form for any invariant pairing.
Eigen::MatrixXcd casimir_contraction(const AlgebraData& alg);

/// Nearest unitary matrix (polar factor). Throws NumericalError if the input
/// is numerically singular.
GroupElement unitary_projection(const GroupElement& g);

}  // namespace lie
}  // namespace sigmalab

#endif
