#include "sigmalab/lie.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <regex>

#include "sigmalab/error.hpp"

namespace sigmalab::lie {

namespace {

const cplx I(0.0, 1.0);

// Generalized Gell-Mann matrices scaled by -i/2, so tr(t_a t_b) = -delta_ab / 2.
// Ordering: for each pair j<k the symmetric then the antisymmetric matrix,
// then the diagonal ones. For n = 2 this is -(i/2) (sigma_x, sigma_y, sigma_z).
std::vector<Eigen::MatrixXcd> su_basis(int n) {
  std::vector<Eigen::MatrixXcd> out;
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
      s(j, k) = 1.0;
      s(k, j) = 1.0;
      out.push_back(-0.5 * I * s);
      Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
      a(j, k) = -I;
      a(k, j) = I;
      out.push_back(-0.5 * I * a);
    }
  }
  for (int l = 1; l < n; ++l) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
    const double scale = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int m = 0; m < l; ++m) d(m, m) = scale;
    d(l, l) = -l * scale;
    out.push_back(-0.5 * I * d);
  }
  return out;
}

std::vector<Eigen::MatrixXcd> abelian_basis(int n) {
  std::vector<Eigen::MatrixXcd> out;
  for (int a = 0; a < n; ++a) {
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n, n);
    t(a, a) = I;
    out.push_back(t);
  }
  return out;
}

}  // namespace

AlgebraData::AlgebraData(std::string name, std::vector<Eigen::MatrixXcd> basis, Pairing pairing)
    : name_(std::move(name)),
      dim_(static_cast<int>(basis.size())),
      rep_dim_(basis.empty() ? 0 : static_cast<int>(basis.front().rows())),
      pairing_(pairing),
      basis_(std::move(basis)) {
  const int d = dim_;
  Eigen::MatrixXcd trace_gram(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) trace_gram(a, b) = (basis_[a] * basis_[b]).trace();
  trace_gram_inv_ = trace_gram.inverse();

  f_.assign(static_cast<size_t>(d) * d * d, cplx(0.0));
  abelian_ = true;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const Eigen::MatrixXcd comm = basis_[a] * basis_[b] - basis_[b] * basis_[a];
      Eigen::VectorXcd proj(d);
      for (int e = 0; e < d; ++e) proj(e) = (comm * basis_[e]).trace();
      const Eigen::VectorXcd c = trace_gram_inv_ * proj;
      for (int e = 0; e < d; ++e) {
        f_[(a * d + b) * d + e] = c(e);
        if (std::abs(c(e)) > 1e-14) abelian_ = false;
      }
    }
  }

  killing_ = Eigen::MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) killing_(a, b) += f(a, c, e) * f(b, e, c);

  if (pairing_ == Pairing::Trace) {
    kappa_ = trace_gram;
  } else {
    if (abelian_) throw ConfigError("algebra", "Killing pairing is degenerate on an abelian algebra");
    kappa_ = killing_;
  }
  kappa_inv_ = kappa_.inverse();
}

AlgElement AlgebraData::unit(int a) const {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(dim_);
  c(a) = 1.0;
  return AlgElement(c);
}

Eigen::MatrixXcd AlgebraData::to_matrix(const AlgElement& x) const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rep_dim_, rep_dim_);
  for (int a = 0; a < dim_; ++a) m += x.coeffs(a) * basis_[a];
  return m;
}

AlgElement AlgebraData::from_matrix(const Eigen::MatrixXcd& m) const {
  Eigen::VectorXcd proj(dim_);
  for (int a = 0; a < dim_; ++a) proj(a) = (m * basis_[a]).trace();
  return AlgElement(trace_gram_inv_ * proj);
}

Eigen::MatrixXcd AlgebraData::bracket_columns(const Eigen::MatrixXcd& x,
                                              const Eigen::MatrixXcd& y) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_, x.cols());
  if (abelian_) return out;
  for (int a = 0; a < dim_; ++a) {
    for (int b = 0; b < dim_; ++b) {
      if (a == b) continue;
      const Eigen::ArrayXcd xy = x.row(a).array() * y.row(b).array();
      for (int c = 0; c < dim_; ++c) {
        const cplx fc = f(a, b, c);
        if (fc != cplx(0.0)) out.row(c).array() += fc * xy.transpose();
      }
    }
  }
  return out;
}

Eigen::VectorXcd AlgebraData::pairing_columns(const Eigen::MatrixXcd& x,
                                              const Eigen::MatrixXcd& y) const {
  return (x.transpose() * kappa_).cwiseProduct(y.transpose()).rowwise().sum();
}

AlgebraData make_algebra(const std::string& name, int n, Pairing pairing) {
  static const std::regex su_re(R"(su\(?(\d+)\)?)");
  std::smatch m;
  if (name == "abelian") {
    if (n < 1) throw ConfigError("algebra.n", "abelian stub needs n >= 1");
    return AlgebraData("abelian", abelian_basis(n), pairing);
  }
  if (std::regex_match(name, m, su_re)) {
    const int rank_n = std::stoi(m[1]);
    if (rank_n < 2) throw ConfigError("algebra.n", "su(n) needs n >= 2");
    return AlgebraData("su(" + std::to_string(rank_n) + ")", su_basis(rank_n), pairing);
  }
  if (name == "su(n)" || name == "sun") {
    if (n < 2) throw ConfigError("algebra.n", "su(n) needs n >= 2");
    return AlgebraData("su(" + std::to_string(n) + ")", su_basis(n), pairing);
  }
  throw ConfigError("algebra.name", "unsupported algebra '" + name + "'");
}

AlgebraData with_pairing(const AlgebraData& alg, Pairing pairing) {
  return AlgebraData(alg.name(), alg.basis(), pairing);
}

AlgElement bracket(const AlgebraData& alg, const AlgElement& x, const AlgElement& y) {
  if (x.dim() != alg.dim() || y.dim() != alg.dim())
    throw NumericalError("bracket: dimension mismatch");
  return AlgElement(alg.bracket_columns(x.coeffs, y.coeffs).col(0));
}

cplx pairing(const AlgebraData& alg, const AlgElement& x, const AlgElement& y) {
  if (x.dim() != alg.dim() || y.dim() != alg.dim())
    throw NumericalError("pairing: dimension mismatch");
  return x.coeffs.transpose() * alg.kappa() * y.coeffs;
}

namespace {

// sinh(s)/s, even in s.
cplx sinhc(cplx s2) {
  if (std::abs(s2) < 1e-6) return 1.0 + s2 / 6.0 + s2 * s2 / 120.0;
  const cplx s = std::sqrt(s2);
  return std::sinh(s) / s;
}

bool traceless_2x2(const AlgebraData& alg) { return alg.rep_dim() == 2 && alg.name() == "su(2)"; }

}  // namespace

GroupElement group_exp(const AlgebraData& alg, const AlgElement& x) {
  if (x.dim() != alg.dim()) throw NumericalError("group_exp: dimension mismatch");
  const Eigen::MatrixXcd m = alg.to_matrix(x);
  if (traceless_2x2(alg)) {
    // X^2 = -det(X) for traceless 2x2.
    const cplx s2 = -m.determinant();
    const cplx ch = std::abs(s2) < 1e-6 ? 1.0 + s2 / 2.0 + s2 * s2 / 24.0 : std::cosh(std::sqrt(s2));
    return GroupElement{ch * Eigen::MatrixXcd::Identity(2, 2) + sinhc(s2) * m};
  }
  return GroupElement{m.exp()};
}

AlgElement group_log(const AlgebraData& alg, const GroupElement& g) {
  if (g.mat.rows() != alg.rep_dim()) throw NumericalError("group_log: dimension mismatch");
  if (traceless_2x2(alg)) {
    const cplx c = g.mat.trace() / 2.0;
    const Eigen::MatrixXcd traceless = g.mat - c * Eigen::MatrixXcd::Identity(2, 2);
    // cosh(s) = c; s^2 from the traceless part keeps the small-angle branch accurate.
    const cplx s2 = -traceless.determinant();
    if (std::abs(c + 1.0) < 1e-6) throw NumericalError("group_log: element near -1, log ill-defined");
    cplx s = std::sqrt(s2);
    if (std::abs(s2) > 1e-6) s = std::acosh(c);
    const cplx s2_used = std::abs(s2) > 1e-6 ? s * s : s2;
    return alg.from_matrix(traceless / sinhc(s2_used));
  }
  return alg.from_matrix(g.mat.log());
}

AlgElement adjoint(const AlgebraData& alg, const GroupElement& g, const AlgElement& x) {
  return alg.from_matrix(g.mat * alg.to_matrix(x) * g.mat.inverse());
}

GroupElement identity(const AlgebraData& alg) {
  return GroupElement{Eigen::MatrixXcd::Identity(alg.rep_dim(), alg.rep_dim())};
}

double jacobi_residual(const AlgebraData& alg) {
  const int d = alg.dim();
  double worst = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int dd = 0; dd < d; ++dd) {
          cplx s = 0.0;
          for (int e = 0; e < d; ++e)
            s += alg.f(a, b, e) * alg.f(e, c, dd) + alg.f(b, c, e) * alg.f(e, a, dd) +
                 alg.f(c, a, e) * alg.f(e, b, dd);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

double antisymmetry_residual(const AlgebraData& alg) {
  const int d = alg.dim();
  double worst = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) worst = std::max(worst, std::abs(alg.f(a, b, c) + alg.f(b, a, c)));
  return worst;
}

double kappa_inverse_residual(const AlgebraData& alg) {
  const int d = alg.dim();
  return (alg.kappa() * alg.kappa_inv() - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd casimir_contraction(const AlgebraData& alg) {
  const int d = alg.dim();
  const Eigen::MatrixXcd& k = alg.kappa();
  const Eigen::MatrixXcd& ki = alg.kappa_inv();
  // F_a(c, h) = f_ac^g kappa_gh: lowered structure constants.
  std::vector<Eigen::MatrixXcd> lowered(d, Eigen::MatrixXcd::Zero(d, d));
  for (int a = 0; a < d; ++a)
    for (int c = 0; c < d; ++c)
      for (int h = 0; h < d; ++h)
        for (int g = 0; g < d; ++g) lowered[a](c, h) += alg.f(a, c, g) * k(g, h);
  Eigen::MatrixXcd out(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      // sum_{c,e,d,f} ki(c,e) ki(d,f) L_a(c,d) L_b(e,f)
      out(a, b) = (ki * lowered[b] * ki.transpose()).cwiseProduct(lowered[a]).sum();
  return out;
}

GroupElement unitary_projection(const GroupElement& g) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g.mat, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || !(s(s.size() - 1) > 1e-8 * s(0)))
    throw NumericalError("unitary re-projection: polar factor is singular");
  return GroupElement{svd.matrixU() * svd.matrixV().adjoint()};
}

}  // namespace sigmalab::lie
