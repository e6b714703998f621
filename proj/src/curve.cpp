#include "sigmalab/curve.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <sstream>

#include "sigmalab/error.hpp"

namespace sigmalab::curve {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kTwoPiI(0.0, 2.0 * kPi);

}  // namespace

double max_eps(const cplx& p1, const cplx& p2) {
  return std::min(std::abs(p1 - p2), std::abs(p1)) / 4.0;
}

void validate(const ModelParams& params) {
  if (params.p1 == params.p2) throw ConfigError("model.p1", "omega side condition violated: p1 == p2");
  if (params.p1 == cplx(0.0)) throw ConfigError("model.p1", "omega side condition violated: p1 == 0");
  if (params.p2 == cplx(0.0)) throw ConfigError("model.p2", "omega side condition violated: p2 == 0");
  if (!(params.eps > 0.0) || !std::isfinite(params.eps))
    throw ConfigError("model.eps", "contour radius must be positive and finite");
  const double bound = max_eps(params.p1, params.p2);
  if (params.eps >= bound) {
    std::ostringstream os;
    os << "contour separation violated: eps = " << params.eps
       << " must be < min(|p1-p2|, |p1|)/4 = " << bound;
    throw ConfigError("model.eps", os.str());
  }
}

cplx omega_coeff(const ModelParams& params, cplx z) {
  if (z == cplx(0.0)) throw PoleError("omega_coeff: double pole at z = 0");
  return (z - params.p1) * (z - params.p2) / (z * z);
}

cplx basis_profile(const ModelParams& params, cplx z) {
  if (z == params.p1 || z == params.p2) throw PoleError("basis_profile: pole at a marked point");
  return (params.p1 - params.p2) * z / ((z - params.p1) * (z - params.p2));
}

cplx szego_coeff(const ModelParams& params, cplx z, cplx zp) {
  if (z == zp) throw PoleError("szego: diagonal pole z = z'");
  if (z == params.p1) throw PoleError("szego: pole at z = p1");
  if (zp == params.p2) throw PoleError("szego: pole at z' = p2");
  return z * zp / ((z - zp) * (z - params.p1) * (zp - params.p2));
}

Eigen::MatrixXcd szego(const ModelParams& params, const lie::AlgebraData& alg, cplx z, cplx zp) {
  return szego_coeff(params, z, zp) * alg.casimir();
}

Eigen::MatrixXcd szego_diagonal_residue(const ModelParams& params, const lie::AlgebraData& alg,
                                        cplx zp, int nodes) {
  const double sep = std::min({std::abs(zp - params.p1), std::abs(zp), std::abs(zp - params.p2)});
  if (sep == 0.0) throw PoleError("szego residue: z' on an excluded point");
  const double radius = 0.25 * sep;
  cplx sum = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double th = 2.0 * kPi * k / nodes;
    const cplx e = std::polar(1.0, th);
    const cplx z = zp + radius * e;
    sum += szego_coeff(params, z, zp) * cplx(0.0, radius) * e;
  }
  const cplx residue = sum * (2.0 * kPi / nodes) / kTwoPiI;
  return residue * omega_coeff(params, zp) * alg.casimir();
}

Contour::Contour(const ModelParams& params, int nodes) : params_(params), n_(nodes) {
  validate(params);
  if (nodes < 16 || nodes % 2 != 0)
    throw ConfigError("contour.nodes", "node count must be even and >= 16");
  z_.resize(n_);
  dz_.resize(n_);
  omega_.resize(n_);
  for (int k = 0; k < n_; ++k) {
    const cplx e = std::polar(1.0, 2.0 * kPi * k / n_);
    z_(k) = params.p1 + params.eps * e;
    dz_(k) = cplx(0.0, params.eps) * e * (2.0 * kPi / n_);
    omega_(k) = omega_coeff(params, z_(k));
  }
}

double Contour::contour_distance(cplx w) const {
  return std::abs(std::abs(w - params_.p1) - params_.eps);
}

ContourDensity Contour::basis_density(const lie::AlgebraData& alg, int a) const {
  ContourDensity rho(alg.dim(), n_);
  for (int k = 0; k < n_; ++k) rho.layers[0](a, k) = basis_profile(params_, z_(k));
  return rho;
}

ContourDensity Contour::density_from(const lie::AlgebraData& alg,
                                     const std::function<lie::AlgElement(cplx)>& profile) const {
  ContourDensity rho(alg.dim(), n_);
  for (int k = 0; k < n_; ++k) rho.layers[0].col(k) = profile(z_(k)).coeffs;
  return rho;
}

cplx Contour::integrate_scalar(const Eigen::VectorXcd& values) const {
  return values.cwiseProduct(dz_).sum();
}

Eigen::MatrixXcd Contour::principal_part(const Eigen::MatrixXcd& samples) const {
  Eigen::FFT<double> fft;
  Eigen::MatrixXcd out(samples.rows(), samples.cols());
  std::vector<cplx> in(n_), spec(n_), back(n_);
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    for (int k = 0; k < n_; ++k) in[k] = samples(r, k);
    fft.fwd(spec, in);
    // Keep the strictly negative frequencies; they are the powers (z - p1)^{-m}.
    for (int m = 0; m <= n_ / 2; ++m) spec[m] = 0.0;
    fft.inv(back, spec);
    for (int k = 0; k < n_; ++k) out(r, k) = back[k];
  }
  return out;
}

namespace {

// Res_{p1} of F(z)/z for every row, by the contour trapezoid.
Eigen::VectorXcd residue_over_z(const Contour& c, const Eigen::MatrixXcd& f) {
  const Eigen::VectorXcd w = c.dz().cwiseQuotient(c.z()) / kTwoPiI;
  return f * w;
}

}  // namespace

// Moment calculus: dbar1^{-1}(F (-dbar u) u^k) = (F u^{k+1} - H_F) / (k+1) with
// H_F = PP_F - p1 Res_{p1}(F/z) / (z - p1), the sum of residues at p1 of the
// kernel integrand. dbar2^{-1} likewise with J_F = p2 Res_{p1}(F/z)/(z - p2) - PP_F.
SteppedField Contour::dbar1_inv_field(const ContourDensity& rho) const {
  SteppedField out(rho.dim(), n_, rho.n_layers() + 1);
  Eigen::VectorXcd pole1(n_);
  for (int j = 0; j < n_; ++j) pole1(j) = params_.p1 / (z_(j) - params_.p1);
  for (int k = 0; k < rho.n_layers(); ++k) {
    const Eigen::MatrixXcd& f = rho.layers[k];
    const double w = 1.0 / (k + 1);
    out.layers[k + 1] += w * f;
    const Eigen::MatrixXcd h = principal_part(f) - residue_over_z(*this, f) * pole1.transpose();
    out.layers[0] -= w * h;
  }
  return out;
}

SteppedField Contour::dbar2_inv_field(const ContourDensity& rho) const {
  SteppedField out(rho.dim(), n_, rho.n_layers() + 1);
  Eigen::VectorXcd pole2(n_);
  for (int j = 0; j < n_; ++j) pole2(j) = params_.p2 / (z_(j) - params_.p2);
  for (int k = 0; k < rho.n_layers(); ++k) {
    const Eigen::MatrixXcd& f = rho.layers[k];
    const double w = 1.0 / (k + 1);
    out.layers[k + 1] += w * f;
    const Eigen::MatrixXcd j = residue_over_z(*this, f) * pole2.transpose() - principal_part(f);
    out.layers[0] += w * j;
  }
  return out;
}

namespace {

void check_evaluation_point(const Contour& c, cplx w) {
  if (c.contour_distance(w) < c.params().eps / c.nodes())
    throw NumericalError("Szego transform evaluated too close to the contour");
}

// sum_k 1/(k+1) sum_j kernel(z_j) F_k(z_j) dz_j
Eigen::VectorXcd kernel_transform(const Contour& c, const ContourDensity& rho,
                                  const Eigen::VectorXcd& kernel) {
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(rho.dim());
  const Eigen::VectorXcd kw = kernel.cwiseProduct(c.dz());
  for (int k = 0; k < rho.n_layers(); ++k) acc += (rho.layers[k] * kw) / double(k + 1);
  return acc;
}

}  // namespace

lie::AlgElement dbar1_inv(const Contour& contour, const lie::AlgebraData& alg,
                          const ContourDensity& rho, cplx w) {
  check_evaluation_point(contour, w);
  const auto& p = contour.params();
  if (w == p.p1) throw PoleError("dbar1_inv: evaluation at the pole p1");
  if (rho.dim() != alg.dim()) throw NumericalError("dbar1_inv: dimension mismatch");
  Eigen::VectorXcd kernel(contour.nodes());
  for (int j = 0; j < contour.nodes(); ++j) {
    const cplx zp = contour.node(j);
    kernel(j) = w * (zp - p.p1) / ((w - zp) * (w - p.p1) * zp);
  }
  return lie::AlgElement(-kernel_transform(contour, rho, kernel) / kTwoPiI);
}

lie::AlgElement dbar2_inv(const Contour& contour, const lie::AlgebraData& alg,
                          const ContourDensity& rho, cplx w) {
  check_evaluation_point(contour, w);
  const auto& p = contour.params();
  if (w == p.p2) throw PoleError("dbar2_inv: evaluation at the pole p2");
  if (rho.dim() != alg.dim()) throw NumericalError("dbar2_inv: dimension mismatch");
  Eigen::VectorXcd kernel(contour.nodes());
  for (int j = 0; j < contour.nodes(); ++j) {
    const cplx zp = contour.node(j);
    kernel(j) = w * (zp - p.p2) / ((zp - w) * (w - p.p2) * zp);
  }
  return lie::AlgElement(kernel_transform(contour, rho, kernel) / kTwoPiI);
}

ContourDensity bracket(const lie::AlgebraData& alg, const ContourDensity& rho, const SteppedField& phi) {
  ContourDensity out(alg.dim(), rho.N, rho.n_layers() + phi.n_layers() - 1);
  for (int k = 0; k < rho.n_layers(); ++k)
    for (int m = 0; m < phi.n_layers(); ++m)
      out.layers[k + m] += alg.bracket_columns(rho.layers[k], phi.layers[m]);
  return out;
}

SteppedField bracket(const lie::AlgebraData& alg, const SteppedField& phi, const SteppedField& psi) {
  SteppedField out(alg.dim(), phi.N, phi.n_layers() + psi.n_layers() - 1);
  for (int k = 0; k < phi.n_layers(); ++k)
    for (int m = 0; m < psi.n_layers(); ++m)
      out.layers[k + m] += alg.bracket_columns(phi.layers[k], psi.layers[m]);
  return out;
}

cplx integrate(const Contour& contour, const lie::AlgebraData& alg, const SteppedField& phi,
               const ContourDensity& rho) {
  const Eigen::VectorXcd w = contour.omega().cwiseProduct(contour.dz());
  cplx total = 0.0;
  for (int k = 0; k < phi.n_layers(); ++k)
    for (int m = 0; m < rho.n_layers(); ++m) {
      const Eigen::VectorXcd pr = alg.pairing_columns(phi.layers[k], rho.layers[m]);
      total += pr.cwiseProduct(w).sum() / double(k + m + 1);
    }
  return total;
}

}  // namespace sigmalab::curve
