#include "sigmalab/geometry.hpp"

#include <array>
#include <numbers>

#include "sigmalab/error.hpp"

namespace sigmalab::geometry {

namespace {

const cplx kTwoPiI(0.0, 2.0 * std::numbers::pi);

void check_index(const lie::AlgebraData& alg, std::initializer_list<int> idx) {
  for (int i : idx)
    if (i < 0 || i >= alg.dim()) throw ConfigError("index", "basis index out of range");
}

struct BasisCache {
  std::vector<curve::ContourDensity> A;
  std::vector<curve::SteppedField> alpha;
  std::vector<curve::SteppedField> beta;

  BasisCache(const curve::Contour& c, const lie::AlgebraData& alg) {
    for (int a = 0; a < alg.dim(); ++a) {
      A.push_back(c.basis_density(alg, a));
      alpha.push_back(c.dbar1_inv_field(A.back()));
      beta.push_back(c.dbar2_inv_field(A.back()));
    }
  }
};

cplx raw_threeform(const curve::Contour& c, const lie::AlgebraData& alg, const BasisCache& bc, int a,
                   int b, int e) {
  return curve::integrate(c, alg, bc.beta[e], curve::bracket(alg, bc.A[a], bc.alpha[b]));
}

cplx s3_sum(const curve::Contour& c, const lie::AlgebraData& alg, const BasisCache& bc, int a, int b,
            int e) {
  return raw_threeform(c, alg, bc, a, b, e) - raw_threeform(c, alg, bc, b, a, e) +
         raw_threeform(c, alg, bc, b, e, a) - raw_threeform(c, alg, bc, e, b, a) +
         raw_threeform(c, alg, bc, e, a, b) - raw_threeform(c, alg, bc, a, e, b);
}

cplx half_derivative(const curve::Contour& c, const lie::AlgebraData& alg, const BasisCache& bc, int a,
                     int b, int k) {
  const auto nested = c.dbar1_inv_field(curve::bracket(alg, bc.A[k], bc.alpha[a]));
  return -curve::integrate(c, alg, nested, bc.A[b]);
}

}  // namespace

cplx metric(const curve::Contour& contour, const lie::AlgebraData& alg, int a, int b) {
  check_index(alg, {a, b});
  const auto Aa = contour.basis_density(alg, a);
  const auto Ab = contour.basis_density(alg, b);
  return curve::integrate(contour, alg, contour.dbar1_inv_field(Aa), Ab) +
         curve::integrate(contour, alg, contour.dbar1_inv_field(Ab), Aa);
}

cplx threeform(const curve::Contour& contour, const lie::AlgebraData& alg, int a, int b, int c) {
  check_index(alg, {a, b, c});
  const BasisCache bc(contour, alg);
  return s3_sum(contour, alg, bc, a, b, c);
}

cplx metric_derivative(const curve::Contour& contour, const lie::AlgebraData& alg, int a, int b, int c) {
  check_index(alg, {a, b, c});
  const BasisCache bc(contour, alg);
  return half_derivative(contour, alg, bc, a, b, c) + half_derivative(contour, alg, bc, b, a, c);
}

GeometryTensors compute_geometry(const curve::ModelParams& params, const lie::AlgebraData& alg, int nodes,
                                 bool with_derivative) {
  const curve::Contour contour(params, nodes);
  const BasisCache bc(contour, alg);
  const int d = alg.dim();
  GeometryTensors t;
  t.dim = d;
  t.g.resize(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      t.g(a, b) = curve::integrate(contour, alg, bc.alpha[a], bc.A[b]) +
                  curve::integrate(contour, alg, bc.alpha[b], bc.A[a]);
  t.g_real = t.g / kTwoPiI;

  std::vector<cplx> raw(static_cast<size_t>(d) * d * d);
  // raw(a, b, :) = sum over layers of Bk vec([A_a, alpha_b]_m) / (k + m + 1)
  const int N = contour.nodes();
  const Eigen::VectorXcd w = contour.omega().cwiseProduct(contour.dz());
  std::vector<Eigen::MatrixXcd> Bk;
  for (int e = 0; e < d; ++e)
    for (int k = 0; k < bc.beta[e].n_layers(); ++k) {
      if (static_cast<int>(Bk.size()) <= k) Bk.emplace_back(Eigen::MatrixXcd::Zero(d, d * N));
      const Eigen::MatrixXcd low = (alg.kappa().transpose() * bc.beta[e].layers[k]) * w.asDiagonal();
      Bk[k].row(e) = Eigen::Map<const Eigen::RowVectorXcd>(low.data(), d * N);
    }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const auto br = curve::bracket(alg, bc.A[a], bc.alpha[b]);
      Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(d);
      for (int k = 0; k < static_cast<int>(Bk.size()); ++k)
        for (int m = 0; m < br.n_layers(); ++m)
          acc += Bk[k] * Eigen::Map<const Eigen::VectorXcd>(br.layers[m].data(), d * N) / double(k + m + 1);
      for (int e = 0; e < d; ++e) raw[(a * d + b) * d + e] = acc(e);
    }
  auto R = [&](int a, int b, int e) { return raw[(a * d + b) * d + e]; };
  t.omega3.resize(raw.size());
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int e = 0; e < d; ++e)
        t.omega3[(a * d + b) * d + e] =
            R(a, b, e) - R(b, a, e) + R(b, e, a) - R(e, b, a) + R(e, a, b) - R(a, e, b);

  if (!with_derivative) return t;
  std::vector<cplx> half(raw.size());
  for (int k = 0; k < d; ++k)
    for (int a = 0; a < d; ++a) {
      const auto nested = contour.dbar1_inv_field(curve::bracket(alg, bc.A[k], bc.alpha[a]));
      for (int b = 0; b < d; ++b) half[(a * d + b) * d + k] = -curve::integrate(contour, alg, nested, bc.A[b]);
    }
  t.dg.resize(raw.size());
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int k = 0; k < d; ++k)
        t.dg[(a * d + b) * d + k] = half[(a * d + b) * d + k] + half[(b * d + a) * d + k];
  return t;
}

cplx metric_closed_form(const curve::ModelParams& params, const lie::AlgebraData& alg, int a, int b) {
  return kTwoPiI * (params.p1 - params.p2) * alg.kappa()(a, b);
}

cplx threeform_closed_form(const curve::ModelParams& params, const lie::AlgebraData& alg, int a, int b,
                           int c) {
  cplx s = 0.0;
  for (int e = 0; e < alg.dim(); ++e) s += alg.kappa()(c, e) * alg.f(a, b, e);
  return -(kTwoPiI / 3.0) * s * (params.p1 + params.p2);
}

cplx gauge_invariance_residual(const curve::Contour& contour, const lie::AlgebraData& alg,
                               const std::function<lie::AlgElement(cplx)>& Phi, int b) {
  check_index(alg, {b});
  // dbar(Phi u) is the density with profile Phi.
  const auto dphi = contour.density_from(alg, Phi);
  const auto Ab = contour.basis_density(alg, b);
  return curve::integrate(contour, alg, contour.dbar1_inv_field(Ab), dphi) +
         curve::integrate(contour, alg, contour.dbar1_inv_field(dphi), Ab);
}

std::vector<Signature> signature(const std::vector<int>& lambdas, Signature sigma_kappa) {
  if (lambdas.empty()) throw ConfigError("lambdas", "need at least one sign");
  std::vector<Signature> out;
  for (int l : lambdas) {
    if (l == 1)
      out.push_back(sigma_kappa);
    else if (l == -1)
      out.push_back({sigma_kappa.neg, sigma_kappa.pos});
    else
      throw ConfigError("lambdas", "entries must be +1 or -1");
  }
  return out;
}

Signature matrix_signature(const Eigen::MatrixXd& m, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  const auto& ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  Signature s;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) <= tol * scale) throw NumericalError("matrix_signature: degenerate form");
    (ev(i) > 0 ? s.pos : s.neg)++;
  }
  return s;
}

double antisymmetry_defect(const GeometryTensors& t) {
  const int d = t.dim;
  double worst = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        const cplx v = t.Omega(a, b, c);
        for (cplx w : {-t.Omega(b, a, c), -t.Omega(a, c, b), -t.Omega(c, b, a), t.Omega(b, c, a),
                       t.Omega(c, a, b)})
          worst = std::max(worst, std::abs(v - w));
      }
  return worst;
}

double symmetry_defect(const GeometryTensors& t) { return (t.g - t.g.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace sigmalab::geometry
