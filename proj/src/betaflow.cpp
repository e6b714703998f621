#include "sigmalab/betaflow.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <numbers>

#include "sigmalab/error.hpp"

namespace sigmalab::betaflow {

namespace {

const cplx kTwoPiI(0.0, 2.0 * std::numbers::pi);

double segment_distance_to_origin(cplx a, cplx b) {
  const cplx d = b - a;
  const double t = std::clamp(-(std::conj(d) * a).real() / std::norm(d), 0.0, 1.0);
  return std::abs(a + t * d);
}

cplx segment_integral(const curve::ModelParams& p, cplx a, cplx b, int pieces) {
  using Gauss = boost::math::quadrature::gauss<double, 20>;
  cplx total = 0.0;
  for (int m = 0; m < pieces; ++m) {
    const cplx za = a + (b - a) * (double(m) / pieces);
    const cplx zb = a + (b - a) * (double(m + 1) / pieces);
    auto re = [&](double t) { return (curve::omega_coeff(p, za + t * (zb - za)) * (zb - za)).real(); };
    auto im = [&](double t) { return (curve::omega_coeff(p, za + t * (zb - za)) * (zb - za)).imag(); };
    total += cplx(Gauss::integrate(re, 0.0, 1.0), Gauss::integrate(im, 0.0, 1.0));
  }
  return total;
}

Eigen::MatrixXcd hh_contraction(const lie::AlgebraData& alg, const Eigen::MatrixXcd& g,
                                const std::vector<cplx>& omega) {
  const int d = alg.dim();
  const Eigen::MatrixXcd gi = g.inverse();
  auto Om = [&](int a, int b, int c) { return omega[(a * d + b) * d + c]; };
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e)
          for (int dd = 0; dd < d; ++dd)
            for (int f = 0; f < d; ++f) out(a, b) += gi(c, e) * gi(dd, f) * Om(a, c, dd) * Om(b, e, f);
  return out;
}

double max_rel(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
  const double s = std::max(y.cwiseAbs().maxCoeff(), 1e-300);
  return (x - y).cwiseAbs().maxCoeff() / s;
}

}  // namespace

cplx closed_period_exact(const curve::ModelParams& p) { return -kTwoPiI * (p.p1 + p.p2); }

cplx open_period_closed_form(const curve::ModelParams& p) {
  return 2.0 * (p.p2 - p.p1) + closed_period_exact(p) / kTwoPiI * std::log(p.p2 / p.p1);
}

cplx flow_constant(const curve::ModelParams& p) { return p.p1 * p.p2 / ((p.p1 - p.p2) * (p.p1 - p.p2)); }

Periods periods(const curve::ModelParams& p, int quad_nodes) {
  if (quad_nodes < 8) throw ConfigError("betaflow.quad_nodes", "need at least 8 nodes");
  Periods out;
  const double r = 0.5 * std::min(std::abs(p.p1), std::abs(p.p2));
  const int n = std::max(64, 4 * quad_nodes);
  cplx sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
    sum += curve::omega_coeff(p, r * e) * cplx(0.0, r) * e;
  }
  out.P1 = sum * (2.0 * std::numbers::pi / n);

  const double margin = 0.1 * std::min(std::abs(p.p1), std::abs(p.p2));
  const int pieces = std::max(1, quad_nodes / 8);
  if (segment_distance_to_origin(p.p1, p.p2) >= margin) {
    out.P2 = segment_integral(p, p.p1, p.p2, pieces);
    return out;
  }
  const cplx mid = 0.5 * (p.p1 + p.p2);
  const cplx normal = cplx(0.0, 1.0) * (p.p2 - p.p1) / std::abs(p.p2 - p.p1);
  const double R = std::max(std::abs(p.p1), std::abs(p.p2));
  for (double sign : {1.0, -1.0}) {
    const cplx w = mid + sign * R * normal;
    if (segment_distance_to_origin(p.p1, w) >= margin && segment_distance_to_origin(w, p.p2) >= margin) {
      out.P2 = segment_integral(p, p.p1, w, pieces) + segment_integral(p, w, p.p2, pieces);
      return out;
    }
  }
  throw NumericalError("periods: no integration path keeps away from z = 0");
}

bool equal_mod(cplx a, cplx b, cplx period, double tol) {
  if (std::abs(period) < 1e-300) return std::abs(a - b) <= tol;
  const double n = std::round(((a - b) / period).real());
  return std::abs(a - b - n * period) <= tol;
}

FlowState make_state(const curve::ModelParams& p, int quad_nodes) {
  curve::validate(p);
  FlowState s;
  s.params = p;
  s.c_flow = flow_constant(p);
  const auto per = periods(p, quad_nodes);
  s.P1 = per.P1;
  s.P2 = per.P2;
  return s;
}

FlowState flow_step(const FlowState& s, double d_eps, int quad_nodes) {
  if (d_eps == 0.0) return s;
  curve::ModelParams p = s.params;
  p.p1 += d_eps * s.c_flow;
  p.p2 -= d_eps * s.c_flow;
  curve::validate(p);
  FlowState out = make_state(p, quad_nodes);
  out.epsilon = s.epsilon + d_eps;
  out.c_tilde = s.c_tilde;
  return out;
}

cplx dP2_deps(const curve::ModelParams& p, double step, int quad_nodes) {
  const cplx c = flow_constant(p);
  curve::ModelParams plus = p, minus = p;
  plus.p1 += step * c;
  plus.p2 -= step * c;
  minus.p1 -= step * c;
  minus.p2 += step * c;
  return (periods(plus, quad_nodes).P2 - periods(minus, quad_nodes).P2) / (2.0 * step);
}

BetaReport beta_check(const curve::ModelParams& p, const lie::AlgebraData& alg, int nodes) {
  curve::validate(p);
  BetaReport rep;
  const int d = alg.dim();
  const cplx ratio = p.p1 * p.p2 / ((p.p1 - p.p2) * (p.p1 - p.p2) * (p.p1 - p.p2));
  rep.expected_rescale = p.alpha_prime / kTwoPiI * ratio;
  rep.wzw_limit = 1.0 - rep.c_tilde * rep.c_tilde / 9.0;
  for (int k = 1; k <= 8; ++k) {
    const double p1 = std::pow(10.0, -k);
    const double x = (p1 + 1.0) / (p1 - 1.0);
    rep.wzw_sequence.push_back(1.0 - rep.c_tilde * rep.c_tilde / 9.0 * x * x);
  }
  if (alg.is_abelian()) {
    rep.abelian = true;
    rep.beta = Eigen::MatrixXcd::Zero(d, d);
    rep.beta_quadrature = rep.beta;
    rep.g = geometry::compute_geometry(p, alg, nodes).g;
    rep.rescale_factor = 0.0;
    rep.flow_rescale_factor = 0.0;
    return rep;
  }
  const auto kalg = lie::with_pairing(alg, lie::Pairing::Killing);
  const Eigen::MatrixXcd& kappa = kalg.kappa();
  rep.contraction_residual = (lie::casimir_contraction(kalg) + kappa).cwiseAbs().maxCoeff();
  const Eigen::MatrixXcd ric = -0.25 * kappa;

  const auto geo = geometry::compute_geometry(p, kalg, nodes);
  rep.g = geo.g;
  std::vector<cplx> omega_cf(static_cast<size_t>(d) * d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) omega_cf[(a * d + b) * d + c] = geometry::threeform_closed_form(p, kalg, a, b, c);

  rep.beta = p.alpha_prime * (ric - 0.25 * rep.c_tilde * rep.c_tilde * hh_contraction(kalg, geo.g, omega_cf));
  // The quadrature 3-form differs from the closed form by a constant factor;
  // c is chosen so that c Omega_quadrature = 3 Omega_closed.
  cplx num = 0.0;
  double den = 0.0;
  for (size_t i = 0; i < omega_cf.size(); ++i) {
    num += std::conj(geo.omega3[i]) * omega_cf[i];
    den += std::norm(geo.omega3[i]);
  }
  rep.c_tilde_quadrature = den > 1e-24 ? std::abs(3.0 * num / den) : 1.0;
  rep.beta_quadrature =
      p.alpha_prime * (ric - 0.25 * rep.c_tilde_quadrature * rep.c_tilde_quadrature * hh_contraction(kalg, geo.g, geo.omega3));

  const Eigen::MatrixXcd expected = rep.expected_rescale * geo.g;
  rep.beta_vs_metric_residual = max_rel(rep.beta, expected);
  rep.beta_quadrature_residual = max_rel(rep.beta_quadrature, expected);
  rep.rescale_factor = rep.beta(0, 0) / geo.g(0, 0);

  const double step = 1e-6;
  curve::ModelParams flowed = p;
  const cplx c = flow_constant(p);
  flowed.p1 += step * c;
  flowed.p2 -= step * c;
  const cplx g_flowed = geometry::metric(curve::Contour(flowed, nodes), kalg, 0, 0);
  rep.flow_rescale_factor = (g_flowed / geo.g(0, 0) - 1.0) / step;
  rep.alpha_prime_fitted = kTwoPiI * rep.flow_rescale_factor / ratio;
  return rep;
}

}  // namespace sigmalab::betaflow
