#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "sigmalab/betaflow.hpp"
#include "sigmalab/error.hpp"

using namespace sigmalab;
using namespace sigmalab::betaflow;

namespace {

const double kPi = std::numbers::pi;

curve::ModelParams params(cplx p1, cplx p2, double eps = 0.1) {
  curve::ModelParams p;
  p.p1 = p1;
  p.p2 = p2;
  p.eps = eps;
  return p;
}

}  // namespace

TEST_CASE("closed period") {
  CHECK(std::abs(periods(params(1.0, -1.0)).P1) < 1e-12);
  CHECK(std::abs(periods(params(1.0, 2.0)).P1 - cplx(0.0, -6.0 * kPi)) < 1e-10);
  const auto p = params(cplx(0.3, 1.2), cplx(-2.0, 0.5));
  CHECK(std::abs(periods(p).P1 - closed_period_exact(p)) < 1e-10);
}

TEST_CASE("open period matches the closed form modulo P1") {
  const auto p12 = params(1.0, 2.0);
  const auto per = periods(p12);
  CHECK(std::abs(open_period_closed_form(p12) - (2.0 - 3.0 * std::log(2.0))) < 1e-14);
  CHECK(equal_mod(per.P2, 2.0 - 3.0 * std::log(2.0), per.P1, 1e-8));
  // Paths that must detour around the origin.
  for (auto [a, b] : {std::pair<cplx, cplx>{1.0, -1.0}, {cplx(1.0, 0.1), cplx(-2.0, -0.1)}, {cplx(0.5, 1.0), cplx(-0.5, -1.0)}}) {
    const auto p = params(a, b);
    const auto pp = periods(p);
    CHECK(equal_mod(pp.P2, open_period_closed_form(p), pp.P1, 1e-8));
  }
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    const auto p = params(cplx(u(rng), u(rng)), cplx(u(rng), u(rng)));
    if (std::abs(p.p1) < 0.2 || std::abs(p.p2) < 0.2 || std::abs(p.p1 - p.p2) < 0.2) continue;
    const auto pp = periods(p);
    CHECK(equal_mod(pp.P2, open_period_closed_form(p), pp.P1, 1e-8));
  }
}

TEST_CASE("flow keeps P1 and advances P2 at unit rate") {
  const auto p = params(1.0, 2.0);
  const auto s0 = make_state(p);
  CHECK(std::abs(s0.c_flow - flow_constant(p)) < 1e-14);
  CHECK(std::abs(s0.c_flow - 2.0) < 1e-14);
  const auto same = flow_step(s0, 0.0);
  CHECK(same.params.p1 == s0.params.p1);
  CHECK(same.P2 == s0.P2);
  const auto s1 = flow_step(s0, 1e-3);
  CHECK(std::abs(s1.P1 - s0.P1) < 1e-12);
  CHECK(std::abs(s1.params.p1 + s1.params.p2 - 3.0) < 1e-15);
  CHECK(std::abs(dP2_deps(p) - 1.0) < 1e-6);
  CHECK(std::abs(dP2_deps(params(cplx(1.0, 1.0), 2.0)) - 1.0) < 1e-6);
  CHECK_THROWS_AS(flow_step(s0, -0.45), ConfigError);
  CHECK_THROWS_AS(periods(params(1.0, 2.0), 4), ConfigError);
}

TEST_CASE("metric rescaling along the flow") {
  const auto alg = lie::make_algebra("su2");
  const auto p = params(1.0, 2.0);
  const double e = 1e-5;
  auto flowed = p;
  flowed.p1 += e * flow_constant(p);
  flowed.p2 -= e * flow_constant(p);
  const auto g0 = geometry::compute_geometry(p, alg, 256).g;
  const auto g1 = geometry::compute_geometry(flowed, alg, 256).g;
  const cplx factor = 2.0 * p.p1 * p.p2 / std::pow(p.p1 - p.p2, 3);
  CHECK((g1 - g0 * (1.0 + e * factor)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("one-loop beta function") {
  for (const char* name : {"su2", "su3"}) {
    const auto alg = lie::make_algebra(name);
    for (auto [p1, p2] : {std::pair<cplx, cplx>{1.0, -1.0}, {2.0, 1.0}, {cplx(1.0, 1.0), 2.0}}) {
      const auto p = params(p1, p2);
      const auto rep = beta_check(p, alg, 256);
      CHECK(rep.contraction_residual < 1e-12);
      CHECK(rep.beta_vs_metric_residual < 1e-10);
      CHECK(rep.beta_quadrature_residual < 1e-10);
      CHECK(std::abs(rep.rescale_factor - rep.expected_rescale) < 1e-10 * std::abs(rep.expected_rescale));
      CHECK(std::abs(rep.alpha_prime_fitted - cplx(0.0, 4.0 * kPi)) < 1e-6);
      if (std::abs(p1 + p2) > 0.1) CHECK(std::abs(rep.c_tilde_quadrature - 1.0) < 1e-10);
    }
  }
  // beta = -(alpha'/4) kappa at (1, -1), with kappa the Killing form.
  const auto alg = lie::make_algebra("su2");
  const auto p = params(1.0, -1.0);
  const auto rep = beta_check(p, alg, 256);
  const auto kalg = lie::with_pairing(alg, lie::Pairing::Killing);
  CHECK((rep.beta + 0.25 * p.alpha_prime * kalg.kappa()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("WZW limit and rescaling invariance") {
  const auto rep = beta_check(params(2.0, 1.0), lie::make_algebra("su2"), 128);
  CHECK(rep.wzw_limit == 0.0);
  CHECK(rep.c_tilde == 3.0);
  for (size_t i = 1; i < rep.wzw_sequence.size(); ++i)
    CHECK(std::abs(rep.wzw_sequence[i]) < std::abs(rep.wzw_sequence[i - 1]));
  CHECK(std::abs(rep.wzw_sequence.back()) < 1e-6);

  const auto kalg = lie::with_pairing(lie::make_algebra("su2"), lie::Pairing::Killing);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int done = 0;
  while (done < 10) {
    const auto p = params(cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), 0.0);
    if (std::abs(p.p1) < 0.3 || std::abs(p.p2) < 0.3 || std::abs(p.p1 - p.p2) < 0.5) continue;
    auto q = p;
    q.eps = 0.2 * curve::max_eps(p.p1, p.p2);
    const auto r = beta_check(q, lie::make_algebra("su2"), 128);
    const cplx inv = r.beta(1, 1) / kalg.kappa()(1, 1) * (p.p1 - p.p2) * (p.p1 - p.p2) / (p.p1 * p.p2);
    CHECK(std::abs(inv - q.alpha_prime) < 1e-10 * std::abs(q.alpha_prime));
    ++done;
  }
}

TEST_CASE("abelian stub has vanishing beta") {
  const auto rep = beta_check(params(2.0, 1.0), lie::make_algebra("abelian", 2), 64);
  CHECK(rep.abelian);
  CHECK(rep.beta.norm() == 0.0);
}
