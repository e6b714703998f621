#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "sigmalab/error.hpp"
#include "sigmalab/lax.hpp"
#include "sigmalab/rng.hpp"

using namespace sigmalab;
using namespace sigmalab::lax;

namespace {

const double kPi = std::numbers::pi;

curve::ModelParams params(cplx p1, cplx p2, double eps) {
  curve::ModelParams p;
  p.p1 = p1;
  p.p2 = p2;
  p.eps = eps;
  return p;
}

// Hand-derived basepoint derivatives: with u = 1 inside, 0 outside,
// d alpha_a / d lambda^b = -(1/2)(f^2 u^2 - H)[t_b, t_a] and
// d beta_b / d lambda^a = (f^2 (u - u^2/2) + J/2)[t_a, t_b].
cplx H_profile(const curve::ModelParams& p, cplx z) {
  return p.p1 * p.p1 / ((z - p.p1) * (z - p.p1)) + p.p1 / (z - p.p1);
}
cplx J_profile(const curve::ModelParams& p, cplx z) {
  const cplx d = p.p1 - p.p2;
  return -p.p2 * (p.p1 + p.p2) / (d * (z - p.p2)) - p.p1 * p.p1 / ((z - p.p1) * (z - p.p1)) +
         2.0 * p.p1 * p.p2 / (d * (z - p.p1));
}

}  // namespace

TEST_CASE("connection components in both regions") {
  const auto alg = lie::make_algebra("su2");
  for (auto [p1, p2] : {std::pair<cplx, cplx>{1.0, -1.0}, {2.0, 1.0}, {cplx(1.0, 1.0), 2.0}}) {
    const auto p = params(p1, p2, 0.1);
    const curve::Contour c(p, 512);
    for (cplx z : {p1 + 0.04, p1 + cplx(-0.03, 0.05), p1 + 0.5, cplx(-0.4, 0.9), cplx(3.0, -2.0)}) {
      const auto s = lax_sample(c, alg, z);
      const cplx f = curve::basis_profile(p, z);
      const double u = s.region == Region::Inside ? 1.0 : 0.0;
      CHECK((s.region == Region::Inside) == (std::abs(z - p1) < 0.1));
      for (int a = 0; a < 3; ++a) {
        CHECK((s.alpha[a] - (u * f) * alg.unit(a)).norm() <= 1e-8 * std::abs(f));
        CHECK((s.beta[a] + ((1.0 - u) * f) * alg.unit(a)).norm() <= 1e-8 * std::abs(f));
        for (int b = 0; b < 3; ++b) {
          const auto br_ba = lie::bracket(alg, alg.unit(b), alg.unit(a));
          const auto want_a = (-0.5 * (f * f * u * u - H_profile(p, z))) * br_ba;
          const auto want_b = (f * f * (u - 0.5 * u * u) + 0.5 * J_profile(p, z)) * br_ba;
          const double scale = 1.0 + std::abs(f * f) + std::abs(H_profile(p, z));
          CHECK((s.dalpha[a][b] - want_a).norm() <= 1e-8 * scale);
          CHECK((s.dbeta[a][b] - want_b).norm() <= 1e-8 * scale);
        }
      }
      CHECK(s.profile_residual < 1e-8 * (1.0 + std::abs(f * f)));
      CHECK(s.gauge_match_residual < 1e-9 * (1.0 + std::abs(f * f)));
      const cplx ratio = (p1 + p2) / (p1 - p2);
      CHECK(std::abs(flatness_condition(s, ratio)) < 1e-9 * (1.0 + std::abs(f * f)));
    }
  }
}

TEST_CASE("abelian stub has no derivative terms") {
  const auto alg = lie::make_algebra("abelian", 2);
  const auto p = params(2.0, 1.0, 0.1);
  const curve::Contour c(p, 128);
  const auto s = lax_sample(c, alg, 2.05);
  for (const auto& row : s.dalpha)
    for (const auto& v : row) CHECK(v.norm() == 0.0);
  for (const auto& row : s.dbeta)
    for (const auto& v : row) CHECK(v.norm() == 0.0);
}

TEST_CASE("spectral point guards") {
  const auto alg = lie::make_algebra("su2");
  const auto p = params(2.0, 1.0, 0.1);
  const curve::Contour c(p, 64);
  CHECK_THROWS_AS(lax_sample(c, alg, 0.0), ConfigError);
  CHECK_THROWS_AS(lax_sample(c, alg, 1.0), ConfigError);
  CHECK_THROWS_AS(lax_sample(c, alg, 2.1 + 0.001), ConfigError);
}

TEST_CASE("flatness residual basics") {
  const auto alg = lie::make_algebra("su2");
  const auto p = params(2.0, 1.0, 0.1);
  const curve::Contour c(p, 256);
  const auto s = lax_sample(c, alg, 2.05);
  CHECK(flatness_residual(alg, s, dynamics::Jet::zero(3)).norm() == 0.0);
  for (int a = 0; a < 3; ++a) {
    auto jet = dynamics::Jet::zero(3);
    jet.d12(a) = 1.0;
    CHECK((flatness_residual(alg, s, jet) - (s.beta[a] - s.alpha[a])).norm() < 1e-14);
  }
  // On-shell jets d12 = (r/2)[d1, d2] are flat at every z.
  CounterRng rng(4);
  const cplx r = 3.0;
  for (cplx z : {cplx(2.05), cplx(0.3, 0.7)}) {
    const auto sz = lax_sample(c, alg, z);
    auto jet = dynamics::Jet::zero(3);
    for (int a = 0; a < 3; ++a) {
      jet.d1(a) = rng.normal();
      jet.d2(a) = rng.normal();
    }
    jet.d12 = 0.5 * r * lie::bracket(alg, lie::AlgElement(jet.d1), lie::AlgElement(jet.d2)).coeffs;
    CHECK(flatness_residual(alg, sz, jet).norm() < 1e-9 * std::norm(curve::basis_profile(p, z)));
  }
}

TEST_CASE("main-theorem coefficient identities") {
  for (const char* name : {"su2", "su3"}) {
    const auto alg = lie::make_algebra(name);
    for (auto [p1, p2] : {std::pair<cplx, cplx>{2.0, 1.0}, {1.0, -1.0}, {cplx(1.0, 1.0), 2.0}}) {
      const auto p = params(p1, p2, 0.1);
      const curve::Contour c(p, 512);
      const auto geo = geometry::compute_geometry(p, alg, 512);
      const auto rep = verify_main_theorem_identities(c, alg, geo);
      CHECK(rep.pass());
      for (const auto& b : rep.blocks) CHECK(b.worst_relative < 1e-10);
    }
  }
}

TEST_CASE("identity suite reports the paper's closed-form 3-form as failing when p1 + p2 != 0") {
  const auto alg = lie::make_algebra("su2");
  const auto p = params(2.0, 1.0, 0.1);
  const curve::Contour c(p, 256);
  auto geo = geometry::compute_geometry(p, alg, 256);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int e = 0; e < 3; ++e) geo.omega3[(a * 3 + b) * 3 + e] = geometry::threeform_closed_form(p, alg, a, b, e);
  const auto rep = verify_main_theorem_identities(c, alg, geo);
  CHECK_FALSE(rep.pass());
  CHECK(rep.blocks[0].pass);
  CHECK_FALSE(rep.blocks[2].pass);
}

TEST_CASE("holonomy of constant and conjugated data") {
  const auto alg = lie::make_algebra("su2");
  const auto p = params(2.0, 1.0, 0.24);
  const curve::Contour c(p, 256);
  const auto s = lax_sample(c, alg, 2.2);
  const auto row = dynamics::initial_constant(alg, 16, lie::group_exp(alg, alg.unit(1)));
  const auto rec = holonomy(alg, row, 0.1, s, 0, 2);
  CHECK(rec.hol.mat.isIdentity(1e-15));
  CHECK(std::abs(rec.charges[0] - 2.0) < 1e-15);

  const int n = 32;
  const double h = 2 * kPi / n;
  auto random_row = dynamics::initial_random_fourier(alg, n, h, 9, 3, 0.3);
  const auto g = lie::group_exp(alg, 0.9 * alg.unit(0) + 0.4 * alg.unit(2));
  auto conj = random_row;
  for (int k = 0; k < n; ++k) {
    conj.e1.col(k) = lie::adjoint(alg, g, lie::AlgElement(random_row.e1.col(k))).coeffs;
    conj.e2.col(k) = lie::adjoint(alg, g, lie::AlgElement(random_row.e2.col(k))).coeffs;
  }
  for (cplx z : {cplx(2.2), cplx(-0.5, 1.0)}) {
    const auto sz = lax_sample(c, alg, z);
    const auto r1 = holonomy(alg, random_row, h, sz, 0, 2);
    const auto r2 = holonomy(alg, conj, h, sz, 0, 2);
    for (int k = 0; k < 2; ++k) CHECK(std::abs(r1.charges[k] - r2.charges[k]) < 1e-10 * std::abs(r1.charges[k]));
    CHECK(std::abs(std::abs(r1.hol.mat.determinant()) - 1.0) < 1e-8);
  }
  CHECK(default_trace_powers(alg) == 1);
  CHECK(default_trace_powers(lie::make_algebra("su3")) == 2);
}

TEST_CASE("charges are conserved to second order and separate spectral points") {
  const auto alg = lie::make_algebra("su2");
  const auto p = params(2.0, 1.0, 0.24);
  const curve::Contour c(p, 256);
  const auto geo = geometry::compute_geometry(p, alg, 256);
  const auto co = dynamics::derive_eom_coefficients(alg, geo);
  const std::vector<LaxSample> samples{lax_sample(c, alg, 2.2), lax_sample(c, alg, cplx(2.0, -0.2)),
                                       lax_sample(c, alg, cplx(0.3, 0.7)), lax_sample(c, alg, cplx(-2.0, 1.0))};
  std::vector<double> drifts;
  for (int n : {32, 64}) {
    const double h = 2 * kPi / n;
    const auto traj = dynamics::solve(alg, dynamics::initial_random_fourier(alg, n, h, 7, 3, 0.25), h, n, co);
    std::vector<double> per_z;
    for (const auto& s : samples) per_z.push_back(max_trace_drift(charge_scan(alg, traj, {s}, 1)));
    if (!drifts.empty())
      for (size_t i = 0; i < per_z.size(); ++i) CHECK(drifts[i] / per_z[i] >= 3.0);
    drifts = per_z;
  }
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const int n = 16;
    const double h = 2 * kPi / n;
    const auto row = dynamics::initial_random_fourier(alg, n, h, seed, 3, 0.25);
    const cplx q1 = holonomy(alg, row, h, samples[2], 0, 1).charges[0];
    const cplx q2 = holonomy(alg, row, h, lax_sample(c, alg, cplx(0.5, 1.1)), 0, 1).charges[0];
    CHECK(std::abs(q1 - q2) > 1e-4);
  }
  const auto zero = dynamics::solve(alg, dynamics::initial_constant(alg, 16, lie::identity(alg)), 0.3, 10, co);
  for (const auto& row : charge_scan(alg, zero, samples, 1)) CHECK(row.drift == 0.0);
}

TEST_CASE("flatness residual on solved trajectories and perturbed jets") {
  const auto alg = lie::make_algebra("su2");
  const auto p = params(2.0, 1.0, 0.24);
  const curve::Contour c(p, 256);
  const auto geo = geometry::compute_geometry(p, alg, 256);
  const auto co = dynamics::derive_eom_coefficients(alg, geo);
  const auto s_in = lax_sample(c, alg, 2.2);
  const auto s_out = lax_sample(c, alg, cplx(0.3, 0.7));
  std::vector<double> worst;
  for (int n : {32, 64}) {
    const double h = 2 * kPi / n;
    const auto traj = dynamics::solve(alg, dynamics::initial_random_fourier(alg, n, h, 2, 3, 0.25), h, n, co);
    double w = 0.0;
    for (int T = dynamics::first_stencil_level(); T <= dynamics::last_stencil_level(traj); ++T)
      for (int i = 0; i < n; ++i) {
        const auto jet = dynamics::site_currents(traj, T, i).jet();
        for (const auto* s : {&s_in, &s_out}) w = std::max(w, flatness_residual(alg, *s, jet).norm());
      }
    worst.push_back(w);
  }
  CHECK(worst[0] / worst[1] >= 3.0);
}

TEST_CASE("perturbed on-shell jets") {
  const auto alg = lie::make_algebra("su2");
  const auto p = params(2.0, 1.0, 0.24);
  const curve::Contour c(p, 256);
  const auto geo = geometry::compute_geometry(p, alg, 256);
  const auto co = dynamics::derive_eom_coefficients(alg, geo);
  const std::vector<LaxSample> samples{lax_sample(c, alg, 2.2), lax_sample(c, alg, cplx(0.3, 0.7))};
  const int n = 32;
  const double h = 2 * kPi / n;
  const auto traj = dynamics::solve(alg, dynamics::initial_random_fourier(alg, n, h, 2, 3, 0.25), h, n, co);
  const auto w = perturbed_flatness(alg, traj, samples, co.ratio(), {0.0, 1e-2, 1e-3}, 5, 32);
  CHECK(w[0] < 1e-12);
  CHECK(std::abs(w[1] / w[2] / 10.0 - 1.0) < 0.2);
  CHECK(max_flatness_residual(alg, traj, samples) > 0.0);
}
