#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "sigmalab/error.hpp"
#include "sigmalab/lie.hpp"

using namespace sigmalab;
using namespace sigmalab::lie;

namespace {

AlgElement random_element(const AlgebraData& alg, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXcd c(alg.dim());
  for (int a = 0; a < alg.dim(); ++a) c(a) = n(rng);
  return AlgElement(c);
}

double levi_civita(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0.0;
  return ((a + 1) % 3 == b) ? 1.0 : -1.0;
}

}  // namespace

TEST_CASE("su(2) structure constants are epsilon_abc") {
  const auto alg = make_algebra("su2");
  REQUIRE(alg.dim() == 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        // Independent oracle: commutator of the explicit matrices.
        const Eigen::MatrixXcd comm = alg.basis(a) * alg.basis(b) - alg.basis(b) * alg.basis(a);
        CHECK(std::abs(alg.f(a, b, c) - levi_civita(a, b, c)) < 1e-14);
        CHECK((comm - alg.to_matrix(AlgElement(alg.f(a, b, 0) * alg.unit(0).coeffs +
                                                alg.f(a, b, 1) * alg.unit(1).coeffs +
                                                alg.f(a, b, 2) * alg.unit(2).coeffs)))
                  .norm() < 1e-14);
      }
}

TEST_CASE("su(2) trace pairing is -delta/2") {
  const auto alg = make_algebra("su2");
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(std::abs(alg.kappa()(a, b) - (a == b ? -0.5 : 0.0)) < 1e-15);
  CHECK(std::abs(pairing(alg, alg.unit(0), alg.unit(0)) - cplx(-0.5)) < 1e-15);
}

TEST_CASE("brackets of su(2) generators") {
  const auto alg = make_algebra("su2");
  CHECK((bracket(alg, alg.unit(0), alg.unit(1)) - alg.unit(2)).norm() < 1e-14);
  CHECK((bracket(alg, alg.unit(0), alg.unit(2)) + alg.unit(1)).norm() < 1e-14);
  std::mt19937_64 rng(7);
  const auto x = random_element(alg, rng);
  CHECK(bracket(alg, x, x).norm() < 1e-14);
}

TEST_CASE("structural invariants for su(2), su(3), su(4)") {
  for (int n : {2, 3, 4}) {
    const auto alg = make_algebra("su(" + std::to_string(n) + ")");
    CAPTURE(n);
    CHECK(alg.dim() == n * n - 1);
    CHECK(antisymmetry_residual(alg) < 1e-13);
    CHECK(jacobi_residual(alg) < 1e-12);
    CHECK(kappa_inverse_residual(alg) < 1e-12);
    // Killing form of su(n) is 2n times the trace form.
    CHECK((alg.killing() - 2.0 * n * alg.kappa()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pairing is ad-invariant and <[x,y],z> totally antisymmetric") {
  std::mt19937_64 rng(11);
  for (const char* name : {"su2", "su3"}) {
    const auto alg = make_algebra(name);
    for (int trial = 0; trial < 10; ++trial) {
      const auto x = random_element(alg, rng);
      const auto y = random_element(alg, rng);
      const auto z = random_element(alg, rng);
      const cplx xyz = pairing(alg, bracket(alg, x, y), z);
      CHECK(std::abs(xyz + pairing(alg, y, bracket(alg, x, z))) < 1e-12);
      CHECK(std::abs(xyz - pairing(alg, bracket(alg, y, z), x)) < 1e-12);
      CHECK(std::abs(xyz + pairing(alg, bracket(alg, y, x), z)) < 1e-12);
      const auto g = group_exp(alg, 0.7 * random_element(alg, rng));
      CHECK(std::abs(pairing(alg, adjoint(alg, g, x), adjoint(alg, g, y)) - pairing(alg, x, y)) < 1e-10);
    }
  }
}

TEST_CASE("group exponential and adjoint action") {
  const auto alg = make_algebra("su2");
  CHECK((group_exp(alg, alg.zero()).mat - Eigen::Matrix2cd::Identity()).norm() < 1e-15);
  std::mt19937_64 rng(3);
  const auto x = random_element(alg, rng);
  CHECK((adjoint(alg, identity(alg), x) - x).norm() < 1e-14);

  // exp(theta t_3) rotates the (t_1, t_2) plane by theta.
  const double theta = 1.0;
  const auto g = group_exp(alg, theta * alg.unit(2));
  const auto r1 = adjoint(alg, g, alg.unit(0));
  const auto r2 = adjoint(alg, g, alg.unit(1));
  CHECK(std::abs(r1.coeffs(0) - std::cos(theta)) < 1e-14);
  CHECK(std::abs(r1.coeffs(1) - std::sin(theta)) < 1e-14);
  CHECK(std::abs(r2.coeffs(0) + std::sin(theta)) < 1e-14);
  CHECK(std::abs(r2.coeffs(1) - std::cos(theta)) < 1e-14);
  CHECK(std::abs(r1.coeffs(2)) < 1e-14);
  // Unitarity of the exponential of an anti-Hermitian element.
  CHECK((g.mat * g.mat.adjoint() - Eigen::Matrix2cd::Identity()).norm() < 1e-14);
}

TEST_CASE("Casimir contraction equals minus the Killing form") {
  for (const char* name : {"su2", "su3"}) {
    const auto trace = make_algebra(name);
    CHECK((casimir_contraction(trace) + trace.killing()).cwiseAbs().maxCoeff() < 1e-12);
    const auto killing = with_pairing(trace, Pairing::Killing);
    CHECK((casimir_contraction(killing) + killing.kappa()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("abelian stub and configuration errors") {
  const auto ab = make_algebra("abelian", 3);
  CHECK(ab.is_abelian());
  CHECK(jacobi_residual(ab) == 0.0);
  CHECK_THROWS_AS(with_pairing(ab, Pairing::Killing), ConfigError);
  CHECK_THROWS_AS(make_algebra("so(5)"), ConfigError);
  CHECK_THROWS_AS(make_algebra("su(1)"), ConfigError);
  const auto alg = make_algebra("su2");
  CHECK_THROWS_AS(bracket(alg, alg.unit(0), AlgElement(Eigen::VectorXcd::Zero(8))), NumericalError);
}

TEST_CASE("unitary re-projection") {
  const auto alg = make_algebra("su3");
  std::mt19937_64 rng(5);
  auto g = group_exp(alg, random_element(alg, rng));
  g.mat += 1e-6 * Eigen::MatrixXcd::Random(3, 3);
  const auto u = unitary_projection(g);
  CHECK((u.mat * u.mat.adjoint() - Eigen::Matrix3cd::Identity()).norm() < 1e-13);
  CHECK((u.mat - g.mat).norm() < 1e-5);
  CHECK_THROWS_AS(unitary_projection(GroupElement{Eigen::MatrixXcd::Zero(3, 3)}), NumericalError);
}

TEST_CASE("closed-form su(2) exponential and logarithm agree with Pade") {
  const auto alg = make_algebra("su2");
  std::mt19937_64 rng(17);
  for (double scale : {1e-9, 1e-4, 0.3, 2.0}) {
    const auto x = scale * random_element(alg, rng);
    const Eigen::MatrixXcd pade = alg.to_matrix(x).exp();
    CHECK((group_exp(alg, x).mat - pade).norm() < 1e-14);
    CHECK((group_log(alg, group_exp(alg, x)) - x).norm() < 1e-12 * std::max(1.0, x.norm()));
  }
  const auto alg3 = make_algebra("su3");
  const auto y = 0.4 * random_element(alg3, rng);
  CHECK((group_log(alg3, group_exp(alg3, y)) - y).norm() < 1e-12);
}
