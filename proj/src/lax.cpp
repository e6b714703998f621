#include "sigmalab/lax.hpp"

#include <sstream>

#include "sigmalab/error.hpp"
#include "sigmalab/rng.hpp"

namespace sigmalab::lax {

namespace {

lie::AlgElement bracket_elem(const lie::AlgebraData& alg, const lie::AlgElement& x, const lie::AlgElement& y) {
  return lie::bracket(alg, x, y);
}

struct ContourFields {
  std::vector<curve::ContourDensity> A;
  std::vector<curve::SteppedField> alpha, beta;
  ContourFields(const curve::Contour& c, const lie::AlgebraData& alg) {
    for (int a = 0; a < alg.dim(); ++a) {
      A.push_back(c.basis_density(alg, a));
      alpha.push_back(c.dbar1_inv_field(A.back()));
      beta.push_back(c.dbar2_inv_field(A.back()));
    }
  }
};

// Least-squares scalar q with tensor[a][b] = q [t_b, t_a].
cplx fit_bracket_profile(const lie::AlgebraData& alg, const std::vector<std::vector<lie::AlgElement>>& tensor,
                         double& residual) {
  const int d = alg.dim();
  cplx num = 0.0;
  double den = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const Eigen::VectorXcd br = bracket_elem(alg, alg.unit(b), alg.unit(a)).coeffs;
      num += br.dot(tensor[a][b].coeffs);
      den += br.squaredNorm();
    }
  const cplx q = den > 0.0 ? num / den : cplx(0.0);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const Eigen::VectorXcd br = bracket_elem(alg, alg.unit(b), alg.unit(a)).coeffs;
      residual = std::max(residual, (tensor[a][b].coeffs - q * br).norm());
    }
  return q;
}

cplx fit_diagonal_profile(const lie::AlgebraData& alg, const std::vector<lie::AlgElement>& v, double& residual) {
  const int d = alg.dim();
  cplx p = 0.0;
  for (int a = 0; a < d; ++a) p += v[a].coeffs(a);
  p /= double(d);
  for (int a = 0; a < d; ++a) residual = std::max(residual, (v[a] - p * alg.unit(a)).norm());
  return p;
}

}  // namespace

std::string to_string(Region r) { return r == Region::Inside ? "inside" : "outside"; }

LaxSample lax_sample(const curve::Contour& contour, const lie::AlgebraData& alg, cplx z) {
  const auto& p = contour.params();
  if (z == cplx(0.0) || z == p.p1 || z == p.p2)
    throw ConfigError("z", "spectral point must avoid 0, p1 and p2");
  if (contour.contour_distance(z) < p.eps / 8.0)
    throw ConfigError("z", "spectral point closer than eps/8 to the contour");
  const int d = alg.dim();
  const ContourFields cf(contour, alg);
  LaxSample s;
  s.z = z;
  s.region = contour.inside(z) ? Region::Inside : Region::Outside;
  for (int a = 0; a < d; ++a) {
    s.alpha.push_back(curve::dbar1_inv(contour, alg, cf.A[a], z));
    s.beta.push_back(curve::dbar2_inv(contour, alg, cf.A[a], z));
  }
  s.dalpha.assign(d, std::vector<lie::AlgElement>(d));
  s.dbeta.assign(d, std::vector<lie::AlgElement>(d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      s.dalpha[a][b] = -1.0 * curve::dbar1_inv(contour, alg, curve::bracket(alg, cf.A[b], cf.alpha[a]), z);
      s.dbeta[a][b] = -1.0 * curve::dbar2_inv(contour, alg, curve::bracket(alg, cf.A[b], cf.beta[a]), z);
    }

  double res = 0.0;
  s.p_alpha = fit_diagonal_profile(alg, s.alpha, res);
  s.p_beta = fit_diagonal_profile(alg, s.beta, res);
  s.q_alpha = fit_bracket_profile(alg, s.dalpha, res);
  s.q_beta = fit_bracket_profile(alg, s.dbeta, res);
  s.profile_residual = res;

  // First-order gauge match of the paper's connection with c1 j1 dt1 + c2 j2 dt2.
  const cplx dp = s.p_alpha - s.p_beta;
  if (std::abs(dp) < 1e-300) throw NumericalError("lax_sample: beta - alpha vanishes at z");
  s.s = (s.q_alpha - s.q_beta) / dp - 0.5;
  s.c1 = s.p_alpha + s.s;
  s.c2 = s.p_beta + s.s;
  s.gauge_match_residual =
      std::abs(0.5 * s.p_alpha + 0.5 * s.s + s.s * s.p_alpha + 0.5 * s.s * s.s - s.q_alpha);
  return s;
}

cplx flatness_condition(const LaxSample& s, cplx ratio) {
  return s.c2 * (1.0 + ratio) / 2.0 - s.c1 * (ratio - 1.0) / 2.0 + s.c1 * s.c2;
}

lie::AlgElement flatness_residual(const lie::AlgebraData& alg, const LaxSample& sample, const dynamics::Jet& jet) {
  const int d = alg.dim();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d);
  for (int a = 0; a < d; ++a) out += jet.d12(a) * (sample.beta[a] - sample.alpha[a]).coeffs;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const cplx w = jet.d1(a) * jet.d2(b);
      if (w == cplx(0.0)) continue;
      const lie::AlgElement coeff =
          sample.dbeta[b][a] - sample.dalpha[a][b] + bracket_elem(alg, sample.alpha[a], sample.beta[b]);
      out += w * coeff.coeffs;
    }
  return lie::AlgElement(out);
}

bool IdentityReport::pass() const {
  for (const auto& b : blocks)
    if (!b.pass) return false;
  return !blocks.empty();
}

IdentityReport verify_main_theorem_identities(const curve::Contour& contour, const lie::AlgebraData& alg,
                                              const geometry::GeometryTensors& geo, double tol) {
  const int d = alg.dim();
  const ContourFields cf(contour, alg);
  // F[a][b]: coefficient of d1^a d2^b in the flatness equation, on the contour.
  std::vector<std::vector<curve::SteppedField>> F(d, std::vector<curve::SteppedField>(d));
  std::vector<std::vector<curve::SteppedField>> dalpha(d, std::vector<curve::SteppedField>(d));
  std::vector<std::vector<curve::SteppedField>> dbeta(d, std::vector<curve::SteppedField>(d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      dalpha[a][b] = -1.0 * contour.dbar1_inv_field(curve::bracket(alg, cf.A[b], cf.alpha[a]));
      dbeta[a][b] = -1.0 * contour.dbar2_inv_field(curve::bracket(alg, cf.A[b], cf.beta[a]));
    }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      F[a][b] = dbeta[b][a] - dalpha[a][b] + curve::bracket(alg, cf.alpha[a], cf.beta[b]);

  const double scale = geo.g.cwiseAbs().maxCoeff();
  IdentityReport rep;
  rep.tolerance = tol;
  BlockReport order2{"second-derivative"}, sym{"symmetric"}, alt{"antisymmetric"};
  auto record = [&](BlockReport& blk, cplx lhs, cplx rhs, int a, int b, int c) {
    const double err = std::abs(lhs - rhs) / std::max(std::abs(rhs), scale);
    if (err > blk.worst_relative || blk.a < 0) {
      blk.worst_relative = err;
      blk.a = a;
      blk.b = b;
      blk.c = c;
    }
  };
  for (int a = 0; a < d; ++a)
    for (int c = 0; c < d; ++c) {
      const cplx lhs = curve::integrate(contour, alg, cf.beta[a] - cf.alpha[a], cf.A[c]);
      record(order2, lhs, -geo.g(a, c), a, -1, c);
    }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        const cplx s_lhs = 0.25 * curve::integrate(contour, alg, F[a][b] + F[b][a], cf.A[c]);
        const cplx chr = 0.5 * (geo.dG(c, b, a) + geo.dG(a, c, b) - geo.dG(a, b, c));
        record(sym, s_lhs, -0.5 * chr, a, b, c);
        const cplx a_lhs = 0.25 * curve::integrate(contour, alg, F[a][b] - F[b][a], cf.A[c]);
        record(alt, a_lhs, 0.25 * geo.Omega(a, b, c), a, b, c);
      }
  for (auto* blk : {&order2, &sym, &alt}) {
    blk->pass = blk->worst_relative <= tol;
    rep.blocks.push_back(*blk);
  }
  return rep;
}

lie::GroupElement holonomy_matrix(const lie::AlgebraData& alg, const dynamics::LatticeRow& row, double h,
                                  cplx c1, cplx c2) {
  const int n = static_cast<int>(row.e1.cols());
  Eigen::MatrixXcd hol = Eigen::MatrixXcd::Identity(alg.rep_dim(), alg.rep_dim());
  for (int k = 0; k < n; ++k) {
    // P_k -> Q_k along t1, then Q_k -> P_{k+1} against t2.
    hol = lie::group_exp(alg, lie::AlgElement((-h * c1) * row.e1.col(k))).mat * hol;
    hol = lie::group_exp(alg, lie::AlgElement((h * c2) * row.e2.col(k))).mat * hol;
  }
  return lie::GroupElement{hol};
}

HolonomyRecord holonomy(const lie::AlgebraData& alg, const dynamics::LatticeRow& row, double h,
                        const LaxSample& sample, int level, int K) {
  if (K < 1) throw ConfigError("charges.K", "need at least one trace power");
  HolonomyRecord rec;
  rec.z = sample.z;
  rec.level = level;
  rec.hol = holonomy_matrix(alg, row, h, sample.c1, sample.c2);
  Eigen::MatrixXcd power = rec.hol.mat;
  for (int k = 1; k <= K; ++k) {
    rec.charges.push_back(power.trace());
    power = power * rec.hol.mat;
  }
  return rec;
}

std::vector<ChargeRow> charge_scan(const lie::AlgebraData& alg, const dynamics::Trajectory& traj,
                                   const std::vector<LaxSample>& samples, int K) {
  std::vector<ChargeRow> out;
  for (const auto& s : samples) {
    std::vector<cplx> initial;
    for (int lv = 0; lv < traj.levels(); ++lv) {
      const auto rec = holonomy(alg, traj.rows[lv], traj.h, s, lv, K);
      if (lv == 0) initial = rec.charges;
      for (int k = 1; k <= K; ++k) {
        const cplx v0 = initial[k - 1];
        const double denom = std::abs(v0) > 1e-12 ? std::abs(v0) : 1.0;
        out.push_back({s.z, k, lv, rec.charges[k - 1], std::abs(rec.charges[k - 1] - v0) / denom});
      }
    }
  }
  return out;
}

double max_trace_drift(const std::vector<ChargeRow>& table) {
  double worst = 0.0;
  for (const auto& r : table)
    if (r.k == 1) worst = std::max(worst, r.drift);
  return worst;
}

int default_trace_powers(const lie::AlgebraData& alg) { return std::max(1, alg.rep_dim() - 1); }

double max_flatness_residual(const lie::AlgebraData& alg, const dynamics::Trajectory& traj,
                             const std::vector<LaxSample>& samples) {
  double w = 0.0;
  for (int T = dynamics::first_stencil_level(); T <= dynamics::last_stencil_level(traj); ++T)
    for (int i = 0; i < traj.n1; ++i) {
      const auto jet = dynamics::site_currents(traj, T, i).jet();
      for (const auto& s : samples) w = std::max(w, flatness_residual(alg, s, jet).norm());
    }
  return w;
}

dynamics::Jet on_shell_jet(const lie::AlgebraData& alg, const dynamics::Jet& jet, cplx ratio) {
  dynamics::Jet out = jet;
  out.d12 = 0.5 * ratio * lie::bracket(alg, lie::AlgElement(jet.d1), lie::AlgElement(jet.d2)).coeffs;
  return out;
}

std::vector<double> perturbed_flatness(const lie::AlgebraData& alg, const dynamics::Trajectory& traj,
                                       const std::vector<LaxSample>& samples, cplx ratio,
                                       const std::vector<double>& deltas, std::uint64_t seed, int sites) {
  const int lo = dynamics::first_stencil_level(), hi = dynamics::last_stencil_level(traj);
  if (hi < lo || sites < 1) throw ConfigError("lattice", "trajectory too short for jet sampling");
  const int dim = alg.dim();
  std::vector<double> worst(deltas.size(), 0.0);
  for (int s = 0; s < sites; ++s) {
    const int T = lo + (sites == 1 ? 0 : static_cast<int>(static_cast<long>(s) * (hi - lo) / (sites - 1)));
    const int i = static_cast<int>((static_cast<long>(s) * 7919) % traj.n1);
    const auto base = on_shell_jet(alg, dynamics::site_currents(traj, T, i).jet(), ratio);
    CounterRng rng(seed, static_cast<std::uint64_t>(s));
    Eigen::VectorXd dir(3 * dim);
    for (int k = 0; k < 3 * dim; ++k) dir(k) = rng.normal();
    dir.normalize();
    for (size_t d = 0; d < deltas.size(); ++d) {
      dynamics::Jet jet = base;
      jet.d1 += deltas[d] * dir.segment(0, dim).cast<cplx>();
      jet.d2 += deltas[d] * dir.segment(dim, dim).cast<cplx>();
      jet.d12 += deltas[d] * dir.segment(2 * dim, dim).cast<cplx>();
      for (const auto& smp : samples) worst[d] = std::max(worst[d], flatness_residual(alg, smp, jet).norm());
    }
  }
  return worst;
}

}  // namespace sigmalab::lax
