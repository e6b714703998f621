#include "sigmalab/dynamics.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "sigmalab/error.hpp"
#include "sigmalab/rng.hpp"

namespace sigmalab::dynamics {

namespace {

int wrap(int k, int n) { return ((k % n) + n) % n; }

Eigen::VectorXcd bracket_vec(const lie::AlgebraData& alg, const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
  return alg.bracket_columns(x, y).col(0);
}

Eigen::MatrixXcd exp_mat(const lie::AlgebraData& alg, const Eigen::VectorXcd& x) {
  return lie::group_exp(alg, lie::AlgElement(x)).mat;
}

Eigen::VectorXcd log_vec(const lie::AlgebraData& alg, const Eigen::MatrixXcd& g) {
  return lie::group_log(alg, lie::GroupElement{g}).coeffs;
}

Eigen::VectorXcd random_vec(const lie::AlgebraData& alg, CounterRng& rng) {
  Eigen::VectorXcd v(alg.dim());
  for (int a = 0; a < alg.dim(); ++a) v(a) = cplx(rng.normal(), rng.normal());
  return v;
}

}  // namespace

Eigen::VectorXcd coordinate_eom_residual(const geometry::GeometryTensors& geo, const Jet& jet) {
  const int d = geo.dim;
  Eigen::VectorXcd out = 2.0 * geo.g.transpose() * jet.d12;
  for (int c = 0; c < d; ++c)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const cplx chr = 0.5 * (geo.dG(c, b, a) + geo.dG(a, c, b) - geo.dG(a, b, c));
        out(c) += chr * (jet.d1(a) * jet.d2(b) + jet.d2(a) * jet.d1(b));
        out(c) -= geo.Omega(a, b, c) * jet.d1(a) * jet.d2(b);
      }
  return out;
}

Eigen::VectorXcd group_eom_residual(const lie::AlgebraData& alg, const EomCoefficients& coeffs,
                                    const Jet& jet) {
  // In exponential coordinates d1 j2 + d2 j1 = 2 d12 at the centre.
  const Eigen::VectorXcd r = 2.0 * coeffs.rho * jet.d12 - coeffs.gamma * bracket_vec(alg, jet.d1, jet.d2);
  return alg.kappa() * r;
}

EomCoefficients derive_eom_coefficients(const lie::AlgebraData& alg, const geometry::GeometryTensors& geo,
                                        std::uint64_t seed, double tol) {
  const int d = alg.dim();
  if (geo.dim != d) throw ConfigError("geometry", "tensor dimension does not match the algebra");
  EomCoefficients out;
  // rho from a pure second-derivative jet.
  {
    Jet jet = Jet::zero(d);
    jet.d12(0) = 1.0;
    const Eigen::VectorXcd e = coordinate_eom_residual(geo, jet);
    const Eigen::VectorXcd basis = 2.0 * alg.kappa().col(0);
    out.rho = basis.dot(e) / basis.squaredNorm();
  }
  if (out.rho == cplx(0.0)) throw CheckFailure("derive_eom_coefficients: rho vanishes");
  // gamma from d1 = t_a, d2 = t_b with a non-trivial bracket.
  out.gamma = 0.0;
  for (int a = 0; a < d && out.gamma == cplx(0.0); ++a)
    for (int b = 0; b < d; ++b) {
      const Eigen::VectorXcd br = alg.kappa() * bracket_vec(alg, alg.unit(a).coeffs, alg.unit(b).coeffs);
      if (br.norm() < 1e-12) continue;
      Jet jet = Jet::zero(d);
      jet.d1(a) = 1.0;
      jet.d2(b) = 1.0;
      const Eigen::VectorXcd e = coordinate_eom_residual(geo, jet);
      out.gamma = -br.dot(e) / br.squaredNorm();
      break;
    }
  CounterRng rng(seed, 0xE0);
  for (int trial = 0; trial < 8; ++trial) {
    const Jet jet{random_vec(alg, rng), random_vec(alg, rng), random_vec(alg, rng)};
    const Eigen::VectorXcd e = coordinate_eom_residual(geo, jet);
    const Eigen::VectorXcd r = group_eom_residual(alg, out, jet);
    const double scale = std::max(e.norm(), std::abs(out.rho) * jet.d12.norm());
    if ((e - r).norm() > tol * scale) {
      std::ostringstream os;
      os << "model inconsistency: coordinate residual is not of group form (relative gap "
         << (e - r).norm() / scale << ")";
      throw CheckFailure(os.str());
    }
  }
  return out;
}

void reconstruct_sites(const lie::AlgebraData& alg, LatticeRow& row, double h, const Eigen::MatrixXcd& sigma0) {
  const int n1 = static_cast<int>(row.e1.cols());
  row.sigma.assign(n1, sigma0);
  for (int k = 0; k + 1 < n1; ++k) {
    const Eigen::MatrixXcd q = exp_mat(alg, h * row.e1.col(k)) * row.sigma[k];
    row.sigma[k + 1] = exp_mat(alg, -h * row.e2.col(k)) * q;
  }
}

LatticeRow initial_from_function(const lie::AlgebraData& alg, int n1, double h,
                                 const std::function<lie::GroupElement(double, double)>& sigma) {
  if (n1 < 8) throw ConfigError("lattice.n1", "lattice sizes below 8x8 are rejected");
  LatticeRow row;
  row.e1.resize(alg.dim(), n1);
  row.e2.resize(alg.dim(), n1);
  row.sigma.resize(n1);
  std::vector<Eigen::MatrixXcd> q(n1);
  for (int k = 0; k < n1; ++k) {
    row.sigma[k] = sigma(k * h, -k * h).mat;
    q[k] = sigma((k + 1) * h, -k * h).mat;
  }
  for (int k = 0; k < n1; ++k) {
    const Eigen::MatrixXcd& pk = row.sigma[k];
    const Eigen::MatrixXcd& pk1 = row.sigma[wrap(k + 1, n1)];
    row.e1.col(k) = log_vec(alg, q[k] * pk.inverse()) / h;
    row.e2.col(k) = log_vec(alg, q[k] * pk1.inverse()) / h;
  }
  return row;
}

LatticeRow initial_constant(const lie::AlgebraData& alg, int n1, const lie::GroupElement& g0) {
  if (n1 < 8) throw ConfigError("lattice.n1", "lattice sizes below 8x8 are rejected");
  LatticeRow row;
  row.e1 = Eigen::MatrixXcd::Zero(alg.dim(), n1);
  row.e2 = Eigen::MatrixXcd::Zero(alg.dim(), n1);
  row.sigma.assign(n1, g0.mat);
  return row;
}

LatticeRow initial_random_fourier(const lie::AlgebraData& alg, int n1, double h, std::uint64_t seed, int modes,
                                  double amplitude) {
  CounterRng rng(seed, 0xF0);
  const int d = alg.dim();
  // coefficient[m] for cos and sin of X and V; 1/m decay keeps the data smooth.
  std::vector<Eigen::VectorXd> xc(modes), xs(modes), vc(modes), vs(modes);
  for (int m = 0; m < modes; ++m) {
    for (auto* v : {&xc[m], &xs[m], &vc[m], &vs[m]}) {
      v->resize(d);
      for (int a = 0; a < d; ++a) (*v)(a) = amplitude * rng.normal() / (m + 1);
    }
  }
  auto field = [&](double t1, double t2) {
    const double t = 0.5 * (t1 + t2), x = 0.5 * (t1 - t2);
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(d);
    for (int m = 0; m < modes; ++m) {
      const double cm = std::cos((m + 1) * x), sm = std::sin((m + 1) * x);
      c += (xc[m] * cm + xs[m] * sm + t * (vc[m] * cm + vs[m] * sm)).cast<cplx>();
    }
    return lie::group_exp(alg, lie::AlgElement(c));
  };
  return initial_from_function(alg, n1, h, field);
}

LatticeRow initial_from_csv(const lie::AlgebraData& alg, int n1, double h, std::istream& in) {
  if (n1 < 8) throw ConfigError("lattice.n1", "lattice sizes below 8x8 are rejected");
  LatticeRow row;
  row.e1 = Eigen::MatrixXcd::Zero(alg.dim(), n1);
  row.e2 = Eigen::MatrixXcd::Zero(alg.dim(), n1);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    std::istringstream ls(line);
    int k, which, comp;
    double re, im;
    char c1, c2, c3, c4;
    if (!(ls >> k >> c1 >> which >> c2 >> comp >> c3 >> re >> c4 >> im))
      throw ConfigError("initial.csv", "malformed line " + std::to_string(lineno));
    if (k < 0 || k >= n1 || comp < 0 || comp >= alg.dim() || (which != 1 && which != 2))
      throw ConfigError("initial.csv", "index out of range on line " + std::to_string(lineno));
    (which == 1 ? row.e1 : row.e2)(comp, k) = cplx(re, im);
  }
  reconstruct_sites(alg, row, h, lie::identity(alg).mat);
  const Eigen::MatrixXcd q_last = exp_mat(alg, h * row.e1.col(n1 - 1)) * row.sigma[n1 - 1];
  const Eigen::MatrixXcd p_wrap = exp_mat(alg, -h * row.e2.col(n1 - 1)) * q_last;
  if ((p_wrap - row.sigma[0]).norm() > 1e-8)
    throw ConfigError("initial.csv", "currents do not close around the periodic direction");
  return row;
}

LatticeRow step(const lie::AlgebraData& alg, const LatticeRow& row, double h, const EomCoefficients& coeffs,
                const SolveOptions& opts) {
  const int n1 = static_cast<int>(row.e1.cols());
  const cplx r = coeffs.ratio();
  LatticeRow next;
  next.e1.resize(row.e1.rows(), n1);
  next.e2.resize(row.e2.rows(), n1);
  for (int k = 0; k < n1; ++k) {
    const Eigen::VectorXcd j2l = row.e2.col(k);
    const Eigen::VectorXcd j1b = row.e1.col(wrap(k + 1, n1));
    const Eigen::MatrixXcd left = exp_mat(alg, h * j2l);
    const Eigen::MatrixXcd right_inv = exp_mat(alg, -h * j1b);
    Eigen::VectorXcd j2r = j2l;
    Eigen::VectorXcd j1t = j1b;
    const double scale = 1.0 + j1b.norm() + j2l.norm();
    bool converged = false;
    double last_change = 1e300;
    for (int it = 0; it < opts.max_iterations; ++it) {
      // The bare update has Jacobian close to -1 through the closure; the mean
      // with the previous iterate is an O(h) contraction with the same fixed point.
      const Eigen::VectorXcd j1t_new =
          0.5 * (j1t + j1b + j2l - j2r + (h * r) * bracket_vec(alg, 0.5 * (j1b + j1t), 0.5 * (j2l + j2r)));
      const Eigen::VectorXcd j2r_new = log_vec(alg, exp_mat(alg, h * j1t_new) * left * right_inv) / h;
      const double change = (j1t_new - j1t).norm() + (j2r_new - j2r).norm();
      j1t = j1t_new;
      j2r = j2r_new;
      // Stop at the rounding floor: tight tolerance, or stagnation once small.
      if (change <= 1e-14 * scale || (change >= last_change && change <= 1e-11 * scale)) {
        converged = true;
        break;
      }
      last_change = change;
    }
    if (!converged) throw NumericalError("step: plaquette iteration did not converge (reduce h)");
    const int out = wrap(k + 1, n1);
    next.e1.col(out) = j1t;
    next.e2.col(out) = j2r;
    if (!j1t.allFinite() || !j2r.allFinite() || j1t.norm() > opts.blowup_bound || j2r.norm() > opts.blowup_bound)
      throw NumericalError("step: current norm exceeded the blow-up bound");
  }
  next.sigma.resize(n1);
  for (int k = 0; k < n1; ++k) {
    Eigen::MatrixXcd s = exp_mat(alg, h * row.e1.col(k)) * row.sigma[k];
    if (opts.reproject) s = lie::unitary_projection(lie::GroupElement{s}).mat;
    next.sigma[wrap(k + 1, n1)] = s;
  }
  return next;
}

Trajectory solve(const lie::AlgebraData& alg, const LatticeRow& initial, double h, int levels,
                 const EomCoefficients& coeffs, const SolveOptions& opts) {
  if (levels < 8 || initial.e1.cols() < 8) throw ConfigError("lattice", "lattice sizes below 8x8 are rejected");
  if (opts.reproject && std::abs(coeffs.ratio().imag()) > 1e-12 * (1.0 + std::abs(coeffs.ratio())))
    throw ConfigError("model", "unitary evolution needs a real ratio gamma/rho (real slice)");
  Trajectory traj;
  traj.n1 = static_cast<int>(initial.e1.cols());
  traj.h = h;
  traj.rows.reserve(levels);
  traj.rows.push_back(initial);
  for (int n = 1; n < levels; ++n) traj.rows.push_back(step(alg, traj.rows.back(), h, coeffs, opts));
  return traj;
}

int first_stencil_level() { return 2; }
int last_stencil_level(const Trajectory& traj) { return traj.levels() - 2; }

SiteCurrents site_currents(const Trajectory& traj, int T, int i) {
  if (T < first_stencil_level() || T > last_stencil_level(traj))
    throw ConfigError("level", "site stencil needs levels T-2 .. T+1");
  const int n = traj.n1;
  const double h = traj.h;
  auto E1 = [&](int lv, int k) { return traj.rows[lv].e1.col(wrap(k, n)); };
  auto E2 = [&](int lv, int k) { return traj.rows[lv].e2.col(wrap(k, n)); };
  SiteCurrents s;
  s.j1 = 0.5 * (E1(T, i) + E1(T - 1, i - 1));
  s.j2 = 0.5 * (E2(T, i - 1) + E2(T - 1, i - 1));
  s.d2j1 = (0.5 * (E1(T + 1, i) + E1(T, i - 1)) - 0.5 * (E1(T - 1, i) + E1(T - 2, i - 1))) / (2.0 * h);
  s.d1j2 = (0.5 * (E2(T + 1, i) + E2(T, i)) - 0.5 * (E2(T - 1, i - 2) + E2(T - 2, i - 2))) / (2.0 * h);
  return s;
}

ResidualStats residuals(const lie::AlgebraData& alg, const Trajectory& traj, const EomCoefficients& coeffs,
                        const geometry::GeometryTensors* geo) {
  ResidualStats st;
  for (int T = first_stencil_level(); T <= last_stencil_level(traj); ++T)
    for (int i = 0; i < traj.n1; ++i) {
      const auto s = site_currents(traj, T, i);
      const Eigen::VectorXcd br = bracket_vec(alg, s.j1, s.j2);
      st.eom = std::max(st.eom, (coeffs.rho * (s.d1j2 + s.d2j1) - coeffs.gamma * br).norm() / std::abs(coeffs.rho));
      st.maurer_cartan = std::max(st.maurer_cartan, (s.d1j2 - s.d2j1 - br).norm());
      if (geo) {
        const Jet jet = s.jet();
        const Eigen::VectorXcd e = coordinate_eom_residual(*geo, jet);
        const Eigen::VectorXcd r = group_eom_residual(alg, coeffs, jet);
        const double scale = std::abs(coeffs.rho) * (jet.d12.norm() + jet.d1.norm() * jet.d2.norm()) + 1e-300;
        st.coordinate_gap = std::max(st.coordinate_gap, (e - r).norm() / scale);
      }
    }
  return st;
}

std::pair<cplx, cplx> chiral_energies(const lie::AlgebraData& alg, const LatticeRow& row, double h) {
  const Eigen::VectorXcd p1 = alg.pairing_columns(row.e1, row.e1);
  const Eigen::VectorXcd p2 = alg.pairing_columns(row.e2, row.e2);
  return {h * p1.sum(), h * p2.sum()};
}

double unitarity_defect(const LatticeRow& row) {
  double worst = 0.0;
  for (const auto& s : row.sigma)
    worst = std::max(worst, (s * s.adjoint() - Eigen::MatrixXcd::Identity(s.rows(), s.cols())).norm());
  return worst;
}

void write_currents_csv(std::ostream& out, const Trajectory& traj, int which) {
  out << "i1,i2,component,re,im\n";
  out.precision(17);
  for (int T = first_stencil_level(); T <= last_stencil_level(traj); ++T)
    for (int i = 0; i < traj.n1; ++i) {
      const auto s = site_currents(traj, T, i);
      const Eigen::VectorXcd& v = which == 1 ? s.j1 : s.j2;
      for (int a = 0; a < v.size(); ++a)
        out << i << ',' << T - i << ',' << a << ',' << v(a).real() << ',' << v(a).imag() << '\n';
    }
}

}  // namespace sigmalab::dynamics
