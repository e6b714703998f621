#include "sigmalab/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sigmalab/betaflow.hpp"
#include "sigmalab/error.hpp"
#include "sigmalab/lax.hpp"

namespace sigmalab::experiment {

namespace {

using Files = std::vector<std::pair<std::string, std::string>>;

Json cjson(cplx z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

struct Ctx {
  const config::ExperimentConfig& cfg;
  lie::AlgebraData alg;
  RunResult res;
  Files files;
  Json data = Json::object();

  void check(const std::string& name, double value, double tol, bool pass_if_le = true) {
    const bool ok = std::isfinite(value) && (pass_if_le ? value <= tol : value >= tol);
    res.checks.push_back({name, value, tol, ok});
  }
  void file(const std::string& name, const std::string& body) { files.emplace_back(name, body); }
};

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void geometry_check(Ctx& x) {
  const auto& p = x.cfg.model;
  const auto geo = geometry::compute_geometry(p, x.alg, x.cfg.nodes);
  const int d = geo.dim;
  Eigen::MatrixXcd closed(d, d);
  std::ostringstream mcsv;
  mcsv << "a,b,re,im,closed_re,closed_im\n" << std::setprecision(17);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      closed(a, b) = geometry::metric_closed_form(p, x.alg, a, b);
      mcsv << a << ',' << b << ',' << geo.g(a, b).real() << ',' << geo.g(a, b).imag() << ','
           << closed(a, b).real() << ',' << closed(a, b).imag() << '\n';
    }
  const double gscale = max_abs(closed);
  const double metric_err = max_abs(geo.g - closed) / gscale;

  double om_err = 0.0, om_closed_max = 0.0, om_max = 0.0;
  cplx num_dot = 0.0, den_dot = 0.0;
  std::ostringstream tcsv;
  tcsv << "a,b,c,re,im,closed_re,closed_im\n" << std::setprecision(17);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        const cplx v = geo.Omega(a, b, c), cf = geometry::threeform_closed_form(p, x.alg, a, b, c);
        om_err = std::max(om_err, std::abs(v - cf));
        om_closed_max = std::max(om_closed_max, std::abs(cf));
        om_max = std::max(om_max, std::abs(v));
        num_dot += std::conj(cf) * v;
        den_dot += std::conj(cf) * cf;
        tcsv << a << ',' << b << ',' << c << ',' << v.real() << ',' << v.imag() << ',' << cf.real() << ','
             << cf.imag() << '\n';
      }
  const double om_scale = om_closed_max > 0.0 ? om_closed_max : gscale;
  double dg = 0.0;
  for (cplx v : geo.dg) dg = std::max(dg, std::abs(v));

  x.check("metric_closed_form", metric_err, 1e-8);
  x.check("threeform_closed_form", om_err / om_scale, 1e-8);
  x.check("threeform_antisymmetry", geometry::antisymmetry_defect(geo) / std::max(om_max, gscale), 1e-12);
  x.check("metric_symmetry", geometry::symmetry_defect(geo) / gscale, 1e-12);
  x.check("metric_derivative_vanishes", dg / gscale, 1e-10);
  x.data["metric_scale"] = gscale;
  x.data["threeform_max"] = om_max;
  x.data["threeform_over_closed_form"] = std::abs(den_dot) > 0.0 ? cjson(num_dot / den_dot) : Json(nullptr);
  x.file("metric.csv", mcsv.str());
  x.file("threeform.csv", tcsv.str());
}

void identity_check(Ctx& x) {
  const curve::Contour contour(x.cfg.model, x.cfg.nodes);
  const auto geo = geometry::compute_geometry(x.cfg.model, x.alg, x.cfg.nodes);
  const auto rep = lax::verify_main_theorem_identities(contour, x.alg, geo, x.cfg.tolerance);
  std::ostringstream csv;
  csv << "block,worst_relative,a,b,c,pass\n" << std::setprecision(17);
  for (const auto& b : rep.blocks) {
    x.check("identity_" + b.name, b.worst_relative, x.cfg.tolerance);
    csv << b.name << ',' << b.worst_relative << ',' << b.a << ',' << b.b << ',' << b.c << ',' << b.pass << '\n';
  }
  x.file("identity.csv", csv.str());
}

dynamics::LatticeRow initial_row(const Ctx& x) {
  const auto& c = x.cfg;
  if (c.initial == "random")
    return dynamics::initial_random_fourier(x.alg, c.n1, c.h(), c.seed, c.modes, c.amplitude);
  if (c.initial == "constant") return dynamics::initial_constant(x.alg, c.n1, lie::identity(x.alg));
  std::ifstream in(c.initial);
  if (!in) throw ConfigError("lattice.initial", "expected random, constant or a readable CSV path, got '" + c.initial + "'");
  return dynamics::initial_from_csv(x.alg, c.n1, c.h(), in);
}

struct Solved {
  geometry::GeometryTensors geo;
  dynamics::EomCoefficients co;
  dynamics::Trajectory traj;
};

Solved solve(Ctx& x) {
  Solved s;
  s.geo = geometry::compute_geometry(x.cfg.model, x.alg, x.cfg.nodes);
  s.co = dynamics::derive_eom_coefficients(x.alg, s.geo, x.cfg.seed);
  s.traj = dynamics::solve(x.alg, initial_row(x), x.cfg.h(), x.cfg.n2, s.co);
  x.data["rho"] = cjson(s.co.rho);
  x.data["gamma"] = cjson(s.co.gamma);
  x.data["h"] = x.cfg.h();
  return s;
}

void simulate(Ctx& x) {
  const auto s = solve(x);
  const auto st = dynamics::residuals(x.alg, s.traj, s.co, &s.geo);
  std::ostringstream ecsv;
  ecsv << "level,e1_re,e1_im,e2_re,e2_im,unitarity_defect\n" << std::setprecision(17);
  const auto e0 = dynamics::chiral_energies(x.alg, s.traj.rows.front(), s.traj.h);
  double drift = 0.0, unit = 0.0;
  for (int T = 0; T < s.traj.levels(); ++T) {
    const auto e = dynamics::chiral_energies(x.alg, s.traj.rows[T], s.traj.h);
    const double u = dynamics::unitarity_defect(s.traj.rows[T]);
    unit = std::max(unit, u);
    const double sc = std::max({std::abs(e0.first), std::abs(e0.second), 1e-300});
    drift = std::max({drift, std::abs(e.first - e0.first) / sc, std::abs(e.second - e0.second) / sc});
    ecsv << T << ',' << e.first.real() << ',' << e.first.imag() << ',' << e.second.real() << ','
         << e.second.imag() << ',' << u << '\n';
  }
  x.check("chiral_energy_drift", drift, 1e-10);
  x.check("unitarity_defect", unit, 1e-10);
  x.check("coordinate_vs_group_eom", st.coordinate_gap, x.cfg.tolerance);
  x.data["eom_residual"] = st.eom;
  x.data["maurer_cartan_residual"] = st.maurer_cartan;
  x.data["levels"] = s.traj.levels();
  x.file("energies.csv", ecsv.str());
  for (int which : {1, 2}) {
    std::ostringstream c;
    c << std::setprecision(17);
    dynamics::write_currents_csv(c, s.traj, which);
    x.file("currents_j" + std::to_string(which) + ".csv", c.str());
  }
}

std::vector<lax::LaxSample> samples(const Ctx& x) {
  const curve::Contour contour(x.cfg.model, x.cfg.nodes);
  std::vector<lax::LaxSample> out;
  for (cplx z : x.cfg.z_samples) out.push_back(lax::lax_sample(contour, x.alg, z));
  return out;
}

void lax_scan(Ctx& x) {
  const auto geo = geometry::compute_geometry(x.cfg.model, x.alg, x.cfg.nodes);
  const auto co = dynamics::derive_eom_coefficients(x.alg, geo, x.cfg.seed);
  std::ostringstream csv;
  csv << "z_re,z_im,region,c1_re,c1_im,c2_re,c2_im,s_re,s_im,flatness,gauge_match,profile\n"
      << std::setprecision(17);
  double flat = 0.0, gauge = 0.0;
  for (const auto& s : samples(x)) {
    const double f = std::abs(lax::flatness_condition(s, co.ratio())) /
                     std::max({1.0, std::abs(s.c1 * s.c2), std::abs(s.c1), std::abs(s.c2)});
    flat = std::max(flat, f);
    gauge = std::max(gauge, s.gauge_match_residual);
    csv << s.z.real() << ',' << s.z.imag() << ',' << lax::to_string(s.region) << ',' << s.c1.real() << ','
        << s.c1.imag() << ',' << s.c2.real() << ',' << s.c2.imag() << ',' << s.s.real() << ',' << s.s.imag()
        << ',' << f << ',' << s.gauge_match_residual << ',' << s.profile_residual << '\n';
  }
  x.check("gauge_fixed_flatness", flat, x.cfg.tolerance);
  x.check("gauge_match", gauge, x.cfg.tolerance);
  x.file("lax.csv", csv.str());
}

void charges(Ctx& x) {
  const auto s = solve(x);
  const auto smp = samples(x);
  const int K = x.cfg.trace_powers > 0 ? x.cfg.trace_powers : lax::default_trace_powers(x.alg);
  const auto table = lax::charge_scan(x.alg, s.traj, smp, K);
  std::ostringstream csv;
  csv << "z_re,z_im,k,level,re,im,drift\n" << std::setprecision(17);
  for (const auto& r : table)
    csv << r.z.real() << ',' << r.z.imag() << ',' << r.k << ',' << r.level << ',' << r.value.real() << ','
        << r.value.imag() << ',' << r.drift << '\n';
  Json per_z = Json::array();
  for (const auto& smp_z : smp) {
    std::vector<lax::ChargeRow> mine;
    for (const auto& r : table)
      if (r.z == smp_z.z) mine.push_back(r);
    per_z.push_back(Json{{"z", cjson(smp_z.z)}, {"region", lax::to_string(smp_z.region)},
                         {"max_trace_drift", lax::max_trace_drift(mine)}});
  }
  x.check("trace_drift", lax::max_trace_drift(table), x.cfg.drift_tolerance);
  const auto w = lax::perturbed_flatness(x.alg, s.traj, smp, s.co.ratio(), {0.0, 1e-2, 1e-3}, x.cfg.seed);
  x.check("on_shell_flatness", w[0], 1e-10);
  x.check("perturbed_flatness_linearity", std::abs(w[1] / (10.0 * w[2]) - 1.0), 0.2);
  x.data["trace_powers"] = K;
  x.data["per_z"] = per_z;
  x.data["flatness_residual_solved"] = lax::max_flatness_residual(x.alg, s.traj, smp);
  x.data["perturbed_flatness"] = Json{{"delta_1e-2", w[1]}, {"delta_1e-3", w[2]}};
  x.file("charges.csv", csv.str());
}

void beta_flow(Ctx& x) {
  const auto& p = x.cfg.model;
  const auto rep = betaflow::beta_check(p, x.alg, x.cfg.nodes);
  const auto per = betaflow::periods(p);
  const cplx dP2 = betaflow::dP2_deps(p);
  x.check("contraction_identity", rep.contraction_residual, 1e-12);
  x.check("beta_vs_metric", rep.beta_vs_metric_residual, 1e-10);
  x.check("wzw_limit", std::abs(rep.wzw_limit), 0.0);
  x.check("dP2_deps", std::abs(dP2 - 1.0), 1e-6);
  x.check("P1_closed_form", std::abs(per.P1 - betaflow::closed_period_exact(p)), 1e-10);
  x.check("P2_closed_form_mod_P1",
          betaflow::equal_mod(per.P2, betaflow::open_period_closed_form(p), per.P1, 1e-8) ? 0.0 : 1.0, 0.0);

  std::ostringstream fcsv;
  fcsv << "epsilon,p1_re,p1_im,p2_re,p2_im,P1_re,P1_im,P2_re,P2_im,P2_shift_minus_eps\n" << std::setprecision(17);
  auto st = betaflow::make_state(p);
  const auto s0 = st;
  double p1_drift = 0.0;
  auto row = [&](const betaflow::FlowState& s) {
    const cplx shift = s.P2 - s0.P2;
    fcsv << s.epsilon << ',' << s.params.p1.real() << ',' << s.params.p1.imag() << ',' << s.params.p2.real()
         << ',' << s.params.p2.imag() << ',' << s.P1.real() << ',' << s.P1.imag() << ',' << s.P2.real() << ','
         << s.P2.imag() << ',' << std::abs(shift - s.epsilon) << '\n';
  };
  row(st);
  for (int i = 0; i < x.cfg.flow_steps; ++i) {
    st = betaflow::flow_step(st, x.cfg.flow_step);
    p1_drift = std::max(p1_drift, std::abs(st.P1 - s0.P1));
    row(st);
  }
  x.check("P1_flow_invariance", p1_drift, 1e-12);

  std::ostringstream bcsv;
  bcsv << "a,b,beta_re,beta_im,g_re,g_im\n" << std::setprecision(17);
  for (int a = 0; a < rep.beta.rows(); ++a)
    for (int b = 0; b < rep.beta.cols(); ++b)
      bcsv << a << ',' << b << ',' << rep.beta(a, b).real() << ',' << rep.beta(a, b).imag() << ','
           << rep.g(a, b).real() << ',' << rep.g(a, b).imag() << '\n';

  x.data["P1"] = cjson(per.P1);
  x.data["P2"] = cjson(per.P2);
  x.data["dP2_deps"] = cjson(dP2);
  x.data["c_tilde"] = rep.c_tilde;
  x.data["c_tilde_quadrature"] = rep.c_tilde_quadrature;
  x.data["rescale_factor"] = cjson(rep.rescale_factor);
  x.data["expected_rescale"] = cjson(rep.expected_rescale);
  x.data["flow_rescale_factor"] = cjson(rep.flow_rescale_factor);
  x.data["alpha_prime"] = cjson(p.alpha_prime);
  x.data["alpha_prime_fitted"] = cjson(rep.alpha_prime_fitted);
  x.data["wzw_sequence"] = rep.wzw_sequence;
  x.data["abelian"] = rep.abelian;
  x.file("flow.csv", fcsv.str());
  x.file("beta.csv", bcsv.str());
}

}  // namespace

bool RunResult::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

RunResult evaluate(const config::ExperimentConfig& cfg, const std::string& config_hash, Files* files) {
  config::validate(cfg);
  Ctx x{cfg, lie::make_algebra(cfg.algebra, cfg.algebra_n), {}, {}, Json::object()};
  const auto& e = cfg.experiment;
  if (e == "geometry-check") geometry_check(x);
  else if (e == "identity-check") identity_check(x);
  else if (e == "simulate") simulate(x);
  else if (e == "lax-scan") lax_scan(x);
  else if (e == "charges") charges(x);
  else beta_flow(x);

  Json checks = Json::array();
  for (const auto& c : x.res.checks)
    checks.push_back(Json{{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  for (const auto& f : x.files) x.res.files.push_back(f.first);
  x.res.summary = Json{{"experiment", e},
                       {"config_hash", config_hash},
                       {"algebra", x.alg.name()},
                       {"p1", config::format_complex(cfg.model.p1)},
                       {"p2", config::format_complex(cfg.model.p2)},
                       {"eps", cfg.model.eps},
                       {"seed", cfg.seed},
                       {"pass", x.res.pass()},
                       {"checks", checks},
                       {"data", x.data},
                       {"files", x.res.files}};
  if (files) *files = std::move(x.files);
  return x.res;
}

RunResult run(const config::ExperimentConfig& cfg, const std::string& config_hash) {
  Files files;
  auto res = evaluate(cfg, config_hash, &files);
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("experiment.output", "cannot create '" + cfg.output_dir + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ConfigError("experiment.output", "cannot write '" + (dir / name).string() + "'");
    out << body;
  };
  for (const auto& [name, body] : files) write(name, body);
  write("summary.json", res.summary.dump(2) + "\n");
  return res;
}

Json error_json(const std::string& type, const std::string& field, const std::string& message, int exit_code) {
  Json e{{"type", type}};
  if (!field.empty()) e["field"] = field;
  e["message"] = message;
  e["exit_code"] = exit_code;
  return Json{{"error", e}};
}

}  // namespace sigmalab::experiment
