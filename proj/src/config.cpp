#include "sigmalab/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "sigmalab/error.hpp"

namespace sigmalab::config {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k{
      {"experiment", {"name", "seed", "output"}},
      {"algebra", {"name", "n"}},
      {"model", {"p1", "p2", "eps", "alpha_prime"}},
      {"contour", {"nodes"}},
      {"lattice", {"n1", "n2", "L1", "L2", "initial", "modes", "amplitude"}},
      {"lax", {"z", "trace_powers"}},
      {"checks", {"tolerance", "drift_tolerance"}},
      {"betaflow", {"steps", "step"}},
  };
  return k;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(field, "expected a real number, got '" + text + "'");
  if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
  return v;
}

long long parse_int(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(field, "expected an integer, got '" + text + "'");
  return v;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> get(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return trim(*v);
  }
  std::string require(const std::string& section, const std::string& key) const {
    auto v = get(section, key);
    if (!v) throw ConfigError(section + "." + key, "missing required key");
    return *v;
  }

 private:
  const pt::ptree& tree_;
};

}  // namespace

double ExperimentConfig::h() const { return (L1 > 0.0 ? L1 : 2.0 * std::numbers::pi) / n1; }

cplx parse_complex(const std::string& text, const std::string& field) {
  static const std::string num = R"(((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))";
  static const std::regex full("^([+-]?)" + num + "([+-])" + num + "?i$");
  static const std::regex real_only("^([+-]?)" + num + "$");
  static const std::regex imag_only("^([+-]?)" + num + "?i$");
  std::string t;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  std::smatch m;
  auto val = [&](const std::ssub_match& sign, const std::ssub_match& mag) {
    const double x = mag.matched ? parse_double(mag.str(), field) : 1.0;
    return sign.str() == "-" ? -x : x;
  };
  if (std::regex_match(t, m, full)) return {val(m[1], m[2]), val(m[3], m[4])};
  if (std::regex_match(t, m, real_only)) return {val(m[1], m[2]), 0.0};
  if (std::regex_match(t, m, imag_only)) return {0.0, val(m[1], m[2])};
  throw ConfigError(field, "expected a complex number 're+imi', got '" + text + "'");
}

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string format_complex(cplx z) {
  return format_double(z.real()) + (std::signbit(z.imag()) ? "-" : "+") + format_double(std::abs(z.imag())) + "i";
}

ExperimentConfig parse(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("file", "line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, child] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      if (child.empty()) throw ConfigError(section, "key outside of any section");
      throw ConfigError(section, "unknown section");
    }
    for (const auto& [key, v] : child)
      if (!it->second.count(key)) throw ConfigError(section + "." + key, "unknown key");
  }

  const Reader r(tree);
  ExperimentConfig c;
  c.experiment = r.require("experiment", "name");
  if (auto v = r.get("experiment", "seed")) {
    const auto s = parse_int(*v, "experiment.seed");
    if (s < 0) throw ConfigError("experiment.seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = r.get("experiment", "output")) c.output_dir = *v;
  if (auto v = r.get("algebra", "name")) c.algebra = *v;
  if (auto v = r.get("algebra", "n")) c.algebra_n = static_cast<int>(parse_int(*v, "algebra.n"));

  c.model.p1 = parse_complex(r.require("model", "p1"), "model.p1");
  c.model.p2 = parse_complex(r.require("model", "p2"), "model.p2");
  c.model.eps = parse_double(r.require("model", "eps"), "model.eps");
  if (auto v = r.get("model", "alpha_prime")) c.model.alpha_prime = parse_complex(*v, "model.alpha_prime");

  if (auto v = r.get("contour", "nodes")) c.nodes = static_cast<int>(parse_int(*v, "contour.nodes"));
  if (auto v = r.get("lattice", "n1")) c.n1 = static_cast<int>(parse_int(*v, "lattice.n1"));
  if (auto v = r.get("lattice", "n2")) c.n2 = static_cast<int>(parse_int(*v, "lattice.n2"));
  if (auto v = r.get("lattice", "L1")) c.L1 = parse_double(*v, "lattice.L1");
  if (auto v = r.get("lattice", "L2")) c.L2 = parse_double(*v, "lattice.L2");
  if (auto v = r.get("lattice", "initial")) c.initial = *v;
  if (auto v = r.get("lattice", "modes")) c.modes = static_cast<int>(parse_int(*v, "lattice.modes"));
  if (auto v = r.get("lattice", "amplitude")) c.amplitude = parse_double(*v, "lattice.amplitude");
  if (auto v = r.get("lax", "z")) {
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ';'))
      if (!trim(item).empty()) c.z_samples.push_back(parse_complex(item, "lax.z"));
  }
  if (auto v = r.get("lax", "trace_powers")) c.trace_powers = static_cast<int>(parse_int(*v, "lax.trace_powers"));
  if (auto v = r.get("checks", "tolerance")) c.tolerance = parse_double(*v, "checks.tolerance");
  if (auto v = r.get("checks", "drift_tolerance")) c.drift_tolerance = parse_double(*v, "checks.drift_tolerance");
  if (auto v = r.get("betaflow", "steps")) c.flow_steps = static_cast<int>(parse_int(*v, "betaflow.steps"));
  if (auto v = r.get("betaflow", "step")) c.flow_step = parse_double(*v, "betaflow.step");
  validate(c);
  return c;
}

void validate(const ExperimentConfig& c) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    throw ConfigError("experiment.name", "unknown experiment '" + c.experiment + "'");
  if (c.output_dir.empty()) throw ConfigError("experiment.output", "must not be empty");
  const auto alg = lie::make_algebra(c.algebra, c.algebra_n);
  (void)alg;
  for (cplx z : {c.model.p1, c.model.p2, c.model.alpha_prime})
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw ConfigError("model", "values must be finite");
  curve::validate(c.model);
  if (c.nodes < 16) throw ConfigError("contour.nodes", "need at least 16 nodes");
  if (c.n1 < 8) throw ConfigError("lattice.n1", "need at least 8 sites");
  if (c.n2 < 8) throw ConfigError("lattice.n2", "need at least 8 levels");
  if (c.L1 < 0.0 || c.L2 < 0.0) throw ConfigError("lattice.L1", "lengths must be positive");
  const double L1 = c.L1 > 0.0 ? c.L1 : 2.0 * std::numbers::pi;
  const double L2 = c.L2 > 0.0 ? c.L2 : 2.0 * std::numbers::pi;
  if (std::abs(L1 / c.n1 - L2 / c.n2) > 1e-12 * L1 / c.n1)
    throw ConfigError("lattice.L2", "light-cone lattice needs equal steps, L1/n1 == L2/n2");
  if (c.modes < 1) throw ConfigError("lattice.modes", "need at least one mode");
  if (!(c.amplitude >= 0.0)) throw ConfigError("lattice.amplitude", "must be non-negative");
  if (c.trace_powers < 0) throw ConfigError("lax.trace_powers", "must be non-negative");
  if (!(c.tolerance > 0.0)) throw ConfigError("checks.tolerance", "must be positive");
  if (!(c.drift_tolerance > 0.0)) throw ConfigError("checks.drift_tolerance", "must be positive");
  if (c.flow_steps < 1) throw ConfigError("betaflow.steps", "need at least one step");
  if (!(c.flow_step > 0.0)) throw ConfigError("betaflow.step", "must be positive");
  const double sep = c.model.eps / 8.0;
  for (cplx z : c.z_samples) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw ConfigError("lax.z", "values must be finite");
    if (std::abs(z) == 0.0 || z == c.model.p1 || z == c.model.p2)
      throw ConfigError("lax.z", "spectral point " + format_complex(z) + " sits on a pole or zero of omega");
    if (std::abs(std::abs(z - c.model.p1) - c.model.eps) < sep)
      throw ConfigError("lax.z", "spectral point " + format_complex(z) + " lies within eps/8 of the contour");
  }
  if ((c.experiment == "lax-scan" || c.experiment == "charges") && c.z_samples.empty())
    throw ConfigError("lax.z", "missing required key");
}

std::string normalized(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[experiment]\nname = " << c.experiment << "\nseed = " << c.seed << "\noutput = " << c.output_dir << "\n\n";
  os << "[algebra]\nname = " << c.algebra << "\nn = " << c.algebra_n << "\n\n";
  os << "[model]\np1 = " << format_complex(c.model.p1) << "\np2 = " << format_complex(c.model.p2)
     << "\neps = " << format_double(c.model.eps) << "\nalpha_prime = " << format_complex(c.model.alpha_prime)
     << "\n\n";
  os << "[contour]\nnodes = " << c.nodes << "\n\n";
  os << "[lattice]\nn1 = " << c.n1 << "\nn2 = " << c.n2 << "\nL1 = " << format_double(c.L1)
     << "\nL2 = " << format_double(c.L2) << "\ninitial = " << c.initial << "\nmodes = " << c.modes
     << "\namplitude = " << format_double(c.amplitude) << "\n\n";
  os << "[lax]\nz = ";
  for (size_t i = 0; i < c.z_samples.size(); ++i) os << (i ? "; " : "") << format_complex(c.z_samples[i]);
  os << "\ntrace_powers = " << c.trace_powers << "\n\n";
  os << "[checks]\ntolerance = " << format_double(c.tolerance)
     << "\ndrift_tolerance = " << format_double(c.drift_tolerance) << "\n\n";
  os << "[betaflow]\nsteps = " << c.flow_steps << "\nstep = " << format_double(c.flow_step) << "\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("file", "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig load(const std::string& path) { return parse(read_file(path)); }

std::string git_blob_hash(const std::string& bytes) {
  const std::string header = "blob " + std::to_string(bytes.size()) + std::string(1, '\0');
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw NumericalError("sha1 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

}  // namespace sigmalab::config
