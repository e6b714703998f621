#ifndef SIGMALAB_CONFIG_HPP
#define SIGMALAB_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sigmalab/curve.hpp"

namespace sigmalab::config {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"geometry-check", "identity-check", "simulate",
                                              "lax-scan",       "charges",        "beta-flow"};
  return names;
}

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  std::string algebra = "su2";
  int algebra_n = 2;

  curve::ModelParams model;
  int nodes = 256;

  int n1 = 64, n2 = 64;
  double L1 = 0.0, L2 = 0.0;  // 0 means 2 pi
  std::string initial = "random";  // random | constant | path to a currents CSV
  int modes = 3;
  double amplitude = 0.25;

  std::vector<cplx> z_samples;
  int trace_powers = 0;  // 0 picks the rank

  double tolerance = 1e-6;
  double drift_tolerance = 1e-3;
  int flow_steps = 10;
  double flow_step = 0.01;

  double h() const;
};

/// "re+imi", "re-imi", "re", "imi", "i", "-i". Throws ConfigError naming field.
cplx parse_complex(const std::string& text, const std::string& field);
std::string format_complex(cplx z);
std::string format_double(double x);

/// Flat INI text with sections experiment, algebra, model, contour, lattice, lax, checks, betaflow.
ExperimentConfig parse(const std::string& text);
ExperimentConfig load(const std::string& path);
/// Re-checks every invariant; parse and load already call this.
void validate(const ExperimentConfig& cfg);
/// Canonical INI text; parse(normalized(c)) == c.
std::string normalized(const ExperimentConfig& cfg);

/// git blob SHA-1 of the bytes: sha1("blob <len>\0" + bytes), lowercase hex.
std::string git_blob_hash(const std::string& bytes);

std::string read_file(const std::string& path);

}  // namespace sigmalab::config

#endif
