#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "sigmalab/error.hpp"
#include "sigmalab/experiment.hpp"

using namespace sigmalab;
using experiment::Json;

namespace {

constexpr int kPass = 0, kConfig = 2, kCheck = 3, kNumerical = 4;

int fail(const std::string& type, const std::string& field, const std::string& msg, int code,
         const std::string& out_dir = {}) {
  const auto j = experiment::error_json(type, field, msg, code);
  std::cerr << j.dump(2) << "\n";
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream f(std::filesystem::path(out_dir) / "error.json");
    if (f) f << j.dump(2) << "\n";
  }
  return code;
}

template <class F>
int guarded(F&& body, const std::string& out_dir = {}) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    if (msg.rfind(e.field() + ": ", 0) == 0) msg.erase(0, e.field().size() + 2);
    return fail("config_error", e.field(), msg, kConfig, out_dir);
  } catch (const CheckFailure& e) {
    return fail("check_failure", "", e.what(), kCheck, out_dir);
  } catch (const NumericalError& e) {
    return fail("numerical_error", "", e.what(), kNumerical, out_dir);
  } catch (const std::exception& e) {
    return fail("numerical_error", "", e.what(), kNumerical, out_dir);
  }
}

int cmd_run(const std::string& path, const std::string& output) {
  std::string out_dir = output;
  return guarded(
      [&] {
        const std::string text = config::read_file(path);
        auto cfg = config::parse(text);
        if (!output.empty()) cfg.output_dir = output;
        out_dir = cfg.output_dir;
        const auto res = experiment::run(cfg, config::git_blob_hash(text));
        for (const auto& c : res.checks)
          std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " " << std::setprecision(3) << c.value
                    << " (tol " << c.tolerance << ")\n";
        std::cout << "summary: " << (std::filesystem::path(cfg.output_dir) / "summary.json").string() << "\n";
        return res.pass() ? kPass : kCheck;
      },
      out_dir);
}

int cmd_validate(const std::string& path) {
  return guarded([&] {
    const std::string text = config::read_file(path);
    const auto cfg = config::parse(text);
    std::cout << "# config_hash = " << config::git_blob_hash(text) << "\n" << config::normalized(cfg);
    return kPass;
  });
}

int cmd_report(const std::string& dir) {
  return guarded([&] {
    const auto path = std::filesystem::path(dir) / "summary.json";
    std::ifstream in(path);
    if (!in) throw ConfigError("report", "no summary.json in '" + dir + "'");
    Json s;
    try {
      s = Json::parse(in);
    } catch (const Json::exception& e) {
      throw ConfigError("report", std::string("malformed summary.json: ") + e.what());
    }
    if (!s.contains("checks") || !s.contains("experiment")) throw ConfigError("report", "summary.json lacks checks");
    std::cout << "experiment  " << s["experiment"].get<std::string>() << "\n";
    std::cout << "config_hash " << s.value("config_hash", "") << "\n";
    bool ok = true;
    for (const auto& c : s["checks"]) {
      const bool pass = c.value("pass", false);
      ok = ok && pass;
      std::cout << std::left << std::setw(32) << c.value("name", "?") << std::setw(14) << std::setprecision(4)
                << c.value("value", 0.0) << std::setw(12) << c.value("tolerance", 0.0) << (pass ? "pass" : "FAIL")
                << "\n";
    }
    std::cout << (ok ? "all checks pass" : "some checks failed") << "\n";
    return ok ? kPass : kCheck;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sigma model experiment runner"};
  app.require_subcommand(1);
  std::string cfg_path, out_override, report_dir;

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", cfg_path, "config file")->required();
  run->add_option("-o,--output", out_override, "override experiment.output");
  auto* val = app.add_subcommand("validate", "parse and check a config, print its normalized form");
  val->add_option("config", cfg_path, "config file")->required();
  auto* rep = app.add_subcommand("report", "summarize the results in an output directory");
  rep->add_option("dir", report_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }
  if (*run) return cmd_run(cfg_path, out_override);
  if (*val) return cmd_validate(cfg_path);
  return cmd_report(report_dir);
}
