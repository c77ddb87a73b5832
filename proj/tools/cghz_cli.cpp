// Command-line front end: `cghz run` executes a preparation scheme, the bare
// entangler or the dephasing analysis; `cghz sweep` tabulates probe-amplitude
// requirements. Data goes to stdout (or --out), diagnostics to stderr.
//
// Exit status: 0 success, 1 runtime failure, 2 usage error, 3 protocol
// precondition violated.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cghz/report.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPrecondition = 3;

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot open " << out_path << " for writing\n";
    return kExitRuntime;
  }
  f << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for km-photon concatenated GHZ state preparation with weak cross-Kerr entanglers"};
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
  app.require_subcommand(1);

  std::string scheme = "2";
  std::size_t k = 2;
  std::size_t m = 3;
  double alpha = 1e6;
  double theta_budget = 1e-2;
  std::size_t shots = 1;
  std::uint64_t seed = 0;
  std::vector<unsigned> forced;
  std::string format = "json";
  std::string out_path;
  std::size_t threads = 1;
  bool verbose = false;
  bool timing = false;
  std::vector<double> p_grid{0.0, 0.05, 0.1, 0.25, 0.5};
  double target_err = 1e-3;
  std::vector<unsigned> m_values;
  std::vector<double> alphas;
  std::size_t mc_samples = 100000;

  app.add_option("--scheme", scheme, "1, 2, entangler or analysis")->capture_default_str();
  app.add_option("--k", k, "number of logical blocks")->capture_default_str();
  app.add_option("--m", m, "photons per block")->capture_default_str();
  app.add_option("--alpha", alpha, "probe amplitude")->capture_default_str();
  app.add_option("--theta-budget", theta_budget, "(2^(m-1)-1) * theta")->capture_default_str();
  app.add_option("--shots", shots, "repetitions")->capture_default_str();
  app.add_option("--seed", seed, "64-bit seed")->capture_default_str();
  app.add_option("--force-window", forced, "condition each block entangler on this window")->delimiter(',');
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--threads", threads, "worker threads; results do not depend on it")->capture_default_str();
  app.add_flag("--verbose", verbose, "include per-shot records");
  app.add_flag("--timing", timing, "report wall-clock time (makes output run-dependent)");
  app.add_option("--p-grid", p_grid, "phase-flip probabilities for --scheme analysis")->delimiter(',');
  app.add_option("--target-err", target_err, "misclassification target for required alpha")->capture_default_str();
  app.add_option("--m-list", m_values, "sweep: block sizes")->delimiter(',');
  app.add_option("--alpha-list", alphas, "sweep: probe amplitudes (default: required alpha per row)")
      ->delimiter(',');
  app.add_option("--mc-samples", mc_samples, "sweep: Monte Carlo samples per row")->capture_default_str();

  auto* run = app.add_subcommand("run", "run a scheme, the entangler alone, or the dephasing analysis");
  auto* sweep = app.add_subcommand("sweep", "tabulate discrimination error and required probe amplitude");
  run->fallthrough();
  sweep->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) {
      cghz::RunConfig c;
      c.scheme = cghz::parse_scheme(scheme);
      c.k = k;
      c.m = m;
      c.alpha = alpha;
      c.theta_budget = theta_budget;
      c.shots = shots;
      c.seed = seed;
      if (!forced.empty()) c.forced_windows = forced;
      c.format = format == "csv" ? cghz::OutputFormat::csv : cghz::OutputFormat::json;
      c.verbose = verbose;
      c.timing = timing;
      c.threads = threads;
      c.p_grid = p_grid;
      c.target_err = target_err;
      const auto report = cghz::cmd_run(c);
      return emit(c.format == cghz::OutputFormat::csv ? cghz::run_to_csv(report) : report.dump(2) + "\n", out_path);
    }
    cghz::SweepConfig c;
    c.m_values = m_values;
    c.alphas = alphas;
    c.theta_budget = theta_budget;
    c.target_err = target_err;
    c.mc_samples = mc_samples;
    c.seed = seed;
    c.threads = threads;
    const auto rows = cghz::cmd_sweep(c);
    return emit(format == "csv" ? cghz::sweep_to_csv(rows) : cghz::sweep_to_json(c, rows).dump(2) + "\n", out_path);
  } catch (const cghz::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const cghz::PreconditionViolation& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
