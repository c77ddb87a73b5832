#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cghz/analysis.hpp"
#include "cghz/entangler.hpp"
#include "cghz/errors.hpp"
#include "cghz/protocols.hpp"
#include "cghz/rng.hpp"

namespace cghz {

inline constexpr const char* kReportSchemaVersion = "1.0";

class UsageError : public Error {
 public:
  using Error::Error;
};

enum class SchemeKind { scheme1, scheme2, entangler, analysis };
enum class OutputFormat { json, csv };

inline std::string to_string(SchemeKind s) {
  switch (s) {
    case SchemeKind::scheme1: return "1";
    case SchemeKind::scheme2: return "2";
    case SchemeKind::entangler: return "entangler";
    case SchemeKind::analysis: return "analysis";
  }
  return "?";
}

inline SchemeKind parse_scheme(const std::string& s) {
  if (s == "1") return SchemeKind::scheme1;
  if (s == "2") return SchemeKind::scheme2;
  if (s == "entangler" || s == "entangler-only") return SchemeKind::entangler;
  if (s == "analysis") return SchemeKind::analysis;
  throw UsageError("unknown scheme '" + s + "' (expected 1, 2, entangler or analysis)");
}

struct RunConfig {
  SchemeKind scheme = SchemeKind::scheme2;
  std::size_t k = 2;
  std::size_t m = 3;
  double alpha = 1e6;
  double theta_budget = 1e-2;
  std::size_t shots = 1;
  std::uint64_t seed = 0;
  std::optional<std::vector<unsigned>> forced_windows;
  OutputFormat format = OutputFormat::json;
  bool verbose = false;
  bool timing = false;
  std::size_t threads = 1;  // never affects results
  std::vector<double> p_grid{0.0, 0.05, 0.1, 0.25, 0.5};
  double target_err = 1e-3;

  double theta() const { return step_theta(static_cast<unsigned>(m), theta_budget); }
};

inline void validate(const RunConfig& c) {
  if (c.k == 0 || c.m == 0) throw UsageError("k and m must be at least 1");
  if (c.m > kMaxBlockSize) throw UsageError("m must be at most 30");
  if ((c.scheme == SchemeKind::scheme1 || c.scheme == SchemeKind::scheme2) && c.k * c.m > 24) {
    throw UsageError("k*m must be at most 24 for scheme runs");
  }
  if (c.shots == 0) throw UsageError("shots must be at least 1");
  if (!(c.alpha > 0.0)) throw UsageError("alpha must be positive");
  if (!(c.theta_budget > 0.0)) throw UsageError("theta-budget must be positive");
  if (c.threads == 0) throw UsageError("threads must be at least 1");
  if (c.forced_windows) {
    const std::size_t want = c.scheme == SchemeKind::entangler ? 1 : c.k;
    if (c.forced_windows->size() != want) {
      throw UsageError("--force-window needs " + std::to_string(want) + " value(s)");
    }
    for (auto w : *c.forced_windows) {
      if (w > max_window(static_cast<unsigned>(c.m))) throw UsageError("--force-window value out of range");
    }
  }
  if (c.scheme == SchemeKind::entangler && c.m > 20) throw UsageError("entangler runs need m <= 20");
  if (c.scheme == SchemeKind::analysis && c.k * c.m > kMaxExactDephasingQubits) {
    throw UsageError("analysis needs k*m <= 14");
  }
}

inline nlohmann::json state_to_json(const QubitState& s) {
  auto arr = nlohmann::json::array();
  for (const auto& t : s.terms()) {
    arr.push_back({{"pattern", pattern_string(t.pattern, s.n_qubits())}, {"re", t.amp.real()}, {"im", t.amp.imag()}});
  }
  return arr;
}

inline nlohmann::json record_to_json(const MeasurementRecord& r) {
  auto corr = nlohmann::json::array();
  for (const auto& c : r.corrections) {
    nlohmann::json j{{"kind", c.name()}, {"qubit", c.qubit}};
    if (auto* ph = std::get_if<Correction::Phase>(&c.kind)) j["radians"] = ph->radians;
    corr.push_back(j);
  }
  return {{"x", r.x}, {"window", r.window_k}, {"density", r.probability_density}, {"corrections", corr}};
}

namespace detail {

struct ShotResult {
  double fidelity = 0.0;
  std::optional<Polarization> detector;
  std::vector<MeasurementRecord> records;
  std::optional<QubitState> output;
};

inline ShotResult run_shot(const RunConfig& c, std::size_t index) {
  SplitMix64 rng(substream_seed(c.seed, index));
  ShotResult r;
  const double theta = c.theta();
  if (c.scheme == SchemeKind::entangler) {
    Readout readout;
    if (c.forced_windows) readout.window = c.forced_windows->front();
    auto out = run_entangler(make_plus_product(c.m, +1), c.alpha, theta, rng, readout);
    r.fidelity = fidelity(out.state, make_ghz(c.m, +1));
    r.records.push_back(std::move(out.record));
    r.output = std::move(out.state);
    return r;
  }
  SchemeResult res = [&] {
    if (c.scheme == SchemeKind::scheme1) return scheme1(c.k, c.m, c.alpha, theta, rng, {c.forced_windows});
    return scheme2(c.k, c.m, c.alpha, theta, rng, {c.forced_windows, std::nullopt});
  }();
  r.fidelity = fidelity(res.output, res.target());
  r.detector = res.detector;
  r.records = std::move(res.records);
  r.output = std::move(res.output);
  return r;
}

template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& f) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j{{"scheme", to_string(c.scheme)},
                   {"k", c.k},
                   {"m", c.m},
                   {"alpha", c.alpha},
                   {"theta_budget", c.theta_budget},
                   {"theta", c.theta()},
                   {"shots", c.shots},
                   {"seed", c.seed},
                   {"forced_windows", nullptr}};
  if (c.forced_windows) j["forced_windows"] = *c.forced_windows;
  return j;
}

inline nlohmann::json run_analysis(const RunConfig& c) {
  auto rows = nlohmann::json::array();
  for (const auto& r : compare_encodings(c.k, c.m, c.p_grid)) {
    rows.push_back({{"p", r.p},
                    {"km", r.cghz.km},
                    {"cghz_logical_offdiag", r.cghz.logical_offdiag},
                    {"ghz_logical_offdiag", r.ghz.logical_offdiag},
                    {"cghz_at_least_ghz", r.cghz_at_least_ghz}});
  }
  nlohmann::json results{{"kind", "analysis"},
                         {"noise_model", "iid phase-flip; values are specific to this noise model"},
                         {"dephasing", rows}};
  if (c.m >= 2) {
    results["alpha_required"] = required_alpha(static_cast<unsigned>(c.m), c.theta_budget, c.target_err);
    results["target_err"] = c.target_err;
    results["err_closed_at_alpha"] = misclassification_prob(c.alpha, c.theta(), static_cast<unsigned>(c.m));
  }
  return results;
}

}  // namespace detail

// Runs `shots` independent repetitions. Shot i draws from substream
// substream_seed(seed, i), so the report does not depend on `threads`.
// Wall-clock time is only reported when `timing` is set, keeping the default
// report byte-identical across runs.
inline nlohmann::json cmd_run(const RunConfig& c) {
  validate(c);
  const auto start = std::chrono::steady_clock::now();
  nlohmann::json results;
  if (c.scheme == SchemeKind::analysis) {
    results = detail::run_analysis(c);
  } else {
    if (c.scheme == SchemeKind::scheme1 && c.m % 2 == 0) {
      throw PreconditionViolation("scheme 1 requires odd block size m (got m = " + std::to_string(c.m) + ")");
    }
    std::vector<detail::ShotResult> shots(c.shots);
    detail::parallel_for(c.shots, c.threads, [&](std::size_t i) {
      shots[i] = detail::run_shot(c, i);
      if (i != 0) shots[i].output.reset();
    });
    double sum = 0.0;
    double min_f = 1.0;
    std::size_t h_count = 0;
    for (const auto& s : shots) {
      sum += s.fidelity;
      min_f = std::min(min_f, s.fidelity);
      if (s.detector == Polarization::H) ++h_count;
    }
    results["kind"] = c.scheme == SchemeKind::entangler ? "entangler" : "scheme" + to_string(c.scheme);
    results["target"] = c.scheme == SchemeKind::entangler ? "ghz+" : "cghz (sign from detector in scheme 2)";
    results["mean_fidelity"] = sum / static_cast<double>(c.shots);
    results["min_fidelity"] = min_f;
    results["detector_H_freq"] =
        c.scheme == SchemeKind::scheme2 ? nlohmann::json(static_cast<double>(h_count) / c.shots) : nlohmann::json();
    results["example_output"] = state_to_json(*shots.front().output);
    if (c.verbose) {
      auto per_shot = nlohmann::json::array();
      for (std::size_t i = 0; i < shots.size(); ++i) {
        auto recs = nlohmann::json::array();
        for (const auto& r : shots[i].records) recs.push_back(record_to_json(r));
        nlohmann::json det = nullptr;
        if (shots[i].detector) det = std::string(1, to_char(*shots[i].detector));
        per_shot.push_back({{"index", i}, {"fidelity", shots[i].fidelity}, {"detector", det}, {"windows", recs}});
      }
      results["shots"] = per_shot;
    }
  }
  nlohmann::json timing{{"wall_clock_s", nullptr}};
  if (c.timing) {
    timing["wall_clock_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return {{"schema_version", kReportSchemaVersion},
          {"config", detail::config_to_json(c)},
          {"results", results},
          {"timing", timing}};
}

struct SweepConfig {
  std::vector<unsigned> m_values;
  std::vector<double> alphas;  // empty: evaluate each row at its required alpha
  double theta_budget = 1e-2;
  double target_err = 1e-3;
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

inline constexpr const char* kSweepCsvHeader = "m,theta,alpha,err_closed,err_mc,err_mc_stderr,alpha_required";

// Feasibility table over the (m, alpha) grid. Row i uses Monte Carlo
// substream i.
inline std::vector<FeasibilityRow> cmd_sweep(const SweepConfig& c) {
  if (c.m_values.empty()) throw UsageError("sweep: empty m grid");
  if (c.mc_samples == 0) throw UsageError("sweep: mc-samples must be at least 1");
  if (!(c.target_err > 0.0 && c.target_err < 0.5)) throw UsageError("sweep: target-err must be in (0, 1/2)");
  if (!(c.theta_budget > 0.0)) throw UsageError("sweep: theta-budget must be positive");
  for (auto m : c.m_values) {
    if (m < 2 || m > 20) throw UsageError("sweep: m values must lie in [2, 20]");
  }
  for (auto a : c.alphas) {
    if (!(a > 0.0)) throw UsageError("sweep: alpha values must be positive");
  }
  struct Cell {
    unsigned m;
    std::optional<double> alpha;
  };
  std::vector<Cell> cells;
  for (auto m : c.m_values) {
    if (c.alphas.empty()) {
      cells.push_back({m, std::nullopt});
    } else {
      for (auto a : c.alphas) cells.push_back({m, a});
    }
  }
  std::vector<FeasibilityRow> rows(cells.size());
  detail::parallel_for(cells.size(), c.threads, [&](std::size_t i) {
    rows[i] = feasibility_row(cells[i].m, c.theta_budget, cells[i].alpha, c.target_err, c.mc_samples,
                              substream_seed(c.seed, i));
  });
  return rows;
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string sweep_to_csv(const std::vector<FeasibilityRow>& rows) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.m) + "," + format_number(r.theta) + "," + format_number(r.alpha) + "," +
           format_number(r.err_closed) + "," + format_number(r.err_mc) + "," + format_number(r.err_mc_stderr) + "," +
           format_number(r.alpha_required) + "\n";
  }
  return out;
}

inline nlohmann::json sweep_to_json(const SweepConfig& c, const std::vector<FeasibilityRow>& rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"m", r.m},
                   {"theta", r.theta},
                   {"alpha", r.alpha},
                   {"err_closed", r.err_closed},
                   {"err_mc", r.err_mc},
                   {"err_mc_stderr", r.err_mc_stderr},
                   {"alpha_required", r.alpha_required}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"config",
           {{"m_values", c.m_values},
            {"alphas", c.alphas},
            {"theta_budget", c.theta_budget},
            {"target_err", c.target_err},
            {"mc_samples", c.mc_samples},
            {"seed", c.seed}}},
          {"results", {{"kind", "sweep"}, {"rows", arr}}},
          {"timing", {{"wall_clock_s", nullptr}}}};
}

// Flattens a run report's results to CSV (one row per shot when verbose,
// otherwise a single summary row; analysis reports list the p grid).
inline std::string run_to_csv(const nlohmann::json& report) {
  const auto& r = report.at("results");
  std::string out;
  if (r.at("kind") == "analysis") {
    out = "p,km,cghz_logical_offdiag,ghz_logical_offdiag,cghz_at_least_ghz\n";
    for (const auto& row : r.at("dephasing")) {
      out += format_number(row.at("p").get<double>()) + "," + std::to_string(row.at("km").get<std::size_t>()) + "," +
             format_number(row.at("cghz_logical_offdiag").get<double>()) + "," +
             format_number(row.at("ghz_logical_offdiag").get<double>()) + "," +
             (row.at("cghz_at_least_ghz").get<bool>() ? "1" : "0") + "\n";
    }
    return out;
  }
  out = "kind,shots,mean_fidelity,min_fidelity,detector_H_freq\n";
  const auto& freq = r.at("detector_H_freq");
  out += r.at("kind").get<std::string>() + "," + std::to_string(report.at("config").at("shots").get<std::size_t>()) +
         "," + format_number(r.at("mean_fidelity").get<double>()) + "," +
         format_number(r.at("min_fidelity").get<double>()) + "," +
         (freq.is_null() ? std::string() : format_number(freq.get<double>())) + "\n";
  return out;
}

}  // namespace cghz
