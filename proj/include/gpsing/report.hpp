#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gpsing/minimize.hpp"
#include "gpsing/problem.hpp"
#include "gpsing/profile.hpp"
#include "gpsing/sweep.hpp"

namespace gpsing {

/// Fully resolved run configuration (flags over config-file keys over defaults).
struct RunConfig {
  std::string command;  ///< wprofile | minimize | sweep | verify | plotdata
  int N = 1;
  double p = 2.0;
  double b = 0.5;
  double M = 10.0;
  std::vector<double> M_list{10.0, 100.0, 1000.0, 10000.0};
  PotentialSpec potential = PotentialSpec::power(1.0, 2.0);
  double rmax = 20.0;
  int nodes = 4001;
  double grading = 2.0;
  FlowConfig flow;
  std::string out_dir = "gpsing_out";
  std::string format = "plain";  ///< stdout summary format: plain | csv | json
  std::vector<std::string> suites;       ///< verify subcommand
  std::vector<std::string> plot_kinds;   ///< plotdata subcommand
  unsigned seed = 42;                    ///< gn suite random fields
};

/// Parses argv-style arguments (without the program name). CLI flags override
/// config-file keys; defaults fill the rest. Throws UsageError or
/// RegimeViolation before any solver starts.
RunConfig parse_config(const std::vector<std::string>& args);

/// Exit codes: 0 ok, 1 usage, 2 regime violation, 3 solver failure,
/// 4 verification failure.
int run_command(const RunConfig& config);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

struct SuiteReport {
  std::string name;
  bool pass = true;
  std::vector<CheckResult> checks;
};

inline const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> names{
      "gn", "pohozaev", "scaling", "concentration", "decay", "multiplier"};
  return names;
}

/// Runs the named verification suites (all six when empty) and returns the
/// machine-readable report; identical configs yield bit-identical strings.
std::string verify_suites(const RunConfig& config, std::vector<SuiteReport>& out);

/// Deterministic uniform draws backed by mt19937 raw words, so results do
/// not depend on the standard library's distribution implementation.
struct SeededRng {
  explicit SeededRng(unsigned seed) : state(seed) {}
  double uniform(double lo, double hi);
  std::mt19937 state;
};

/// Seeded positive test field for the GN suite: sum of three Gaussians.
RadialField random_gn_field(const GridPtr& grid, SeededRng& rng);

std::string report_to_csv(const ScalingReport& report, const std::string& config_echo);
std::string report_to_json(const ScalingReport& report, const std::string& config_echo);

std::string config_to_json(const RunConfig& config);
std::string params_hash(const RunConfig& config);

/// Two-column plot series; kinds: profile, ratio, trapmass, decay.
void emit_plot_data(const ScalingReport& report, const GroundStateW& w,
                    const std::string& kind, const RunConfig& config);

}  // namespace gpsing
