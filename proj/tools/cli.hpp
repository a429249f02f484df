#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mestd/contfade.hpp"
#include "mestd/model.hpp"
#include "mestd/solver.hpp"

namespace mestd::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kSolver = 3,
  kCertificate = 4,
};

enum class Format { Csv, Json };

struct Discretization {
  int states = 150;
  double s_max = 2.0;
};

struct ContinuousScenario {
  ContinuousFading fading;
  std::optional<Discretization> discretization;
};

struct ScenarioConfig {
  SourceModel source;
  std::variant<std::monostate, DiscreteFading, ContinuousScenario> fading;
  SolverConfig solver;
  std::optional<std::string> output_path;
  std::optional<Format> format;
};

/// Parses a scenario document. Keys ending in "_db" are converted to linear
/// values under the stripped name. Throws Error(InvalidParameter) on schema
/// problems and the model's own errors on invalid values.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);

/// printf("%.12g"), the fixed format of every emitted number.
std::string fmt(double x);

/// x rounded through its 12-digit decimal form, so JSON output matches CSV.
double round12(double x);

/// Parameters of one figure sweep after overrides.
struct SweepRequest {
  std::string figure;
  std::map<std::string, double> overrides;
  unsigned threads = 0;  // 0: hardware concurrency
  SolverConfig solver;
  double quad_tol = 1e-10;
};

/// Writes the sweep CSV for `req.figure`. Throws Error(InvalidParameter) for
/// an unknown figure or override key.
void run_sweep(const SweepRequest& req, std::ostream& out);

/// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mestd::cli
