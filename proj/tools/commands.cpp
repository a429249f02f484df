#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli.hpp"
#include "mestd/discretize.hpp"
#include "mestd/twostate.hpp"

namespace mestd::cli {

using nlohmann::json;

namespace {

constexpr double kCertificateLambdaFloor = -1e-9;
constexpr double kCertificateBalanceTolerance = 1e-6;

struct Options {
  std::string config;
  std::string out;
  std::string format;
  double tolerance = 0.0;
  bool seedless = false;
  std::string figure;
  std::vector<std::string> sets;
  unsigned threads = 0;
};

struct Emitted {
  std::string text;
  int code = kOk;
};

Format pick_format(const Options& opt, const std::optional<Format>& configured, Format fallback) {
  if (opt.format == "csv") return Format::Csv;
  if (opt.format == "json") return Format::Json;
  return configured.value_or(fallback);
}

double quad_tolerance() {
  const char* env = std::getenv("MESTD_QUAD_TOL");
  if (env == nullptr || *env == '\0') return 1e-10;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (*end != '\0' || !(v > 0.0)) throw Error(ErrorCode::InvalidParameter, "MESTD_QUAD_TOL must be a positive number");
  return v;
}

const DiscreteFading& require_discrete(const ScenarioConfig& cfg) {
  if (const auto* d = std::get_if<DiscreteFading>(&cfg.fading)) return *d;
  throw Error(ErrorCode::InvalidParameter, "this command needs a discrete fading model");
}

const ContinuousScenario& require_continuous(const ScenarioConfig& cfg) {
  if (const auto* c = std::get_if<ContinuousScenario>(&cfg.fading)) return *c;
  throw Error(ErrorCode::InvalidParameter, "this command needs a continuous fading model");
}

DiscreteFading discrete_model(const ScenarioConfig& cfg) {
  if (std::holds_alternative<DiscreteFading>(cfg.fading)) return std::get<DiscreteFading>(cfg.fading);
  const auto& cont = std::get<ContinuousScenario>(cfg.fading);
  if (!cont.discretization) {
    throw Error(ErrorCode::InvalidParameter, "continuous fading needs a \"discretization\" block here");
  }
  return discretize_pdf(cont.fading, cont.discretization->states, cont.discretization->s_max);
}

Emitted two_state(const ScenarioConfig& cfg, Format format) {
  const auto& fading = require_discrete(cfg);
  const auto sol = solve_two_state(fading, cfg.source);
  const double row[] = {fading.prob(0), fading.prob(1), fading.state(0), fading.state(1), cfg.source.rate,
                        sol.d1,         sol.d2,         sol.r1,          sol.r2,          sol.expected_distortion};
  const char* names[] = {"p1", "p2", "s1", "s2", "Rx", "D1", "D2", "R1", "R2", "ED"};
  std::ostringstream out;
  if (format == Format::Csv) {
    out << "p1,p2,s1,s2,Rx,D1,D2,R1,R2,ED,active_bound\n";
    for (double v : row) out << fmt(v) << ',';
    out << to_string(sol.active_bound) << '\n';
  } else {
    json j;
    for (std::size_t k = 0; k < std::size(row); ++k) j[names[k]] = round12(row[k]);
    j["active_bound"] = std::string(to_string(sol.active_bound));
    out << j.dump(2) << '\n';
  }
  return {out.str()};
}

Emitted mstate(const ScenarioConfig& cfg, Format format) {
  const auto fading = discrete_model(cfg);
  const auto sol = solve_mstate(fading, cfg.source, cfg.solver);
  std::ostringstream out;
  if (format == Format::Csv) {
    out << "i,s,p,D,R,lambda\n";
    for (Eigen::Index i = 0; i < fading.size(); ++i) {
      out << i + 1 << ',' << fmt(fading.state(i)) << ',' << fmt(fading.prob(i)) << ',' << fmt(sol.distortions[i])
          << ',' << fmt(sol.rates[i]) << ',' << fmt(sol.dual_lambda[i]) << '\n';
    }
    out << "# expected_distortion=" << fmt(sol.expected_distortion) << '\n'
        << "# mu=" << fmt(sol.dual_mu) << '\n'
        << "# kkt_residual=" << fmt(sol.kkt_residual) << '\n'
        << "# converged=" << (sol.converged ? "true" : "false") << '\n';
  } else {
    json layers = json::array();
    for (Eigen::Index i = 0; i < fading.size(); ++i) {
      layers.push_back({{"s", round12(fading.state(i))},
                        {"p", round12(fading.prob(i))},
                        {"D", round12(sol.distortions[i])},
                        {"R", round12(sol.rates[i])},
                        {"lambda", round12(sol.dual_lambda[i])}});
    }
    json j{{"layers", layers},
           {"expected_distortion", round12(sol.expected_distortion)},
           {"mu", round12(sol.dual_mu)},
           {"kkt_residual", round12(sol.kkt_residual)},
           {"converged", sol.converged}};
    out << j.dump(2) << '\n';
  }
  return {out.str(), sol.converged ? kOk : kSolver};
}

Emitted continuous(const ScenarioConfig& cfg, Format format) {
  const auto& cont = require_continuous(cfg);
  ContinuousOptions opts;
  opts.quad_tol = quad_tolerance();
  const auto sol = solve_single_layer(cont.fading, cfg.source, opts);
  const bool certified = sol.certificate_min_lambda >= kCertificateLambdaFloor &&
                         std::abs(sol.certificate_balance) <= kCertificateBalanceTolerance;
  std::ostringstream out;
  if (format == Format::Csv) {
    out << "s_a,mu,expected_distortion,certificate_min_lambda,certificate_balance\n"
        << fmt(sol.s_a) << ',' << fmt(sol.mu) << ',' << fmt(sol.expected_distortion) << ','
        << fmt(sol.certificate_min_lambda) << ',' << fmt(sol.certificate_balance) << '\n';
  } else {
    json j{{"s_a", round12(sol.s_a)},
           {"mu", round12(sol.mu)},
           {"expected_distortion", round12(sol.expected_distortion)},
           {"certificate_min_lambda", round12(sol.certificate_min_lambda)},
           {"certificate_balance", round12(sol.certificate_balance)}};
    out << j.dump(2) << '\n';
  }
  return {out.str(), certified ? kOk : kCertificate};
}

Emitted discretize(const ScenarioConfig& cfg, Format format) {
  require_continuous(cfg);
  const auto fading = discrete_model(cfg);
  std::ostringstream out;
  if (format == Format::Csv) {
    out << "i,s,p\n";
    for (Eigen::Index i = 0; i < fading.size(); ++i) {
      out << i + 1 << ',' << fmt(fading.state(i)) << ',' << fmt(fading.prob(i)) << '\n';
    }
  } else {
    std::vector<double> s(fading.states().begin(), fading.states().end());
    std::vector<double> p(fading.probs().begin(), fading.probs().end());
    std::transform(s.begin(), s.end(), s.begin(), round12);
    std::transform(p.begin(), p.end(), p.begin(), round12);
    out << json{{"states", s}, {"probs", p}}.dump(2) << '\n';
  }
  return {out.str()};
}

std::map<std::string, double> parse_sets(const std::vector<std::string>& sets) {
  std::map<std::string, double> out;
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    char* end = nullptr;
    const double v = eq == std::string::npos ? 0.0 : std::strtod(kv.c_str() + eq + 1, &end);
    if (eq == std::string::npos || eq == 0 || end == kv.c_str() + eq + 1 || *end != '\0') {
      throw Error(ErrorCode::InvalidParameter, "override \"" + kv + "\" is not KEY=NUMBER");
    }
    out[kv.substr(0, eq)] = v;
  }
  return out;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotQuasiconcave: return kCertificate;
    case ErrorCode::MaxIterationsExceeded:
    case ErrorCode::ToleranceNotReached:
    case ErrorCode::QuadratureFailure:
    case ErrorCode::NoSignChange: return kSolver;
    default: return kValidation;
  }
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidParameter, "cannot write \"" + path + "\"");
  file << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expected-distortion minimization for Gaussian sources with fading side information", "mestd"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config, "Scenario JSON");
  app.add_option("--out", opt.out, "Output file (default: config output.path, else stdout)");
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--tolerance", opt.tolerance, "KKT residual target for the M-state solver")
      ->check(CLI::PositiveNumber);
  app.add_flag("--seedless", opt.seedless, "Assert the run uses no randomness (always true)");

  auto* two = app.add_subcommand("two-state", "Closed-form two-state optimum")->fallthrough();
  auto* ms = app.add_subcommand("mstate", "Interior-point M-state optimum")->fallthrough();
  auto* cont = app.add_subcommand("continuous", "Single-layer optimum for a continuous pdf")->fallthrough();
  auto* disc = app.add_subcommand("discretize", "Uniform-grid pmf of a continuous pdf")->fallthrough();
  auto* sweep = app.add_subcommand("sweep", "Figure data grid")->fallthrough();
  sweep->add_option("figure", opt.figure, "fig3 | fig4 | fig5 | fig6 | fig7 | fig8")->required();
  sweep->add_option("--set", opt.sets, "Parameter override KEY=VALUE (repeatable)");
  sweep->add_option("--threads", opt.threads, "Worker threads (0: all cores)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    Emitted result;
    std::string path = opt.out;
    if (sweep->parsed()) {
      SweepRequest req;
      req.figure = opt.figure;
      req.overrides = parse_sets(opt.sets);
      req.threads = opt.threads;
      if (opt.tolerance > 0.0) req.solver.tolerance = opt.tolerance;
      req.quad_tol = quad_tolerance();
      if (opt.format == "json") throw Error(ErrorCode::InvalidParameter, "sweeps are emitted as CSV only");
      std::ostringstream text;
      run_sweep(req, text);
      result.text = text.str();
    } else {
      if (opt.config.empty()) throw Error(ErrorCode::InvalidParameter, "--config is required");
      auto cfg = load_config(opt.config);
      if (opt.tolerance > 0.0) cfg.solver.tolerance = opt.tolerance;
      if (path.empty() && cfg.output_path) path = *cfg.output_path;
      if (two->parsed()) {
        result = two_state(cfg, pick_format(opt, cfg.format, Format::Csv));
      } else if (ms->parsed()) {
        result = mstate(cfg, pick_format(opt, cfg.format, Format::Csv));
      } else if (cont->parsed()) {
        result = continuous(cfg, pick_format(opt, cfg.format, Format::Json));
      } else if (disc->parsed()) {
        result = discretize(cfg, pick_format(opt, cfg.format, Format::Csv));
      }
    }
    write_output(result.text, path, out);
    if (result.code == kSolver) err << "MaxIterationsExceeded: KKT residual above tolerance\n";
    if (result.code == kCertificate) err << "CertificateFailure: dual certificate outside tolerance\n";
    return result.code;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "InvalidParameter: " << e.what() << '\n';
    return kValidation;
  }
}

}  // namespace mestd::cli
