#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <thread>

#include "cli.hpp"
#include "mestd/discretize.hpp"
#include "mestd/hbrate.hpp"
#include "mestd/twostate.hpp"

namespace mestd::cli {

namespace {

using Params = std::map<std::string, double>;
using Rows = std::vector<std::string>;

// Runs job(k) for k in [0, n) on a pool of workers; results keep index order.
template <class Job>
std::vector<Rows> parallel_rows(std::size_t n, unsigned threads, Job job) {
  std::vector<Rows> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        out[k] = job(k);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::string join(std::initializer_list<std::string> fields) {
  std::string line;
  for (const auto& f : fields) {
    if (!line.empty()) line += ',';
    line += f;
  }
  return line;
}

std::vector<double> steps(double lo, double hi, double step) {
  std::vector<double> v;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= n; ++k) v.push_back(lo + static_cast<double>(k) * step);
  return v;
}

ContinuousFading family(const std::string& name, double k, double mean) {
  return name == "rician" ? ContinuousFading::rician(k, mean)
                          : ContinuousFading::nakagami(nakagami_m_from_rician(k), mean);
}

int as_count(double v, const char* key) {
  if (v < 1.0 || v != std::floor(v)) throw Error(ErrorCode::InvalidParameter, std::string(key) + " must be a positive integer");
  return static_cast<int>(v);
}

const LayeredSolution& require_converged(const LayeredSolution& sol) {
  if (!sol.converged) {
    throw Error(ErrorCode::MaxIterationsExceeded, "KKT residual " + fmt(sol.kkt_residual) + " above tolerance");
  }
  return sol;
}

LayeredSolution solve_discretized(const ContinuousFading& f, const Params& p, double rate,
                                  const SolverConfig& solver) {
  const auto df = discretize_pdf(f, as_count(p.at("M"), "M"), p.at("s_max_factor") * p.at("mean"));
  return require_converged(solve_mstate(df, SourceModel(p.at("sigma2"), rate), solver));
}

void fig3(const Params& p, const SweepRequest& req, std::ostream& out) {
  const double s1 = db_to_linear(p.at("s1_db"));
  const auto s2_db = steps(p.at("s2_db_min"), p.at("s2_db_max"), p.at("s2_db_step"));
  const auto p2 = steps(0.0, 1.0, p.at("p2_step"));
  const SourceModel src(p.at("sigma2"), p.at("R"));
  const auto rows = parallel_rows(s2_db.size() * p2.size(), req.threads, [&](std::size_t k) {
    const double sdb = s2_db[k / p2.size()];
    const double q = std::min(p2[k % p2.size()], 1.0);
    Vector s(2);
    s << s1, db_to_linear(sdb);
    Vector pr(2);
    pr << 1.0 - q, q;
    const auto sol = solve_two_state(DiscreteFading(s, pr), src);
    return Rows{join({fmt(sdb), fmt(s[1]), fmt(q), fmt(sol.d1), fmt(sol.d2), fmt(sol.r1), fmt(sol.r2),
                      fmt(sol.expected_distortion), std::string(to_string(sol.active_bound))})};
  });
  out << "s2_db,s2,p2,D1,D2,R1,R2,ED,active_bound\n";
  for (const auto& r : rows) out << r[0] << '\n';
}

void fig4(const Params& p, const SweepRequest& req, std::ostream& out) {
  struct Case {
    std::string panel;
    std::string family;
    double k;
    double rate;
  };
  std::vector<Case> cases;
  for (const char* fam : {"rician", "nakagami"}) {
    for (double k : {0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) cases.push_back({"K", fam, k, p.at("R")});
    for (double r : {0.25, 0.5, 1.0, 2.0}) cases.push_back({"Rx", fam, p.at("K"), r});
  }
  const auto rows = parallel_rows(cases.size(), req.threads, [&](std::size_t k) {
    const Case& c = cases[k];
    const auto f = family(c.family, c.k, p.at("mean"));
    const auto df = discretize_pdf(f, as_count(p.at("M"), "M"), p.at("s_max_factor") * p.at("mean"));
    const auto sol = require_converged(solve_mstate(df, SourceModel(p.at("sigma2"), c.rate), req.solver));
    Rows r;
    for (Eigen::Index i = 0; i < df.size(); ++i) {
      r.push_back(join({c.panel, c.family, fmt(c.k), fmt(c.rate), std::to_string(i + 1), fmt(df.state(i)),
                        fmt(df.prob(i)), fmt(sol.distortions[i]), fmt(sol.rates[i])}));
    }
    return r;
  });
  out << "panel,family,K,Rx,i,s,p,D,R\n";
  for (const auto& block : rows) {
    for (const auto& r : block) out << r << '\n';
  }
}

void fig5(const Params& p, const SweepRequest& req, std::ostream& out) {
  const auto f = ContinuousFading::rician(p.at("K"), p.at("mean"));
  const auto df = discretize_pdf(f, as_count(p.at("M"), "M"), p.at("s_max_factor") * p.at("mean"));
  const auto sol = require_converged(solve_mstate(df, SourceModel(p.at("sigma2"), p.at("R")), req.solver));
  out << "i,s,p,D,R,lambda,mu\n";
  for (Eigen::Index i = 0; i < df.size(); ++i) {
    out << join({std::to_string(i + 1), fmt(df.state(i)), fmt(df.prob(i)), fmt(sol.distortions[i]),
                 fmt(sol.rates[i]), fmt(sol.dual_lambda[i]), fmt(sol.dual_mu)})
        << '\n';
  }
}

void fig6(const Params& p, const SweepRequest& req, std::ostream& out) {
  struct Case {
    std::string family;
    double k;
    double rate;
  };
  const auto rates = steps(p.at("R_min"), p.at("R_max"), p.at("R_step"));
  std::vector<Case> cases;
  for (const char* fam : {"rician", "nakagami"}) {
    for (double k : {0.0, 1.0, 4.0, 16.0, 64.0}) {
      for (double r : rates) cases.push_back({fam, k, r});
    }
  }
  const auto rows = parallel_rows(cases.size(), req.threads, [&](std::size_t k) {
    const Case& c = cases[k];
    const auto sol = solve_discretized(family(c.family, c.k, p.at("mean")), p, c.rate, req.solver);
    const SourceModel src(p.at("sigma2"), c.rate);
    return Rows{join({c.family, fmt(c.k), fmt(c.rate), fmt(sol.expected_distortion), fmt(no_si_distortion(src)),
                      fmt(wyner_ziv_distortion(src, p.at("mean")))})};
  });
  out << "family,K,Rx,ED,no_si,wz\n";
  for (const auto& r : rows) out << r[0] << '\n';
}

void fig7(const Params& p, const SweepRequest& req, std::ostream& out) {
  const auto ks = steps(0.0, p.at("K_max"), p.at("K_step"));
  const std::vector<double> rates{0.25, 0.5, 1.0, 2.0};
  ContinuousOptions opts;
  opts.quad_tol = req.quad_tol;
  const auto rows = parallel_rows(rates.size() * ks.size(), req.threads, [&](std::size_t k) {
    const double r = rates[k / ks.size()];
    const double kk = ks[k % ks.size()];
    const auto sol = solve_single_layer(ContinuousFading::rician(kk, p.at("mean")), SourceModel(p.at("sigma2"), r), opts);
    return Rows{join({fmt(r), fmt(kk), fmt(sol.s_a), fmt(sol.mu), fmt(sol.expected_distortion)})};
  });
  out << "Rx,K,s_a,mu,ED\n";
  for (const auto& r : rows) out << r[0] << '\n';
}

void fig8(const Params& p, const SweepRequest& req, std::ostream& out) {
  const auto f = ContinuousFading::rician(p.at("K"), p.at("mean"));
  const SourceModel src(p.at("sigma2"), p.at("R"));
  ContinuousOptions opts;
  opts.quad_tol = req.quad_tol;
  const auto sol = solve_single_layer(f, src, opts);
  const auto cert = dual_certificate(f, sol, src, as_count(p.at("grid"), "grid"), opts);
  out << "s,f,half_mu,lambda\n";
  for (std::size_t k = 0; k < cert.gains.size(); ++k) {
    out << join({fmt(cert.gains[k]), fmt(f.pdf(cert.gains[k])), fmt(0.5 * sol.mu), fmt(cert.lambda[k])}) << '\n';
  }
}

struct Figure {
  const char* id;
  Params defaults;
  void (*run)(const Params&, const SweepRequest&, std::ostream&);
};

const std::vector<Figure>& figures() {
  static const std::vector<Figure> table{
      {"fig3", {{"s1_db", 0}, {"s2_db_min", 1}, {"s2_db_max", 30}, {"s2_db_step", 1}, {"p2_step", 0.05},
                {"R", 1}, {"sigma2", 1}}, fig3},
      {"fig4", {{"R", 1}, {"K", 16}, {"mean", 1}, {"s_max_factor", 2}, {"M", 150}, {"sigma2", 1}}, fig4},
      {"fig5", {{"R", 0.25}, {"K", 32}, {"mean", 1}, {"s_max_factor", 2}, {"M", 150}, {"sigma2", 1}}, fig5},
      {"fig6", {{"R_min", 0.25}, {"R_max", 3}, {"R_step", 0.25}, {"mean", 10}, {"s_max_factor", 2}, {"M", 150},
                {"sigma2", 1}}, fig6},
      {"fig7", {{"K_max", 64}, {"K_step", 1}, {"mean", 1}, {"sigma2", 1}}, fig7},
      {"fig8", {{"R", 0.25}, {"K", 32}, {"mean", 1}, {"sigma2", 1}, {"grid", 2048}}, fig8},
  };
  return table;
}

}  // namespace

void run_sweep(const SweepRequest& req, std::ostream& out) {
  for (const auto& fig : figures()) {
    if (req.figure != fig.id) continue;
    Params params = fig.defaults;
    for (const auto& [key, value] : req.overrides) {
      if (!params.contains(key)) {
        throw Error(ErrorCode::InvalidParameter, "unknown override \"" + key + "\" for " + req.figure);
      }
      params[key] = value;
    }
    fig.run(params, req, out);
    return;
  }
  throw Error(ErrorCode::InvalidParameter, "unknown figure \"" + req.figure + "\"");
}

}  // namespace mestd::cli
