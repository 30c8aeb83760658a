#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cebound/cebound.hpp"

namespace cebound::cli {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct TrialSpec {
  int dim_p = 1;
  int dim_q = 1;
  int trial = 0;
  std::uint64_t seed = 0;
};

struct TrialResult {
  std::vector<std::pair<std::string, double>> margins;
  std::string ensemble;
  std::optional<std::string> error;
};

void add(TrialResult& r, const std::string& name, double margin) {
  r.margins.emplace_back(name, std::isnan(margin) ? -std::numeric_limits<double>::infinity() : margin);
}

TrialResult run_trial(const TrialSpec& spec) {
  TrialResult res;
  try {
    Ensemble ensemble = GinibreEnsemble{};
    res.ensemble = "ginibre";
    if (spec.trial % 2 == 1) {
      std::mt19937_64 rng(derive_seed(spec.seed, 1));
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      const double a0 = (0.2 + 0.6 * unif(rng)) / static_cast<double>(spec.dim_p + 1);
      const double eps_q = a0 * (0.01 + 0.49 * unif(rng));
      ensemble = BoundaryEnsemble{a0, eps_q};
      res.ensemble = "boundary";
    }
    const BlockState state = random_block_state(spec.dim_p, spec.dim_q, spec.seed, ensemble);

    const BoundReport report = bound_report(state);
    for (const auto& [name, value] : report.margins) add(res, "bound_" + name, value);
    add(res, "trace_norm_identity", -trace_norm_identity_residual(state));

    static const std::vector<double> grid = uniform_grid(0.99, 20);
    const MidpointResult mid = midpoint_margin(state, grid);
    add(res, "midpoint", mid.min_margin());
    add(res, "midpoint_symmetry", -mid.max_symmetry_residual);
    for (MonotoneMetric m : kAllMonotoneMetrics) {
      const MidpointResult pm = petz_midpoint_margin(state, grid, m);
      add(res, "petz_" + std::string(to_string(m)), pm.min_margin());
      add(res, "petz_" + std::string(to_string(m)) + "_symmetry", -pm.max_symmetry_residual);
    }

    const PipelineChain chain = pipeline_chain(state);
    add(res, "pipeline", chain.min_step());
    add(res, "pipeline_decomposition", -chain.decomposition_residual);

    const BlockState other = random_block_state(spec.dim_p, spec.dim_q, derive_seed(spec.seed, 2));
    add(res, "pythagorean", -std::abs(pythagorean_residual(state, pinch(other))));

    const OrbitConfig cfg{state, 1.0, 1.0, 2};
    for (double t : {0.0, 0.5, 1.0}) add(res, "dephasing", entropy_production(cfg, t).margin);
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  return res;
}

} // namespace

unsigned thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CEBOUND_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) cap = std::min(cap, static_cast<unsigned>(v));
  }
  return cap;
}

void parse_dims(const std::string& text, int& lo, int& hi) {
  const auto pos = text.find("..");
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ValidationError("--dims: expected \"lo..hi\" or an integer, got \"" + text + "\"");
    return v;
  };
  if (pos == std::string::npos) {
    lo = hi = to_int(text);
  } else {
    lo = to_int(text.substr(0, pos));
    hi = to_int(text.substr(pos + 2));
  }
  if (lo < 1 || hi < lo || hi > 16) throw ValidationError("--dims: need 1 <= lo <= hi <= 16");
}

VerifyOutcome run_verify(const VerifyOptions& o, unsigned threads) {
  std::vector<TrialSpec> specs;
  std::uint64_t k = 0;
  for (int dp = o.dim_lo; dp <= o.dim_hi; ++dp) {
    for (int dq = o.dim_lo; dq <= o.dim_hi; ++dq) {
      for (int i = 0; i < o.trials; ++i) specs.push_back({dp, dq, i, derive_seed(o.seed, k++)});
    }
  }
  std::vector<TrialResult> results(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) results[i] = run_trial(specs[i]);
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(specs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  struct Worst {
    double margin = std::numeric_limits<double>::infinity();
    std::size_t index = 0;
    std::size_t count = 0;
  };
  std::map<std::string, Worst> worst;
  json errors = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const TrialResult& r = results[i];
    if (r.error) {
      errors.push_back({{"trial", specs[i].trial},
                        {"dim_p", specs[i].dim_p},
                        {"dim_q", specs[i].dim_q},
                        {"seed", specs[i].seed},
                        {"message", *r.error}});
      continue;
    }
    for (const auto& [name, margin] : r.margins) {
      Worst& w = worst[name];
      if (w.count == 0 || margin < w.margin) {
        w.margin = margin;
        w.index = i;
      }
      ++w.count;
    }
  }

  bool passed = errors.empty();
  json inequalities = json::object();
  for (const auto& [name, w] : worst) {
    const TrialSpec& s = specs[w.index];
    const bool ok = w.margin >= -o.tol;
    passed = passed && ok;
    inequalities[name] = {{"worst_margin", w.margin},
                          {"pass", ok},
                          {"checks", w.count},
                          {"seed", s.seed},
                          {"dim_p", s.dim_p},
                          {"dim_q", s.dim_q},
                          {"trial", s.trial},
                          {"ensemble", results[w.index].ensemble}};
  }
  VerifyOutcome out;
  out.passed = passed;
  out.summary = {{"command", "verify"},
                 {"dims", {o.dim_lo, o.dim_hi}},
                 {"trials_per_shape", o.trials},
                 {"total_trials", specs.size()},
                 {"seed", o.seed},
                 {"tol", o.tol},
                 {"passed", passed},
                 {"regularized", false},
                 {"inequalities", std::move(inequalities)},
                 {"errors", std::move(errors)}};
  return out;
}

namespace {

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw ValidationError(std::string(flag) + ": \"" + item + "\" is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError(std::string(flag) + ": empty list");
  return out;
}

// Writes to `path` when given, otherwise to `out`.
void emit(const std::string& path, std::ostream& out, const std::string& text) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path);
  f << text;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relative entropy of coherence: bounds, extremizers and dephasing rates"};
  app.name("cebound");
  app.require_subcommand(1);

  VerifyOptions vo;
  std::string dims = "2..3";
  std::string output;
  auto* verify = app.add_subcommand("verify", "Randomized verification of every inequality; JSON summary");
  verify->add_option("--dims", dims, "Dimension range lo..hi for both d_P and d_Q")->capture_default_str();
  verify->add_option("--trials", vo.trials, "Trials per (d_P, d_Q) pair")->capture_default_str();
  verify->add_option("--seed", vo.seed, "Base seed")->capture_default_str();
  verify->add_option("--tol", vo.tol, "Margin tolerance (> 0)")->capture_default_str();
  verify->add_option("-o,--output", output, "Write the JSON summary here instead of stdout");

  std::string state_path;
  bool regularize = false;
  auto* report = app.add_subcommand("report", "Bound report for a state file; JSON");
  report->add_option("state", state_path, "State file")->required();
  report->add_flag("--regularize", regularize, "Evaluate singular states on (1-delta) rho + delta I/d");

  double gamma = 1.0;
  double t_max = 5.0;
  int steps = 100;
  auto* orbit = app.add_subcommand("orbit", "Dephasing orbit table; CSV");
  orbit->add_option("state", state_path, "State file")->required();
  orbit->add_option("--gamma", gamma, "Dephasing rate")->capture_default_str();
  orbit->add_option("--t-max", t_max, "Final time")->capture_default_str();
  orbit->add_option("--steps", steps, "Grid intervals (>= 2)")->capture_default_str();
  orbit->add_option("-o,--out", output, "CSV path (stdout when omitted)");

  VariationalParams vp;
  int dp = 2;
  int dq = 1;
  auto* opt = app.add_subcommand("optimizer", "Explicit minimizer rho*; JSON");
  opt->add_option("--a0", vp.a0, "Floor on lambda_min(A)")->required();
  opt->add_option("--eps", vp.eps, "Leakage Tr C")->required();
  opt->add_option("--c", vp.c, "Coherence ||B||_F^2")->required();
  opt->add_option("--dp", dp, "d_P")->capture_default_str();
  opt->add_option("--dq", dq, "d_Q")->capture_default_str();

  double big_k = 4.0;
  auto* sep = app.add_subcommand("separation", "Operator-scalar separation witness; JSON");
  sep->add_option("--K", big_k, "Target ratio (> 1)")->required();

  std::string q_list = "1e-2,1e-3,1e-4,1e-5,1e-6";
  auto* sharp = app.add_subcommand("sharpness", "Two-level sharpness ratios; CSV");
  sharp->add_option("--q", q_list, "Comma-separated q values in (0, 1/2)")->capture_default_str();

  double a_star = 0.9;
  double tau = 0.5;
  std::string eps_list = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6";
  auto* modulus = app.add_subcommand("modulus", "Boundary scaling modulus; CSV");
  modulus->add_option("--a-star", a_star, "a* in (0, 1]")->capture_default_str();
  modulus->add_option("--tau", tau, "Coherence fraction in (0, 1]")->capture_default_str();
  modulus->add_option("--eps", eps_list, "Comma-separated eps_Q values")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (verify->parsed()) {
      parse_dims(dims, vo.dim_lo, vo.dim_hi);
      if (vo.trials < 1) throw ValidationError("--trials must be >= 1");
      if (!(vo.tol > 0.0) || !std::isfinite(vo.tol)) throw ValidationError("--tol must be positive");
      const VerifyOutcome res = run_verify(vo, thread_cap());
      emit(output, out, res.summary.dump(2) + "\n");
      return res.passed ? kExitOk : kExitViolation;
    }
    if (report->parsed()) {
      BoundOptions options;
      options.regularize = regularize;
      const BoundReport r = bound_report(load_state_file(state_path), options);
      out << to_json(r).dump(2) << "\n";
      return kExitOk;
    }
    if (orbit->parsed()) {
      if (steps < 2) throw ValidationError("--steps must be >= 2");
      const OrbitConfig cfg{load_state_file(state_path), gamma, t_max, steps};
      validate_orbit(cfg);
      const std::vector<OrbitRow> rows = orbit_trace(cfg);
      std::ostringstream csv;
      write_orbit_csv(csv, rows);
      emit(output, out, csv.str());
      if (const auto bad = first_failing_row(rows)) {
        err << "orbit: check failed at row " << *bad << " (t = " << num(rows[*bad].t) << ")\n";
        return kExitViolation;
      }
      return kExitOk;
    }
    if (opt->parsed()) {
      vp.dim_p = dp;
      vp.dim_q = dq;
      out << to_json(optimizer(vp)).dump(2) << "\n";
      return kExitOk;
    }
    if (sep->parsed()) {
      if (!(big_k > 1.0)) throw InfeasibleError("--K must exceed 1");
      double eps = 0.0;
      try {
        eps = find_separation_eps(big_k);
      } catch (const NotFoundError& e) {
        err << "separation: " << e.what() << "\n";
        return kExitViolation;
      }
      out << to_json(separation_family(big_k, eps)).dump(2) << "\n";
      return kExitOk;
    }
    if (sharp->parsed()) {
      std::ostringstream csv;
      csv << "q,entropy,bkm,ratio_bkm,ratio_log\n";
      for (double q : parse_list(q_list, "--q")) {
        const SharpnessPoint p = sharpness_family(q);
        csv << num(p.q) << ',' << num(p.entropy) << ',' << num(p.bkm) << ',' << num(p.ratio_bkm) << ','
            << num(p.ratio_log) << '\n';
      }
      out << csv.str();
      return kExitOk;
    }
    if (modulus->parsed()) {
      std::ostringstream csv;
      csv << "eps_q,phi,phi_per_coherence,scaling_ratio,cost_ratio\n";
      for (const ModulusRow& r : modulus_curve(a_star, tau, parse_list(eps_list, "--eps"))) {
        csv << num(r.eps_q) << ',' << num(r.phi) << ',' << num(r.phi_per_coherence) << ','
            << (r.scaling_ratio ? num(*r.scaling_ratio) : "") << ',' << (r.cost_ratio ? num(*r.cost_ratio) : "")
            << '\n';
      }
      out << csv.str();
      return kExitOk;
    }
  } catch (const Error& e) {
    err << app.get_subcommands().front()->get_name() << ": " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

} // namespace cebound::cli
