#include "wonham/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wonham/bounds.hpp"
#include "wonham/filter.hpp"
#include "wonham/lyapunov.hpp"
#include "wonham/simulate.hpp"
#include "wonham/stats.hpp"
#include "wonham/twostate.hpp"

#ifndef WONHAM_GIT_REV
#define WONHAM_GIT_REV "unknown"
#endif

namespace wonham {

namespace {

namespace fs = std::filesystem;

constexpr int kCouplingTailMax = 12;

/* Fully-resolved run parameters: defaults that need the model (stationary
 * initial law, automatic burn-in) are materialized here so that meta.txt
 * can echo the values the estimators actually used. */
struct Resolved {
  ModelSpec spec;
  Eigen::VectorXd mu;
  Eigen::VectorXd nu_bar;
  double dt = 0.0;
  double horizon = 0.0;
  double burn_in = 0.0;
  int replications = 1;
  std::uint64_t seed = 0;
};

Resolved resolve(const ExperimentConfig& cfg) {
  Resolved r;
  r.spec = cfg.spec;
  if (!is_ergodic(r.spec.generator))
    throw Error(ErrorCode::NonErgodic,
                "the generator is not ergodic; no stationary regime exists");
  r.mu = stationary_distribution(r.spec.generator).mu;
  if (cfg.nu_defaulted) r.spec.nu = r.mu;
  // configs built in code may leave the alternate law empty; give it the
  // same uniform default the parser materializes
  if (cfg.nu_bar.size() == 0)
    r.nu_bar = Eigen::VectorXd::Constant(r.spec.d(), 1.0 / r.spec.d());
  else if (cfg.nu_bar.size() != r.spec.d())
    throw Error(ErrorCode::ConfigError,
                "nu_bar dimension does not match the model");
  else
    r.nu_bar = cfg.nu_bar;
  r.dt = cfg.dt;
  r.horizon = cfg.horizon;
  r.burn_in = cfg.burn_in < 0.0 ? default_burn_in(r.spec) : cfg.burn_in;
  if (r.horizon <= r.burn_in)
    throw Error(ErrorCode::ConfigError,
                "horizon must exceed the resolved burn_in");
  r.replications = cfg.replications;
  r.seed = cfg.master_seed;

  ValidationReport rep = validate(r.spec);
  if (!rep.valid)
    throw Error(ErrorCode::ConfigError, "invalid model: " + rep.errors.front());
  return r;
}

// replications scheduled dynamically; results land in slot r regardless of
// which worker ran them, so the reduction order is fixed
void parallel_reps(int reps, int threads,
                   const std::function<void(int)>& body) {
  int n = std::min(std::max(threads, 1), reps);
  if (n <= 1) {
    for (int r = 0; r < reps; ++r) body(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first;
  std::mutex first_mutex;
  auto worker = [&] {
    for (;;) {
      int r = next.fetch_add(1);
      if (r >= reps) break;
      try {
        body(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(first_mutex);
        if (!first) first = std::current_exception();
        break;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(n - 1));
  for (int i = 0; i < n - 1; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

std::string fmt(double v) {
  if (!std::isfinite(v))
    throw Error(ErrorCode::DomainError, "non-finite value in output");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// the gap log-distance is the one column where -inf is meaningful (filters
// started from the same law); everything else must be finite
std::string fmt_log(double v) {
  if (v == -std::numeric_limits<double>::infinity()) return "-inf";
  return fmt(v);
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorCode::ConfigError,
                "cannot write to output directory '" + dir.string() + "'");
  return out;
}

const char* kEstimateHeader =
    "method,value,std_error,horizon,burn_in,dt,seed,replications";

void write_estimate_row(std::ofstream& out, const std::string& method,
                        const LyapunovEstimate& e, double dt,
                        std::uint64_t seed) {
  out << method << ',' << fmt(e.value) << ',' << fmt(e.std_error) << ','
      << fmt(e.horizon) << ',' << fmt(e.burn_in) << ',' << fmt(dt) << ','
      << seed << ',' << e.replications << '\n';
}

void write_bounds_csv(const fs::path& dir, const BoundsReport& b) {
  std::ofstream out = open_out(dir, "bounds.csv");
  out << "az,mu_min,bcl_rate,spectral,azu_limit,azl_limit\n"
      << fmt(b.az) << ',' << fmt(b.mu_min) << ',' << fmt(b.bcl_rate) << ','
      << fmt(b.spectral) << ',' << fmt(b.azu_limit) << ','
      << fmt(b.azl_limit) << '\n';
}

void write_verdict_rows(std::ofstream& out,
                        const std::vector<ConsistencyVerdict>& verdicts,
                        const std::string& prefix) {
  for (const ConsistencyVerdict& v : verdicts)
    out << prefix << v.name << ',' << verdict_status_name(v.status) << ",\""
        << v.details << "\"\n";
}

void write_verdicts_csv(const fs::path& dir,
                        const std::vector<ConsistencyVerdict>& verdicts) {
  std::ofstream out = open_out(dir, "verdicts.csv");
  out << "name,status,details\n";
  write_verdict_rows(out, verdicts, "");
}

void write_meta(const fs::path& dir, const ExperimentConfig& cfg,
                const Resolved& r,
                const std::vector<std::pair<std::string, std::string>>& extra) {
  std::ofstream out = open_out(dir, "meta.txt");
  out << "wonhamlab 1.0.0 (" << WONHAM_GIT_REV << ")\n";
  out << "experiment = " << cfg.experiment << '\n';
  const int d = r.spec.d();
  out << "d = " << d << '\n';
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j)
        out << "lambda." << i + 1 << '.' << j + 1 << " = "
            << fmt(r.spec.generator.rates(i, j)) << '\n';
  for (int i = 0; i < d; ++i)
    out << "h." << i + 1 << " = " << fmt(r.spec.h(i)) << '\n';
  out << "sigma = " << fmt(r.spec.sigma) << '\n';
  for (int i = 0; i < d; ++i)
    out << "nu." << i + 1 << " = " << fmt(r.spec.nu(i)) << '\n';
  out << "nu_source = " << (cfg.nu_defaulted ? "stationary (default)" : "config")
      << '\n';
  for (int i = 0; i < d; ++i)
    out << "nu_bar." << i + 1 << " = " << fmt(r.nu_bar(i)) << '\n';
  out << "nu_bar_source = "
      << (cfg.nu_bar_defaulted ? "uniform (default)" : "config") << '\n';
  out << "dt = " << fmt(r.dt) << '\n';
  out << "horizon = " << fmt(r.horizon) << '\n';
  out << "burn_in = " << fmt(r.burn_in) << '\n';
  out << "burn_in_source = " << (cfg.burn_in_defaulted ? "auto" : "config")
      << '\n';
  out << "replications = " << r.replications << '\n';
  out << "seed = " << r.seed << '\n';
  if (!cfg.sigma_sweep.empty()) {
    out << "sigma_sweep = ";
    for (size_t i = 0; i < cfg.sigma_sweep.size(); ++i)
      out << (i ? "," : "") << fmt(cfg.sigma_sweep[i]);
    out << '\n';
  }
  for (const auto& [key, value] : extra) out << key << " = " << value << '\n';
}

// one replication's simulated record and its two-filter solution
TwoFilterRun replicate_two_filter(const Resolved& r, std::uint64_t stream) {
  RngStream rng{r.seed, stream};
  ChainPath chain = sample_chain(r.spec, r.horizon, rng);
  ObservationPath obs = sample_observation(chain, r.spec, r.dt, rng);
  return run_two_filters(obs, r.spec, r.spec.nu, r.nu_bar);
}

struct EstimateRow {
  std::string method;
  LyapunovEstimate estimate;
};

void write_standard_outputs(const fs::path& dir, const ExperimentConfig& cfg,
                            const Resolved& r,
                            const std::vector<EstimateRow>& rows,
                            const std::vector<LyapunovEstimate>& gamma_for_verdicts,
                            const std::vector<std::pair<std::string, std::string>>&
                                extra_meta = {}) {
  std::ofstream est = open_out(dir, "estimates.csv");
  est << kEstimateHeader << '\n';
  for (const EstimateRow& row : rows)
    write_estimate_row(est, row.method, row.estimate, r.dt, r.seed);

  BoundsReport bounds = compute_bounds(r.spec);
  write_bounds_csv(dir, bounds);
  write_verdicts_csv(dir,
                     check_bound_consistency(gamma_for_verdicts, bounds, r.spec));
  write_meta(dir, cfg, r, extra_meta);
}

/* ---- the eight experiments ------------------------------------------- */

void run_simulate(const fs::path& dir, const ExperimentConfig& cfg,
                  const Resolved& r) {
  RngStream rng{r.seed, 0};
  ChainPath chain = sample_chain(r.spec, r.horizon, rng);
  ObservationPath obs = sample_observation(chain, r.spec, r.dt, rng);
  TwoFilterRun run = run_two_filters(obs, r.spec, r.spec.nu, r.nu_bar);

  {
    std::ofstream out = open_out(dir, "chain.csv");
    out << "t,state\n";
    out << fmt(0.0) << ',' << chain.states[0] + 1 << '\n';
    for (size_t k = 0; k < chain.jump_times.size(); ++k)
      out << fmt(chain.jump_times[k]) << ',' << chain.states[k + 1] + 1
          << '\n';
  }
  {
    std::ofstream out = open_out(dir, "observations.csv");
    out << "k,dY\n";
    for (size_t k = 0; k < obs.increments.size(); ++k)
      out << k << ',' << fmt(obs.increments[k]) << '\n';
  }
  {
    std::ofstream out = open_out(dir, "trajectory.csv");
    out << "k,t";
    for (int i = 0; i < r.spec.d(); ++i) out << ",pi_" << i + 1;
    out << ",log_norm,log_dist\n";
    const FilterTrajectory& traj = run.primary;
    for (size_t k = 0; k < traj.pi.size(); ++k) {
      out << k << ',' << fmt(static_cast<double>(k) * r.dt);
      for (int i = 0; i < r.spec.d(); ++i) out << ',' << fmt(traj.pi[k](i));
      out << ',' << fmt(traj.log_norm[k]) << ',' << fmt_log(run.log_dist[k])
          << '\n';
    }
  }
  write_standard_outputs(dir, cfg, r, {}, {});
}

void run_gamma_mc(const fs::path& dir, const ExperimentConfig& cfg,
                  const Resolved& r, int threads) {
  std::vector<LyapunovEstimate> gammas(static_cast<size_t>(r.replications));
  std::vector<LyapunovEstimate> wedges(static_cast<size_t>(r.replications));
  parallel_reps(r.replications, threads, [&](int rep) {
    TwoFilterRun run = replicate_two_filter(r, static_cast<std::uint64_t>(rep));
    gammas[static_cast<size_t>(rep)] = gamma_distance_slope(run, r.burn_in);
    wedges[static_cast<size_t>(rep)] = lambda_sum_wedge(run, r.burn_in);
  });
  LyapunovEstimate gamma = pool(gammas);
  LyapunovEstimate wedge = pool(wedges);
  write_standard_outputs(dir, cfg, r,
                         {{estimator_method_name(gamma.method), gamma},
                          {estimator_method_name(wedge.method), wedge}},
                         {gamma});
}

void run_gamma_quad(const fs::path& dir, const ExperimentConfig& cfg,
                    const Resolved& r) {
  TwoStateQuadratureResult q = two_state_report(r.spec);
  {
    std::ofstream est = open_out(dir, "estimates.csv");
    est << "gamma,lambda1,lambda_sum,quad_error_estimate\n"
        << fmt(q.gamma) << ',' << fmt(q.lambda1) << ',' << fmt(q.lambda_sum)
        << ',' << fmt(q.quad_error) << '\n';
  }
  BoundsReport bounds = compute_bounds(r.spec);
  write_bounds_csv(dir, bounds);
  write_verdicts_csv(dir, check_bound_consistency({}, bounds, r.spec));
  write_meta(dir, cfg, r, {});
}

void run_lyapunov(const fs::path& dir, const ExperimentConfig& cfg,
                  const Resolved& r, int threads) {
  const size_t n = static_cast<size_t>(r.replications);
  std::vector<LyapunovEstimate> pathwise(n), stationary(n), log_norm(n);
  parallel_reps(r.replications, threads, [&](int rep) {
    RngStream rng{r.seed, static_cast<std::uint64_t>(rep)};
    ChainPath chain = sample_chain(r.spec, r.horizon, rng);
    ObservationPath obs = sample_observation(chain, r.spec, r.dt, rng);
    FilterTrajectory traj = run_filter(obs, r.spec, r.spec.nu);
    size_t k = static_cast<size_t>(rep);
    pathwise[k] = lambda1_fk_pathwise(traj, chain, r.burn_in);
    stationary[k] = lambda1_fk_stationary(traj, r.spec, r.burn_in);
    log_norm[k] = lambda1_log_norm(traj, r.burn_in);
  });
  std::vector<EstimateRow> rows;
  for (auto* batch : {&pathwise, &stationary, &log_norm}) {
    LyapunovEstimate e = pool(*batch);
    rows.push_back({estimator_method_name(e.method), e});
  }
  write_standard_outputs(dir, cfg, r, rows, {});
}

void run_bounds_experiment(const fs::path& dir, const ExperimentConfig& cfg,
                           const Resolved& r) {
  write_standard_outputs(dir, cfg, r, {}, {});
}

void run_couple(const fs::path& dir, const ExperimentConfig& cfg,
                const Resolved& r, int threads) {
  std::vector<double> tau(static_cast<size_t>(r.replications), 0.0);
  parallel_reps(r.replications, threads, [&](int rep) {
    RngStream rng{r.seed, static_cast<std::uint64_t>(rep)};
    tau[static_cast<size_t>(rep)] =
        coupling_time(r.spec, r.nu_bar, r.horizon, rng);
  });
  {
    std::ofstream out = open_out(dir, "estimates.csv");
    out << "n,survivors,total,log_survival\n";
    for (int n = 1; n <= kCouplingTailMax; ++n) {
      long survivors = 0;
      for (double t : tau)
        if (t > static_cast<double>(n)) ++survivors;
      out << n << ',' << survivors << ',' << r.replications << ',';
      if (survivors > 0)
        out << fmt(std::log(static_cast<double>(survivors) /
                            static_cast<double>(r.replications)));
      out << '\n';  // empty survival cell when the tail is exhausted
    }
  }
  BoundsReport bounds = compute_bounds(r.spec);
  write_bounds_csv(dir, bounds);
  write_verdicts_csv(dir, check_bound_consistency({}, bounds, r.spec));
  write_meta(dir, cfg, r,
             {{"coupling_rate", fmt(coupling_rate(r.spec.generator))}});
}

void run_ergodic_avg(const fs::path& dir, const ExperimentConfig& cfg,
                     const Resolved& r, int threads) {
  const size_t n = static_cast<size_t>(r.replications);
  std::vector<LyapunovEstimate> avg_ph(n), avg_ph2(n);
  parallel_reps(r.replications, threads, [&](int rep) {
    RngStream rng{r.seed, static_cast<std::uint64_t>(rep)};
    ChainPath chain = sample_chain(r.spec, r.horizon, rng);
    ObservationPath obs = sample_observation(chain, r.spec, r.dt, rng);
    FilterTrajectory traj = run_filter(obs, r.spec, r.spec.nu);

    const size_t first = static_cast<size_t>(std::llround(r.burn_in / r.dt));
    std::vector<double> ph, ph2;
    ph.reserve(traj.pi.size() - first);
    for (size_t k = first; k < traj.pi.size(); ++k) {
      double v = traj.pi[k].dot(r.spec.h);
      ph.push_back(v);
      ph2.push_back(v * v);
    }
    const size_t batch = static_cast<size_t>(std::llround(1.0 / r.dt));
    auto as_estimate = [&](const std::vector<double>& series) {
      LyapunovEstimate e;
      e.value = mean(series);
      e.std_error = batch_means_se(series, std::max<size_t>(batch, 2));
      e.horizon = r.horizon;
      e.burn_in = static_cast<double>(first) * r.dt;  // grid-snapped
      return e;
    };
    avg_ph[static_cast<size_t>(rep)] = as_estimate(ph);
    avg_ph2[static_cast<size_t>(rep)] = as_estimate(ph2);
  });
  write_standard_outputs(dir, cfg, r,
                         {{"ergodic_avg_ph", pool(avg_ph)},
                          {"ergodic_avg_ph2", pool(avg_ph2)}},
                         {});
}

void run_snr_sweep(const fs::path& dir, const ExperimentConfig& cfg,
                   const Resolved& r, int threads) {
  if (cfg.sigma_sweep.empty())
    throw Error(ErrorCode::ConfigError,
                "snr-sweep requires a sigma_sweep entry");

  std::ofstream est = open_out(dir, "estimates.csv");
  est << "sigma," << kEstimateHeader << '\n';
  std::ofstream ver = open_out(dir, "verdicts.csv");
  ver << "sigma,name,status,details\n";

  BoundsReport bounds = compute_bounds(r.spec);  // sigma-independent
  for (double sigma : cfg.sigma_sweep) {
    Resolved rs = r;
    rs.spec.sigma = sigma;
    std::vector<LyapunovEstimate> gammas(static_cast<size_t>(r.replications));
    parallel_reps(r.replications, threads, [&](int rep) {
      TwoFilterRun run =
          replicate_two_filter(rs, static_cast<std::uint64_t>(rep));
      gammas[static_cast<size_t>(rep)] = gamma_distance_slope(run, r.burn_in);
    });
    LyapunovEstimate gamma = pool(gammas);
    est << fmt(sigma) << ',';
    write_estimate_row(est, estimator_method_name(gamma.method), gamma, r.dt,
                       r.seed);
    write_verdict_rows(ver, check_bound_consistency({gamma}, bounds, rs.spec),
                       fmt(sigma) + ",");
  }
  write_bounds_csv(dir, bounds);
  write_meta(dir, cfg, r, {});
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg, int threads) {
  if (cfg.experiment.empty() || !is_known_experiment(cfg.experiment))
    throw Error(ErrorCode::ConfigError,
                "no experiment selected (unknown tag '" + cfg.experiment +
                    "')");
  if (cfg.outputs.empty())
    throw Error(ErrorCode::ConfigError, "no output directory given");

  Resolved r = resolve(cfg);
  fs::path dir(cfg.outputs);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw Error(ErrorCode::ConfigError,
                "cannot create output directory '" + dir.string() + "'");

  const std::string& tag = cfg.experiment;
  if (tag == "simulate")
    run_simulate(dir, cfg, r);
  else if (tag == "gamma-mc")
    run_gamma_mc(dir, cfg, r, threads);
  else if (tag == "gamma-quad")
    run_gamma_quad(dir, cfg, r);
  else if (tag == "lyapunov")
    run_lyapunov(dir, cfg, r, threads);
  else if (tag == "bounds")
    run_bounds_experiment(dir, cfg, r);
  else if (tag == "couple")
    run_couple(dir, cfg, r, threads);
  else if (tag == "ergodic-avg")
    run_ergodic_avg(dir, cfg, r, threads);
  else
    run_snr_sweep(dir, cfg, r, threads);
}

int run_experiment_guarded(const ExperimentConfig& cfg, int threads,
                           std::ostream& err) {
  try {
    run_experiment(cfg, threads);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::NonErgodic ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace wonham
