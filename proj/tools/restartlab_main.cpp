#include <fcntl.h>
#include <signal.h>
#include <string.h>
#include <sys/wait.h>
#include <unistd.h>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "restartlab/config.hpp"
#include "restartlab/engine.hpp"
#include "restartlab/oracle.hpp"

using nlohmann::json;
using namespace restartlab;

namespace {

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// Accepts a file path, inline JSON, or (when allow_bare) a bare strategy name.
json load_spec(const std::string& arg, bool allow_bare_strategy = false) {
  {
    std::ifstream f(arg);
    if (f.good()) {
      try {
        return json::parse(f);
      } catch (const json::parse_error& e) {
        throw ConfigError(std::string("cannot parse '") + arg + "': " + e.what());
      }
    }
  }
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) {
    try {
      return json::parse(arg);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("cannot parse inline JSON: ") + e.what());
    }
  }
  if (allow_bare_strategy) return json{{"strategy", arg}};
  throw ConfigError("expected a file path or inline JSON, got '" + arg + "'");
}

std::optional<std::uint64_t> env_seed_override() {
  const char* s = std::getenv("RESTARTLAB_SEED");
  if (!s || !*s) return std::nullopt;
  return std::strtoull(s, nullptr, 10);
}

struct BoundValue {
  std::string name;
  double value;
  bool on_charged;  // compare against the charged-time estimate
};

BoundValue evaluate_bound(const BoundRequest& b, const RuntimeDistribution& d) {
  if (b.name == "quantile_4")
    return {"quantile_4(q=" + fmt(b.q) + ")", bound_quantile(d, b.q), true};
  if (b.name == "sprs_23") return {"sprs_23", bound_sprs(d), false};
  if (b.name == "ssprs_psi") return {"ssprs_psi", bound_ssprs(d), false};
  if (b.name == "moments") {
    const double ma = mu_phi(d, ConcaveTransform::power(b.a));
    const double value = std::isinf(ma)
                             ? kInf
                             : 4.0 / (b.q * std::pow(1.0 - b.q, 1.0 / b.a)) * ma;
    return {"moments(a=" + fmt(b.a) + ";q=" + fmt(b.q) + ")", value, false};
  }
  if (b.name == "powers") {
    const double mu = mu_phi(d, ConcaveTransform::one_minus_pow(b.beta));
    const double C = std::pow(1.0 - b.beta * (1.0 + b.eps), -1.0 / b.beta);
    return {"powers(beta=" + fmt(b.beta) + ";eps=" + fmt(b.eps) + ")",
            std::isinf(mu) ? kInf : C * mu, false};
  }
  if (b.name == "lb_lower") return {"lb_lower", lb_sandwich(d).lower, false};
  if (b.name == "lb_upper") return {"lb_upper", lb_sandwich(d).upper, false};
  throw ConfigError("unknown bound '" + b.name + "'");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open output file '" + path + "'");
  f << text;
}

int cmd_sequence(const std::string& spec_arg, std::size_t n, std::uint64_t seed) {
  if (auto env = env_seed_override()) seed = *env;
  const Strategy strategy = parse_strategy(load_spec(spec_arg, true));
  SchedulePlayer player(strategy);
  RandomStream rng(seed);
  std::ostringstream os;
  os << (strategy.randomized() ? "k,sub_index,cutoff\n" : "k,cutoff\n");
  for (std::size_t k = 0; k < n; ++k) {
    const auto [sub, cutoff] = player.next(rng);
    if (strategy.randomized())
      os << k << "," << sub << "," << fmt(cutoff) << "\n";
    else
      os << k << "," << fmt(cutoff) << "\n";
  }
  std::cout << os.str();
  return 0;
}

int cmd_simulate(const std::string& config_arg, unsigned threads_override,
                 const std::string& output_override, const std::string& format_override) {
  json spec = load_spec(config_arg);
  std::vector<ExperimentConfig> experiments;
  if (spec.is_array())
    for (const auto& e : spec) experiments.push_back(parse_experiment(e));
  else
    experiments.push_back(parse_experiment(spec));

  std::string output_path = output_override;
  std::string format = format_override;
  std::ostringstream csv;
  csv << "strategy,distribution,n,seed,mean_actual,stderr_actual,mean_charged,stderr_charged,"
         "truncation_rate,bound,bound_value,bound_satisfied\n";
  json rows = json::array();

  for (auto& cfg : experiments) {
    if (auto env = env_seed_override()) cfg.seed = *env;
    if (threads_override > 0) cfg.threads = threads_override;
    if (output_path.empty()) output_path = cfg.output_path;
    if (format.empty() && !cfg.output_format.empty()) format = cfg.output_format;

    double mean_actual, stderr_actual, mean_charged, stderr_charged, trunc_rate;
    std::size_t n;
    if (cfg.exact) {
      const auto exact = exact_expected_time(cfg.strategy.sequence(), cfg.distribution);
      mean_actual = exact.lbar;
      mean_charged = exact.lbar_plus;
      stderr_actual = stderr_charged = 0.0;
      trunc_rate = 0.0;
      n = 0;
    } else {
      const MCStats stats = monte_carlo(cfg.strategy, cfg.distribution, cfg.n_trials, cfg.seed,
                                        cfg.horizon, cfg.threads);
      mean_actual = stats.mean_actual;
      stderr_actual = stats.stderr_actual;
      mean_charged = stats.mean_charged;
      stderr_charged = stats.stderr_charged;
      trunc_rate = stats.truncation_rate;
      n = stats.n_trials;
    }

    auto emit = [&](const BoundValue* bv) {
      csv << cfg.strategy.label() << "," << cfg.distribution.label() << "," << n << "," << cfg.seed
          << "," << fmt(mean_actual) << "," << fmt(stderr_actual) << "," << fmt(mean_charged)
          << "," << fmt(stderr_charged) << "," << fmt(trunc_rate);
      json row;
      row["config"] = experiment_to_json(cfg);
      row["strategy"] = cfg.strategy.label();
      row["distribution"] = cfg.distribution.label();
      row["n"] = n;
      row["seed"] = cfg.seed;
      row["mean_actual"] = json_number(mean_actual);
      row["stderr_actual"] = json_number(stderr_actual);
      row["mean_charged"] = json_number(mean_charged);
      row["stderr_charged"] = json_number(stderr_charged);
      row["truncation_rate"] = trunc_rate;
      if (bv) {
        const double estimate = bv->on_charged ? mean_charged : mean_actual;
        const double err = bv->on_charged ? stderr_charged : stderr_actual;
        const bool ok = estimate <= bv->value + 3.0 * err;
        csv << "," << bv->name << "," << fmt(bv->value) << "," << (ok ? "true" : "false");
        row["bound"] = bv->name;
        row["bound_value"] = json_number(bv->value);
        row["bound_satisfied"] = ok;
      } else {
        csv << ",,,";
      }
      csv << "\n";
      rows.push_back(row);
    };

    if (cfg.bounds_to_check.empty()) {
      emit(nullptr);
    } else {
      for (const auto& b : cfg.bounds_to_check) {
        const BoundValue bv = evaluate_bound(b, cfg.distribution);
        emit(&bv);
      }
    }
  }

  if (format.empty()) format = "csv";
  write_text(output_path, format == "json" ? rows.dump(2) + "\n" : csv.str());
  return 0;
}

int cmd_oracle(const std::string& dist_arg, const std::string& output_path) {
  const RuntimeDistribution d = parse_distribution(load_spec(dist_arg));
  const OracleReport rep = oracle_report(d);
  json j;
  j["distribution"] = distribution_to_json(d);
  j["ellstar"] = json_number(rep.ellstar);
  j["alphastar"] = json_number(rep.alphastar);
  j["lstar"] = json_number(rep.lstar);
  j["qstar"] = json_number(rep.qstar);
  json quantiles = json::array();
  for (const auto& [q, v] : rep.quantiles) quantiles.push_back({{"q", q}, {"value", json_number(v)}});
  j["quantiles"] = quantiles;
  json mu;
  for (const auto& [name, v] : rep.mu_values) mu[name] = json_number(v);
  j["mu"] = mu;
  json bounds;
  for (const auto& [name, v] : rep.bound_values) bounds[name] = json_number(v);
  j["bounds"] = bounds;
  write_text(output_path, j.dump(2) + "\n");
  return 0;
}

int cmd_bounds(const std::string& config_arg, const std::string& output_path) {
  const json spec = load_spec(config_arg);
  if (!spec.is_object() || !spec.contains("distribution"))
    throw ConfigError("bounds config needs a 'distribution' field");
  const RuntimeDistribution d = parse_distribution(spec.at("distribution"));
  std::vector<BoundRequest> reqs;
  const char* key = spec.contains("bounds") ? "bounds" : "bounds_to_check";
  if (spec.contains(key)) {
    json wrapper;
    wrapper["distribution"] = spec.at("distribution");
    wrapper["strategy"] = {{"strategy", "luby"}};
    wrapper["bounds_to_check"] = spec.at(key);
    reqs = parse_experiment(wrapper).bounds_to_check;
  } else {
    for (const auto& name : known_bound_names()) reqs.push_back({name});
  }
  std::ostringstream os;
  os << "distribution,bound,value\n";
  for (const auto& r : reqs) {
    const BoundValue bv = evaluate_bound(r, d);
    os << d.label() << "," << bv.name << "," << fmt(bv.value) << "\n";
  }
  write_text(output_path, os.str());
  return 0;
}

// --- wrap: apply a restart strategy to a real process ---------------------

struct Attempt {
  double cutoff_seconds;
  double elapsed_seconds;
  std::string outcome;  // success | killed | failed
  int exit_status;
};

int cmd_wrap(const std::string& strategy_arg, double unit_seconds, int max_attempts,
             std::uint64_t seed, const std::vector<std::string>& command,
             const std::string& report_path, bool keep_killed_output) {
  if (command.empty()) throw ConfigError("wrap: no command given (use -- <command...>)");
  if (!(unit_seconds > 0.0)) throw ConfigError("wrap: --unit must be positive");
  if (auto env = env_seed_override()) seed = *env;
  const Strategy strategy = parse_strategy(load_spec(strategy_arg, true));
  SchedulePlayer player(strategy);
  RandomStream rng(seed);

  std::vector<Attempt> attempts;
  double total_wall = 0.0;
  int final_code = 2;
  constexpr auto kGrace = std::chrono::seconds(2);

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const auto [sub, cutoff] = player.next(rng);
    const double limit_s = cutoff * unit_seconds;

    int outpipe[2];
    int execpipe[2];
    if (pipe(outpipe) != 0 || pipe2(execpipe, O_CLOEXEC) != 0)
      throw std::runtime_error("wrap: pipe() failed");
    const pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("wrap: fork() failed");
    if (pid == 0) {
      setpgid(0, 0);
      dup2(outpipe[1], STDOUT_FILENO);
      close(outpipe[0]);
      close(outpipe[1]);
      close(execpipe[0]);
      std::vector<char*> argv;
      argv.reserve(command.size() + 1);
      for (const auto& s : command) argv.push_back(const_cast<char*>(s.c_str()));
      argv.push_back(nullptr);
      execvp(argv[0], argv.data());
      const int err = errno;
      (void)!write(execpipe[1], &err, sizeof err);
      _exit(127);
    }
    setpgid(pid, pid);
    close(outpipe[1]);
    close(execpipe[1]);

    int exec_errno = 0;
    const ssize_t got = read(execpipe[0], &exec_errno, sizeof exec_errno);
    close(execpipe[0]);
    if (got > 0) {
      waitpid(pid, nullptr, 0);
      close(outpipe[0]);
      std::cerr << "wrap: cannot execute '" << command[0] << "': " << strerror(exec_errno) << "\n";
      return 1;
    }

    const auto start = std::chrono::steady_clock::now();
    fcntl(outpipe[0], F_SETFL, O_NONBLOCK);
    std::string captured;
    char buf[4096];
    auto drain = [&] {
      for (;;) {
        const ssize_t r = read(outpipe[0], buf, sizeof buf);
        if (r <= 0) break;
        captured.append(buf, static_cast<std::size_t>(r));
      }
    };

    int status = 0;
    bool exited = false;
    bool killed = false;
    std::optional<std::chrono::steady_clock::time_point> term_sent;
    for (;;) {
      drain();
      const pid_t r = waitpid(pid, &status, WNOHANG);
      if (r == pid) {
        exited = true;
        break;
      }
      const auto now = std::chrono::steady_clock::now();
      const double elapsed = std::chrono::duration<double>(now - start).count();
      if (!term_sent && elapsed >= limit_s) {
        kill(-pid, SIGTERM);
        term_sent = now;
        killed = true;
      } else if (term_sent && now - *term_sent >= kGrace) {
        kill(-pid, SIGKILL);
        waitpid(pid, &status, 0);
        exited = true;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    drain();
    close(outpipe[0]);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    total_wall += elapsed;

    Attempt a{limit_s, elapsed, "killed", -1};
    if (!killed && exited && WIFEXITED(status)) {
      a.exit_status = WEXITSTATUS(status);
      a.outcome = a.exit_status == 0 ? "success" : "failed";
    }
    attempts.push_back(a);
    std::cerr << "wrap: attempt " << attempts.size() << ": cutoff " << fmt(limit_s)
              << "s, elapsed " << fmt(elapsed) << "s, " << a.outcome << "\n";

    if (a.outcome == "success") {
      std::cout << captured << std::flush;
      final_code = 0;
      break;
    }
    if (keep_killed_output) std::cout << captured << std::flush;
  }

  if (!report_path.empty()) {
    json j;
    json ja = json::array();
    for (const auto& a : attempts)
      ja.push_back({{"cutoff_seconds", a.cutoff_seconds},
                    {"elapsed_seconds", a.elapsed_seconds},
                    {"outcome", a.outcome},
                    {"exit_status", a.exit_status}});
    j["attempts"] = ja;
    j["total_wall_seconds"] = total_wall;
    j["exit_status"] = final_code;
    std::ofstream f(report_path);
    f << j.dump(2) << "\n";
  }
  return final_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"restartlab: restart strategies for Las Vegas algorithms"};
  app.require_subcommand(1);

  // sequence
  auto* seq = app.add_subcommand("sequence", "print the first n cutoffs of a strategy as CSV");
  std::string seq_spec;
  std::size_t seq_n = 16;
  std::uint64_t seq_seed = 1;
  seq->add_option("strategy", seq_spec, "strategy name or JSON spec")->required();
  seq->add_option("-n,--count", seq_n, "number of cutoffs");
  seq->add_option("--seed", seq_seed, "seed for randomized schedules");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run experiments from a config file");
  std::string sim_config;
  unsigned sim_threads = 0;
  std::string sim_output, sim_format;
  sim->add_option("config", sim_config, "config file or inline JSON")->required();
  sim->add_option("--threads", sim_threads, "worker threads (results are thread-count independent)");
  sim->add_option("--output", sim_output, "output path (default from config or stdout)");
  sim->add_option("--format", sim_format, "csv or json");

  // oracle
  auto* orc = app.add_subcommand("oracle", "optimal baselines and bounds for a distribution");
  std::string orc_dist, orc_output;
  orc->add_option("distribution", orc_dist, "distribution spec file or inline JSON")->required();
  orc->add_option("--output", orc_output, "output path (default stdout)");

  // bounds
  auto* bnd = app.add_subcommand("bounds", "evaluate named bounds for a distribution");
  std::string bnd_config, bnd_output;
  bnd->add_option("config", bnd_config, "config file or inline JSON")->required();
  bnd->add_option("--output", bnd_output, "output path (default stdout)");

  // wrap
  auto* wrp = app.add_subcommand("wrap", "run a command under a restart strategy with wall-clock cutoffs");
  std::string wrp_strategy = "luby";
  double wrp_unit = 1.0;
  int wrp_max_attempts = 16;
  std::uint64_t wrp_seed = 1;
  std::string wrp_report;
  bool wrp_keep = false;
  std::vector<std::string> wrp_command;
  wrp->add_option("--strategy", wrp_strategy, "strategy name or JSON spec");
  wrp->add_option("--unit", wrp_unit, "seconds per abstract time unit")->required();
  wrp->add_option("--max-attempts", wrp_max_attempts, "give up after this many attempts");
  wrp->add_option("--seed", wrp_seed, "seed for randomized schedules");
  wrp->add_option("--report", wrp_report, "write a JSON report of all attempts");
  wrp->add_flag("--keep-killed-output", wrp_keep, "also forward output of killed/failed attempts");
  wrp->add_option("command", wrp_command, "command to supervise (after --)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (seq->parsed()) return cmd_sequence(seq_spec, seq_n, seq_seed);
    if (sim->parsed()) return cmd_simulate(sim_config, sim_threads, sim_output, sim_format);
    if (orc->parsed()) return cmd_oracle(orc_dist, orc_output);
    if (bnd->parsed()) return cmd_bounds(bnd_config, bnd_output);
    if (wrp->parsed())
      return cmd_wrap(wrp_strategy, wrp_unit, wrp_max_attempts, wrp_seed, wrp_command, wrp_report,
                      wrp_keep);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
