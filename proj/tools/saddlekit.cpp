// saddlekit command line: solve, restart, sweep, verify, fit, repro.
// Exit codes: 0 success, 1 runtime error, 2 configuration or input error, 3 acceptance failure.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "saddlekit/acceptance.hpp"
#include "saddlekit/harness.hpp"

namespace {

using namespace saddlekit;

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAcceptance = 3;

Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
  Config c = path.empty() ? Config{} : Config::load(path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return c;
}

std::string opt_str(const std::optional<double>& v) {
  if (!v) return "-";
  std::ostringstream os;
  os.precision(6);
  os << *v;
  return os.str();
}

void print_records(const ExperimentResult& res) {
  for (const auto& r : res.records) {
    std::cout << r.algorithm << " seed " << r.seed;
    if (!r.rows.empty()) {
      const auto& last = r.rows.back();
      std::cout << " t " << last.t << " gap " << opt_str(last.gap);
      if (last.B_E) std::cout << " B_E " << opt_str(last.B_E);
      if (last.B_det) std::cout << " B_det " << opt_str(last.B_det);
      if (last.B_var) std::cout << " B_var " << opt_str(last.B_var);
    }
    if (!r.stages.empty())
      std::cout << " stages " << r.stages.size() << " final stage gap " << opt_str(r.stages.back().gap);
    for (const auto& [k, v] : r.verdicts) std::cout << " " << k << "=" << (v ? "yes" : "no");
    std::cout << "\n";
  }
  std::cout << "success fraction " << res.success_fraction << "\n";
}

int run_configured(const Config& c, bool want_restart) {
  const ExperimentConfig cfg = ExperimentConfig::from(c);
  const bool is_restart = cfg.algorithm == Algorithm::RestartDet || cfg.algorithm == Algorithm::RestartStoc;
  if (is_restart != want_restart)
    throw ConfigError(want_restart ? "restart needs algorithm.name = restart-det or restart-stoc"
                                   : "solve needs algorithm.name = spdhg or spdhg-rescaled");
  print_records(run_experiment(cfg));
  return 0;
}

std::vector<int> parse_ids(const std::vector<int>& ids) {
  if (!ids.empty()) return ids;
  std::vector<int> all;
  for (int i = 1; i <= acceptance::kNumCriteria; ++i) all.push_back(i);
  return all;
}

int run_criteria(const std::vector<int>& ids) {
  bool ok = true;
  for (int id : ids) {
    const auto r = acceptance::run_criterion(id);
    std::cout << acceptance::format(r) << std::endl;
    ok = ok && r.pass;
  }
  return ok ? 0 : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic primal-dual saddle-point solvers"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  auto* solve = app.add_subcommand("solve", "Single run of spdhg or spdhg-rescaled per seed");
  solve->add_option("-c,--config", config_path, "Config file (key = value lines)");
  solve->add_option("-s,--set", overrides, "Override a key: key=value");

  auto* restart = app.add_subcommand("restart", "Restart scheme run per seed");
  restart->add_option("-c,--config", config_path, "Config file");
  restart->add_option("-s,--set", overrides, "Override a key: key=value");

  std::vector<double> epsilons;
  std::vector<std::uint64_t> seeds;
  auto* sweep = app.add_subcommand("sweep", "Grid over seeds and/or epsilons; one output directory per point");
  sweep->add_option("-c,--config", config_path, "Config file");
  sweep->add_option("-s,--set", overrides, "Override a key: key=value");
  sweep->add_option("--epsilons", epsilons, "Target accuracies")->delimiter(',');
  sweep->add_option("--seeds", seeds, "Seeds")->delimiter(',');

  std::vector<int> ids;
  auto* verify = app.add_subcommand("verify", "Schedule-condition, prox, stopping-rule and oracle checks");

  std::string record_path;
  long t_from = 1, t_to = 0;
  auto* fit = app.add_subcommand("fit", "Log-log rate fit of the gap trace in a record file");
  fit->add_option("record", record_path, "Record file (.jsonl)")->required();
  fit->add_option("--from", t_from, "Smallest t included");
  fit->add_option("--to", t_to, "Largest t included (0: all)");

  auto* repro = app.add_subcommand("repro", "Full acceptance suite");
  repro->add_option("--criteria", ids, "Subset of criteria 1..10")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*solve) return run_configured(load_config(config_path, overrides), false);
    if (*restart) return run_configured(load_config(config_path, overrides), true);
    if (*sweep) {
      const Config base = load_config(config_path, overrides);
      const std::string root = base.get("output.dir", "");
      std::vector<std::string> eps_values;
      for (double e : epsilons) {
        std::ostringstream os;
        os << e;
        eps_values.push_back(os.str());
      }
      if (eps_values.empty()) eps_values.push_back("");
      for (const auto& e : eps_values) {
        Config c = base;
        if (!e.empty()) c.set("algorithm.epsilon", e);
        if (!seeds.empty()) {
          std::string list;
          for (auto s : seeds) list += (list.empty() ? "" : ",") + std::to_string(s);
          c.set("run.seeds", list);
        }
        if (!root.empty() && !e.empty()) c.set("output.dir", root + "/eps-" + e);
        const ExperimentConfig cfg = ExperimentConfig::from(c);
        if (!e.empty()) std::cout << "epsilon " << e << "\n";
        print_records(run_experiment(cfg));
      }
      return 0;
    }
    if (*verify) return run_criteria({2, 3, 8, 10});
    if (*fit) {
      const RunRecord r = read_record(record_path);
      std::vector<std::pair<double, double>> series;
      for (const auto& row : r.rows)
        if (row.gap && row.t >= t_from && (t_to == 0 || row.t <= t_to))
          series.emplace_back(static_cast<double>(row.t), *row.gap);
      const RateFit f = fit_rate(series);
      std::cout << "slope " << f.slope << " intercept " << f.intercept << " r2 " << f.r2 << " points "
                << series.size() << "\n";
      return 0;
    }
    if (*repro) return run_criteria(parse_ids(ids));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InsufficientData& e) {
    std::cerr << "insufficient data: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
