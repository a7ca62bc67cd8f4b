#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "saddlekit/restart.hpp"
#include "saddlekit/spdhg.hpp"

namespace saddlekit {

// ---------------------------------------------------------------------------
// Flat key = value configuration
// ---------------------------------------------------------------------------

// Lines of the form `dotted.key = value`; `#` starts a comment. Duplicate
// keys are rejected.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> get_double(const std::string& key) const;
  long get_long(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;

 private:
  std::map<std::string, std::string> values_;
};

enum class Algorithm { Spdhg, SpdhgRescaled, RestartDet, RestartStoc };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

struct InstanceSpec {
  std::string name = "matching-pennies";
  std::map<std::string, std::string> params;  // instance.* keys without the prefix
};

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Deterministic;
  NoiseLevels sigma;
  Index batch_size = 0;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  InstanceSpec instance;
  Algorithm algorithm = Algorithm::Spdhg;
  std::optional<double> rho, rho_prime, eta;
  NoiseSpec noise;
  // spdhg: 1000 when unset; spdhg-rescaled: the smallest admissible horizon.
  std::optional<long> T;
  std::optional<double> U, R;
  double epsilon = 1e-2;
  double nu = 0.2;
  double varsigma = 0.01;  // rescaled stochastic runs
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir;  // empty: do not write files
  long gap_stride = 0;               // 0: geometric checkpoints
  bool trajectory_diameters = true;

  // Validates keys and combinations; applies SADDLEKIT_SEED_OVERRIDE.
  static ExperimentConfig from(const Config& c);
  std::map<std::string, std::string> echo() const;
};

// Instances by CLI name: matrix-game, matching-pennies, quadratic-saddle, constrained-qp.
std::unique_ptr<ClosedFormInstance> make_instance(const InstanceSpec& spec);

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

// One JSON object per line: a header, then checkpoints, stages and verdicts.
std::string to_jsonl(const RunRecord& r);
RunRecord from_jsonl(const std::string& text);
// t, gap, bound columns for plotting.
std::string to_csv(const RunRecord& r);

void write_record(const RunRecord& r, const std::filesystem::path& jsonl_path);
RunRecord read_record(const std::filesystem::path& jsonl_path);

// Fraction of records whose "success" verdict is true.
double success_fraction(const std::vector<RunRecord>& records);

// ---------------------------------------------------------------------------
// Rate fitting and experiments
// ---------------------------------------------------------------------------

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Least squares of log(value) on log(t); needs >= 10 points, all positive.
RateFit fit_rate(const std::vector<std::pair<double, double>>& series);

struct ExperimentResult {
  std::vector<RunRecord> records;
  double success_fraction = 0.0;
};

// One record per seed; writes <dir>/seed-<s>.jsonl, <dir>/seed-<s>.csv and <dir>/summary.json.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace saddlekit
