#include "saddlekit/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace saddlekit {
namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + v + "'");
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long d = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const unsigned long long d = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not an unsigned integer: '" + v + "'");
  }
}

// Shortest representation that parses back to the same double.
std::string fmt_double(double d) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), d);
  return std::string(buf, res.ptr);
}

}  // namespace

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (c.has(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    c.values_[key] = value;
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string Config::require(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? parse_double(key, require(key)) : fallback;
}

std::optional<double> Config::get_double(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return parse_double(key, require(key));
}

long Config::get_long(const std::string& key, long fallback) const {
  return has(key) ? parse_long(key, require(key)) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? parse_u64(key, require(key)) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = require(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<std::string> Config::get_list(const std::string& key) const {
  std::vector<std::string> out;
  if (!has(key)) return out;
  std::stringstream ss(require(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Spdhg: return "spdhg";
    case Algorithm::SpdhgRescaled: return "spdhg-rescaled";
    case Algorithm::RestartDet: return "restart-det";
    case Algorithm::RestartStoc: return "restart-stoc";
  }
  return "spdhg";
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "spdhg") return Algorithm::Spdhg;
  if (s == "spdhg-rescaled") return Algorithm::SpdhgRescaled;
  if (s == "restart-det") return Algorithm::RestartDet;
  if (s == "restart-stoc") return Algorithm::RestartStoc;
  throw ConfigError("unknown algorithm '" + s + "'");
}

namespace {

const std::set<std::string> kKnownKeys = {
    "instance.name",     "algorithm.name",    "algorithm.T",          "algorithm.U",
    "algorithm.R",       "algorithm.epsilon", "algorithm.nu",         "algorithm.varsigma",
    "schedule.rho",      "schedule.rho_prime", "schedule.eta",        "noise.kind",
    "noise.sigma_x_f",   "noise.sigma_x_phi", "noise.sigma_y_phi",    "noise.seed",
    "noise.batch_size",  "run.seeds",         "run.trajectory_diameters", "output.dir",
    "output.gap_stride"};

NoiseKind parse_noise_kind(const std::string& s) {
  if (s == "deterministic") return NoiseKind::Deterministic;
  if (s == "subgaussian") return NoiseKind::AdditiveSubGaussian;
  if (s == "minibatch") return NoiseKind::FiniteSumMinibatch;
  throw ConfigError("unknown noise kind '" + s + "'");
}

std::string noise_kind_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::Deterministic: return "deterministic";
    case NoiseKind::AdditiveSubGaussian: return "subgaussian";
    case NoiseKind::FiniteSumMinibatch: return "minibatch";
  }
  return "deterministic";
}

bool has_noise(const NoiseSpec& n) {
  switch (n.kind) {
    case NoiseKind::Deterministic: return false;
    case NoiseKind::AdditiveSubGaussian:
      return n.sigma.sigma_x_f > 0 || n.sigma.sigma_x_phi > 0 || n.sigma.sigma_y_phi > 0;
    case NoiseKind::FiniteSumMinibatch: return true;
  }
  return false;
}

}  // namespace

ExperimentConfig ExperimentConfig::from(const Config& c) {
  ExperimentConfig e;
  for (const auto& [key, value] : c.values()) {
    if (key.rfind("instance.", 0) == 0) {
      if (key != "instance.name") e.instance.params[key.substr(9)] = value;
      continue;
    }
    if (!kKnownKeys.count(key)) throw ConfigError("unknown key '" + key + "'");
  }
  e.instance.name = c.get("instance.name", e.instance.name);
  e.algorithm = parse_algorithm(c.get("algorithm.name", "spdhg"));
  if (c.has("algorithm.T")) e.T = c.get_long("algorithm.T", 0);
  e.U = c.get_double("algorithm.U");
  e.R = c.get_double("algorithm.R");
  e.epsilon = c.get_double("algorithm.epsilon", e.epsilon);
  e.nu = c.get_double("algorithm.nu", e.nu);
  e.varsigma = c.get_double("algorithm.varsigma", e.varsigma);
  e.rho = c.get_double("schedule.rho");
  e.rho_prime = c.get_double("schedule.rho_prime");
  e.eta = c.get_double("schedule.eta");
  e.noise.kind = parse_noise_kind(c.get("noise.kind", "deterministic"));
  e.noise.sigma.sigma_x_f = c.get_double("noise.sigma_x_f", 0.0);
  e.noise.sigma.sigma_x_phi = c.get_double("noise.sigma_x_phi", 0.0);
  e.noise.sigma.sigma_y_phi = c.get_double("noise.sigma_y_phi", 0.0);
  e.noise.seed = c.get_u64("noise.seed", 0);
  e.noise.batch_size = c.get_long("noise.batch_size", 0);
  e.trajectory_diameters = c.get_bool("run.trajectory_diameters", true);
  e.output_dir = c.get("output.dir", "");
  const std::string stride = c.get("output.gap_stride", "geometric");
  e.gap_stride = stride == "geometric" ? 0 : c.get_long("output.gap_stride", 0);
  if (e.gap_stride < 0) throw ConfigError("output.gap_stride must be positive or 'geometric'");

  e.seeds.clear();
  for (const auto& s : c.get_list("run.seeds")) e.seeds.push_back(parse_u64("run.seeds", s));
  if (e.seeds.empty()) e.seeds.push_back(e.noise.seed);
  if (const char* env = std::getenv("SADDLEKIT_SEED_OVERRIDE"); env && *env)
    e.seeds = {parse_u64("SADDLEKIT_SEED_OVERRIDE", env)};

  // Combinations the solvers reject.
  if (e.noise.kind == NoiseKind::Deterministic && (e.noise.sigma.sigma_x_f > 0 || e.noise.sigma.sigma_x_phi > 0 ||
                                                   e.noise.sigma.sigma_y_phi > 0))
    throw ConfigError("deterministic noise cannot carry sigma values");
  if (e.noise.sigma.sigma_x_f < 0 || e.noise.sigma.sigma_x_phi < 0 || e.noise.sigma.sigma_y_phi < 0)
    throw ConfigError("noise levels must be nonnegative");
  if (e.T && *e.T < 3) throw ConfigError("algorithm.T must be at least 3");
  if (e.algorithm == Algorithm::RestartDet && has_noise(e.noise))
    throw ConfigError("restart-det needs deterministic gradients");
  if (e.algorithm == Algorithm::RestartStoc && e.noise.kind == NoiseKind::FiniteSumMinibatch)
    throw ConfigError("restart-stoc needs sub-Gaussian or deterministic noise");
  if (!(e.epsilon > 0)) throw ConfigError("algorithm.epsilon must be positive");
  if (!(e.nu > 0 && e.nu <= 1)) throw ConfigError("algorithm.nu must lie in (0, 1]");

  const auto inst = make_instance(e.instance);
  const bool restart = e.algorithm == Algorithm::RestartDet || e.algorithm == Algorithm::RestartStoc;
  if (e.algorithm == Algorithm::RestartStoc && inst->geom_x().dgf != DgfKind::SquaredEuclidean)
    throw ConfigError("restart-stoc needs the squared Euclidean primal geometry");
  if ((restart || e.algorithm == Algorithm::SpdhgRescaled) && !(inst->constants().mu > 0))
    throw ConfigError(to_string(e.algorithm) + " needs a strongly convex instance (mu > 0)");
  if (e.noise.kind == NoiseKind::FiniteSumMinibatch &&
      (inst->num_components() < 1 || e.noise.batch_size < 1 || e.noise.batch_size > inst->num_components()))
    throw ConfigError("minibatch noise needs instance.n_components >= noise.batch_size >= 1");
  return e;
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
  std::map<std::string, std::string> m;
  m["instance.name"] = instance.name;
  for (const auto& [k, v] : instance.params) m["instance." + k] = v;
  m["algorithm.name"] = to_string(algorithm);
  if (T) m["algorithm.T"] = std::to_string(*T);
  if (U) m["algorithm.U"] = fmt_double(*U);
  if (R) m["algorithm.R"] = fmt_double(*R);
  m["algorithm.epsilon"] = fmt_double(epsilon);
  m["algorithm.nu"] = fmt_double(nu);
  m["algorithm.varsigma"] = fmt_double(varsigma);
  if (rho) m["schedule.rho"] = fmt_double(*rho);
  if (rho_prime) m["schedule.rho_prime"] = fmt_double(*rho_prime);
  if (eta) m["schedule.eta"] = fmt_double(*eta);
  m["noise.kind"] = noise_kind_name(noise.kind);
  m["noise.sigma_x_f"] = fmt_double(noise.sigma.sigma_x_f);
  m["noise.sigma_x_phi"] = fmt_double(noise.sigma.sigma_x_phi);
  m["noise.sigma_y_phi"] = fmt_double(noise.sigma.sigma_y_phi);
  m["noise.batch_size"] = std::to_string(noise.batch_size);
  m["output.gap_stride"] = gap_stride == 0 ? "geometric" : std::to_string(gap_stride);
  m["run.trajectory_diameters"] = trajectory_diameters ? "true" : "false";
  return m;
}

std::unique_ptr<ClosedFormInstance> make_instance(const InstanceSpec& spec) {
  Config c;
  for (const auto& [k, v] : spec.params) c.set(k, v);
  auto only = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : spec.params)
      if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) == allowed.end())
        throw ConfigError("instance '" + spec.name + "' has no parameter '" + k + "'");
  };
  auto simplex_geometry = [&]() {
    const std::string g = c.get("geometry", "entropy");
    if (g == "entropy") return SimplexGeometry::Entropy;
    if (g == "euclidean") return SimplexGeometry::Euclidean;
    throw ConfigError("instance.geometry must be 'entropy' or 'euclidean'");
  };
  if (spec.name == "matching-pennies") {
    only({"geometry"});
    return std::make_unique<ClosedFormInstance>(matching_pennies(simplex_geometry()));
  }
  if (spec.name == "matrix-game") {
    only({"m", "n", "seed", "geometry"});
    const long m = c.get_long("m", 10), n = c.get_long("n", 10);
    if (m < 1 || n < 1) throw ConfigError("matrix-game dimensions must be positive");
    return std::make_unique<ClosedFormInstance>(random_matrix_game(m, n, c.get_u64("seed", 1), simplex_geometry()));
  }
  if (spec.name == "quadratic-saddle") {
    only({"dim_x", "dim_y", "mu", "L", "L_yx", "L_yy", "radius_x", "radius_y", "saddle_fraction", "seed",
          "n_components", "component_scale"});
    QuadraticSaddleOptions o;
    o.dim_x = c.get_long("dim_x", o.dim_x);
    o.dim_y = c.get_long("dim_y", o.dim_y);
    o.mu = c.get_double("mu", o.mu);
    o.L = c.get_double("L", o.L);
    o.L_yx = c.get_double("L_yx", o.L_yx);
    o.L_yy = c.get_double("L_yy", o.L_yy);
    o.radius_x = c.get_double("radius_x", o.radius_x);
    o.radius_y = c.get_double("radius_y", o.radius_y);
    o.saddle_fraction = c.get_double("saddle_fraction", o.saddle_fraction);
    o.seed = c.get_u64("seed", o.seed);
    o.n_components = c.get_long("n_components", o.n_components);
    o.component_scale = c.get_double("component_scale", o.component_scale);
    return std::make_unique<ClosedFormInstance>(make_quadratic_saddle(o));
  }
  if (spec.name == "constrained-qp") {
    only({"dim_x", "n_constraints", "mu", "L", "constraint_norm", "radius_x", "radius_y", "saddle_fraction",
          "seed"});
    ConstrainedQpOptions o;
    o.dim_x = c.get_long("dim_x", o.dim_x);
    o.n_constraints = c.get_long("n_constraints", o.n_constraints);
    o.mu = c.get_double("mu", o.mu);
    o.L = c.get_double("L", o.L);
    o.constraint_norm = c.get_double("constraint_norm", o.constraint_norm);
    o.radius_x = c.get_double("radius_x", o.radius_x);
    o.radius_y = c.get_double("radius_y", o.radius_y);
    o.saddle_fraction = c.get_double("saddle_fraction", o.saddle_fraction);
    o.seed = c.get_u64("seed", o.seed);
    return std::make_unique<ClosedFormInstance>(make_constrained_qp(o));
  }
  throw ConfigError("unknown instance '" + spec.name + "'");
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

namespace {

// JSON has no infinities; non-finite values travel as strings.
json num(double d) {
  if (std::isfinite(d)) return d;
  if (std::isnan(d)) return "nan";
  return d > 0 ? "inf" : "-inf";
}

double unnum(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw IoError("malformed number in record: " + s);
}

json opt(const std::optional<double>& d) { return d ? num(*d) : json(nullptr); }

std::optional<double> unopt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return unnum(j.at(key));
}

}  // namespace

std::string to_jsonl(const RunRecord& r) {
  std::string out;
  json head = {{"type", "run"}, {"algorithm", r.algorithm}, {"seed", r.seed}, {"config", r.config}};
  out += head.dump() + "\n";
  for (const auto& row : r.rows) {
    json j = {{"type", "checkpoint"},
              {"t", row.t},
              {"gap", opt(row.gap)},
              {"B_E", opt(row.B_E)},
              {"B_det", opt(row.B_det)},
              {"B_var", opt(row.B_var)},
              {"calls_f", row.calls[0]},
              {"calls_x_phi", row.calls[1]},
              {"calls_y_phi", row.calls[2]},
              {"wall_seconds", num(row.wall_seconds)},
              {"omega_x", opt(row.omega_x)},
              {"omega_y", opt(row.omega_y)}};
    out += j.dump() + "\n";
  }
  for (const auto& st : r.stages) {
    json j = {{"type", "stage"},
              {"k", st.k},
              {"R", num(st.R)},
              {"T", st.T},
              {"gap", opt(st.gap)},
              {"max_center_distance", num(st.max_center_distance)},
              {"calls_f", st.calls[0]},
              {"calls_x_phi", st.calls[1]},
              {"calls_y_phi", st.calls[2]}};
    out += j.dump() + "\n";
  }
  out += json({{"type", "verdicts"}, {"verdicts", r.verdicts}}).dump() + "\n";
  return out;
}

RunRecord from_jsonl(const std::string& text) {
  RunRecord r;
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw IoError(std::string("malformed record line: ") + e.what());
    }
    const std::string type = j.value("type", "");
    if (type == "run") {
      saw_header = true;
      r.algorithm = j.at("algorithm").get<std::string>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.config = j.at("config").get<std::map<std::string, std::string>>();
    } else if (type == "checkpoint") {
      CheckpointRow row;
      row.t = j.at("t").get<long>();
      row.gap = unopt(j, "gap");
      row.B_E = unopt(j, "B_E");
      row.B_det = unopt(j, "B_det");
      row.B_var = unopt(j, "B_var");
      row.calls = {j.at("calls_f").get<long>(), j.at("calls_x_phi").get<long>(), j.at("calls_y_phi").get<long>()};
      row.wall_seconds = unnum(j.at("wall_seconds"));
      row.omega_x = unopt(j, "omega_x");
      row.omega_y = unopt(j, "omega_y");
      r.rows.push_back(row);
    } else if (type == "stage") {
      StageSummary st;
      st.k = j.at("k").get<int>();
      st.R = unnum(j.at("R"));
      st.T = j.at("T").get<long>();
      st.gap = unopt(j, "gap");
      st.max_center_distance = unnum(j.at("max_center_distance"));
      st.calls = {j.at("calls_f").get<long>(), j.at("calls_x_phi").get<long>(), j.at("calls_y_phi").get<long>()};
      r.stages.push_back(st);
    } else if (type == "verdicts") {
      r.verdicts = j.at("verdicts").get<std::map<std::string, bool>>();
    } else {
      throw IoError("unknown record line type '" + type + "'");
    }
  }
  if (!saw_header) throw IoError("record has no header line");
  return r;
}

std::string to_csv(const RunRecord& r) {
  std::ostringstream os;
  os.precision(17);
  os << "t,gap,bound\n";
  for (const auto& row : r.rows) {
    os << row.t << ',';
    if (row.gap) os << *row.gap;
    os << ',';
    if (row.B_E)
      os << *row.B_E;
    else if (row.B_det)
      os << *row.B_det + row.B_var.value_or(0.0);
    os << '\n';
  }
  return os.str();
}

void write_record(const RunRecord& r, const std::filesystem::path& jsonl_path) {
  std::error_code ec;
  if (jsonl_path.has_parent_path()) std::filesystem::create_directories(jsonl_path.parent_path(), ec);
  std::ofstream out(jsonl_path);
  if (!out) throw IoError("cannot write " + jsonl_path.string());
  out << to_jsonl(r);
  std::filesystem::path csv = jsonl_path;
  csv.replace_extension(".csv");
  std::ofstream c(csv);
  if (!c) throw IoError("cannot write " + csv.string());
  c << to_csv(r);
}

RunRecord read_record(const std::filesystem::path& jsonl_path) {
  std::ifstream in(jsonl_path);
  if (!in) throw IoError("cannot read " + jsonl_path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_jsonl(ss.str());
}

double success_fraction(const std::vector<RunRecord>& records) {
  if (records.empty()) return 0.0;
  long ok = 0;
  for (const auto& r : records) {
    auto it = r.verdicts.find("success");
    if (it != r.verdicts.end() && it->second) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(records.size());
}

// ---------------------------------------------------------------------------
// Rate fitting
// ---------------------------------------------------------------------------

RateFit fit_rate(const std::vector<std::pair<double, double>>& series) {
  if (series.size() < 10) throw InsufficientData("rate fit needs at least 10 points");
  const double n = static_cast<double>(series.size());
  double sx = 0, sy = 0;
  for (const auto& [t, v] : series) {
    if (!(t > 0) || !(v > 0)) throw InsufficientData("rate fit needs positive t and values");
    sx += std::log(t);
    sy += std::log(v);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [t, v] : series) {
    const double dx = std::log(t) - mx, dy = std::log(v) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0) throw InsufficientData("rate fit needs distinct t values");
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (const auto& [t, v] : series) {
    const double e = std::log(v) - (f.intercept + f.slope * std::log(t));
    ss_res += e * e;
  }
  f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

namespace {

NoiseModel noise_model(const NoiseSpec& n, std::uint64_t seed) {
  switch (n.kind) {
    case NoiseKind::Deterministic: {
      NoiseModel m = NoiseModel::deterministic();
      m.seed = seed;
      return m;
    }
    case NoiseKind::AdditiveSubGaussian:
      return NoiseModel::subgaussian(n.sigma.sigma_x_f, n.sigma.sigma_x_phi, n.sigma.sigma_y_phi, seed);
    case NoiseKind::FiniteSumMinibatch: return NoiseModel::minibatch(n.batch_size, seed);
  }
  return {};
}

std::vector<long> stride_checkpoints(long T, long stride) {
  if (stride <= 0) return geometric_checkpoints(T);
  std::vector<long> out;
  for (long t = stride; t < T; t += stride) out.push_back(t);
  out.push_back(T);
  return out;
}

RunRecord run_one(const ExperimentConfig& cfg, const ClosedFormInstance& p, std::uint64_t seed) {
  StochasticOracle o(p, noise_model(cfg.noise, seed));
  const GapFn gap = [&p](const Vector& x, const Vector& y) { return p.duality_gap(x, y); };
  const auto& k = p.constants();
  const GeometrySpec& gx = p.geom_x();
  const GeometrySpec& gy = p.geom_y();
  const std::optional<SaddlePoint>& sp = p.saddle_point();
  RunRecord rec;

  switch (cfg.algorithm) {
    case Algorithm::Spdhg: {
      const double rho = cfg.rho.value_or(default_rho(gy.bregman_diameter));
      const double rho_p = cfg.rho_prime.value_or(default_rho_prime(gx.bregman_diameter));
      const ScheduleParams sched = default_schedule(k, o.levels(), rho, rho_p);
      RunOptions ro;
      ro.gap = gap;
      const long T = cfg.T.value_or(1000);
      ro.checkpoints = stride_checkpoints(T, cfg.gap_stride);
      ro.trajectory_diameters = cfg.trajectory_diameters;
      rec = run_spdhg(p, o, sched, T, ro).record;
      bool all = true;
      for (const auto& row : rec.rows)
        if (row.gap && row.B_E && *row.gap > *row.B_E) all = false;
      const auto& last = rec.rows.back();
      rec.verdicts["bound_dominated"] = all;
      rec.verdicts["success"] = last.gap && last.B_E && *last.gap <= *last.B_E;
      break;
    }
    case Algorithm::SpdhgRescaled: {
      const Vector x0 = gx.set.center_point();
      const double R = cfg.R ? *cfg.R : (sp ? 2.0 * (x0 - sp->x).norm() : 2.0 * norm_diameter(gx));
      const double op = normalized_diameter(gx);
      const bool stoch = o.levels().sigma_x_f > 0 || o.levels().sigma_x_phi > 0 || o.levels().sigma_y_phi > 0;
      const long T = cfg.T ? *cfg.T
                           : (stoch ? rescaled_horizon_stoc(k, o.levels(), op, gy.bregman_diameter, R, cfg.varsigma)
                                    : rescaled_horizon_det(k, op, gy.bregman_diameter, R));
      const ScheduleParams sched =
          stoch ? rescaled_schedule_stoc(k, o.levels(), op, gy.bregman_diameter, R, T, cfg.varsigma, cfg.eta)
                : rescaled_schedule_det(k, op, gy.bregman_diameter, R, T, cfg.eta);
      RunOptions ro;
      ro.gap = gap;
      ro.checkpoints = stride_checkpoints(T, cfg.gap_stride);
      RunResult run = run_spdhg_rescaled(p, o, x0, R, gx.set, T, sched, ro);
      rec = run.record;
      const double g = *rec.rows.back().gap;
      rec.verdicts["success"] = g <= k.mu * R * R / 16.0;
      if (sp) rec.verdicts["distance_within_R"] = (run.x_bar - sp->x).norm() <= R / (2.0 * std::sqrt(2.0));
      rec.config["derived.R"] = fmt_double(R);
      rec.config["derived.T"] = std::to_string(T);
      break;
    }
    case Algorithm::RestartDet:
    case Algorithm::RestartStoc: {
      const Vector x0 = gx.set.center_point();
      const double U = cfg.U.value_or(norm_diameter(gx));
      RestartOptions ro;
      ro.gap = gap;
      const bool det = cfg.algorithm == Algorithm::RestartDet;
      RestartResult res =
          det ? restart_deterministic(p, x0, U, cfg.epsilon, ro) : restart_stochastic(p, o, x0, U, cfg.epsilon, cfg.nu, ro);
      rec = res.record;
      const double g = p.duality_gap(res.x, res.y);
      const double bound =
          det ? restart_complexity_det(k, res.plan.omega_prime, res.plan.omega_y, U, cfg.epsilon)
              : restart_complexity_stoc(k, o.levels(), res.plan.omega_prime, res.plan.omega_y, U, cfg.epsilon, cfg.nu);
      rec.verdicts["success"] = g <= cfg.epsilon;
      rec.verdicts["within_complexity_bound"] = static_cast<double>(res.plan.total_iterations()) <= bound;
      rec.config["derived.U"] = fmt_double(U);
      rec.config["derived.K"] = std::to_string(res.plan.K);
      rec.config["derived.final_gap"] = fmt_double(g);
      break;
    }
  }
  return rec;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto inst = make_instance(cfg.instance);
  ExperimentResult out;
  json summary = {{"algorithm", to_string(cfg.algorithm)}, {"config", cfg.echo()}};
  json runs = json::array();
  for (std::uint64_t seed : cfg.seeds) {
    RunRecord rec = run_one(cfg, *inst, seed);
    rec.seed = seed;
    for (const auto& [k, v] : cfg.echo()) rec.config.emplace(k, v);
    rec.config["run.seed"] = std::to_string(seed);
    if (!cfg.output_dir.empty()) {
      const auto file = cfg.output_dir / ("seed-" + std::to_string(seed) + ".jsonl");
      write_record(rec, file);
      runs.push_back({{"seed", seed},
                      {"file", file.filename().string()},
                      {"success", rec.verdicts["success"]},
                      {"final_gap", rec.rows.empty() ? json(nullptr) : opt(rec.rows.back().gap)}});
    }
    out.records.push_back(std::move(rec));
  }
  out.success_fraction = success_fraction(out.records);
  if (!cfg.output_dir.empty()) {
    summary["runs"] = runs;
    summary["success_fraction"] = out.success_fraction;
    std::ofstream s(cfg.output_dir / "summary.json");
    if (!s) throw IoError("cannot write summary in " + cfg.output_dir.string());
    s << summary.dump(2) << "\n";
  }
  return out;
}

}  // namespace saddlekit
