#include "stolqr/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "stolqr/errors.hpp"

namespace stolqr {

namespace {

using nlohmann::json;

// Every diagnostic names the file and the dotted path of the field.
class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    throw InvalidConfig(origin_ + ": " + path + ": " + msg);
  }

  void only(const json& obj, const std::string& path, std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.count(k)) fail(join(path, k), "unknown key");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  long long integer(const json& v, const std::string& path, long long lo) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    const long long x = v.get<long long>();
    if (x < lo) fail(path, "must be at least " + std::to_string(lo));
    return x;
  }

  std::uint64_t seed(const json& v, const std::string& path) const {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
    fail(path, "expected a non-negative integer");
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  Matrix matrix(const json& v, const std::string& path) const {
    if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of rows");
    const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
    if (cols == 0) fail(path, "expected a non-empty array of rows");
    Matrix m(v.size(), cols);
    for (std::size_t r = 0; r < v.size(); ++r) {
      const std::string rp = path + "[" + std::to_string(r) + "]";
      if (!v[r].is_array() || v[r].size() != cols) fail(rp, "rows must all have " + std::to_string(cols) + " entries");
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = number(v[r][c], rp + "[" + std::to_string(c) + "]");
    }
    return m;
  }

  Vector vector(const json& v, const std::string& path) const {
    if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array");
    Vector x(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) x(i) = number(v[i], path + "[" + std::to_string(i) + "]");
    return x;
  }

 private:
  std::string origin_;
};

void parse_system(const Reader& rd, const json& j, StochasticSystem& s) {
  rd.only(j, "system", {"A", "B", "channels", "sigma", "Sigma", "Q", "R", "alpha", "x0_mean", "x0_cov"});
  for (const char* req : {"A", "B", "alpha"}) {
    if (!j.contains(req)) rd.fail(std::string("system.") + req, "missing required field");
  }
  s.A = rd.matrix(j["A"], "system.A");
  s.B = rd.matrix(j["B"], "system.B");
  const Eigen::Index n = s.A.rows(), m = s.B.cols();
  s.alpha = rd.number(j["alpha"], "system.alpha");
  s.sigma = j.contains("sigma") ? rd.number(j["sigma"], "system.sigma") : 1.0;
  s.Sigma = j.contains("Sigma") ? rd.matrix(j["Sigma"], "system.Sigma") : Matrix(Matrix::Identity(n, n));
  s.Q = j.contains("Q") ? rd.matrix(j["Q"], "system.Q") : Matrix(Matrix::Identity(n, n));
  s.R = j.contains("R") ? rd.matrix(j["R"], "system.R") : Matrix(Matrix::Identity(m, m));
  s.x0_mean = j.contains("x0_mean") ? rd.vector(j["x0_mean"], "system.x0_mean") : Vector(Vector::Zero(n));
  s.x0_cov = j.contains("x0_cov") ? rd.matrix(j["x0_cov"], "system.x0_cov") : Matrix(Matrix::Identity(n, n));
  s.channels.clear();
  if (j.contains("channels")) {
    const json& ch = j["channels"];
    if (!ch.is_array()) rd.fail("system.channels", "expected an array of {A, B} objects");
    for (std::size_t l = 0; l < ch.size(); ++l) {
      const std::string p = "system.channels[" + std::to_string(l) + "]";
      rd.only(ch[l], p, {"A", "B"});
      if (!ch[l].contains("A") || !ch[l].contains("B")) rd.fail(p, "both A and B are required");
      s.channels.push_back({rd.matrix(ch[l]["A"], p + ".A"), rd.matrix(ch[l]["B"], p + ".B")});
    }
  }
  try {
    s.validate();
  } catch (const ConfigError& e) {
    rd.fail("system", e.what());
  }
}

void parse_data(const Reader& rd, const json& j, DataConfig& d, int m) {
  rd.only(j, "data", {"N", "K", "Sigma_d", "seed", "exploration", "frequencies", "noise"});
  if (j.contains("N")) d.N = static_cast<int>(rd.integer(j["N"], "data.N", 1));
  if (j.contains("K")) d.K = static_cast<int>(rd.integer(j["K"], "data.K", 1));
  if (j.contains("seed")) d.seed = rd.seed(j["seed"], "data.seed");
  d.Sigma_d = j.contains("Sigma_d") ? rd.matrix(j["Sigma_d"], "data.Sigma_d") : Matrix(Matrix::Identity(m, m));
  if (d.Sigma_d.rows() != m || d.Sigma_d.cols() != m) rd.fail("data.Sigma_d", "must be m x m");
  if (min_eig(SymMatrix(d.Sigma_d)) <= 0.0) rd.fail("data.Sigma_d", "must be positive definite");
  if (j.contains("exploration")) {
    const std::string k = rd.string(j["exploration"], "data.exploration");
    if (k == "gaussian") {
      d.exploration = ExcitationKind::Gaussian;
    } else if (k == "sinusoid") {
      d.exploration = ExcitationKind::Sinusoid;
    } else {
      rd.fail("data.exploration", "expected \"gaussian\" or \"sinusoid\", got \"" + k + "\"");
    }
  }
  if (j.contains("frequencies")) {
    const Vector f = rd.vector(j["frequencies"], "data.frequencies");
    d.frequencies.assign(f.data(), f.data() + f.size());
  }
  if (j.contains("noise")) {
    const std::string k = rd.string(j["noise"], "data.noise");
    if (k == "gaussian") {
      d.noise = NoiseKind::Gaussian;
    } else if (k == "uniform") {
      d.noise = NoiseKind::Uniform;
    } else if (k == "none") {
      d.noise = NoiseKind::None;
    } else {
      rd.fail("data.noise", "expected \"gaussian\", \"uniform\" or \"none\", got \"" + k + "\"");
    }
  }
}

void parse_solver(const Reader& rd, const json& j, SdpOptions& o) {
  rd.only(j, "solver", {"tol_feas", "tol_gap", "max_iter"});
  if (j.contains("tol_feas")) o.tol_feas = rd.number(j["tol_feas"], "solver.tol_feas");
  if (j.contains("tol_gap")) o.tol_gap = rd.number(j["tol_gap"], "solver.tol_gap");
  if (j.contains("max_iter")) o.max_iter = static_cast<int>(rd.integer(j["max_iter"], "solver.max_iter", 1));
  if (!(o.tol_feas > 0.0)) rd.fail("solver.tol_feas", "must be positive");
  if (!(o.tol_gap > 0.0)) rd.fail("solver.tol_gap", "must be positive");
}

void parse_experiment(const Reader& rd, const json& j, ExperimentConfig& e, int n, int m) {
  rd.only(j, "experiment", {"N_values", "grid", "reps", "output_dir", "closed_loop_steps", "force_gain"});
  if (j.contains("N_values")) {
    const json& v = j["N_values"];
    if (!v.is_array()) rd.fail("experiment.N_values", "expected an array of integers");
    e.N_values.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      e.N_values.push_back(static_cast<int>(rd.integer(v[i], "experiment.N_values[" + std::to_string(i) + "]", 1)));
    }
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_array()) rd.fail("experiment.grid", "expected an array of [N, K] pairs");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::string p = "experiment.grid[" + std::to_string(i) + "]";
      if (!g[i].is_array() || g[i].size() != 2) rd.fail(p, "expected [N, K]");
      e.grid.emplace_back(static_cast<int>(rd.integer(g[i][0], p + "[0]", 1)),
                          static_cast<int>(rd.integer(g[i][1], p + "[1]", 1)));
    }
  }
  if (j.contains("reps")) e.reps = static_cast<int>(rd.integer(j["reps"], "experiment.reps", 0));
  if (j.contains("output_dir")) e.output_dir = rd.string(j["output_dir"], "experiment.output_dir");
  if (j.contains("closed_loop_steps")) {
    e.closed_loop_steps = static_cast<int>(rd.integer(j["closed_loop_steps"], "experiment.closed_loop_steps", 0));
  }
  if (j.contains("force_gain")) {
    Matrix l = rd.matrix(j["force_gain"], "experiment.force_gain");
    if (l.rows() != m || l.cols() != n) rd.fail("experiment.force_gain", "must be m x n");
    e.force_gain = std::move(l);
  }
}

}  // namespace

ExplorationConfig RunConfig::exploration() const {
  ExplorationConfig c;
  c.Sigma_d = data.Sigma_d;
  c.kind = data.exploration;
  c.frequencies = data.frequencies;
  c.noise = data.noise;
  c.seed = data.seed;
  return c;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  const Reader rd(origin);
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line:column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InvalidConfig(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                        ": malformed JSON: " + e.what());
  }
  rd.only(root, "", {"system", "data", "solver", "experiment"});
  if (!root.contains("system")) rd.fail("system", "missing required block");

  RunConfig cfg;
  parse_system(rd, root["system"], cfg.system);
  const int n = cfg.system.n(), m = cfg.system.m();
  parse_data(rd, root.contains("data") ? root["data"] : json::object(), cfg.data, m);
  if (root.contains("solver")) parse_solver(rd, root["solver"], cfg.solver);
  if (root.contains("experiment")) parse_experiment(rd, root["experiment"], cfg.experiment, n, m);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidConfig(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace stolqr
