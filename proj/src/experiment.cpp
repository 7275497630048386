#include "zoadmm/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

namespace zoadmm {

namespace pt = boost::property_tree;
using nlohmann::json;

ConfigError::ConfigError(std::string field, std::string message, std::size_t line)
    : std::runtime_error((line ? "line " + std::to_string(line) + ": " : std::string()) +
                         field + ": " + message),
      field_(std::move(field)),
      line_(line) {}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Maps "section.key" to its line so that semantic errors can point at it.
std::map<std::string, std::size_t> index_lines(const std::string& text) {
  std::map<std::string, std::size_t> lines;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  for (std::size_t n = 1; std::getline(in, raw); ++n) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == ';' || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq != std::string::npos) lines[section + "." + trim(line.substr(0, eq))] = n;
  }
  return lines;
}

class FieldReader {
 public:
  FieldReader(const std::map<std::string, std::size_t>& lines) : lines_(lines) {}

  [[noreturn]] void fail(const std::string& field, const std::string& message) const {
    const auto it = lines_.find(field);
    throw ConfigError(field, message, it == lines_.end() ? 0 : it->second);
  }

  double real(const std::string& field, const std::string& text) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
      fail(field, "expected a finite number, got '" + text + "'");
    }
    return v;
  }

  std::uint64_t integer(const std::string& field, const std::string& text,
                        std::uint64_t min = 0) const {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      fail(field, "expected a nonnegative integer, got '" + text + "'");
    }
    if (v < min) fail(field, "must be >= " + std::to_string(min));
    return v;
  }

  bool boolean(const std::string& field, const std::string& text) const {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail(field, "expected true or false, got '" + text + "'");
  }

 private:
  const std::map<std::string, std::size_t>& lines_;
};

const std::vector<std::string> kSolverKeys = {
    "algorithms", "hyper",     "L",          "alpha",   "epsilon",       "C",
    "eta",        "rho",       "q",          "b",       "b1",            "b2",
    "K",          "mu",        "nu",         "smoothing", "x_update",    "g_matrix",
    "r_x",        "r_y",       "lipschitz_L", "sampling", "max_queries", "stationarity_tol"};

// Keys a derived recipe already determines.
const std::vector<std::string> kRecipeKeys = {"eta", "rho", "q",  "b",   "b1",
                                              "b2",  "mu",  "nu", "r_x", "lipschitz_L"};

bool contains(const std::vector<std::string>& keys, const std::string& k) {
  return std::find(keys.begin(), keys.end(), k) != keys.end();
}

// Applies one [solver] entry to `cfg`.
void apply_solver_key(SolverConfig& cfg, const std::string& key, const std::string& value,
                      const FieldReader& r) {
  const std::string field = "solver." + key;
  if (key == "eta") cfg.eta = r.real(field, value);
  else if (key == "rho") cfg.rho = r.real(field, value);
  else if (key == "q") cfg.q = r.integer(field, value, 1);
  else if (key == "b") cfg.b = r.integer(field, value, 1);
  else if (key == "b1") cfg.b1 = r.integer(field, value, 1);
  else if (key == "b2") cfg.b2 = r.integer(field, value, 1);
  else if (key == "K") cfg.K = r.integer(field, value, 1);
  else if (key == "mu") cfg.smoothing.mu = r.real(field, value);
  else if (key == "nu") cfg.smoothing.nu = r.real(field, value);
  else if (key == "smoothing") {
    if (value == "fixed") cfg.smoothing.schedule = SmoothingParams::Schedule::Fixed;
    else if (value == "decaying") cfg.smoothing.schedule = SmoothingParams::Schedule::Decaying;
    else r.fail(field, "expected fixed or decaying");
  } else if (key == "x_update") {
    if (value == "linearized") cfg.x_update = XUpdate::Linearized;
    else if (value == "exact") cfg.x_update = XUpdate::Exact;
    else r.fail(field, "expected linearized or exact");
  } else if (key == "g_matrix") {
    if (value == "linearizing") cfg.g_matrix = GMatrix::Linearizing;
    else if (value == "scaled_identity") cfg.g_matrix = GMatrix::ScaledIdentity;
    else r.fail(field, "expected linearizing or scaled_identity");
  } else if (key == "sampling") {
    if (value == "with_replacement") cfg.sampling = BatchSampling::WithReplacement;
    else if (value == "without_replacement") cfg.sampling = BatchSampling::WithoutReplacement;
    else r.fail(field, "expected with_replacement or without_replacement");
  } else if (key == "r_x") cfg.r_x = r.real(field, value);
  else if (key == "r_y") {
    cfg.r_y.clear();
    for (const std::string& item : split_list(value)) cfg.r_y.push_back(r.real(field, item));
  } else if (key == "lipschitz_L") cfg.lipschitz_L = r.real(field, value);
  else if (key == "max_queries") cfg.max_queries = r.integer(field, value, 1);
  else if (key == "stationarity_tol") cfg.stationarity_tol = r.real(field, value);
}

json record_json(const TraceRecord& rec) {
  return {{"k", rec.k},
          {"obj", rec.obj},
          {"aug_lag", rec.aug_lag},
          {"residual", rec.residual},
          {"stationarity", rec.stationarity},
          {"theta", rec.theta},
          {"lyapunov", rec.lyapunov},
          {"queries_cum", rec.queries_cum}};
}

json config_json(const SolverConfig& c) {
  json j = {
      {"algorithm", std::string(to_string(c.algorithm))},
      {"eta", c.eta},
      {"rho", c.rho},
      {"q", c.q},
      {"b", c.b},
      {"b1", c.b1},
      {"b2", c.b2},
      {"K", c.K},
      {"mu", c.smoothing.mu},
      {"nu", c.smoothing.nu},
      {"smoothing",
       c.smoothing.schedule == SmoothingParams::Schedule::Fixed ? "fixed" : "decaying"},
      {"seed", c.seed},
      {"x_update", c.x_update == XUpdate::Exact ? "exact" : "linearized"},
      {"g_matrix", c.g_matrix == GMatrix::Linearizing ? "linearizing" : "scaled_identity"},
      {"r_x", c.r_x ? json(*c.r_x) : json(nullptr)},
      {"r_y", c.r_y},
      {"lipschitz_L", c.lipschitz_L},
      {"sampling", c.sampling == BatchSampling::WithReplacement ? "with_replacement"
                                                                 : "without_replacement"},
      {"max_queries", c.max_queries ? json(*c.max_queries) : json(nullptr)},
      {"stationarity_tol", c.stationarity_tol ? json(*c.stationarity_tol) : json(nullptr)},
  };
  return j;
}

json recipe_json(const HyperparamRecipe& r) {
  return {{"algorithm", std::string(to_string(r.algorithm))},
          {"L", r.L},
          {"alpha", r.alpha},
          {"epsilon", r.epsilon},
          {"C", r.C},
          {"eta", r.eta},
          {"rho", r.rho},
          {"r_x", r.r_x},
          {"kappa_G", r.kappa_G},
          {"q", r.q},
          {"b", r.b},
          {"b1", r.b1},
          {"b2", r.b2},
          {"K", r.K},
          {"mu", r.mu},
          {"nu", r.nu},
          {"fixed_point_rounds", r.fixed_point_rounds},
          {"batch_capped", r.batch_capped}};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t param_int(const ProblemParams& p, const FieldReader& r, const std::string& key,
                        std::uint64_t fallback, std::uint64_t min = 0) {
  const auto it = p.values.find(key);
  return it == p.values.end() ? fallback : r.integer("problem." + key, it->second, min);
}

double param_real(const ProblemParams& p, const FieldReader& r, const std::string& key,
                  double fallback) {
  const auto it = p.values.find(key);
  return it == p.values.end() ? fallback : r.real("problem." + key, it->second);
}

}  // namespace

ExperimentConfig parse_experiment(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  ExperimentConfig cfg;
  cfg.lines = index_lines(text);
  const FieldReader r(cfg.lines);

  pt::ptree tree;
  try {
    std::istringstream stream(text);
    pt::read_ini(stream, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("syntax", e.message(), e.line());
  }

  for (const auto& [section, body] : tree) {
    if (section != "problem" && section != "solver" && section != "run") {
      r.fail(section, "unknown section or key outside a section");
    }
  }

  const auto section = [&](const std::string& name) -> const pt::ptree& {
    const auto it = tree.find(name);
    if (it == tree.not_found()) throw ConfigError(name, "missing section [" + name + "]");
    return it->second;
  };

  for (const auto& [key, node] : section("problem")) {
    const std::string value = trim(node.data());
    if (key == "name") cfg.problem.name = value;
    else cfg.problem.values[key] = value;
  }
  if (cfg.problem.name.empty()) throw ConfigError("problem.name", "missing catalog name");

  for (const auto& [key, node] : section("solver")) {
    if (!contains(kSolverKeys, key)) r.fail("solver." + key, "unknown key");
    cfg.solver[key] = trim(node.data());
  }
  const auto algos = cfg.solver.find("algorithms");
  if (algos == cfg.solver.end()) throw ConfigError("solver.algorithms", "missing key");
  for (const std::string& name : split_list(algos->second)) {
    const auto alg = parse_algorithm(name);
    if (!alg) r.fail("solver.algorithms", "unknown algorithm '" + name + "'");
    cfg.algorithms.push_back(*alg);
  }
  if (cfg.algorithms.empty()) r.fail("solver.algorithms", "list at least one algorithm");

  const std::string hyper = cfg.solver.count("hyper") ? cfg.solver["hyper"] : "explicit";
  if (hyper == "derive") {
    cfg.mode = HyperMode::Derive;
    if (!cfg.solver.count("L")) throw ConfigError("solver.L", "hyper = derive needs L");
    if (!cfg.solver.count("epsilon")) {
      throw ConfigError("solver.epsilon", "hyper = derive needs epsilon");
    }
    if (cfg.solver["L"] != "catalog") cfg.derive.L = r.real("solver.L", cfg.solver["L"]);
    cfg.derive.epsilon = r.real("solver.epsilon", cfg.solver["epsilon"]);
    if (cfg.solver.count("alpha")) cfg.derive.alpha = r.real("solver.alpha", cfg.solver["alpha"]);
    if (cfg.solver.count("C")) cfg.derive.C = r.real("solver.C", cfg.solver["C"]);
    for (const auto& key : kRecipeKeys) {
      if (cfg.solver.count(key)) r.fail("solver." + key, "conflicts with hyper = derive");
    }
  } else if (hyper == "explicit") {
    for (const char* key : {"eta", "rho"}) {
      if (!cfg.solver.count(key)) {
        throw ConfigError(std::string("solver.") + key, "hyper = explicit needs this key");
      }
    }
    for (const char* key : {"L", "alpha", "epsilon", "C"}) {
      if (cfg.solver.count(key)) r.fail(std::string("solver.") + key, "only used with hyper = derive");
    }
    for (Algorithm a : cfg.algorithms) {
      if (!is_online(a)) continue;
      for (const char* key : {"b1", "b2"}) {
        if (!cfg.solver.count(key)) {
          throw ConfigError(std::string("solver.") + key,
                            std::string(to_string(a)) + " needs b1 and b2");
        }
      }
    }
  } else {
    r.fail("solver.hyper", "expected explicit or derive");
  }

  SolverConfig probe;
  for (const auto& [key, value] : cfg.solver) apply_solver_key(probe, key, value, r);

  const pt::ptree& run = section("run");
  for (const auto& [key, node] : run) {
    const std::string value = trim(node.data());
    if (key == "seeds") {
      for (const std::string& item : split_list(value)) {
        cfg.seeds.push_back(r.integer("run.seeds", item));
      }
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "trace_every") {
      cfg.trace_every = r.integer("run.trace_every", value, 1);
    } else {
      r.fail("run." + key, "unknown key");
    }
  }
  if (const char* env = std::getenv("ZOADMM_SEED"); env && *env) {
    cfg.seeds = {r.integer("ZOADMM_SEED", env)};
  }
  if (cfg.seeds.empty()) throw ConfigError("run.seeds", "list at least one seed");
  return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("file", "cannot open " + path.string());
  return parse_experiment(in);
}

CatalogProblem build_catalog_problem(const ProblemParams& p) {
  const std::map<std::string, std::size_t> no_lines;
  const FieldReader r(no_lines);
  const auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : p.values) {
      bool known = false;
      for (const char* k : keys) known = known || key == k;
      if (!known) r.fail("problem." + key, "not a parameter of " + p.name);
    }
  };
  const std::uint64_t seed = param_int(p, r, "seed", 0);

  if (p.name == "quadratic_sanity") {
    allow({"d", "n", "seed", "tau", "L_cap"});
    return build_quadratic_sanity(static_cast<Index>(param_int(p, r, "d", 4, 1)),
                                  param_int(p, r, "n", 16, 1), seed,
                                  param_real(p, r, "tau", 0.1), param_real(p, r, "L_cap", 1.0));
  }
  if (p.name == "quadratic_sanity_online") {
    allow({"d", "seed", "tau", "L_cap", "spread"});
    return build_quadratic_sanity_online(static_cast<Index>(param_int(p, r, "d", 4, 1)), seed,
                                         param_real(p, r, "tau", 0.1),
                                         param_real(p, r, "L_cap", 1.0),
                                         param_real(p, r, "spread", 0.1));
  }
  if (p.name == "graph_guided_fused_lasso") {
    allow({"n", "d", "seed", "tau", "omega", "noise"});
    return build_graph_guided_fused_lasso(param_int(p, r, "n", 200, 2),
                                          static_cast<Index>(param_int(p, r, "d", 50, 2)), seed,
                                          param_real(p, r, "tau", 0.01),
                                          param_real(p, r, "omega", 0.1),
                                          param_real(p, r, "noise", 1.0));
  }
  if (p.name == "structured_perturbation_toy") {
    allow({"seed", "n", "grid", "kernel", "stride", "hidden", "beta", "eps", "tau1", "tau2",
           "tau3", "raw_hinge"});
    PerturbationToyOptions o;
    o.n = param_int(p, r, "n", o.n, 1);
    o.grid = static_cast<Index>(param_int(p, r, "grid", o.grid, 1));
    o.kernel = static_cast<Index>(param_int(p, r, "kernel", o.kernel, 1));
    o.stride = static_cast<Index>(param_int(p, r, "stride", o.stride, 1));
    o.hidden = static_cast<Index>(param_int(p, r, "hidden", o.hidden, 1));
    o.beta = param_real(p, r, "beta", o.beta);
    o.eps = param_real(p, r, "eps", o.eps);
    o.tau1 = param_real(p, r, "tau1", o.tau1);
    o.tau2 = param_real(p, r, "tau2", o.tau2);
    o.tau3 = param_real(p, r, "tau3", o.tau3);
    if (const auto it = p.values.find("raw_hinge"); it != p.values.end()) {
      o.raw_hinge = r.boolean("problem.raw_hinge", it->second);
    }
    return build_structured_perturbation_toy(seed, o);
  }
  throw ConfigError("problem.name", "unknown catalog problem '" + p.name + "'");
}

SolverConfig solver_config_for(const ExperimentConfig& config, Algorithm algorithm,
                               std::uint64_t seed, const CatalogProblem& problem,
                               HyperparamRecipe* recipe) {
  const FieldReader r(config.lines);
  SolverConfig cfg;
  cfg.lipschitz_L = problem.L;
  if (config.mode == HyperMode::Derive) {
    const double L = config.derive.L.value_or(problem.L);
    const HyperparamRecipe derived = derive_hyperparams(
        problem.spec, L, config.derive.alpha, config.derive.epsilon, algorithm, config.derive.C);
    cfg = apply_recipe(cfg, derived);
    if (recipe) *recipe = derived;
  } else if (!config.solver.count("mu") && !config.solver.count("nu")) {
    cfg.smoothing.schedule = SmoothingParams::Schedule::Decaying;
  } else {
    cfg.smoothing.schedule = SmoothingParams::Schedule::Fixed;
  }
  for (const auto& [key, value] : config.solver) apply_solver_key(cfg, key, value, r);
  cfg.algorithm = algorithm;
  cfg.seed = seed;
  return resolve_config(problem.spec, cfg);
}

void write_trace_csv(std::ostream& out, const Trace& trace, std::size_t trace_every) {
  out << kTraceHeader << '\n';
  const std::size_t count = trace.records.size();
  for (std::size_t i = 0; i < count; ++i) {
    const TraceRecord& rec = trace.records[i];
    if (!(rec.k % trace_every == 0 || i + 1 == count)) continue;
    out << rec.k << ',' << format_double(rec.obj) << ',' << format_double(rec.aug_lag) << ','
        << format_double(rec.residual) << ',' << format_double(rec.stationarity) << ','
        << format_double(rec.theta) << ',' << format_double(rec.lyapunov) << ','
        << rec.queries_cum << '\n';
  }
}

std::string trace_file_name(Algorithm algorithm, std::uint64_t seed) {
  return std::string(to_string(algorithm)) + "_" + std::to_string(seed) + ".csv";
}

namespace {

struct RunTask {
  Algorithm algorithm;
  std::uint64_t seed;
  SolverConfig config;
  json summary;
  bool failed = false;
};

struct Prepared {
  ExperimentConfig config;
  CatalogProblem problem;
  std::vector<RunTask> tasks;
  json recipes = json::array();
};

// Loads and resolves everything; returns an exit code on failure.
std::optional<int> prepare(const std::filesystem::path& path, std::ostream& log,
                           std::optional<Prepared>& out) {
  try {
    ExperimentConfig config = load_experiment(path);
    CatalogProblem problem = build_catalog_problem(config.problem);
    Prepared prep{std::move(config), std::move(problem), {}, json::array()};
    for (Algorithm a : prep.config.algorithms) {
      HyperparamRecipe recipe;
      for (std::uint64_t seed : prep.config.seeds) {
        SolverConfig sc = solver_config_for(prep.config, a, seed, prep.problem, &recipe);
        prep.tasks.push_back({a, seed, std::move(sc), json::object(), false});
      }
      if (prep.config.mode == HyperMode::Derive) prep.recipes.push_back(recipe_json(recipe));
    }
    out.emplace(std::move(prep));
    return std::nullopt;
  } catch (const ConfigError& e) {
    log << "config error: " << path.string() << ": " << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidArgument || e.code() == Errc::RankDeficientA ||
        e.code() == Errc::DimensionMismatch) {
      log << "config error: " << path.string() << ": " << e.what() << '\n';
      return kExitConfigError;
    }
    log << "solver error: " << e.what() << '\n';
    return kExitSolverError;
  }
}

}  // namespace

int run_experiment(const std::filesystem::path& config_path,
                   const std::optional<std::filesystem::path>& out_override, std::size_t jobs,
                   std::ostream& log) {
  std::optional<Prepared> prepared;
  if (auto code = prepare(config_path, log, prepared)) return *code;
  Prepared& prep = *prepared;
  const std::filesystem::path out_dir = out_override.value_or(prep.config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    log << "config error: cannot create output directory " << out_dir << ": " << ec.message()
        << '\n';
    return kExitConfigError;
  }

  const auto started = std::chrono::steady_clock::now();
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < prep.tasks.size(); i = next++) {
      RunTask& task = prep.tasks[i];
      json& s = task.summary;
      s["algorithm"] = std::string(to_string(task.algorithm));
      s["seed"] = task.seed;
      s["config"] = config_json(task.config);
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const Trace trace = run(prep.problem.spec, task.config, prep.problem.model);
        std::ofstream csv(out_dir / trace_file_name(task.algorithm, task.seed),
                          std::ios::binary);
        write_trace_csv(csv, trace, prep.config.trace_every);
        if (!csv) throw Error(Errc::InvalidArgument, "failed writing the trace CSV");
        s["iterations"] = trace.records.size();
        s["stop_reason"] = trace.stop_reason;
        s["final"] = trace.records.empty() ? json(nullptr) : record_json(trace.records.back());
        s["zeta"] = trace.records.empty() ? json(nullptr) : record_json(trace.records[trace.zeta]);
        s["k_star"] =
            trace.records.empty() ? json(nullptr) : record_json(trace.records[trace.k_star]);
        s["queries"] = {{"anchor", trace.ledger.count(Phase::Anchor)},
                        {"inner", trace.ledger.count(Phase::Inner)},
                        {"diagnostic", trace.ledger.count(Phase::Diagnostic)},
                        {"algorithmic", trace.ledger.algorithmic()},
                        {"total", trace.ledger.total()}};
      } catch (const std::exception& e) {
        task.failed = true;
        s["error"] = e.what();
        std::lock_guard lock(log_mutex);
        log << "solver error: " << to_string(task.algorithm) << " seed " << task.seed << ": "
            << e.what() << '\n';
      }
      s["wall_time_s"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, prep.tasks.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  json summary;
  summary["problem"] = {{"name", prep.config.problem.name},
                        {"parameters", prep.config.problem.values},
                        {"L", prep.problem.L},
                        {"d", prep.problem.spec.dim_x()},
                        {"rows", prep.problem.spec.rows()},
                        {"blocks", prep.problem.spec.num_blocks()}};
  summary["hyper"] = prep.config.mode == HyperMode::Derive ? "derive" : "explicit";
  if (prep.config.mode == HyperMode::Derive) summary["recipes"] = prep.recipes;
  summary["trace_every"] = prep.config.trace_every;
  summary["runs"] = json::array();
  bool failed = false;
  for (const RunTask& task : prep.tasks) {
    summary["runs"].push_back(task.summary);
    failed = failed || task.failed;
  }
  summary["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::ofstream(out_dir / "summary.json") << summary.dump(2) << '\n';
  return failed ? kExitSolverError : kExitOk;
}

int validate_experiment(const std::filesystem::path& config_path, std::ostream& out) {
  std::optional<Prepared> prepared;
  if (auto code = prepare(config_path, out, prepared)) return *code;
  return kExitOk;
}

int derive_experiment(const std::filesystem::path& config_path, std::ostream& out) {
  std::optional<Prepared> prepared;
  if (auto code = prepare(config_path, out, prepared)) return *code;
  if (prepared->config.mode != HyperMode::Derive) {
    out << "config error: " << config_path.string() << ": solver.hyper: derive needs hyper = derive\n";
    return kExitConfigError;
  }
  out << prepared->recipes.dump(2) << '\n';
  return kExitOk;
}

}  // namespace zoadmm
