// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "support.hpp"
#include "zoadmm/experiment.hpp"
#include "zoadmm/problems.hpp"
#include "zoadmm/solver.hpp"

using namespace zoadmm;
using namespace zoadmm::test;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// --- estimator bounds -------------------------------------------------------

Outcome estimator_bounds() {
  PerturbationToyOptions toy;
  const std::vector<CatalogProblem> catalog = {
      build_quadratic_sanity(10, 20, 1), build_graph_guided_fused_lasso(200, 50, 7),
      build_structured_perturbation_toy(3, toy)};
  Rng rng(101);
  std::size_t checks = 0;
  std::size_t violations = 0;
  double worst = 0.0;
  for (const CatalogProblem& p : catalog) {
    Oracle oracle(p.spec.oracle());
    const Index d = p.spec.dim_x();
    for (double mu : {1e-1, 1e-2, 1e-3}) {
      const double bound = p.L * p.L * static_cast<double>(d) * mu * mu;
      for (int t = 0; t < 100; ++t) {
        const Vector x = random_vector(rng, d, 0.5);
        const double err = (coo_grad_full(oracle, x, mu) - p.model->mean_gradient(x)).squaredNorm();
        worst = std::max(worst, err / bound);
        violations += err > bound;
        ++checks;
      }
    }
  }
  return {violations == 0,
          fmt("%zu checks on 3 problems, %zu violations, worst error/bound %.3g", checks,
              violations, worst)};
}

Outcome unige_smoothing() {
  Rng rng(202);
  std::size_t checks = 0;
  std::size_t failures = 0;
  double worst_z = 0.0;
  for (Index d : {2, 4, 8}) {
    Oracle oracle(cos_sum_box(d));
    for (double nu : {0.5, 0.1}) {
      const Vector x = random_vector(rng, d, 1.5);
      const double f = x.array().cos().sum();
      const Vector grad = -x.array().sin().matrix();
      const double c = ball_cos_factor(nu, d);
      MeanAccumulator fnu(1);
      MeanAccumulator gnu(d);
      for (int t = 0; t < 100000; ++t) {
        fnu.add(Vector::Constant(1, (x + nu * sample_unit_ball(rng, d)).array().cos().sum()));
        gnu.add(uni_grad_single(oracle, 0, x, nu, sample_unit_sphere(rng, d)));
      }
      // |f_nu - f| <= nu^2 L / 2 with L = 1, via quadrature and Monte Carlo.
      failures += std::abs(c * f - f) > nu * nu / 2.0;
      failures += std::abs(fnu.mean()[0] - f) > nu * nu / 2.0 + 3.0 * fnu.std_error()[0];
      checks += 2;
      const Vector se = gnu.std_error();
      for (Index j = 0; j < d; ++j) {
        const double z = std::abs(gnu.mean()[j] - c * grad[j]) / se[j];
        worst_z = std::max(worst_z, z);
        failures += z > 3.0;
        ++checks;
      }
    }
  }
  return {failures == 0, fmt("%zu checks, %zu failures, largest |z| %.2f", checks, failures,
                             worst_z)};
}

// --- query accounting -------------------------------------------------------

Outcome query_accounting() {
  std::vector<std::string> bad;
  {
    const CatalogProblem p = build_quadratic_sanity(4, 16, 1);
    SolverConfig c;
    c.algorithm = Algorithm::ZoSpiderAdmmCoo;
    c.eta = 0.1;
    c.rho = 1.0;
    c.q = 4;
    c.b = 4;
    c.K = 8;
    const Trace t = run(p.spec, c, p.model);
    if (t.ledger.algorithmic() != 640) bad.push_back(fmt("alg1 total %llu", (unsigned long long)t.ledger.algorithmic()));
  }
  auto step_costs = [&](Algorithm a, const CatalogProblem& p, std::size_t b, std::size_t b1,
                        std::size_t b2) {
    SolverConfig c;
    c.algorithm = a;
    c.eta = 0.1;
    c.rho = 1.0;
    c.q = 3;
    c.b = b;
    c.b1 = b1;
    c.b2 = b2;
    c.K = 6;
    AdmmSolver solver(p.spec, c, p.model);
    std::vector<std::uint64_t> deltas;
    for (int k = 0; k < 6; ++k) {
      const auto before = solver.oracle().ledger_snapshot().algorithmic();
      solver.iterate();
      deltas.push_back(solver.oracle().ledger_snapshot().algorithmic() - before);
    }
    return deltas;
  };
  const CatalogProblem fs = build_quadratic_sanity(5, 12, 2);
  const CatalogProblem on = build_quadratic_sanity_online(5, 2);
  const std::uint64_t d = 5, n = 12, b = 4, b1 = 9, b2 = 3;
  struct Expect {
    Algorithm a;
    std::uint64_t anchor;
    std::uint64_t inner;
  };
  const std::vector<Expect> expect = {
      {Algorithm::ZoSpiderAdmmCoo, 2 * n * d, 4 * b * d},
      {Algorithm::ZoSpiderAdmmMixed, 2 * n * d, 4 * b},
      {Algorithm::ZooAdmmPlusCoo, 2 * d * b1, 4 * b2 * d},
      {Algorithm::ZooAdmmPlusMixed, 2 * d * b1, 4 * b2},
  };
  for (const Expect& e : expect) {
    const auto deltas = step_costs(e.a, is_online(e.a) ? on : fs, b, b1, b2);
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      const std::uint64_t want = k % 3 == 0 ? e.anchor : e.inner;
      if (deltas[k] != want) {
        bad.push_back(fmt("%s k=%zu: %llu != %llu", std::string(to_string(e.a)).c_str(), k,
                          (unsigned long long)deltas[k], (unsigned long long)want));
      }
    }
  }
  const auto sgd = step_costs(Algorithm::ZoSgdAdmm, fs, b, b1, b2);
  for (auto delta : sgd) {
    if (delta != 2 * b * d) bad.push_back("zo_sgd_admm step");
  }
  std::string detail = "spider coo total 640, anchor 2nd/2db1, inner 4bd/4b/4b2d/4b2 exact";
  if (!bad.empty()) detail = bad.front() + fmt(" (+%zu more)", bad.size() - 1);
  return {bad.empty(), detail};
}

// --- update identities ------------------------------------------------------

Outcome update_identities() {
  Rng rng(404);
  std::size_t instances = 0;
  std::size_t failures = 0;
  double worst_a = 0.0, worst_b = 0.0, worst_c = 0.0, worst_d = 0.0;
  for (Algorithm a : all_algorithms()) {
    for (int inst = 0; inst < 50; ++inst) {
      const ProblemSpec spec = random_spec(rng, is_online(a));
      std::uniform_real_distribution<double> eta(0.05, 1.0);
      std::uniform_real_distribution<double> rho(0.5, 5.0);
      SolverConfig c;
      c.algorithm = a;
      c.eta = eta(rng);
      c.rho = rho(rng);
      c.q = 3;
      c.b = 2;
      c.b1 = 4;
      c.b2 = 2;
      c.K = 6;
      c.seed = static_cast<std::uint64_t>(inst);
      c.smoothing = {0.01, 0.01, SmoothingParams::Schedule::Fixed};
      AdmmSolver solver(spec, c);
      solver.state().x = random_vector(rng, spec.dim_x());
      solver.state().lambda = random_vector(rng, spec.rows());
      ++instances;

      const Vector v = random_vector(rng, spec.dim_x());
      const Vector lin = solver.x_update_linearized(v);
      const Vector ex = solver.x_update_exact(v);
      const double ga = (lin - ex).norm() / std::max(1.0, ex.norm());
      worst_a = std::max(worst_a, ga);
      failures += ga > 1e-10;

      const Matrix G = solver.G();
      const std::vector<double> r_y = solver.config().r_y;
      solver.run([&](const IterationView& it) {
        const Vector lhs = spec.A().transpose() * it.lambda_next;
        const Vector rhs = it.v + G * (it.x_next - it.x_k) / c.eta;
        const double gb = (lhs - rhs).norm() / std::max(1.0, std::max(lhs.norm(), rhs.norm()));
        worst_b = std::max(worst_b, gb);
        failures += gb > 1e-8;

        Vector s = spec.constraint_residual(it.x_k, it.y_k);
        for (std::size_t j = 0; j < spec.num_blocks(); ++j) {
          const Matrix& B = spec.block(j).B;
          const Vector w = it.y_k[j] - B.transpose() * (c.rho * s - it.lambda_k) / r_y[j];
          const double gc = subgrad_dist(spec.effective_penalty(j), it.y_next[j],
                                         r_y[j] * (w - it.y_next[j]));
          worst_c = std::max(worst_c, gc);
          failures += gc > 1e-8;
          s += B * (it.y_next[j] - it.y_k[j]);
        }

        const double res = spec.constraint_residual(it.x_next, it.y_next).norm();
        const double from_dual = (it.lambda_k - it.lambda_next).norm() / c.rho;
        const double gd = std::abs(res - from_dual) / std::max(1.0, it.lambda_k.norm());
        worst_d = std::max(worst_d, gd);
        failures += gd > 1e-12;
      });
    }
  }
  return {failures == 0,
          fmt("%zu instances; worst gaps (a) %.1e (b) %.1e (c) %.1e (d) %.1e", instances, worst_a,
              worst_b, worst_c, worst_d)};
}

// --- prox oracle ------------------------------------------------------------

Outcome prox_oracle() {
  constexpr double step = 1e-4;
  Rng rng(505);
  std::size_t failures = 0;
  std::size_t grid_checks = 0;
  std::size_t pair_checks = 0;
  std::uniform_real_distribution<double> uw(-1.5, 1.5);
  std::uniform_real_distribution<double> us(0.1, 1.5);

  auto box1 = Penalty::box_linf(Vector::Constant(1, -0.3), Vector::Constant(1, 0.5), 0.4);
  const std::vector<Penalty> one_d = {Penalty::zero(1), Penalty::l1(1, 0.6),
                                      Penalty::group_l2(1, 0.8), Penalty::squared_l2(1, 0.7), box1};
  for (const Penalty& psi : one_d) {
    for (int t = 0; t < 20; ++t) {
      const double w = uw(rng);
      const double scale = us(rng);
      const double grid = grid_prox_1d(psi, w, scale, -2.0, 2.0, step);
      failures += std::abs(prox(psi, Vector::Constant(1, w), scale)[0] - grid) > step;
      ++grid_checks;
    }
  }
  Vector lo(2), hi(2);
  lo << -0.2, -1.0;
  hi << 0.6, 0.3;
  const std::vector<Penalty> two_d = {Penalty::zero(2), Penalty::l1(2, 0.5),
                                      Penalty::group_l2(2, 0.9), Penalty::squared_l2(2, 0.4),
                                      Penalty::box_linf(lo, hi, 0.5)};
  for (const Penalty& psi : two_d) {
    for (int t = 0; t < 4; ++t) {
      Vector w(2);
      w << uw(rng), uw(rng);
      const double scale = us(rng);
      const Vector closed = prox(psi, w, scale);
      const Vector coarse = grid_prox_2d(psi, w, scale, Vector::Zero(2), 2.0, 1e-2);
      const Vector fine = grid_prox_2d(psi, w, scale, coarse, 0.02, step);
      failures += (fine - closed).cwiseAbs().maxCoeff() > step;
      ++grid_checks;
    }
  }

  for (Index dim : {1, 3, 6}) {
    const std::vector<Penalty> kinds = {
        Penalty::zero(dim), Penalty::l1(dim, 0.7), Penalty::group_l2(dim, 1.1),
        Penalty::squared_l2(dim, 0.3),
        Penalty::box_linf(Vector::Constant(dim, -0.7), Vector::Constant(dim, 0.9), 0.5)};
    for (const Penalty& psi : kinds) {
      for (int t = 0; t < 1000; ++t) {
        const Vector a = random_vector(rng, dim, 1.5);
        const Vector b = random_vector(rng, dim, 1.5);
        const Vector pa = prox(psi, a, 0.8);
        const Vector pb = prox(psi, b, 0.8);
        failures += (pa - pb).squaredNorm() > (pa - pb).dot(a - b) + 1e-12;
        ++pair_checks;
      }
    }
  }
  return {failures == 0, fmt("%zu grid checks, %zu random pairs, %zu failures", grid_checks,
                             pair_checks, failures)};
}

// --- SPIDER telescoping -----------------------------------------------------

Outcome spider_telescoping() {
  const CatalogProblem p = build_quadratic_sanity(6, 10, 606);
  SolverConfig c;
  c.algorithm = Algorithm::ZoSpiderAdmmCoo;
  c.eta = 0.2;
  c.rho = 1.0;
  c.q = 25;
  c.b = 10;
  c.K = 100;
  c.sampling = BatchSampling::WithoutReplacement;
  c.smoothing = {0.01, 0.01, SmoothingParams::Schedule::Fixed};
  Oracle reference(p.spec.oracle());
  double worst = 0.0;
  std::size_t iterations = 0;
  run(p.spec, c, p.model, [&](const IterationView& it) {
    const Vector full = coo_grad_full(reference, it.x_k, 0.01, Phase::Diagnostic);
    worst = std::max(worst, (it.v - full).cwiseAbs().maxCoeff());
    ++iterations;
  });
  return {worst <= 1e-12, fmt("%zu iterations, max |v_k - full CooGE| %.2e", iterations, worst)};
}

// --- convergence trends -----------------------------------------------------

struct RunResult {
  std::vector<TraceRecord> records;
};

std::vector<RunResult> run_parallel(const CatalogProblem& p, const std::vector<SolverConfig>& configs) {
  std::vector<RunResult> out(configs.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    pool.emplace_back([&, i] { out[i].records = run(p.spec, configs[i], p.model).records; });
  }
  for (auto& t : pool) t.join();
  return out;
}

// Last record whose cumulative queries do not exceed `budget`.
const TraceRecord& at_queries(const std::vector<TraceRecord>& records, std::uint64_t budget) {
  const TraceRecord* best = &records.front();
  for (const TraceRecord& r : records) {
    if (r.queries_cum <= budget) best = &r;
  }
  return *best;
}

Outcome graph_trend() {
  const CatalogProblem p = build_graph_guided_fused_lasso(200, 50, 7);
  const std::vector<Algorithm> algos = {Algorithm::ZoSpiderAdmmCoo, Algorithm::ZoSgdAdmm};
  std::vector<SolverConfig> configs;
  for (Algorithm a : algos) {
    const HyperparamRecipe r = derive_hyperparams(p.spec, p.L, 1.0, 1e-4, a);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SolverConfig c;
      c.seed = seed;
      c = apply_recipe(c, r);
      c.max_queries = 500000;
      configs.push_back(c);
    }
  }
  const auto results = run_parallel(p, configs);

  std::uint64_t common = std::numeric_limits<std::uint64_t>::max();
  for (const auto& r : results) common = std::min(common, r.records.back().queries_cum);

  std::vector<double> obj[2], ratio[2];
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& rec = results[i].records;
    const TraceRecord& last = at_queries(rec, common);
    obj[i / 5].push_back(last.obj);
    ratio[i / 5].push_back(last.stationarity / rec.front().stationarity);
  }
  const double spider_obj = median(obj[0]);
  const double sgd_obj = median(obj[1]);
  const double spider_red = median(ratio[0]);
  const double sgd_red = median(ratio[1]);
  const bool pass = spider_obj <= sgd_obj && spider_red <= 0.1 && sgd_red <= 0.1;
  return {pass, fmt("at %llu queries: median obj spider %.5f vs sgd %.5f; stationarity ratio "
                    "spider %.3g, sgd %.3g (need <= 0.1)",
                    (unsigned long long)common, spider_obj, sgd_obj, spider_red, sgd_red)};
}

Outcome online_trend() {
  const CatalogProblem p = build_quadratic_sanity_online(4, 3);
  const HyperparamRecipe r =
      derive_hyperparams(p.spec, p.L, 1.0, 0.01, Algorithm::ZooAdmmPlusCoo);
  std::vector<SolverConfig> configs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SolverConfig c;
    c.seed = seed;
    c = apply_recipe(c, r);
    c.K = 100;
    configs.push_back(c);
  }
  const auto results = run_parallel(p, configs);
  std::vector<double> ratio;
  for (const auto& res : results) {
    ratio.push_back(res.records.back().stationarity / res.records.front().stationarity);
  }
  const double med = median(ratio);
  const bool settings = r.b2 == 10 && r.q == 10 && r.b1 == 100;
  return {settings && med <= 0.1,
          fmt("b1=%zu b2=%zu q=%zu, K=100: median stationarity ratio %.3g (need <= 0.1)", r.b1,
              r.b2, r.q, med)};
}

// --- determinism ------------------------------------------------------------

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "zoadmm_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg = root / "exp.ini";
  std::ofstream(cfg) << "[problem]\nname = graph_guided_fused_lasso\nn = 40\nd = 10\nseed = 3\n"
                        "[solver]\nalgorithms = zo_spider_admm_coo, zo_spider_admm_mixed, "
                        "zo_sgd_admm\nhyper = derive\nL = catalog\nepsilon = 0.01\nK = 60\n"
                        "[run]\nseeds = 1, 2\n";
  std::ostringstream log;
  const int a = run_experiment(cfg, root / "a", 1, log);
  const int b = run_experiment(cfg, root / "b", 3, log);
  std::size_t files = 0;
  std::size_t mismatches = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    if (e.path().extension() != ".csv") continue;
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream s;
      s << in.rdbuf();
      return s.str();
    };
    ++files;
    mismatches += slurp(e.path()) != slurp(root / "b" / e.path().filename());
  }
  fs::remove_all(root);
  return {a == 0 && b == 0 && files == 6 && mismatches == 0,
          fmt("%zu trace files compared across reruns, %zu differ", files, mismatches)};
}

struct Criterion {
  const char* name;
  double limit_s;
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"estimator-bounds", 10, estimator_bounds},
      {"unige-smoothing", 60, unige_smoothing},
      {"query-accounting", 5, query_accounting},
      {"update-identities", 30, update_identities},
      {"prox-oracle", 30, prox_oracle},
      {"spider-telescoping", 5, spider_telescoping},
      {"graph-convergence-trend", 300, graph_trend},
      {"online-trend", 120, online_trend},
      {"determinism", 120, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_s) {
      o.pass = false;
      o.detail += fmt("; exceeded %.0f s", c.limit_s);
    }
    failed += !o.pass;
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
