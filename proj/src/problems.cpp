#include "zoadmm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace zoadmm {

namespace {

Matrix random_orthogonal(Rng& rng, Index d) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) g(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ();
}

Vector uniform_vector(Rng& rng, Index d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = u(rng);
  return v;
}

double spectral_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

/// x - y = 0 with a single l1 block: A = I, B = -I, c = 0.
ProblemSpec identity_coupled(Index d, double tau, std::shared_ptr<const BlackBox> box) {
  std::vector<PenaltyBlock> blocks;
  blocks.push_back({-Matrix::Identity(d, d), Penalty::l1(d, tau), 1.0});
  return build_problem(Matrix::Identity(d, d), std::move(blocks), Vector::Zero(d),
                       std::move(box));
}

template <class T>
CatalogProblem assemble(std::string name, ProblemSpec spec, std::shared_ptr<T> fn,
                        double L) {
  CatalogProblem p{std::move(name), std::move(spec), std::move(fn), L, std::nullopt};
  return p;
}

// ---------------------------------------------------------------------------

class QuadraticFinite final : public BlackBox, public AnalyticModel {
 public:
  QuadraticFinite(std::vector<Matrix> Q, std::vector<Vector> t)
      : Q_(std::move(Q)), t_(std::move(t)) {}

  Index dim() const override { return t_.front().size(); }
  Regime regime() const override { return Regime::finite_sum(t_.size()); }

  double value(std::uint64_t i, const Vector& x) const override {
    const Vector r = x - t_[i];
    return 0.5 * r.dot(Q_[i] * r);
  }
  Vector sample_gradient(std::uint64_t i, const Vector& x) const override {
    return Q_[i] * (x - t_[i]);
  }
  double mean_value(const Vector& x) const override {
    double acc = 0.0;
    for (std::size_t i = 0; i < t_.size(); ++i) acc += value(i, x);
    return acc / static_cast<double>(t_.size());
  }
  Vector mean_gradient(const Vector& x) const override {
    Vector acc = Vector::Zero(x.size());
    for (std::size_t i = 0; i < t_.size(); ++i) acc += sample_gradient(i, x);
    return acc / static_cast<double>(t_.size());
  }

 private:
  std::vector<Matrix> Q_;
  std::vector<Vector> t_;
};

class QuadraticOnline final : public BlackBox, public AnalyticModel {
 public:
  QuadraticOnline(Matrix R, Vector t_bar, double L_cap, double spread, std::uint64_t seed)
      : R_(std::move(R)), t_bar_(std::move(t_bar)), L_cap_(L_cap), spread_(spread),
        seed_(seed), e_bar_(0.5 * (0.1 + L_cap)) {}

  Index dim() const override { return t_bar_.size(); }
  Regime regime() const override { return Regime::online(); }

  double value(std::uint64_t xi, const Vector& x) const override {
    const Draw s = draw(xi);
    const Vector r = R_.transpose() * (x - s.t);
    return 0.5 * r.dot(s.e.cwiseProduct(r));
  }
  Vector sample_gradient(std::uint64_t xi, const Vector& x) const override {
    const Draw s = draw(xi);
    return R_ * s.e.cwiseProduct(R_.transpose() * (x - s.t));
  }
  double mean_value(const Vector& x) const override {
    const double d = static_cast<double>(x.size());
    return 0.5 * e_bar_ * (x - t_bar_).squaredNorm() + 0.5 * spread_ * spread_ * d * e_bar_;
  }
  Vector mean_gradient(const Vector& x) const override { return e_bar_ * (x - t_bar_); }

  const Vector& t_bar() const { return t_bar_; }

 private:
  struct Draw {
    Vector e;
    Vector t;
  };

  Draw draw(std::uint64_t xi) const {
    Rng rng(mix_seed(seed_, xi));
    Draw s;
    s.e = uniform_vector(rng, dim(), 0.1, L_cap_);
    std::normal_distribution<double> gauss(0.0, 1.0);
    s.t = t_bar_;
    for (Index j = 0; j < dim(); ++j) s.t[j] += spread_ * gauss(rng);
    return s;
  }

  Matrix R_;
  Vector t_bar_;
  double L_cap_;
  double spread_;
  std::uint64_t seed_;
  double e_bar_;
};

// ---------------------------------------------------------------------------

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

class SigmoidLoss final : public BlackBox, public AnalyticModel {
 public:
  SigmoidLoss(Matrix features, Vector labels)
      : a_(std::move(features)), l_(std::move(labels)) {}

  Index dim() const override { return a_.cols(); }
  Regime regime() const override { return Regime::finite_sum(a_.rows()); }

  double value(std::uint64_t i, const Vector& x) const override {
    return logistic(-l_[i] * a_.row(i).dot(x));
  }
  Vector sample_gradient(std::uint64_t i, const Vector& x) const override {
    const double s = logistic(-l_[i] * a_.row(i).dot(x));
    return (-l_[i] * s * (1.0 - s)) * a_.row(i).transpose();
  }
  double mean_value(const Vector& x) const override {
    double acc = 0.0;
    for (Index i = 0; i < a_.rows(); ++i) acc += value(i, x);
    return acc / static_cast<double>(a_.rows());
  }
  Vector mean_gradient(const Vector& x) const override {
    const Vector margins = (a_ * x).cwiseProduct(l_);
    Vector w(a_.rows());
    for (Index i = 0; i < a_.rows(); ++i) {
      const double s = logistic(-margins[i]);
      w[i] = -l_[i] * s * (1.0 - s);
    }
    return a_.transpose() * w / static_cast<double>(a_.rows());
  }

 private:
  Matrix a_;
  Vector l_;
};

std::vector<std::pair<Index, Index>> chain_plus_shortcuts(Rng& rng, Index d) {
  std::set<std::pair<Index, Index>> edges;
  std::vector<int> degree(d, 0);
  for (Index i = 0; i + 1 < d; ++i) {
    edges.insert({i, i + 1});
    ++degree[i];
    ++degree[i + 1];
  }
  const Index shortcuts = std::max<Index>(1, d / 5);
  std::uniform_int_distribution<Index> node(0, d - 1);
  for (Index added = 0, tries = 0; added < shortcuts && tries < 100 * d; ++tries) {
    Index u = node(rng);
    Index v = node(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (v == u + 1 || degree[u] >= 4 || degree[v] >= 4) continue;
    if (!edges.insert({u, v}).second) continue;
    ++degree[u];
    ++degree[v];
    ++added;
  }
  return {edges.begin(), edges.end()};
}

// ---------------------------------------------------------------------------

class PerturbationLoss final : public BlackBox, public AnalyticModel {
 public:
  PerturbationLoss(Matrix W1, Vector b1, Matrix W2, Vector b2, std::vector<Vector> inputs,
                   std::vector<Index> labels, double beta, bool raw_hinge)
      : W1_(std::move(W1)), b1_(std::move(b1)), W2_(std::move(W2)), b2_(std::move(b2)),
        inputs_(std::move(inputs)), labels_(std::move(labels)), beta_(beta),
        raw_hinge_(raw_hinge) {}

  Index dim() const override { return W1_.cols(); }
  Regime regime() const override { return Regime::finite_sum(inputs_.size()); }

  double value(std::uint64_t i, const Vector& x) const override {
    return evaluate(i, x, nullptr);
  }
  Vector sample_gradient(std::uint64_t i, const Vector& x) const override {
    Vector g;
    evaluate(i, x, &g);
    return g;
  }
  double mean_value(const Vector& x) const override {
    double acc = 0.0;
    for (std::size_t i = 0; i < inputs_.size(); ++i) acc += value(i, x);
    return acc / static_cast<double>(inputs_.size());
  }
  Vector mean_gradient(const Vector& x) const override {
    Vector acc = Vector::Zero(x.size());
    for (std::size_t i = 0; i < inputs_.size(); ++i) acc += sample_gradient(i, x);
    return acc / static_cast<double>(inputs_.size());
  }

  /// Class scores F(z) for an unperturbed input z.
  Vector scores(const Vector& z) const {
    return W2_ * (W1_ * (z.array() - 0.5).matrix() + b1_).array().tanh().matrix() + b2_;
  }

 private:
  double evaluate(std::uint64_t i, const Vector& x, Vector* grad) const {
    const Vector z = inputs_[i] + x;
    const Vector h = W1_ * (z.array() - 0.5).matrix() + b1_;
    const Vector t = h.array().tanh().matrix();
    const Vector F = W2_ * t + b2_;
    const Index label = labels_[i];
    const Index classes = F.size();

    // Weights on each class score in dM/dF.
    Vector dM = Vector::Zero(classes);
    dM[label] = 1.0;
    double f = 0.0;
    double outer = 0.0;  // d f / d M

    if (raw_hinge_) {
      Index rival = label == 0 ? 1 : 0;
      for (Index j = 0; j < classes; ++j) {
        if (j != label && F[j] > F[rival]) rival = j;
      }
      const double margin = F[label] - F[rival];
      dM[rival] -= 1.0;
      f = std::max(margin, 0.0);
      outer = margin > 0.0 ? 1.0 : 0.0;
    } else {
      double top = -std::numeric_limits<double>::infinity();
      for (Index j = 0; j < classes; ++j) {
        if (j != label) top = std::max(top, F[j]);
      }
      double sum = 0.0;
      Vector p = Vector::Zero(classes);
      for (Index j = 0; j < classes; ++j) {
        if (j == label) continue;
        p[j] = std::exp(beta_ * (F[j] - top));
        sum += p[j];
      }
      const double margin = F[label] - (top + std::log(sum) / beta_);
      dM -= p / sum;
      const double bm = beta_ * margin;
      f = bm > 0.0 ? margin + std::log1p(std::exp(-bm)) / beta_
                   : std::log1p(std::exp(bm)) / beta_;
      outer = logistic(bm);
    }
    if (!grad) return f;

    const Vector back = W2_.transpose() * dM;
    const Vector dh = back.cwiseProduct((1.0 - t.array().square()).matrix());
    *grad = outer * (W1_.transpose() * dh);
    return f;
  }

  Matrix W1_;
  Vector b1_;
  Matrix W2_;
  Vector b2_;
  std::vector<Vector> inputs_;
  std::vector<Index> labels_;
  double beta_;
  bool raw_hinge_;
};

}  // namespace

CatalogProblem build_quadratic_sanity(Index d, std::size_t n, std::uint64_t seed, double tau,
                                      double L_cap) {
  if (d < 1 || n < 1) throw Error(Errc::InvalidArgument, "quadratic sanity needs d, n >= 1");
  if (!(L_cap > 0.1)) throw Error(Errc::InvalidArgument, "L_cap must exceed 0.1");
  Rng rng(mix_seed(seed, 0x51));
  std::vector<Matrix> Q;
  std::vector<Vector> t;
  double L = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix R = random_orthogonal(rng, d);
    const Vector e = uniform_vector(rng, d, 0.1, L_cap);
    L = std::max(L, e.maxCoeff());
    Q.push_back(R * e.asDiagonal() * R.transpose());
    t.push_back(uniform_vector(rng, d, -2.0, 2.0));
  }
  auto fn = std::make_shared<QuadraticFinite>(std::move(Q), std::move(t));
  CatalogProblem p = assemble("quadratic_sanity", identity_coupled(d, tau, fn), fn, L);
  if (n == 1 && tau == 0.0) p.optimum_hint = 0.0;
  self_test(p, seed);
  return p;
}

CatalogProblem build_quadratic_sanity_online(Index d, std::uint64_t seed, double tau,
                                             double L_cap, double spread) {
  if (d < 1) throw Error(Errc::InvalidArgument, "quadratic sanity needs d >= 1");
  if (!(L_cap > 0.1)) throw Error(Errc::InvalidArgument, "L_cap must exceed 0.1");
  if (!(spread >= 0.0)) throw Error(Errc::InvalidArgument, "spread must be >= 0");
  Rng rng(mix_seed(seed, 0x52));
  Matrix R = random_orthogonal(rng, d);
  Vector t_bar = uniform_vector(rng, d, -2.0, 2.0);
  auto fn = std::make_shared<QuadraticOnline>(std::move(R), std::move(t_bar), L_cap, spread,
                                              mix_seed(seed, 0x53));
  CatalogProblem p =
      assemble("quadratic_sanity_online", identity_coupled(d, tau, fn), fn, L_cap);
  self_test(p, seed);
  return p;
}

CatalogProblem build_graph_guided_fused_lasso(std::size_t n, Index d, std::uint64_t seed,
                                              double tau, double omega, double noise) {
  if (n < 2 || d < 2) throw Error(Errc::InvalidArgument, "fused lasso needs n, d >= 2");
  if (!(omega > 0.0)) throw Error(Errc::InvalidArgument, "omega must be positive");
  if (!(noise >= 0.0)) throw Error(Errc::InvalidArgument, "noise must be >= 0");
  Rng rng(mix_seed(seed, 0x61));
  const auto edges = chain_plus_shortcuts(rng, d);
  const Index e = static_cast<Index>(edges.size());

  Matrix A = Matrix::Zero(d + e, d);
  A.topRows(d).setIdentity();
  for (Index k = 0; k < e; ++k) {
    A(d + k, edges[k].first) = omega;
    A(d + k, edges[k].second) = -omega;
  }

  // Piecewise-constant class mean with a few active segments.
  Vector mean = Vector::Zero(d);
  std::uniform_int_distribution<int> level(-1, 1);
  const Index segment = std::max<Index>(1, d / 5);
  for (Index start = 0; start < d; start += segment) {
    const double v = level(rng);
    for (Index j = start; j < std::min(d, start + segment); ++j) mean[j] = v;
  }
  if (mean.squaredNorm() == 0.0) mean.head(segment).setOnes();
  mean *= 2.0 / std::sqrt(static_cast<double>(d));

  std::normal_distribution<double> gauss(0.0, noise / std::sqrt(static_cast<double>(d)));
  std::bernoulli_distribution coin(0.5);
  Matrix features(static_cast<Index>(n), d);
  Vector labels(static_cast<Index>(n));
  double max_sq = 0.0;
  for (Index i = 0; i < static_cast<Index>(n); ++i) {
    labels[i] = coin(rng) ? 1.0 : -1.0;
    for (Index j = 0; j < d; ++j) features(i, j) = labels[i] * mean[j] + gauss(rng);
    max_sq = std::max(max_sq, features.row(i).squaredNorm());
  }

  auto fn = std::make_shared<SigmoidLoss>(std::move(features), std::move(labels));
  std::vector<PenaltyBlock> blocks;
  blocks.push_back({-Matrix::Identity(d + e, d + e), Penalty::l1(d + e, tau), 1.0});
  ProblemSpec spec = build_problem(std::move(A), std::move(blocks), Vector::Zero(d + e), fn);
  CatalogProblem p =
      assemble("graph_guided_fused_lasso", std::move(spec), fn, kSigmoidCurvature * max_sq);
  self_test(p, seed);
  return p;
}

std::size_t window_count(Index grid, Index kernel, Index stride) {
  if (kernel < 1 || stride < 1 || kernel > grid) {
    throw Error(Errc::InvalidArgument, "need 1 <= kernel <= grid and stride >= 1");
  }
  const std::size_t side = static_cast<std::size_t>((grid - kernel) / stride + 1);
  return side * side;
}

CatalogProblem build_structured_perturbation_toy(std::uint64_t seed,
                                                 const PerturbationToyOptions& o) {
  window_count(o.grid, o.kernel, o.stride);
  if (o.n < 1 || o.hidden < 1) throw Error(Errc::InvalidArgument, "need n, hidden >= 1");
  if (!(o.beta > 0.0) || !(o.eps > 0.0)) {
    throw Error(Errc::InvalidArgument, "beta and eps must be positive");
  }
  const Index d = o.grid * o.grid;
  const Index classes = 3;
  Rng rng(mix_seed(seed, 0x71));
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix W1(o.hidden, d);
  for (Index i = 0; i < W1.size(); ++i) W1.data()[i] = 2.0 * gauss(rng) / std::sqrt(double(d));
  Vector b1(o.hidden);
  for (Index i = 0; i < o.hidden; ++i) b1[i] = 0.1 * gauss(rng);
  Matrix W2(classes, o.hidden);
  for (Index i = 0; i < W2.size(); ++i) W2.data()[i] = gauss(rng) / std::sqrt(double(o.hidden));
  const Vector b2 = Vector::Zero(classes);

  std::vector<Vector> inputs;
  for (std::size_t i = 0; i < o.n; ++i) inputs.push_back(uniform_vector(rng, d, 0.0, 1.0));

  PerturbationLoss probe(W1, b1, W2, b2, {}, {}, o.beta, o.raw_hinge);
  std::vector<Index> labels;
  Vector lo = Vector::Constant(d, -std::numeric_limits<double>::infinity());
  Vector hi = Vector::Constant(d, std::numeric_limits<double>::infinity());
  for (const Vector& a : inputs) {
    Index best = 0;
    probe.scores(a).maxCoeff(&best);
    labels.push_back(best);
    lo = lo.cwiseMax(-a);
    hi = hi.cwiseMin(Vector::Ones(d) - a);
  }

  const double w1 = spectral_norm(W1);
  const double jac = w1 * spectral_norm(W2);
  const double hess = w1 * w1 * W2.cwiseAbs().maxCoeff() * 4.0 / (3.0 * std::sqrt(3.0));
  const double L = o.raw_hinge ? std::numeric_limits<double>::quiet_NaN()
                               : 2.0 * hess + 2.0 * o.beta * jac * jac;

  auto fn = std::make_shared<PerturbationLoss>(std::move(W1), std::move(b1), std::move(W2),
                                               b2, std::move(inputs), std::move(labels),
                                               o.beta, o.raw_hinge);

  // Every block copies x: y_j = x.
  std::vector<PenaltyBlock> blocks;
  const Index side = (o.grid - o.kernel) / o.stride + 1;
  for (Index r = 0; r < side; ++r) {
    for (Index c = 0; c < side; ++c) {
      std::vector<Index> group;
      for (Index dr = 0; dr < o.kernel; ++dr) {
        for (Index dc = 0; dc < o.kernel; ++dc) {
          group.push_back((r * o.stride + dr) * o.grid + c * o.stride + dc);
        }
      }
      blocks.push_back({Matrix(), Penalty::group_l2(d, 1.0, {group}), o.tau1});
    }
  }
  blocks.push_back({Matrix(), Penalty::squared_l2(d, 1.0), o.tau2});
  blocks.push_back({Matrix(), Penalty::box_linf(lo, hi, o.eps), o.tau3});

  const Index m = static_cast<Index>(blocks.size());
  Matrix A(m * d, d);
  for (Index j = 0; j < m; ++j) {
    A.middleRows(j * d, d).setIdentity();
    blocks[j].B = Matrix::Zero(m * d, d);
    blocks[j].B.middleRows(j * d, d) = -Matrix::Identity(d, d);
  }

  ProblemSpec spec = build_problem(std::move(A), std::move(blocks), Vector::Zero(m * d), fn);
  CatalogProblem p = assemble("structured_perturbation_toy", std::move(spec), fn, L);
  self_test(p, seed);
  return p;
}

void self_test(const CatalogProblem& problem, std::uint64_t seed, int points) {
  if (!problem.model || std::isnan(problem.L)) return;
  constexpr double mu = 1e-6;
  const BlackBox& fn = *problem.spec.oracle();
  const Index d = fn.dim();
  const Regime regime = fn.regime();
  Rng rng(mix_seed(seed, 0x5e1f));
  for (int p = 0; p < points; ++p) {
    const std::uint64_t sample = sample_batch(rng, regime, 1).front();
    const Vector x = uniform_vector(rng, d, -1.0, 1.0);
    const Vector analytic = problem.model->sample_gradient(sample, x);
    Vector fd(d);
    Vector probe = x;
    for (Index j = 0; j < d; ++j) {
      probe[j] = x[j] + mu;
      const double plus = fn.value(sample, probe);
      probe[j] = x[j] - mu;
      const double minus = fn.value(sample, probe);
      probe[j] = x[j];
      fd[j] = (plus - minus) / (2.0 * mu);
    }
    const double gap = (analytic - fd).cwiseAbs().maxCoeff();
    if (!(gap <= 10.0 * problem.L * mu)) {
      throw Error(Errc::SelfTestFailed, problem.name + ": gradient gap " +
                                            std::to_string(gap) + " at sample " +
                                            std::to_string(sample));
    }
  }
}

}  // namespace zoadmm
