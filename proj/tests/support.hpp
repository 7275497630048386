#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "zoadmm/oracle.hpp"
#include "zoadmm/problem.hpp"

namespace zoadmm::test {

/// BlackBox (and analytic model) backed by plain callables.
class FunctionBox final : public BlackBox, public AnalyticModel {
 public:
  using Value = std::function<double(std::uint64_t, const Vector&)>;
  using Grad = std::function<Vector(std::uint64_t, const Vector&)>;

  FunctionBox(Index d, Regime regime, Value value, Grad grad = {})
      : d_(d), regime_(regime), value_(std::move(value)), grad_(std::move(grad)) {}

  Index dim() const override { return d_; }
  Regime regime() const override { return regime_; }
  double value(std::uint64_t i, const Vector& x) const override { return value_(i, x); }

  double mean_value(const Vector& x) const override {
    double acc = 0.0;
    for (std::uint64_t i = 0; i < regime_.n; ++i) acc += value_(i, x);
    return acc / static_cast<double>(regime_.n);
  }
  Vector mean_gradient(const Vector& x) const override {
    Vector acc = Vector::Zero(d_);
    for (std::uint64_t i = 0; i < regime_.n; ++i) acc += grad_(i, x);
    return acc / static_cast<double>(regime_.n);
  }
  Vector sample_gradient(std::uint64_t i, const Vector& x) const override {
    return grad_(i, x);
  }

 private:
  Index d_;
  Regime regime_;
  Value value_;
  Grad grad_;
};

/// f_i(x) = 0.5 x^T Q_i x + g_i^T x with the given matrices.
inline std::shared_ptr<FunctionBox> quadratic_box(std::vector<Matrix> Q, std::vector<Vector> g) {
  const Index d = Q.front().rows();
  const std::size_t n = Q.size();
  auto Qs = std::make_shared<std::vector<Matrix>>(std::move(Q));
  auto gs = std::make_shared<std::vector<Vector>>(std::move(g));
  return std::make_shared<FunctionBox>(
      d, Regime::finite_sum(n),
      [Qs, gs](std::uint64_t i, const Vector& x) {
        return 0.5 * x.dot((*Qs)[i] * x) + (*gs)[i].dot(x);
      },
      [Qs, gs](std::uint64_t i, const Vector& x) -> Vector {
        return (*Qs)[i] * x + (*gs)[i];
      });
}

inline Matrix random_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = gauss(rng);
  return m;
}

inline Vector random_vector(Rng& rng, Index d, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = gauss(rng);
  return v;
}

inline Matrix random_spd(Rng& rng, Index d, double floor = 0.1) {
  const Matrix m = random_matrix(rng, d, d);
  return m * m.transpose() / static_cast<double>(d) + floor * Matrix::Identity(d, d);
}

/// f(x, xi) = 0.5 ||x - t_xi||^2 with t_xi ~ N(0, I) seeded by xi.
inline std::shared_ptr<FunctionBox> online_quadratic(Index d) {
  auto target = [d](std::uint64_t xi) {
    Rng r(xi);
    return random_vector(r, d);
  };
  return std::make_shared<FunctionBox>(
      d, Regime::online(),
      [target](std::uint64_t xi, const Vector& x) { return 0.5 * (x - target(xi)).squaredNorm(); },
      [target](std::uint64_t xi, const Vector& x) -> Vector { return x - target(xi); });
}

inline Penalty random_penalty(Rng& rng, Index p) {
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_real_distribution<double> tau(0.05, 1.0);
  switch (kind(rng)) {
    case 0: return Penalty::l1(p, tau(rng));
    case 1: return Penalty::group_l2(p, tau(rng));
    case 2: return Penalty::squared_l2(p, tau(rng));
    default: return Penalty::box_linf(Vector::Constant(p, -1.0), Vector::Constant(p, 2.0), 1.5);
  }
}

/// Random instance: full-column-rank A (l x d), 1-3 blocks, quadratic f.
inline ProblemSpec random_spec(Rng& rng, bool online) {
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_int_distribution<int> nblocks(1, 3);
  const Index d = dim(rng);
  const Index l = d + dim(rng) - 1;
  std::shared_ptr<FunctionBox> box;
  if (online) {
    box = online_quadratic(d);
  } else {
    std::vector<Matrix> Q;
    std::vector<Vector> g;
    for (int i = 0; i < 3; ++i) {
      Q.push_back(random_spd(rng, d));
      g.push_back(random_vector(rng, d));
    }
    box = quadratic_box(Q, g);
  }
  std::vector<PenaltyBlock> blocks;
  const int m = nblocks(rng);
  for (int j = 0; j < m; ++j) {
    const Index p = dim(rng);
    blocks.push_back({random_matrix(rng, l, p), random_penalty(rng, p), 1.0});
  }
  return build_problem(random_matrix(rng, l, d), blocks, random_vector(rng, l), box);
}

}  // namespace zoadmm::test
