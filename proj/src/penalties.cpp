#include "zoadmm/penalties.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace zoadmm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_tau(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw Error(Errc::InvalidArgument, "penalty weight must be finite and >= 0");
  }
}

void require_dim(const Penalty& psi, const Vector& v) {
  if (v.size() != psi.dim()) {
    throw Error(Errc::DimensionMismatch,
                "penalty of dimension " + std::to_string(psi.dim()) +
                    " applied to vector of length " + std::to_string(v.size()));
  }
}

// Groups of a GroupL2 penalty; an empty list expands to all coordinates.
std::vector<std::vector<Index>> expand_groups(const penalty::GroupL2& g,
                                              Index dim) {
  if (!g.groups.empty()) return g.groups;
  std::vector<Index> all(static_cast<std::size_t>(dim));
  std::iota(all.begin(), all.end(), Index{0});
  return {std::move(all)};
}

double group_norm(const Vector& v, const std::vector<Index>& group) {
  double s = 0.0;
  for (Index i : group) s += v[i] * v[i];
  return std::sqrt(s);
}

}  // namespace

Penalty::Penalty(Index dim, Kind kind) : dim_(dim), kind_(std::move(kind)) {
  if (dim < 0) throw Error(Errc::InvalidArgument, "negative penalty dimension");
}

Penalty Penalty::zero(Index dim) { return Penalty(dim, penalty::Zero{}); }

Penalty Penalty::l1(Index dim, double tau) {
  require_tau(tau);
  return Penalty(dim, penalty::L1{tau});
}

Penalty Penalty::group_l2(Index dim, double tau,
                          std::vector<std::vector<Index>> groups) {
  require_tau(tau);
  std::vector<char> seen(static_cast<std::size_t>(dim), 0);
  for (const auto& g : groups) {
    if (g.empty()) throw Error(Errc::InvalidArgument, "empty group");
    for (Index i : g) {
      if (i < 0 || i >= dim) {
        throw Error(Errc::IndexOutOfRange, "group index " + std::to_string(i));
      }
      if (seen[static_cast<std::size_t>(i)]++) {
        throw Error(Errc::InvalidArgument, "groups of one block must be disjoint");
      }
    }
  }
  return Penalty(dim, penalty::GroupL2{tau, std::move(groups)});
}

Penalty Penalty::squared_l2(Index dim, double tau) {
  require_tau(tau);
  return Penalty(dim, penalty::SquaredL2{tau});
}

Penalty Penalty::box_linf(Vector lo, Vector hi, double eps) {
  if (lo.size() != hi.size()) {
    throw Error(Errc::DimensionMismatch, "box bounds have different lengths");
  }
  if (!(eps > 0.0)) throw Error(Errc::InvalidArgument, "box eps must be > 0");
  for (Index i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) {
      throw Error(Errc::InvalidArgument, "box requires lo <= hi elementwise");
    }
    if (std::max(lo[i], -eps) > std::min(hi[i], eps)) {
      throw Error(Errc::InvalidArgument,
                  "box and eps-ball do not intersect at coordinate " +
                      std::to_string(i));
    }
  }
  const Index dim = lo.size();
  return Penalty(dim, penalty::BoxLinf{std::move(lo), std::move(hi), eps});
}

std::string_view Penalty::name() const {
  return std::visit(Overloaded{
                        [](const penalty::Zero&) { return "zero"; },
                        [](const penalty::L1&) { return "l1"; },
                        [](const penalty::GroupL2&) { return "group_l2"; },
                        [](const penalty::SquaredL2&) { return "squared_l2"; },
                        [](const penalty::BoxLinf&) { return "box_linf"; },
                    },
                    kind_);
}

Penalty Penalty::scaled(double weight) const {
  require_tau(weight);
  if (weight == 0.0) return Penalty::zero(dim_);
  Penalty out = *this;
  std::visit(Overloaded{
                 [](penalty::Zero&) {},
                 [&](penalty::L1& p) { p.tau *= weight; },
                 [&](penalty::GroupL2& p) { p.tau *= weight; },
                 [&](penalty::SquaredL2& p) { p.tau *= weight; },
                 [](penalty::BoxLinf&) {},
             },
             out.kind_);
  return out;
}

std::pair<Vector, Vector> Penalty::box_bounds() const {
  const auto* box = std::get_if<penalty::BoxLinf>(&kind_);
  if (box == nullptr) throw Error(Errc::InvalidArgument, "not a box penalty");
  return {box->lo.cwiseMax(-box->eps), box->hi.cwiseMin(box->eps)};
}

double eval_penalty(const Penalty& psi, const Vector& y) {
  require_dim(psi, y);
  return std::visit(
      Overloaded{
          [](const penalty::Zero&) { return 0.0; },
          [&](const penalty::L1& p) { return p.tau * y.lpNorm<1>(); },
          [&](const penalty::GroupL2& p) {
            double s = 0.0;
            for (const auto& g : expand_groups(p, psi.dim())) {
              s += group_norm(y, g);
            }
            return p.tau * s;
          },
          [&](const penalty::SquaredL2& p) { return p.tau * y.squaredNorm(); },
          [&](const penalty::BoxLinf&) {
            const auto [lo, hi] = psi.box_bounds();
            const bool inside = (y.array() >= lo.array()).all() &&
                                (y.array() <= hi.array()).all();
            return inside ? 0.0 : std::numeric_limits<double>::infinity();
          },
      },
      psi.kind());
}

Vector prox(const Penalty& psi, const Vector& w, double scale) {
  require_dim(psi, w);
  if (!(scale > 0.0)) throw Error(Errc::InvalidArgument, "prox scale must be > 0");
  return std::visit(
      Overloaded{
          [&](const penalty::Zero&) -> Vector { return w; },
          [&](const penalty::L1& p) -> Vector {
            const double t = p.tau * scale;
            Vector out(w.size());
            for (Index i = 0; i < w.size(); ++i) {
              const double mag = std::abs(w[i]) - t;
              out[i] = mag > 0.0 ? std::copysign(mag, w[i]) : 0.0;
            }
            return out;
          },
          [&](const penalty::GroupL2& p) -> Vector {
            const double t = p.tau * scale;
            Vector out = w;
            for (const auto& g : expand_groups(p, psi.dim())) {
              const double nrm = group_norm(w, g);
              const double shrink = nrm > t ? 1.0 - t / nrm : 0.0;
              for (Index i : g) out[i] = shrink * w[i];
            }
            return out;
          },
          [&](const penalty::SquaredL2& p) -> Vector {
            return w / (1.0 + 2.0 * p.tau * scale);
          },
          [&](const penalty::BoxLinf&) -> Vector {
            const auto [lo, hi] = psi.box_bounds();
            return w.cwiseMax(lo).cwiseMin(hi);
          },
      },
      psi.kind());
}

double subgrad_dist(const Penalty& psi, const Vector& y, const Vector& g) {
  require_dim(psi, y);
  require_dim(psi, g);
  return std::visit(
      Overloaded{
          [&](const penalty::Zero&) { return g.norm(); },
          [&](const penalty::L1& p) {
            double s = 0.0;
            for (Index i = 0; i < y.size(); ++i) {
              double r;
              if (y[i] != 0.0) {
                r = g[i] - std::copysign(p.tau, y[i]);
              } else {
                r = std::max(std::abs(g[i]) - p.tau, 0.0);
              }
              s += r * r;
            }
            return std::sqrt(s);
          },
          [&](const penalty::GroupL2& p) {
            // Coordinates outside every group contribute the singleton {0}.
            std::vector<char> covered(static_cast<std::size_t>(y.size()), 0);
            double s = 0.0;
            for (const auto& grp : expand_groups(p, psi.dim())) {
              const double ny = group_norm(y, grp);
              if (ny > 0.0) {
                for (Index i : grp) {
                  const double r = g[i] - p.tau * y[i] / ny;
                  s += r * r;
                }
              } else {
                const double r = std::max(group_norm(g, grp) - p.tau, 0.0);
                s += r * r;
              }
              for (Index i : grp) covered[static_cast<std::size_t>(i)] = 1;
            }
            for (Index i = 0; i < y.size(); ++i) {
              if (!covered[static_cast<std::size_t>(i)]) s += g[i] * g[i];
            }
            return std::sqrt(s);
          },
          [&](const penalty::SquaredL2& p) {
            return (g - 2.0 * p.tau * y).norm();
          },
          [&](const penalty::BoxLinf&) {
            const auto [lo, hi] = psi.box_bounds();
            double s = 0.0;
            for (Index i = 0; i < y.size(); ++i) {
              if (y[i] < lo[i] || y[i] > hi[i]) {
                throw Error(Errc::InfeasiblePoint,
                            "coordinate " + std::to_string(i) +
                                " outside the box");
              }
              // Normal cone: {0} inside, [0,inf) at hi, (-inf,0] at lo.
              double r = g[i];
              if (lo[i] == hi[i]) {
                r = 0.0;
              } else if (y[i] == hi[i]) {
                r = std::min(g[i], 0.0);
              } else if (y[i] == lo[i]) {
                r = std::max(g[i], 0.0);
              }
              s += r * r;
            }
            return std::sqrt(s);
          },
      },
      psi.kind());
}

}  // namespace zoadmm
