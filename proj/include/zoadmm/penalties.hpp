#pragma once

#include <variant>
#include <vector>

#include "zoadmm/common.hpp"

namespace zoadmm {

/// Catalog of convex nonsmooth penalties psi(y) with closed-form proximal maps.
namespace penalty {

struct Zero {};

/// tau * ||y||_1
struct L1 {
  double tau = 0.0;
};

/// tau * sum_g ||y_g||_2 over disjoint coordinate groups. An empty group list
/// means a single group covering every coordinate; coordinates outside all
/// groups carry no penalty.
struct GroupL2 {
  double tau = 0.0;
  std::vector<std::vector<Index>> groups;
};

/// tau * ||y||_2^2
struct SquaredL2 {
  double tau = 0.0;
};

/// Indicator of {lo <= y <= hi, ||y||_inf <= eps}.
struct BoxLinf {
  Vector lo;
  Vector hi;
  double eps = 0.0;
};

}  // namespace penalty

class Penalty {
 public:
  using Kind = std::variant<penalty::Zero, penalty::L1, penalty::GroupL2,
                            penalty::SquaredL2, penalty::BoxLinf>;

  static Penalty zero(Index dim);
  static Penalty l1(Index dim, double tau);
  static Penalty group_l2(Index dim, double tau,
                          std::vector<std::vector<Index>> groups = {});
  static Penalty squared_l2(Index dim, double tau);
  static Penalty box_linf(Vector lo, Vector hi, double eps);

  Index dim() const { return dim_; }
  const Kind& kind() const { return kind_; }
  std::string_view name() const;

  /// Same penalty with its magnitude multiplied by `weight` (tau for the
  /// norm penalties; the box indicator is invariant for weight > 0).
  Penalty scaled(double weight) const;

  /// Effective coordinate bounds of a box penalty: [max(lo,-eps), min(hi,eps)].
  std::pair<Vector, Vector> box_bounds() const;

 private:
  Penalty(Index dim, Kind kind);

  Index dim_ = 0;
  Kind kind_;
};

/// psi(y); +inf outside the domain of an indicator.
double eval_penalty(const Penalty& psi, const Vector& y);

/// argmin_y 0.5*||y - w||^2 + scale * psi(y), scale > 0.
Vector prox(const Penalty& psi, const Vector& w, double scale);

/// Distance from g to the subdifferential of psi at y.
/// Throws InfeasiblePoint when y lies outside the domain of psi.
double subgrad_dist(const Penalty& psi, const Vector& y, const Vector& g);

}  // namespace zoadmm
