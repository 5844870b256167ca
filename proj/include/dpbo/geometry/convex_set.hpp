#ifndef DPBO_GEOMETRY_CONVEX_SET_HPP
#define DPBO_GEOMETRY_CONVEX_SET_HPP

#include <string>

#include "dpbo/common.hpp"

namespace dpbo::geometry {

enum class SetKind { whole_space, ball, box, nonneg_orthant, simplex };

std::string to_string(SetKind kind);

// Closed convex feasible set with exact Euclidean projection.
class ConvexSet {
 public:
  static ConvexSet whole_space(int dim);
  static ConvexSet ball(Vec center, double radius);
  static ConvexSet box(Vec lo, Vec hi);
  static ConvexSet nonneg_orthant(int dim);
  static ConvexSet simplex(int dim, double scale);

  SetKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  double scale() const { return scale_; }

  Vec project(const Vec& z) const;
  bool contains(const Vec& z, double tol = 1e-9) const;

 private:
  ConvexSet(SetKind kind, int dim) : kind_(kind), dim_(dim) {}

  SetKind kind_;
  int dim_;
  Vec center_;
  double radius_ = 0.0;
  Vec lo_, hi_;
  double scale_ = 0.0;
};

inline Vec project(const ConvexSet& set, const Vec& z) {
  return set.project(z);
}

// P_{v,eta}(x) = argmin_{u in X} <v, u> + ||u - x||^2 / (2 eta), computed as
// the projection of the unconstrained minimizer x - eta v.
Vec prox_step(const ConvexSet& set, const Vec& x, const Vec& v, double eta);

// G_{v,eta}(x) = (x - P_{v,eta}(x)) / eta. Requires x in the set. Equals v
// exactly for the whole space.
Vec gradient_mapping(const ConvexSet& set, const Vec& x, const Vec& v,
                     double eta);

}  // namespace dpbo::geometry

#endif
