#include "dpbo/geometry/convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace dpbo::geometry {

std::string to_string(SetKind kind) {
  switch (kind) {
    case SetKind::whole_space:
      return "whole_space";
    case SetKind::ball:
      return "ball";
    case SetKind::box:
      return "box";
    case SetKind::nonneg_orthant:
      return "nonneg_orthant";
    case SetKind::simplex:
      return "simplex";
  }
  return "?";
}

ConvexSet ConvexSet::whole_space(int dim) {
  require(dim >= 1, ErrorCode::invalid_argument, "ConvexSet: dim must be >= 1");
  return ConvexSet(SetKind::whole_space, dim);
}

ConvexSet ConvexSet::ball(Vec center, double radius) {
  require(center.size() >= 1, ErrorCode::invalid_argument,
          "ConvexSet::ball: empty center");
  require(radius > 0.0, ErrorCode::invalid_argument,
          "ConvexSet::ball: radius must be positive");
  ConvexSet s(SetKind::ball, static_cast<int>(center.size()));
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

ConvexSet ConvexSet::box(Vec lo, Vec hi) {
  require(lo.size() == hi.size() && lo.size() >= 1,
          ErrorCode::invalid_argument, "ConvexSet::box: lo/hi size mismatch");
  require((lo.array() <= hi.array()).all(), ErrorCode::invalid_argument,
          "ConvexSet::box: need lo <= hi componentwise");
  ConvexSet s(SetKind::box, static_cast<int>(lo.size()));
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

ConvexSet ConvexSet::nonneg_orthant(int dim) {
  require(dim >= 1, ErrorCode::invalid_argument, "ConvexSet: dim must be >= 1");
  return ConvexSet(SetKind::nonneg_orthant, dim);
}

ConvexSet ConvexSet::simplex(int dim, double scale) {
  require(dim >= 1, ErrorCode::invalid_argument, "ConvexSet: dim must be >= 1");
  require(scale > 0.0, ErrorCode::invalid_argument,
          "ConvexSet::simplex: scale must be positive");
  ConvexSet s(SetKind::simplex, dim);
  s.scale_ = scale;
  return s;
}

namespace {

// Sort-based projection onto {u >= 0, sum u = scale}.
Vec project_simplex(const Vec& z, double scale) {
  const int d = static_cast<int>(z.size());
  std::vector<double> u(z.data(), z.data() + d);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double tau = 0.0;
  int rho = 0;
  for (int j = 0; j < d; ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - scale) / (j + 1);
    if (u[j] - candidate > 0.0) {
      rho = j + 1;
      tau = candidate;
    }
  }
  (void)rho;
  Vec out(d);
  for (int i = 0; i < d; ++i) out[i] = std::max(z[i] - tau, 0.0);
  return out;
}

}  // namespace

Vec ConvexSet::project(const Vec& z) const {
  require(static_cast<int>(z.size()) == dim_, ErrorCode::dimension_mismatch,
          "ConvexSet::project: vector has dimension " +
              std::to_string(z.size()) + ", set has " + std::to_string(dim_));
  switch (kind_) {
    case SetKind::whole_space:
      return z;
    case SetKind::ball: {
      const Vec diff = z - center_;
      const double norm = diff.norm();
      if (norm <= radius_) return z;
      return center_ + diff * (radius_ / norm);
    }
    case SetKind::box:
      return z.cwiseMax(lo_).cwiseMin(hi_);
    case SetKind::nonneg_orthant:
      return z.cwiseMax(0.0);
    case SetKind::simplex:
      return project_simplex(z, scale_);
  }
  throw Error(ErrorCode::invalid_argument, "ConvexSet::project: bad kind");
}

bool ConvexSet::contains(const Vec& z, double tol) const {
  require(static_cast<int>(z.size()) == dim_, ErrorCode::dimension_mismatch,
          "ConvexSet::contains: dimension mismatch");
  const double scale_tol = tol * (1.0 + z.norm());
  switch (kind_) {
    case SetKind::whole_space:
      return true;
    case SetKind::ball:
      return (z - center_).norm() <= radius_ + scale_tol;
    case SetKind::box:
      return (z.array() >= lo_.array() - scale_tol).all() &&
             (z.array() <= hi_.array() + scale_tol).all();
    case SetKind::nonneg_orthant:
      return (z.array() >= -scale_tol).all();
    case SetKind::simplex:
      return (z.array() >= -scale_tol).all() &&
             std::abs(z.sum() - scale_) <= scale_tol;
  }
  return false;
}

Vec prox_step(const ConvexSet& set, const Vec& x, const Vec& v, double eta) {
  require(eta > 0.0, ErrorCode::invalid_argument,
          "prox_step: eta must be positive");
  return set.project(x - eta * v);
}

Vec gradient_mapping(const ConvexSet& set, const Vec& x, const Vec& v,
                     double eta) {
  require(eta > 0.0, ErrorCode::invalid_argument,
          "gradient_mapping: eta must be positive");
  require(set.contains(x), ErrorCode::precondition_violated,
          "gradient_mapping: x must lie in the feasible set");
  if (set.kind() == SetKind::whole_space) return v;
  return (x - prox_step(set, x, v, eta)) / eta;
}

}  // namespace dpbo::geometry
