#pragma once

#include "polyproj/geometry.hpp"

#include <Eigen/Core>

#include <vector>

namespace polyproj {

using Gradients = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// Wachspress barycentric coordinates on a strictly convex polygon.
//
// Interior evaluation uses the rational form w_i / sum_j w_j with
//   w_i = A(x_{i-1}, x_i, x_{i+1}) / (A(x_{i-1}, x_i, x) A(x_i, x_{i+1}, x)).
// Points closer than 1e-12 * diam to an edge line are rejected; boundary
// values come from the piecewise-linear trace instead.

/// Throws Error(PointOnBoundary) unless x is strictly inside p.
void require_interior(const Polygon& p, const Point& x);
bool is_interior(const Polygon& p, const Point& x);

Eigen::VectorXd wachspress_values(const Polygon& p, const Point& x);
Gradients wachspress_gradients(const Polygon& p, const Point& x);
void wachspress_values_gradients(const Polygon& p, const Point& x, Eigen::VectorXd& values,
                                 Gradients& gradients);

/// Values at parameter t in [0, 1] along edge (i, i+1).
Eigen::VectorXd wachspress_trace(const Polygon& p, int edge, double t);
/// Values at a point on the boundary; throws PointNotOnBoundary otherwise.
Eigen::VectorXd wachspress_trace(const Polygon& p, const Point& x);

/// Locates x on the boundary of p: (edge, t). Throws PointNotOnBoundary.
std::pair<int, double> locate_on_boundary(const Polygon& p, const Point& x);

/// Shape functions of order 1 (Wachspress) or 2 (quadratic serendipity built
/// from pairwise products of Wachspress coordinates). Degrees of freedom are
/// the vertices, followed for order 2 by the edge midpoints in edge order.
class ElementBasis {
 public:
  static ElementBasis wachspress(Polygon polygon);
  static ElementBasis serendipity(Polygon polygon);
  static ElementBasis make(Polygon polygon, int order);

  const Polygon& polygon() const { return polygon_; }
  int order() const { return order_; }
  int size() const { return order_ == 1 ? polygon_.size() : 2 * polygon_.size(); }

  /// Location of dof i.
  Point node(int i) const;
  std::vector<Point> nodes() const;

  Eigen::VectorXd values(const Point& x) const;
  Gradients gradients(const Point& x) const;
  void evaluate(const Point& x, Eigen::VectorXd& values, Gradients& gradients) const;

  /// Boundary values along edge (i, i+1) at parameter t.
  Eigen::VectorXd trace(int edge, double t) const;
  Eigen::VectorXd trace(const Point& x) const;

  /// Serendipity coefficients: 2n x n(n+1)/2, column k is the product
  /// phi_a phi_b for the k-th pair (a <= b) in pair_index order. Empty for order 1.
  const Eigen::MatrixXd& coefficients() const { return coefficients_; }

  /// Column index of pair (a, b), a <= b, in coefficients().
  int pair_index(int a, int b) const;

  /// Condition number of the scaled quadratic Vandermonde at the 2n nodes
  /// (order 2 only, 1 otherwise).
  double condition() const { return condition_; }

 private:
  ElementBasis(Polygon polygon, int order) : polygon_(std::move(polygon)), order_(order) {}

  Polygon polygon_;
  int order_;
  Eigen::MatrixXd coefficients_;
  double condition_ = 1.0;
};

}  // namespace polyproj
